"""Spatial sampling, association and the distance/angle laws of the RIS network.

The typical user sits at the origin.  Base stations form a homogeneous PPP
restricted to the annulus ``O(R_L, R_max)`` (the user is blocked, so only
BSs outside the RIS ball are considered), and the RIS is uniform in the
ball ``O(0, R_L)``.  The typical user is served by the BS nearest to the
RIS.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError

__all__ = [
    "Point",
    "LinkGeometry",
    "Realization",
    "default_r_max",
    "sample_ppp_annulus",
    "sample_ris",
    "nearest_bs_pdf",
    "ris_distance_pdf",
    "compute_link_angle",
    "split_angle",
    "associate",
    "sample_realization",
]

# beyond this many mean nearest-BS distances the simulator uses the interference mean
DEFAULT_R_MAX_FACTOR = 30.0


class Point(NamedTuple):
    x: float
    y: float

    @property
    def norm(self):
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class LinkGeometry:
    """One BS -> RIS -> user reflection path, measured at the RIS centre."""

    r_br: float
    r_ru: float
    theta: float
    theta_br: float
    theta_ru: float

    @classmethod
    def from_angle(cls, r_br, r_ru, theta, rho_a):
        theta_br, theta_ru = split_angle(theta, rho_a)
        return cls(float(r_br), float(r_ru), float(theta), float(theta_br), float(theta_ru))


@dataclass(frozen=True)
class Realization:
    """One sampled network snapshot (geometry only; fading is drawn later).

    """

    bs_points: np.ndarray
    ris: Point
    ris_orientation: float
    associated_index: int
    rng_seed: int

    @property
    def serving_bs(self):
        return Point(*self.bs_points[self.associated_index])


def default_r_max(density, factor=DEFAULT_R_MAX_FACTOR):
    """PPP truncation radius ``factor / sqrt(pi * density)``."""
    return factor / math.sqrt(math.pi * density)


def sample_ppp_annulus(density, r_min, r_max, rng):
    """Homogeneous PPP on the annulus ``r_min < |x| < r_max``.

    Returns an ``(n, 2)`` array; ``n`` is Poisson with mean
    ``density * pi * (r_max**2 - r_min**2)``.
    """
    if not (0.0 <= r_min < r_max) or density < 0:
        raise DomainError(f"degenerate annulus ({r_min}, {r_max}) or density {density}")
    mean = density * math.pi * (r_max**2 - r_min**2)
    n = rng.poisson(mean)
    return _uniform_annulus(n, r_min, r_max, rng)


def _uniform_annulus(n, r_min, r_max, rng):
    r = np.sqrt(r_min**2 + rng.random(n) * (r_max**2 - r_min**2))
    phi = rng.random(n) * (2.0 * np.pi)
    return np.column_stack((r * np.cos(phi), r * np.sin(phi)))


def sample_ris(R_L, rng):
    """Uniform point in the disk of radius ``R_L`` about the origin."""
    r = R_L * math.sqrt(rng.random())
    phi = 2.0 * math.pi * rng.random()
    return Point(r * math.cos(phi), r * math.sin(phi))


def ris_distance_pdf(x, R_L):
    """Density ``2x / R_L**2`` of the RIS-user distance on ``[0, R_L]``."""
    x = np.asarray(x, dtype=float)
    return np.where((x >= 0) & (x <= R_L), 2.0 * x / R_L**2, 0.0)


def nearest_bs_pdf(x, n, density):
    """Density of the distance to the ``n``-th nearest point of a planar PPP."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    x = np.asarray(x, dtype=float)
    n = int(n)
    lam = math.pi * density
    # log form keeps large n and x finite
    with np.errstate(divide="ignore"):
        logpdf = (
            math.log(2.0) + n * math.log(lam) - math.lgamma(n)
            + (2 * n - 1) * np.log(x) - lam * x**2
        )
    return np.where(x > 0, np.exp(logpdf), 0.0)


def compute_link_angle(bs, ris, user=(0.0, 0.0)):
    """Angle at the RIS between the rays towards the BS and towards the user.

    With ``psi_1`` the bearing of ``ris - user`` and ``psi_2`` the bearing of
    ``bs - ris``, this is ``|pi - |psi_2 - psi_1||`` folded into ``[0, pi]``.
    It is 0 when the BS lies straight behind the user as seen from the RIS
    and ``pi`` when the RIS sits between them.  Arrays broadcast over the
    leading axes; the last axis holds ``(x, y)``.
    """
    bs = np.asarray(bs, dtype=float)
    ris = np.asarray(ris, dtype=float)
    user = np.asarray(user, dtype=float)
    to_bs = bs - ris
    to_user = user - ris
    norms_bs = np.hypot(to_bs[..., 0], to_bs[..., 1])
    norms_user = np.hypot(to_user[..., 0], to_user[..., 1])
    if np.any(norms_bs == 0) or np.any(norms_user == 0):
        raise DomainError("coincident points have no defined link angle")
    cross = to_bs[..., 0] * to_user[..., 1] - to_bs[..., 1] * to_user[..., 0]
    dot = to_bs[..., 0] * to_user[..., 0] + to_bs[..., 1] * to_user[..., 1]
    theta = np.arctan2(np.abs(cross), dot)
    return float(theta) if theta.ndim == 0 else theta


def split_angle(theta, rho_a):
    """Split ``theta`` into incidence ``rho_a * theta`` and reflection ``(1 - rho_a) * theta``."""
    if not 0.0 < rho_a < 1.0:
        raise DomainError(f"rho_a must lie in (0, 1), got {rho_a}")
    return rho_a * theta, (1.0 - rho_a) * theta


def associate(bs_points, ris):
    """Index of the BS nearest to the RIS (highest received power)."""
    bs_points = np.asarray(bs_points, dtype=float)
    if len(bs_points) == 0:
        raise DomainError("no base stations to associate with")
    d2 = np.sum((bs_points - np.asarray(ris, dtype=float)) ** 2, axis=1)
    return int(np.argmin(d2))


def ris_axis_orientation(bs, ris, rho_a, user=(0.0, 0.0)):
    """Bearing of the RIS axis that realises the incidence/reflection split.

    The RIS normal is rotated ``rho_a * theta`` from the ray towards the BS,
    towards the ray to the user; the axis is perpendicular to the normal.
    """
    to_bs = np.subtract(bs, ris)
    to_user = np.subtract(user, ris)
    b_bs = math.atan2(to_bs[1], to_bs[0])
    b_user = math.atan2(to_user[1], to_user[0])
    delta = (b_user - b_bs + math.pi) % (2.0 * math.pi) - math.pi
    theta = abs(delta)
    normal = b_bs + math.copysign(rho_a * theta, delta if delta != 0 else 1.0)
    return (normal - math.pi / 2.0) % (2.0 * math.pi)


def sample_realization(lambda_b, R_L, rng, r_max=None, rho_a=0.5, seed=0, max_redraws=1000):
    """Draw BSs, RIS and the association for one trial.

    An empty BS set (possible only for very small densities) is redrawn.
    """
    if r_max is None:
        r_max = default_r_max(lambda_b)
    ris = sample_ris(R_L, rng)
    for _ in range(max_redraws):
        bs = sample_ppp_annulus(lambda_b, R_L, r_max, rng)
        if len(bs):
            break
    else:
        raise DomainError("BS process stayed empty; density too small for the window")
    idx = associate(bs, ris)
    orientation = ris_axis_orientation(bs[idx], ris, rho_a)
    return Realization(bs, ris, orientation, idx, int(seed))
