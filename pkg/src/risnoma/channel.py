"""Path-loss models and Nakagami-m fading.

Three RIS path-loss models are provided:

``pathloss_ris_exact``
    the physical-optics line integral over a ``2L`` linear surface, with the
    anomalous-reflection phase profile;
``pathloss_ris_approx``
    its far-field product-of-distances approximation
    ``C_RIS**2 * (r_br * r_ru)**-alpha_t``;
``c_ris_e``
    the angle-averaged coefficient ``E[C_RIS**2]`` for a BS-RIS-user angle
    uniform on ``(0, pi)``.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import sgkernel
from .errors import DomainError
from .geometry import LinkGeometry, Point

__all__ = [
    "RisConfig",
    "FadingSpec",
    "DEFAULT_WAVENUMBER",
    "pathloss_direct",
    "pathloss_ris_exact",
    "pathloss_ris_approx",
    "ris_coefficient",
    "place_link",
    "c_ris_e",
    "sample_fading_power",
    "gamma_cdf_bound",
]

# 3 GHz carrier
DEFAULT_WAVENUMBER = 2.0 * math.pi / 0.1
C_RIS_MODES = ("paper", "corrected", "numeric")


@dataclass(frozen=True)
class RisConfig:
    L: float
    k: float = DEFAULT_WAVENUMBER
    phi0: float = 0.0
    rho_a: float = 0.5

    def __post_init__(self):
        if not (self.L > 0 and self.k > 0):
            raise DomainError(f"RIS half-length and wavenumber must be positive (L={self.L}, k={self.k})")
        if not 0.0 < self.rho_a < 1.0:
            raise DomainError(f"rho_a must lie in (0, 1), got {self.rho_a}")

    @classmethod
    def from_params(cls, p, **kwargs):
        return cls(L=p.L, rho_a=p.rho_a, **kwargs)


@dataclass(frozen=True)
class FadingSpec:
    """Nakagami-m fading with unit-mean power gain."""

    m: int

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"Nakagami order must be a positive integer, got {self.m}")

    @property
    def eta(self):
        """``m * (m!)**(-1/m)``, the rate in the exponential CDF bound."""
        return self.m * math.exp(-math.lgamma(self.m + 1) / self.m)


def pathloss_direct(distance, C=1.0, alpha_c=4.0):
    """``C * d**-alpha_c``."""
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0):
        raise DomainError("direct-link distance must be positive")
    out = C * d ** (-alpha_c)
    return float(out) if out.ndim == 0 else out


def ris_coefficient(theta_br, theta_ru, L):
    """``(L / 4 pi) * (cos theta_br + cos theta_ru)`` with angles clipped to ``[0, pi/2]``."""
    tb = np.clip(theta_br, 0.0, 0.5 * np.pi)
    tr = np.clip(theta_ru, 0.0, 0.5 * np.pi)
    return L / (4.0 * np.pi) * (np.cos(tb) + np.cos(tr))


def pathloss_ris_approx(r_br, r_ru, theta_br, theta_ru, cfg, alpha_t):
    """Far-field RIS path gain ``C_RIS**2 * (r_br * r_ru)**-alpha_t``.

    Angles beyond ``pi/2`` (possible for a lopsided split of a wide angle)
    are clipped to grazing incidence so the gain stays physical.
    """
    r_br = np.asarray(r_br, dtype=float)
    r_ru = np.asarray(r_ru, dtype=float)
    if np.any(r_br <= 0) or np.any(r_ru <= 0):
        raise DomainError("RIS link distances must be positive")
    out = ris_coefficient(theta_br, theta_ru, cfg.L) ** 2 * (r_br * r_ru) ** (-alpha_t)
    return float(out) if np.ndim(out) == 0 else out


def place_link(geom, user=(0.0, 0.0)):
    """Concrete ``(bs, ris, ris_orientation)`` realising a :class:`LinkGeometry`.

    The RIS axis is horizontal (orientation 0) with its normal pointing up;
    the BS and the user sit on opposite sides of the normal.
    """
    ux, uy = user
    ris = Point(ux - geom.r_ru * math.sin(geom.theta_ru), uy - geom.r_ru * math.cos(geom.theta_ru))
    bs = Point(ris.x - geom.r_br * math.sin(geom.theta_br), ris.y + geom.r_br * math.cos(geom.theta_br))
    return bs, ris, 0.0


def pathloss_ris_exact(geom, bs, ris, ris_orientation, cfg, tol=1e-10, user=(0.0, 0.0)):
    """Physical-optics RIS path gain ``|int Psi(x) exp(-j k Omega(x)) dx|**2``.

    Every point ``x`` of the surface uses its own distances and angles.  The
    phase profile cancels the linear phase at the centre,
    ``Theta(x) = (sin theta_br(0) - sin theta_ru(0)) x + phi0 / k``, with the
    sines signed by the direction in which each path lengthens along the axis.
    ``tol`` is relative to the aperture-scale magnitude of the integral.
    """
    bs = np.asarray(bs, dtype=float)
    ris = np.asarray(ris, dtype=float)
    user = np.asarray(user, dtype=float)
    t = np.array([math.cos(ris_orientation), math.sin(ris_orientation)])
    n = np.array([-t[1], t[0]])
    r_br0 = float(np.hypot(*(bs - ris)))
    r_ru0 = float(np.hypot(*(user - ris)))
    if r_br0 == 0 or r_ru0 == 0:
        raise DomainError("coincident BS/RIS/user points")
    if geom is not None and not (
        math.isclose(geom.r_br, r_br0, rel_tol=1e-9) and math.isclose(geom.r_ru, r_ru0, rel_tol=1e-9)
    ):
        raise DomainError("LinkGeometry distances disagree with the supplied points")
    if np.dot(bs - ris, n) < 0:
        n = -n
    u_b = (bs - ris) / r_br0
    u_u = (user - ris) / r_ru0
    slope = -float(np.dot(t, u_b + u_u))
    k = cfg.k

    def parts(x):
        p = ris + x * t
        vb = bs - p
        vu = user - p
        rb = math.hypot(vb[0], vb[1])
        ru = math.hypot(vu[0], vu[1])
        amp = (np.dot(vb, n) / rb + np.dot(vu, n) / ru) / (8.0 * math.pi * math.sqrt(rb * ru))
        # the constant r_br0 + r_ru0 is removed; it only rotates the phase
        omega = (rb - r_br0) + (ru - r_ru0) - (slope * x + cfg.phi0 / k)
        return amp, k * omega

    scale = 2.0 * cfg.L * abs(parts(0.0)[0]) or 1.0
    abs_tol = tol * scale
    re = sgkernel.integrate_1d(lambda x: (lambda a, ph: a * math.cos(ph))(*parts(x)), -cfg.L, cfg.L, abs_tol)
    im = sgkernel.integrate_1d(lambda x: (lambda a, ph: -a * math.sin(ph))(*parts(x)), -cfg.L, cfg.L, abs_tol)
    return re * re + im * im


def c_ris_e(cfg, mode="paper", clamped=False):
    """Angle-averaged squared RIS coefficient ``E[C_RIS**2]``.

    Parameters
    ----------
    cfg : RisConfig
    mode : {"paper", "corrected", "numeric"}
        ``paper`` uses the printed closed form with denominator
        ``4 rho - 12 rho**2 + rho**3``; ``corrected`` uses
        ``4 rho - 12 rho**2 + 8 rho**3`` (which is what the average actually
        integrates to); ``numeric`` integrates
        ``(L/4pi)**2 * E[(cos(rho theta) + cos((1-rho) theta))**2]`` over
        ``theta ~ U(0, pi)``.
    clamped : bool
        Only for ``numeric``: clip the split angles to ``[0, pi/2]`` first, as
        the simulator does.
    """
    rho = cfg.rho_a
    if not 0.0 < rho < 1.0:
        raise DomainError(f"rho_a must lie in (0, 1), got {rho}")
    L = cfg.L
    if mode == "paper":
        return L**2 / (16.0 * math.pi**3) * (
            math.pi + math.sin(2.0 * rho * math.pi) / (4.0 * rho - 12.0 * rho**2 + rho**3)
        )
    if mode == "corrected":
        # sin(2 pi rho) / (1 - 2 rho) = pi * sinc(2 rho - 1), finite at rho = 1/2
        ratio = math.pi * float(np.sinc(2.0 * rho - 1.0)) / (4.0 * rho * (1.0 - rho))
        return L**2 / (16.0 * math.pi**3) * (math.pi + ratio)
    if mode == "numeric":
        def integrand(theta):
            return float(ris_coefficient(rho * theta, (1.0 - rho) * theta, 1.0) ** 2) if clamped else (
                (math.cos(rho * theta) + math.cos((1.0 - rho) * theta)) / (4.0 * math.pi)
            ) ** 2
        mean = sgkernel.integrate_1d(integrand, 0.0, math.pi, 1e-14) / math.pi
        return L**2 * mean
    raise ValueError(f"unknown mode {mode!r}; expected one of {C_RIS_MODES}")


def sample_fading_power(spec, rng, size=None):
    """Nakagami-m power gain ``|h|**2 ~ Gamma(m, 1/m)`` (unit mean)."""
    return rng.gamma(spec.m, 1.0 / spec.m, size)


def gamma_cdf_bound(x, spec):
    """``(1 - exp(-eta x))**m``.

    For unit-mean Gamma(m) power this sits *below* the true CDF (it is the
    lower member of Alzer's pair of bounds), so ``1 - bound`` over-estimates
    the tail probability.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("gamma_cdf_bound needs x >= 0")
    out = (-np.expm1(-spec.eta * x)) ** spec.m
    return float(out) if out.ndim == 0 else out
