"""Closed-form coverage engine.

Interference Laplace transforms, the auxiliary expectations that set the
SIC-order thresholds, and the coverage probabilities of the typical
(RIS-served) and connected users.

Conventions
-----------
* Interferer fading uses the typical-link order ``m_t`` wherever a bare
  Nakagami order appears, because interference in both SINRs travels over
  ``h_t`` links.
* The squared RIS coefficient that multiplies ``P_b`` in the typical-user
  expressions is the angle average ``E[C_RIS**2]`` returned by
  :func:`risnoma.channel.c_ris_e`; it is not squared a second time.
* Results are clamped to ``[0, 1]``; the unclamped value is logged and also
  available through ``return_raw``.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import sgkernel
from .channel import FadingSpec, RisConfig, c_ris_e
from .errors import ConfigError, DomainError
from .params import NetworkParams

__all__ = [
    "NetworkParams",
    "CoveragePair",
    "laplace_connected",
    "laplace_typical_ris",
    "mean_interference_connected",
    "gamma_c_e",
    "gamma_t_e",
    "c_t_e",
    "upsilon",
    "coverage_typical",
    "coverage_typical_closed",
    "coverage_connected_closed",
    "coverage_pair",
]

log = logging.getLogger(__name__)

CANCELLATION_LIMIT = 1e6


@dataclass(frozen=True)
class CoveragePair:
    p_typical: float
    p_connected: float
    raw_typical: float
    raw_connected: float


def _hyp(alpha, m, z):
    delta = 2.0 / alpha
    return sgkernel.gauss2f1(-delta, m, 1.0 - delta, z)


def _clamp(value, label):
    if 0.0 <= value <= 1.0:
        return value
    clamped = min(max(value, 0.0), 1.0)
    log.info("%s clamped from %.6g to %g", label, value, clamped)
    return clamped


def _alternating_sum(terms, label):
    total = math.fsum(terms)
    biggest = max(abs(t) for t in terms)
    if biggest > 0 and (total == 0 or biggest / abs(total) > CANCELLATION_LIMIT):
        log.warning(
            "%s: alternating binomial sum loses precision (max term %.3g, total %.3g)",
            label, biggest, total,
        )
    return total


def _ris_constant(p, c_mode):
    return c_ris_e(RisConfig.from_params(p), c_mode)


def laplace_connected(s, p):
    """Laplace transform of the connected user's interference at ``s``."""
    if s < 0:
        raise DomainError("Laplace argument must be nonnegative")
    spread = math.pi * p.lambda_b * p.r_c**2
    scale = p.P_b * p.C / (p.m_t * p.r_c**p.alpha_c)
    return math.exp(-spread * (_hyp(p.alpha_c, p.m_t, -scale * s) - 1.0))


def laplace_typical_ris(s, r_br0, r_ru0, p, c_mode="paper"):
    """Laplace transform of the typical user's RIS-reflected interference.

    Conditioned on the serving BS-RIS distance ``r_br0`` and the RIS-user
    distance ``r_ru0``.  The RIS-user distance enters with exponent one,
    exactly as in the closed form; the simulator uses the symmetric product.
    """
    if s < 0:
        raise DomainError("Laplace argument must be nonnegative")
    if r_br0 <= 0 or r_ru0 <= 0:
        raise DomainError("distances must be positive")
    spread = math.pi * p.lambda_b * r_br0**2
    scale = p.P_b * _ris_constant(p, c_mode) / (p.m_t * r_ru0 * r_br0**p.alpha_t)
    return math.exp(-spread * (_hyp(p.alpha_t, p.m_t, -s * scale) - 1.0))


def mean_interference_connected(p):
    """Mean interference power at the connected user (PPP beyond ``r_c``)."""
    if p.alpha_c <= 2:
        raise DomainError("mean interference diverges for alpha_c <= 2")
    return 2.0 * math.pi * p.lambda_b * p.P_b * p.C * p.r_c ** (2.0 - p.alpha_c) / (p.alpha_c - 2.0)


def gamma_c_e(p):
    """Approximate mean OMA SNR of the connected user, signal over ``E[I_c] + sigma2``."""
    if p.alpha_c <= 2:
        raise DomainError("mean interference diverges for alpha_c <= 2")
    k = p.alpha_c - 2.0
    num = k * p.P_b * p.C * p.r_c ** (-p.alpha_c)
    den = 2.0 * math.pi * p.lambda_b * p.P_b * p.C * p.r_c ** (2.0 - p.alpha_c) + k * p.sigma2
    return num / den


def c_t_e():
    """Regularising constant ``0.01 * Gamma(0.01)`` (equal to ``Gamma(1.01)``)."""
    return 1e-2 * sgkernel.gamma_fn(1e-2)


def gamma_t_e(p):
    """Approximate mean OMA SINR of the typical user, ``c_t_e (alpha_t - 2) pi lambda_b``."""
    return c_t_e() * (p.alpha_t - 2.0) * math.pi * p.lambda_b


def upsilon(p):
    """Effective SINR threshold for typical-user coverage.

    The largest of the SIC threshold (scaled by the power split), the
    decoding threshold and the SIC-order threshold ``gamma_c_e``.
    """
    den = p.a_c - p.gamma_sic_th * p.a_t
    if den <= 0:
        raise ConfigError("a_c - gamma_sic_th * a_t must be positive")
    return max(p.gamma_sic_th / den, p.gamma_t_th / p.a_t, gamma_c_e(p))


def _typical_terms(p, c_mode):
    fading = FadingSpec(p.m_t)
    ups = upsilon(p)
    c_e = _ris_constant(p, c_mode)
    for n in range(1, p.m_t + 1):
        weight = (-1) ** (n + 1) * math.comb(p.m_t, n)
        noise_rate = n * fading.eta * ups * p.sigma2 / (p.P_b * c_e)
        interf_rate = math.pi * p.lambda_b * _hyp(p.alpha_t, p.m_t, -n * fading.eta * ups / p.m_t)
        yield weight, noise_rate, interf_rate


def coverage_typical(p, tol=1e-10, c_mode="paper", return_raw=False):
    """Typical-user coverage by numeric double integration.

    For each binomial term ``n`` this integrates, over the RIS-user distance
    ``y ~ 2y/R_L**2`` and the serving BS-RIS distance ``x``,
    ``2 pi lambda_b x exp(-b1 (x y)**alpha_t) exp(-b2 x**2)``.
    """
    alpha = p.alpha_t
    terms = []
    for weight, b1, b2 in _typical_terms(p, c_mode):
        x_scale = 1.0 / math.sqrt(b2)

        def inner(y, b1=b1, b2=b2, x_scale=x_scale):
            by = b1 * y**alpha
            return sgkernel.integrate_1d(
                lambda x: x * math.exp(-by * x**alpha - b2 * x * x),
                0.0, math.inf, tol * x_scale**2, scale=x_scale,
            )

        outer = sgkernel.integrate_1d(
            lambda y: inner(y) * 2.0 * y / p.R_L**2, 0.0, p.R_L, tol * x_scale**2,
        )
        terms.append(weight * 2.0 * math.pi * p.lambda_b * outer)
    raw = _alternating_sum(terms, "coverage_typical")
    value = _clamp(raw, "coverage_typical")
    return (value, raw) if return_raw else value


def coverage_typical_closed(p, K=64, c_mode="paper", return_raw=False):
    """Typical-user coverage for ``alpha_t = 4`` via Chebyshev-Gauss quadrature.

    With ``alpha_t = 4`` the inner integral is Gaussian in ``x**2`` and
    reduces to ``exp(z**2) erfc(z)``, evaluated as the scaled ``erfcx`` so it
    never overflows.
    """
    if p.alpha_t != 4.0:
        raise DomainError(f"closed form requires alpha_t = 4, got {p.alpha_t}")
    rule = sgkernel.chebyshev_gauss(K)
    xi = 0.5 * p.R_L * (rule.nodes + 1.0)
    root = np.sqrt(1.0 - rule.nodes**2)
    terms = []
    for weight, b1, b2 in _typical_terms(p, c_mode):
        if b1 == 0.0:
            # noise-free limit, erfcx(z) ~ 1 / (z sqrt(pi))
            inner = float(np.sum(rule.weights * math.pi * p.lambda_b * root * xi / (p.R_L * b2)))
        else:
            z = b2 / (2.0 * math.sqrt(b1) * xi**2)
            ex = np.array([sgkernel.erfcx(v) for v in z])
            inner = float(np.sum(
                rule.weights * math.pi**1.5 * p.lambda_b * root / (2.0 * p.R_L * math.sqrt(b1) * xi) * ex
            ))
        terms.append(weight * inner)
    raw = _alternating_sum(terms, "coverage_typical_closed")
    value = _clamp(raw, "coverage_typical_closed")
    return (value, raw) if return_raw else value


def coverage_connected_closed(p, return_raw=False):
    """Connected-user coverage as a difference of two binomial sums.

    The first sum is the SIC-order event against ``gamma_t_e``, the second
    the decoding event against ``gamma_c_th``.  The order-event exponent
    carries ``P_b`` inside the hypergeometric argument and not in the noise
    term, reproducing the published closed form.
    """
    den = p.a_c - p.a_t * p.gamma_c_th
    if den <= 0:
        raise ConfigError("a_c - a_t * gamma_c_th must be positive")
    eta = FadingSpec(p.m_c).eta
    gt = gamma_t_e(p)
    lam = math.pi * p.lambda_b
    m = p.m_t
    order_terms, decode_terms = [], []
    for n in range(1, p.m_c + 1):
        weight = (-1) ** (n + 1) * math.comb(p.m_c, n)
        mu1 = lam * (_hyp(p.alpha_c, m, -n * eta * p.P_b * gt / m) - 1.0)
        mu2 = n * eta * gt * p.sigma2 / p.C
        mu3 = lam * (_hyp(p.alpha_c, m, -n * eta * p.gamma_c_th / (m * den)) - 1.0)
        mu4 = n * eta * p.gamma_c_th * p.sigma2 / (den * p.P_b * p.C)
        order_terms.append(weight * math.exp(-mu1 * p.r_c**2 - mu2 * p.r_c**p.alpha_c))
        decode_terms.append(weight * math.exp(-mu3 * p.r_c**2 - mu4 * p.r_c**p.alpha_c))
    raw = _alternating_sum(order_terms + [-t for t in decode_terms], "coverage_connected_closed")
    value = _clamp(raw, "coverage_connected_closed")
    return (value, raw) if return_raw else value


def coverage_pair(p, tol=1e-10, K=64, c_mode="paper"):
    """Both coverage probabilities; ``alpha_t = 4`` dispatches to the closed form."""
    if p.alpha_t == 4.0:
        pt, rt = coverage_typical_closed(p, K=K, c_mode=c_mode, return_raw=True)
    else:
        pt, rt = coverage_typical(p, tol=tol, c_mode=c_mode, return_raw=True)
    pc, rc = coverage_connected_closed(p, return_raw=True)
    return CoveragePair(pt, pc, rt, rc)
