"""Special functions and quadrature used by the closed-form coverage expressions.

The Gauss hypergeometric function is evaluated only for real arguments.  The
coverage formulas call it with ``a = -2/alpha``, ``b = m`` (integer) and
``c = 1 - 2/alpha`` at negative ``z``, so three real-line routes cover every
case we need:

* ``|z| <= 0.5``: the defining power series;
* ``-8 <= z < -0.5``: the Pfaff transformation ``z -> z/(z-1)``;
* ``z < -8``: the ``1/(1-z)`` connection formula, falling back to Pfaff when
  ``a - b`` is an integer (the connection formula is singular there).
"""

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple
import warnings

import numpy as np
from scipy import integrate, special

from .errors import DomainError, NumericalError

__all__ = [
    "QuadratureRule",
    "QuadResult",
    "gauss2f1",
    "hyp2f1_series",
    "hyp2f1_pfaff",
    "erfc",
    "erfcx",
    "gamma_fn",
    "chebyshev_gauss",
    "integrate_1d",
]

MAX_TERMS = 10_000
_SERIES_EPS = 1e-17
_PFAFF_LIMIT = -8.0


def _is_nonpositive_integer(x):
    return x <= 0 and float(x).is_integer()


def hyp2f1_series(a, b, c, z, max_terms=MAX_TERMS):
    """Sum the hypergeometric power series directly.

    Converges for ``|z| < 1``; terminates early when ``a`` or ``b`` is a
    non-positive integer.
    """
    if _is_nonpositive_integer(c):
        raise DomainError(f"c={c} is a non-positive integer")
    term = 1.0
    total = 1.0
    small = 0
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z
        total += term
        if term == 0.0:
            return total
        if abs(term) <= _SERIES_EPS * abs(total):
            # two consecutive negligible terms guard against a lucky zero crossing
            small += 1
            if small >= 2:
                return total
        else:
            small = 0
    raise NumericalError(
        f"2F1({a}, {b}; {c}; {z}) series did not converge in {max_terms} terms",
        partial=total,
    )


def hyp2f1_pfaff(a, b, c, z, max_terms=MAX_TERMS):
    """Evaluate 2F1 for ``z < 1`` through ``(1-z)^-a 2F1(a, c-b; c; z/(z-1))``."""
    w = z / (z - 1.0)
    return (1.0 - z) ** (-a) * hyp2f1_series(a, c - b, c, w, max_terms)


def _hyp2f1_reciprocal(a, b, c, z):
    # Abramowitz & Stegun 15.3.8, valid for z < 0 and non-integer a - b.
    u = 1.0 / (1.0 - z)
    g = math.gamma
    first = (
        g(c) * g(b - a) / (g(b) * g(c - a))
        * (1.0 - z) ** (-a)
        * hyp2f1_series(a, c - b, a - b + 1.0, u)
    )
    second = (
        g(c) * g(a - b) / (g(a) * g(c - b))
        * (1.0 - z) ** (-b)
        * hyp2f1_series(b, c - a, b - a + 1.0, u)
    )
    return first + second


def gauss2f1(a, b, c, z):
    """Gauss hypergeometric function 2F1(a, b; c; z) for real arguments.

    Parameters
    ----------
    a, b, c : float
        Parameters; ``c`` must not be a non-positive integer.
    z : float
        Argument with ``z <= 0`` or ``|z| < 1``.

    Returns
    -------
    float
        The function value, to about 1e-12 relative accuracy on the
        parameter ranges used by the coverage formulas.
    """
    a, b, c, z = float(a), float(b), float(c), float(z)
    if _is_nonpositive_integer(c):
        raise DomainError(f"c={c} is a non-positive integer")
    if not math.isfinite(z) or z >= 1.0:
        raise DomainError(f"z={z} outside the real domain z < 1")
    if z == 0.0:
        return 1.0
    if abs(z) <= 0.5 or z > 0.0:
        return hyp2f1_series(a, b, c, z)
    if z >= _PFAFF_LIMIT:
        return hyp2f1_pfaff(a, b, c, z)
    # poles of the gamma factors in the connection formula
    if (
        float(a - b).is_integer()
        or _is_nonpositive_integer(a)
        or _is_nonpositive_integer(b)
        or _is_nonpositive_integer(c - a)
        or _is_nonpositive_integer(c - b)
    ):
        return hyp2f1_pfaff(a, b, c, z)
    return _hyp2f1_reciprocal(a, b, c, z)


def erfc(x):
    """Complementary error function (stdlib-backed, ~1e-16 accuracy)."""
    return math.erfc(float(x))


def erfcx(x):
    """Scaled complementary error function ``exp(x**2) * erfc(x)``.

    Used wherever the product would overflow if formed naively.
    """
    return float(special.erfcx(x))


def gamma_fn(x):
    """Euler gamma function for ``x > 0``."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"gamma_fn requires x > 0, got {x}")
    return math.gamma(x)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a K-point rule on (-1, 1)."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def __post_init__(self):
        if not (len(self.nodes) == len(self.weights) == self.order):
            raise ValueError("nodes, weights and order disagree in length")

    def integrate(self, f):
        """Approximate the Chebyshev-weighted integral of ``f`` over (-1, 1)."""
        values = np.asarray([f(x) for x in self.nodes], dtype=float)
        return float(np.dot(self.weights, values))


def chebyshev_gauss(K):
    """Chebyshev-Gauss rule of order ``K`` for the weight ``1/sqrt(1 - x**2)``."""
    if int(K) != K or K < 1:
        raise DomainError(f"quadrature order must be a positive integer, got {K}")
    K = int(K)
    i = np.arange(1, K + 1)
    nodes = np.cos((2 * i - 1) * np.pi / (2 * K))
    weights = np.full(K, np.pi / K)
    return QuadratureRule(nodes=nodes, weights=weights, order=K)


class QuadResult(NamedTuple):
    value: float
    error: float
    upper: float


def _quad(f, lo, hi, tol, limit):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            value, err = integrate.quad(f, lo, hi, epsabs=tol, epsrel=1e-10, limit=limit)
        except integrate.IntegrationWarning as exc:
            raise NumericalError(f"quadrature on [{lo}, {hi}] failed: {exc}") from exc
    return value, err


def integrate_1d(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    *,
    scale: float = 1.0,
    limit: int = 200,
    full_output: bool = False,
):
    """Adaptive integral of ``f`` over ``[lo, hi]``.

    An infinite ``hi`` is truncated: panels of doubling width (starting at
    ``scale``) are added until a panel contributes less than ``1e-12`` of the
    running total.  The truncation point is returned as ``upper`` when
    ``full_output`` is set.
    """
    if hi < lo:
        raise DomainError(f"empty interval [{lo}, {hi}]")
    if math.isfinite(hi):
        value, err = _quad(f, lo, hi, tol, limit)
        upper = hi
    else:
        value = err = 0.0
        a, width = lo, float(scale)
        for panels in range(1, limit + 1):
            b = a + width
            piece, piece_err = _quad(f, a, b, tol, limit)
            value += piece
            err += piece_err
            a, width = b, 2.0 * width
            if abs(piece) <= 1e-12 * abs(value) or (value == 0.0 and piece == 0.0 and a > lo + 64 * scale):
                break
        else:
            raise NumericalError(f"no truncation point found up to {a}", partial=value)
        upper = a
        tol *= panels
    if err > max(tol, 1e-9 * abs(value)):
        raise NumericalError(f"integral error estimate {err:.3g} exceeds tolerance {tol:.3g}", partial=value)
    if full_output:
        return QuadResult(value, err, upper)
    return value
