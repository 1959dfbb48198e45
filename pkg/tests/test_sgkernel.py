import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from risnoma import sgkernel
from risnoma.errors import DomainError, NumericalError
from risnoma.sgkernel import chebyshev_gauss, erfc, erfcx, gamma_fn, gauss2f1, integrate_1d

mpmath.mp.dps = 40


def mp_2f1(a, b, c, z):
    return float(mpmath.hyp2f1(a, b, c, z))


@pytest.mark.parametrize("alpha", [2.4, 3.0, 4.0])
@pytest.mark.parametrize("m", [1, 2, 4, 8])
@pytest.mark.parametrize("z", [0.0, -1e-3, -0.3, -0.5, -0.7, -2.0, -7.9, -8.1, -30.0, -100.0, -1e4])
def test_gauss2f1_matches_mpmath(alpha, m, z):
    d = 2.0 / alpha
    ref = mp_2f1(-d, m, 1 - d, z)
    assert gauss2f1(-d, m, 1 - d, z) == pytest.approx(ref, rel=1e-12)


def test_gauss2f1_known_values():
    assert gauss2f1(1, 1, 2, -1) == pytest.approx(math.log(2), rel=1e-14)
    assert gauss2f1(-0.5, 4, 0.5, -3) == pytest.approx(5.952061109262351, rel=1e-13)
    assert gauss2f1(0.3, 0.7, 1.5, 0.0) == 1.0
    # terminating series
    assert gauss2f1(-2, 3, 1.5, 0.4) == pytest.approx(1 - 2 * 3 / 1.5 * 0.4 + 3 * 4 / (1.5 * 2.5) * 0.16)


@given(
    alpha=st.floats(2.05, 8.0),
    m=st.integers(1, 10),
    z=st.floats(-1e5, 0.0),
)
def test_gauss2f1_property_vs_mpmath(alpha, m, z):
    d = 2.0 / alpha
    assert gauss2f1(-d, m, 1 - d, z) == pytest.approx(mp_2f1(-d, m, 1 - d, z), rel=1e-10)


@given(alpha=st.floats(2.05, 8.0), m=st.integers(1, 8), z1=st.floats(-1e3, 0.0), z2=st.floats(-1e3, 0.0))
def test_gauss2f1_monotone_in_z(alpha, m, z1, z2):
    # with a < 0 < b and c > 0 every series coefficient beyond the first is negative
    d = 2.0 / alpha
    lo, hi = sorted((z1, z2))
    assert gauss2f1(-d, m, 1 - d, lo) >= gauss2f1(-d, m, 1 - d, hi) * (1 - 1e-13)


def test_gauss2f1_routes_agree_at_boundaries():
    d = 2 / 3.0
    for z in (-0.5, -8.0):
        for eps in (1e-9, -1e-9):
            a = gauss2f1(-d, 4, 1 - d, z + eps)
            assert a == pytest.approx(mp_2f1(-d, 4, 1 - d, z + eps), rel=1e-12)
    assert sgkernel.hyp2f1_pfaff(-d, 4, 1 - d, -3.0) == pytest.approx(mp_2f1(-d, 4, 1 - d, -3.0), rel=1e-12)


def test_gauss2f1_domain_errors():
    with pytest.raises(DomainError):
        gauss2f1(0.5, 1, -2, -0.5)
    with pytest.raises(DomainError):
        gauss2f1(0.5, 1, 1.5, 1.0)
    with pytest.raises(DomainError):
        gauss2f1(0.5, 1, 1.5, 2.0)


def test_series_nonconvergence_carries_partial_sum():
    with pytest.raises(NumericalError) as info:
        sgkernel.hyp2f1_series(0.5, 1.0, 1.5, -0.999999, max_terms=10)
    assert info.value.partial is not None


@pytest.mark.parametrize("x", [-3.0, -0.5, 0.0, 1e-8, 0.3, 1.0, 2.5, 5.0, 10.0, 26.0])
def test_erfc_matches_mpmath(x):
    assert erfc(x) == pytest.approx(float(mpmath.erfc(x)), rel=1e-13)


@pytest.mark.parametrize("x", [-2.0, 0.0, 0.5, 3.0, 30.0, 1e3, 1e6])
def test_erfcx_matches_mpmath(x):
    ref = float(mpmath.exp(mpmath.mpf(x) ** 2) * mpmath.erfc(x))
    assert erfcx(x) == pytest.approx(ref, rel=1e-13)


@pytest.mark.parametrize("x", [0.01, 0.5, 1.0, 1.01, 2.5, 10.0, 30.0, 170.0])
def test_gamma_matches_mpmath(x):
    assert gamma_fn(x) == pytest.approx(float(mpmath.gamma(x)), rel=1e-13)


def test_gamma_rejects_nonpositive():
    for x in (0.0, -1.0, -0.5):
        with pytest.raises(DomainError):
            gamma_fn(x)


@pytest.mark.parametrize("K", [1, 4, 16, 64])
def test_chebyshev_gauss_is_exact_for_polynomials(K):
    rule = chebyshev_gauss(K)
    assert len(rule.nodes) == K and rule.order == K
    # int x^(2j) / sqrt(1-x^2) over [-1, 1] = pi * (2j-1)!! / (2j)!!
    for j in range(K):
        exact = math.pi * math.prod(range(1, 2 * j, 2)) / max(1, math.prod(range(2, 2 * j + 1, 2)))
        assert rule.integrate(lambda x, j=j: x ** (2 * j)) == pytest.approx(exact, rel=1e-12)
    assert rule.integrate(lambda x: x ** 3) == pytest.approx(0.0, abs=1e-14)


def test_chebyshev_gauss_rejects_empty_rule():
    with pytest.raises(DomainError):
        chebyshev_gauss(0)


def test_integrate_1d_finite_and_infinite():
    assert integrate_1d(math.sin, 0.0, math.pi) == pytest.approx(2.0, rel=1e-12)
    assert integrate_1d(lambda x: math.exp(-x * x), 0.0, math.inf) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-11)
    res = integrate_1d(lambda x: math.exp(-x), 0.0, math.inf, scale=1.0, full_output=True)
    assert res.value == pytest.approx(1.0, rel=1e-11)
    assert res.upper > 20.0


def test_integrate_1d_reports_divergence():
    with pytest.raises(NumericalError):
        integrate_1d(lambda x: 1.0 / (1.0 + x), 0.0, math.inf, limit=20)
    with pytest.raises(DomainError):
        integrate_1d(math.sin, 1.0, 0.0)


@given(st.floats(0.1, 10.0), st.floats(0.1, 5.0))
def test_integrate_1d_gaussian_scale_property(width, scale):
    val = integrate_1d(lambda x: math.exp(-(x / width) ** 2), 0.0, math.inf, scale=scale)
    assert val == pytest.approx(width * math.sqrt(math.pi) / 2, rel=1e-9)


def test_quadrature_rule_vectorised_integrand():
    rule = chebyshev_gauss(32)
    assert rule.integrate(np.cos) == pytest.approx(math.pi * float(mpmath.besselj(0, 1)), rel=1e-12)
