import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from snbs.advisor import (
    AutocovarianceSequence,
    Regime,
    a3_diagnostic,
    acf_from_coefficients,
    m_gamma,
    min_eigenvalue,
    recommend_block,
    rho_bound,
    toeplitz_matrix,
)
from snbs.errors import NonPositiveDefiniteError, SNBSError
from snbs.generators import CoefficientVector, Family, coefficients


def white(maxlag=50):
    g = np.zeros(maxlag + 1)
    g[0] = 1.0
    return AutocovarianceSequence(g)


def ar1(phi, maxlag=200):
    return AutocovarianceSequence(phi ** np.arange(maxlag + 1) / (1 - phi ** 2))


def test_acf_examples():
    np.testing.assert_array_equal(acf_from_coefficients(CoefficientVector.from_values([1.0]), 3).gamma,
                                  [1, 0, 0, 0])
    np.testing.assert_array_equal(acf_from_coefficients(CoefficientVector.from_values([1.0, 1.0]), 3).gamma,
                                  [2, 1, 0, 0])
    np.testing.assert_array_equal(acf_from_coefficients(CoefficientVector.from_values([1.0, 0.5]), 2).gamma,
                                  [1.25, 0.5, 0])


def test_acf_fft_path_matches_dot_products():
    cv = coefficients(Family.PLAIN, 0.25, 30_000)
    g = acf_from_coefficients(cv, 1000).gamma
    a = cv.a
    for h in (0, 1, 17, 999):
        assert g[h] == pytest.approx(float(np.dot(a[:a.shape[0] - h], a[h:])), rel=1e-9)


def test_m_gamma_examples():
    assert m_gamma(white(), 0) == 0.0
    assert m_gamma(AutocovarianceSequence([1.0, 0.5, 0.25]), 1) == 0.25
    assert m_gamma(AutocovarianceSequence([1.0, -0.6, 0.2]), 0) == 0.6


def test_m_gamma_extrapolates_power_law():
    h = np.arange(0, 401, dtype=float)
    g = np.where(h == 0, 1.0, 0.5 * np.maximum(h, 1) ** -0.5)
    acf = AutocovarianceSequence(g)
    assert acf.extrapolates
    assert m_gamma(acf, 1000) == pytest.approx(0.5 * 1001 ** -0.5, rel=1e-6)


def test_min_eigenvalue_examples():
    for m in (1, 5, 40):
        assert min_eigenvalue(white(), m) == pytest.approx(1.0, rel=1e-14)
    assert min_eigenvalue(AutocovarianceSequence([1.0, 0.5]), 2) == pytest.approx(0.5, rel=1e-14)


def test_min_eigenvalue_large_path_matches_dense_solver():
    acf = acf_from_coefficients(coefficients(Family.PLAIN, 0.25, 20_000), 700)
    for m in (512, 513, 700):
        dense = float(np.linalg.eigvalsh(toeplitz_matrix(acf, m))[0])
        assert min_eigenvalue(acf, m) == pytest.approx(dense, rel=1e-8)


def test_singular_matrix_is_rejected():
    with pytest.raises(NonPositiveDefiniteError):
        min_eigenvalue(AutocovarianceSequence([1.0, 1.0, 1.0]), 3)


@pytest.mark.parametrize("seed", range(10))
def test_eigenvalue_interlacing(seed):
    rng = np.random.default_rng(seed)
    cv = CoefficientVector.from_values(rng.standard_normal(int(rng.integers(2, 30))))
    acf = acf_from_coefficients(cv, 80)
    lams = [min_eigenvalue(acf, m) for m in range(1, 65)]
    assert all(b <= a * (1 + 1e-10) for a, b in zip(lams, lams[1:]))


def test_rho_bound_examples():
    assert rho_bound(white(), 10, 3).bound == 0.0
    # M_gamma(2) = 0.25, lambda_2 = 0.5, m = 2, k = 4
    acf = AutocovarianceSequence([1.0, 0.5, 0.25, 0.25, 0.1])
    rep = rho_bound(acf, 4, 2, lambda_m=0.5)
    assert rep.m_gamma == 0.25 and rep.bound == 1.0
    assert rho_bound(acf, 1, 2).bound == 1.0


@settings(max_examples=100, deadline=None)
@given(st.floats(-0.95, 0.95), st.integers(0, 300), st.integers(1, 30))
def test_rho_bound_in_unit_interval(phi, k, m):
    rep = rho_bound(ar1(phi), k, m)
    assert 0.0 <= rep.bound <= 1.0


@pytest.mark.parametrize("n,b", [(1000, 31), (200, 5), (50, 49)])
def test_a3_white_noise(n, b):
    assert a3_diagnostic(white(), n, b) == pytest.approx((b + 1) / n, rel=1e-15)


def test_a3_example_value():
    assert a3_diagnostic(white(1000), 1000, 31) == pytest.approx(0.032, rel=1e-12)


def test_a3_properties():
    acf = ar1(0.6, 400)
    vals = [a3_diagnostic(acf, 400, b) for b in (4, 8, 16)]
    assert all(0.0 < v <= 1.0 for v in vals)
    # stronger dependence never lowers the diagnostic
    assert a3_diagnostic(ar1(0.9, 400), 400, 8) >= a3_diagnostic(ar1(0.3, 400), 400, 8)
    with pytest.raises(SNBSError):
        a3_diagnostic(acf, 10, 8, 5)


def test_lrd_tail_decay():
    # at d = 0.25 gamma(h) ~ C h^(2d - 1): M_gamma(k) * k^0.5 levels off
    acf = acf_from_coefficients(coefficients(Family.PLAIN, 0.25, 200_000), 20_000)
    ratios = [m_gamma(acf, k) * k ** 0.5 for k in (2000, 5000, 10000)]
    assert max(ratios) / min(ratios) < 1.05


def test_recommend_block_examples():
    assert recommend_block(Regime.SRD, 100, 1.0) == 10
    assert recommend_block("lrd", 10000, hurst=0.9) == 3
    assert recommend_block("anti", 1000) == 707
    assert recommend_block("zero", 10000, beta=0.1, nu=1.0) == 2
    with pytest.raises(SNBSError):
        recommend_block("lrd", 100, hurst=0.4)
    with pytest.raises(SNBSError):
        recommend_block("zero", 100, beta=1.0)


def test_invalid_sequences():
    for bad in ([], [0.0, 0.1], [1.0, 1.5], [1.0, float("nan")]):
        with pytest.raises(SNBSError):
            AutocovarianceSequence(bad)


def test_acf_past_cutoff_is_zero():
    g = acf_from_coefficients(CoefficientVector.from_values([1.0, 0.5]), 5).gamma
    np.testing.assert_array_equal(g, [1.25, 0.5, 0, 0, 0, 0])
    assert math.isfinite(min_eigenvalue(AutocovarianceSequence(g), 6))
