import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fiboot.errors import DomainError
from fiboot.fracdiff import apply_frac_filter, apply_frac_filter_many, frac_coeffs


def test_integer_differencing_coefficients():
    np.testing.assert_array_equal(frac_coeffs(1.0, 4).coeffs, [1.0, -1.0, 0.0, 0.0])


def test_identity_filter_coefficients():
    np.testing.assert_array_equal(frac_coeffs(0.0, 3).coeffs, [1.0, 0.0, 0.0])


def test_d04_leading_coefficients():
    # a_1 = -d, a_2 = d(d-1)/2
    np.testing.assert_allclose(frac_coeffs(0.4, 3).coeffs, [1.0, -0.4, -0.12], atol=1e-15)


@given(d=st.floats(-0.99, 2.0), n=st.integers(1, 80))
def test_product_recursion_invariant(d, n):
    c = frac_coeffs(d, n).coeffs
    assert c[0] == 1.0
    for j in range(1, n):
        assert c[j] == pytest.approx(c[j - 1] * (j - 1 - d) / j, rel=1e-14, abs=1e-300)


@given(d=st.floats(0.01, 0.99), n=st.integers(2, 100))
def test_sign_pattern_positive_d(d, n):
    c = frac_coeffs(d, n).coeffs
    assert np.all(c[1:] < 0.0)


@pytest.mark.parametrize("d", [-1.0, -1.5])
def test_coefficient_domain_error(d):
    with pytest.raises(DomainError):
        frac_coeffs(d, 5)


def test_zero_length_error():
    with pytest.raises(DomainError):
        frac_coeffs(0.3, 0)


def test_apply_identity_is_exact():
    y = np.sin(np.arange(50) * 0.3) + 2.0
    np.testing.assert_array_equal(apply_frac_filter(y, 0.0), y)


def test_first_differences_of_constant():
    np.testing.assert_array_equal(apply_frac_filter([3.5, 3.5, 3.5], 1.0), [3.5, 0.0, 0.0])


def test_round_trip_at_spec_scale():
    rng = np.random.default_rng(1)
    y = rng.standard_normal(200)
    back = apply_frac_filter(apply_frac_filter(y, 0.4), -0.4)
    assert np.abs(back - y).max() < 1e-10


@given(d=st.floats(-0.9, 0.9), seed=st.integers(0, 2**31))
def test_round_trip_property(d, seed):
    y = np.random.default_rng(seed).standard_normal(64)
    back = apply_frac_filter(apply_frac_filter(y, d), -d)
    assert np.abs(back - y).max() < 1e-10


def test_parseval_partial_sum():
    # sum_j a_j(-dh)^2 -> Gamma(1-2dh)/Gamma(1-dh)^2 for dh < 0.5
    from scipy.special import gammaln

    dh = 0.3
    coeffs = frac_coeffs(-dh, 10**6).coeffs
    partial = float(np.dot(coeffs, coeffs))
    limit = math.exp(gammaln(1 - 2 * dh) - 2 * gammaln(1 - dh))
    assert abs(partial - limit) / limit < 0.01


def test_fft_path_matches_direct():
    rng = np.random.default_rng(2)
    y = rng.standard_normal(300)
    direct = apply_frac_filter(y, 0.35)
    fast = apply_frac_filter(y, 0.35, use_fft=True)
    assert np.abs(direct - fast).max() < 1e-8


def test_empty_input_error():
    with pytest.raises(DomainError):
        apply_frac_filter([], 0.2)


def test_batch_matches_rowwise():
    rng = np.random.default_rng(3)
    x = rng.standard_normal((5, 40))
    batch = apply_frac_filter_many(x, 0.25)
    for i in range(5):
        np.testing.assert_allclose(batch[i], apply_frac_filter(x[i], 0.25), atol=1e-12)
