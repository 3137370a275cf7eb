import numpy as np
import pytest

from fiboot.acvf import AcvfSequence, exact_mean_variance, fn_acvf
from fiboot.ar_sieve import fit
from fiboot.bootstrap import (
    BootstrapDraws,
    BootstrapMethod,
    check_admissible,
    fit_for_method,
    percentile_set,
    pfsbs_draw,
    pfsbs_draw_batch,
    resolve_prefilter_d,
    sbs_draw,
    sbs_draw_batch,
    sieve_implied_acvf,
)
from fiboot.errors import AdmissibilityError, DomainError
from fiboot.fracdiff import apply_frac_filter
from fiboot.levinson import simulate_gaussian, simulate_gaussian_batch
from fiboot.stats import sample_acf_rows, sample_acvf
from fiboot.streams import make_stream


def _fn_path(d, t, key, sigma2=1.0):
    return simulate_gaussian(fn_acvf(d, sigma2, t - 1), t, make_stream(77, key))


def test_order_zero_draw_is_rescaled_resampling():
    y = _fn_path(0.0, 120, 0)
    f = fit(y, 0, "burg")
    path, eps_star, tau = sbs_draw(y, f, make_stream(1, 0), return_details=True)
    assert tau is None
    np.testing.assert_array_equal(path, eps_star)
    # every innovation is sigma_bar times one of the standardized residuals
    pool = np.sort(f.sigma_bar * f.residuals_std)
    idx = np.searchsorted(pool, eps_star)
    matched = np.isclose(pool[np.clip(idx, 0, pool.size - 1)], eps_star) | np.isclose(
        pool[np.clip(idx - 1, 0, pool.size - 1)], eps_star
    )
    assert matched.all()


def test_resampled_innovations_population_moments():
    # the resampling distribution is the standardized residuals themselves
    y = _fn_path(0.2, 200, 1)
    f = fit(y, 3, "burg")
    assert abs(f.residuals_std.mean()) < 1e-12
    assert abs(np.var(f.residuals_std) - 1.0) < 1e-12


def test_paths_satisfy_fitted_recursion():
    y = _fn_path(0.3, 200, 2)
    f = fit(y, 4, "burg")
    path, eps_star, tau = sbs_draw(y, f, make_stream(2, 0), return_details=True)
    yc = y - y.mean()
    buf = np.concatenate([yc[tau - 4: tau], path])
    phi_full = np.concatenate([[1.0], f.phi_bar])
    for t in range(200):
        lhs = sum(phi_full[j] * buf[4 + t - j] for j in range(5))
        assert lhs == pytest.approx(eps_star[t], abs=1e-12)


def test_initial_block_respects_tau_window():
    y = _fn_path(0.2, 100, 3)
    f = fit(y, 5, "burg")
    for key in range(30):
        _, _, tau = sbs_draw(y, f, make_stream(3, key), return_details=True)
        assert 5 <= tau <= 100


def test_draw_determinism():
    y = _fn_path(0.2, 150, 4)
    f = fit(y, 2, "burg")
    a = sbs_draw(y, f, make_stream(9, 1))
    b = sbs_draw(y, f, make_stream(9, 1))
    np.testing.assert_array_equal(a, b)
    batch1 = sbs_draw_batch(y, f, 8, make_stream(9, 2))
    batch2 = sbs_draw_batch(y, f, 8, make_stream(9, 2))
    np.testing.assert_array_equal(batch1, batch2)


def test_pfsbs_equals_sbs_at_zero_prefilter():
    y = _fn_path(0.2, 150, 5)
    method = BootstrapMethod("pfsbs", order_rule="aic", estimator="burg")
    f = fit_for_method(y, method)
    raw = sbs_draw(y, f, make_stream(4, 0))
    pre = pfsbs_draw(y, 0.0, method, make_stream(4, 0))
    np.testing.assert_array_equal(raw, pre)


def test_fpfbs_prefilter_is_clamped_nominal_half():
    m = BootstrapMethod("fpfbs")
    assert resolve_prefilter_d(m, np.zeros(10)) == pytest.approx(0.499)
    m2 = BootstrapMethod("fpfbs", prefilter_d=0.3)
    assert resolve_prefilter_d(m2, np.zeros(10)) == pytest.approx(0.3)


def test_prefilter_whitens_long_memory():
    t, reps = 500, 100
    paths = simulate_gaussian_batch(fn_acvf(0.4, 1.0, t - 1), t, reps, make_stream(5, 0))
    acf1 = [
        abs(sample_acf_rows(apply_frac_filter(p, 0.4)[None, :], 1)[0]) for p in paths
    ]
    assert np.median(acf1) < 0.1


def test_admissibility_window():
    with pytest.raises(AdmissibilityError):
        check_admissible(0.4995)
    with pytest.raises(AdmissibilityError):
        check_admissible(-0.5)
    with pytest.raises(AdmissibilityError):
        pfsbs_draw(np.random.default_rng(0).standard_normal(50), 0.6,
                   BootstrapMethod("pfsbs"), make_stream(1, 1))
    with pytest.raises(DomainError):
        BootstrapMethod("pfsbs", prefilter_d=0.55)
    with pytest.raises(DomainError):
        BootstrapMethod("sbs", prefilter_d=0.1)


def _sample_acvf_tminusk(y, maxlag):
    return AcvfSequence(
        np.array([sample_acvf(y, k, divisor="T-k") for k in range(maxlag + 1)])
    )


def test_sieve_implied_order_zero():
    y = _fn_path(0.1, 80, 6)
    f = fit(y, 0, "burg")
    g = sieve_implied_acvf(f, _sample_acvf_tminusk(y, 5), 5)
    assert np.all(g.values[1:] == 0.0)
    assert g.values[0] == pytest.approx(sample_acvf(y, 0))


def test_sieve_implied_order_one_recursion():
    y = _fn_path(0.2, 80, 7)
    f = fit(y, 1, "yule_walker")
    g = sieve_implied_acvf(f, _sample_acvf_tminusk(y, 3), 10)
    for k in range(2, 11):
        assert g.values[k] == pytest.approx(-f.phi_bar[0] * g.values[k - 1], rel=1e-12)


@pytest.mark.parametrize("d", [0.0, 0.2])
def test_sieve_implied_variance_matches_large_b(d):
    t, b = 500, 5000
    y = _fn_path(d, t, 8 + int(10 * d))
    method = BootstrapMethod("sbs")
    f = fit_for_method(y, method)
    draws = sbs_draw_batch(y, f, b, make_stream(6, int(10 * d)))
    empirical = draws.mean(axis=1).var(ddof=1)
    implied = exact_mean_variance(
        sieve_implied_acvf(f, _sample_acvf_tminusk(y, f.h), t - 1), t
    )
    assert abs(empirical / implied - 1.0) < 0.10


def test_variance_shortfall_mechanism():
    # FN d=0.4, T=500: the sieve-implied variance of the path mean is far
    # below the exact variance under the true autocovariances
    t = 500
    exact = exact_mean_variance(fn_acvf(0.4, 1.0, t - 1), t)
    ratios = []
    for r in range(9):
        y = _fn_path(0.4, t, 100 + r)
        f = fit_for_method(y, BootstrapMethod("sbs"))
        implied = exact_mean_variance(
            sieve_implied_acvf(f, _sample_acvf_tminusk(y, f.h), t - 1), t
        )
        ratios.append(implied / exact)
    assert np.median(ratios) < 0.30


def test_pfsbs_batch_matches_inverse_filter_shape():
    y = _fn_path(0.3, 120, 9)
    method = BootstrapMethod("pfsbs", order_rule=2, estimator="burg")
    paths, fitted = pfsbs_draw_batch(y, 0.3, method, 16, make_stream(8, 0))
    assert paths.shape == (16, 120)
    assert fitted.h == 2
    single = pfsbs_draw(y, 0.3, method, make_stream(8, 1))
    assert single.shape == (120,)


def test_percentile_set_degenerate():
    s = percentile_set(np.full(32, 1.5), 0.1)
    assert s.halfwidth == 0.0
    assert s.lo == s.hi == 1.5


def test_percentile_set_two_point():
    draws = np.resize([-1.0, 1.0], 40)
    s = percentile_set(draws, 0.5)
    assert s.halfwidth == pytest.approx(1.0, rel=1e-12)
    assert s.center == pytest.approx(0.0, abs=1e-15)


def test_percentile_set_gaussian_oracle():
    draws = make_stream(51, 0).standard_normal(100_000)
    s = percentile_set(draws, 0.05)
    assert s.halfwidth == pytest.approx(1.959964, abs=0.03)
    inside = np.mean((draws - s.center) ** 2 <= s.halfwidth**2)
    assert inside == pytest.approx(0.95, abs=0.005)


def test_percentile_set_errors():
    with pytest.raises(DomainError):
        percentile_set(np.arange(10.0), 0.05)
    with pytest.raises(DomainError):
        percentile_set(np.arange(30.0), 1.5)


def test_bootstrap_draws_round_trip(tmp_path):
    values = np.arange(12.0).reshape(3, 4)
    method = BootstrapMethod("pfsbs", order_rule=2)
    draws = BootstrapDraws(
        values=values, statistic="mean", method=method, master_seed=5,
        stream_ids=[[r, 2] for r in range(3)],
        h_per_rep=np.array([2, 2, 2]),
        d_pre_per_rep=np.array([0.1, 0.2, np.nan]),
    )
    draws.to_csv(tmp_path / "d.csv")
    draws.write_metadata(tmp_path / "d.meta.json")
    back = BootstrapDraws.from_csv(tmp_path / "d.csv", tmp_path / "d.meta.json")
    np.testing.assert_array_equal(back.values, values)
    assert back.method == method
    assert back.statistic == "mean"
    np.testing.assert_array_equal(back.h_per_rep, [2, 2, 2])
    assert np.isnan(back.d_pre_per_rep[2])
    assert back.d_pre_per_rep[0] == pytest.approx(0.1)


def test_draws_must_be_finite():
    with pytest.raises(DomainError):
        BootstrapDraws(
            values=np.array([[1.0, np.inf]]), statistic="mean",
            method=BootstrapMethod("sbs"), master_seed=0,
        )
