"""Acceptance suite: every criterion at its stated tolerance.

Each test prints one [PASS]/[FAIL] line per criterion (or criterion half
where a criterion splits naturally into independently meaningful pieces).
Run with ``pytest tests/test_acceptance.py -v -s``; the whole module takes
on the order of ten minutes on two cores.

Two pieces fail by design of the underlying methods rather than of this
implementation, and are left red deliberately (full measurements in the
repository notes):

* criterion 4, bootstrap half: the averaged raw-sieve bootstrap CDF of the
  zero-mean autocorrelation cannot sit within 0.03 of the expansion CDF at
  every studied lag — AIC selects the population-optimal order h=1 at
  d=0.08, whose geometric model ACF cannot carry lag-6/9 correlation, and
  every alternative configuration still leaves an O(1/T) bias-doubling
  location shift at short lags (best achievable sup over the 8 cells is
  about 0.065 at T=500).
* criterion 7, long-memory half: the slow T^(2d-1) error mode is lag-common
  and cancels in the Yule-Walker coefficient mapping, so the squared
  coefficient error decays near the classical rate (measured slope -0.89 at
  d=0.4, persisting through T=16000) rather than at the theorem's upper
  bound, which the criterion treats as an equality.
"""

import math

import numpy as np
import pytest

from conftest import acceptance_workers
from fiboot.acvf import ArfimaSpec, arfima_acvf, asymptotics, fn_acvf
from fiboot.ar_sieve import fit, max_aic_order, yw_coefficient_error
from fiboot.bootstrap import BootstrapMethod
from fiboot.edgeworth import (
    build_A,
    build_B,
    edgeworth_cdf_W,
    edgeworth_density_rho0,
    expansion_cdf,
    quadform_cumulants,
    toeplitz_cov,
)
from fiboot.fracdiff import apply_frac_filter, frac_coeffs
from fiboot.harness import (
    ExperimentConfig,
    average_bootstrap_distribution,
    default_grid,
    gof_measures,
    kde,
    run_experiment,
    stdev_ratio,
)
from fiboot.levinson import levinson_solve, simulate_gaussian_batch
from fiboot.stats import sample_acf_zero_rows
from fiboot.streams import make_stream

SEED = 20260809
WORKERS = acceptance_workers()


def _verdict(name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def _mean_experiment(d, phi, t, methods, r=1000, b=1000):
    cfg = ExperimentConfig(
        process=ArfimaSpec(d=d, phi=phi), t=t, r=r, b=b,
        statistic="mean", methods=methods, seed=SEED,
    )
    return run_experiment(cfg, workers=WORKERS)


def test_criterion1_table1_sd_ratios():
    """Table 1: averaged SBS standard deviation over the exact, in percent."""
    cells = [
        (0.3, 100, 0.0, 95.6),
        (0.3, 100, 0.2, 57.2),
        (0.3, 100, 0.3, 42.6),
        (0.3, 100, 0.4, 28.0),
        (0.6, 500, 0.0, 99.1),
        (0.6, 500, 0.4, 23.8),
    ]
    lines, ok = [], True
    for phi, t, d, target in cells:
        res = _mean_experiment(d, phi, t, (BootstrapMethod("sbs"),))
        ratio = stdev_ratio(res.draws[("sbs", "mean")], res.config.process, t)
        cell_ok = abs(ratio - target) <= 5.0
        ok &= cell_ok
        lines.append(f"phi={phi} T={t} d={d}: {ratio:.1f}% vs {target}% "
                     f"({'ok' if cell_ok else 'OUT'})")
    _verdict("criterion 1 (Table 1 ratios, +/-5pp)", ok, "; ".join(lines))


def test_criterion2_table2_directional():
    """Table 2 direction: PFSBS repairs the shortfall, FPFBS overshoots at d=0."""
    res = _mean_experiment(
        0.4, 0.3, 500, (BootstrapMethod("sbs"), BootstrapMethod("pfsbs"))
    )
    sbs = stdev_ratio(res.draws[("sbs", "mean")], res.config.process, 500)
    pfsbs_03 = stdev_ratio(res.draws[("pfsbs", "mean")], res.config.process, 500)
    res06 = _mean_experiment(0.4, 0.6, 500, (BootstrapMethod("pfsbs"),))
    pfsbs_06 = stdev_ratio(res06.draws[("pfsbs", "mean")], res06.config.process, 500)
    res_f = _mean_experiment(0.0, 0.3, 500, (BootstrapMethod("fpfbs"),))
    fpfbs = stdev_ratio(res_f.draws[("fpfbs", "mean")], res_f.config.process, 500)
    ok = (
        55.0 <= pfsbs_03 <= 90.0
        and 55.0 <= pfsbs_06 <= 90.0
        and sbs < 35.0
        and fpfbs > 300.0
    )
    _verdict(
        "criterion 2 (Table 2 direction)", ok,
        f"PFSBS d=0.4 T=500: {pfsbs_03:.1f}% (phi=0.3), {pfsbs_06:.1f}% (phi=0.6) "
        f"in [55,90]; SBS {sbs:.1f}% < 35; FPFBS d=0: {fpfbs:.1f}% > 300",
    )


def test_criterion3_acvf_bias():
    """Asymptotic autocovariance bias -omega^2 T^(2d-1), FN, T=1000."""
    t, reps = 1000, 1000
    lines, ok = [], True
    for d in (0.3, 0.4):
        acvf = fn_acvf(d, 1.0, t - 1)
        paths = simulate_gaussian_batch(
            acvf, t, reps, make_stream(SEED, 3, int(10 * d))
        )
        yc = paths - paths.mean(axis=1, keepdims=True)
        biases = [
            np.einsum("ij,ij->i", yc[:, : t - k], yc[:, k:]).mean() / (t - k)
            - acvf.values[k]
            for k in range(5, 51)
        ]
        mc_bias = float(np.mean(biases))
        asy = asymptotics(ArfimaSpec(d=d, phi=0.0), t).acvf_bias
        rel = abs(mc_bias - asy) / abs(asy)
        cell_ok = rel < 0.15
        ok &= cell_ok
        lines.append(f"d={d}: MC {mc_bias:+.4f} vs {asy:+.4f} (rel {rel:.3f})")
    _verdict("criterion 3 (ACVF bias within 15%)", ok, "; ".join(lines))


def _ks_against_curve(points, curve):
    s = np.sort(np.asarray(points, dtype=float))
    f = np.interp(s, curve.x, curve.cdf, left=0.0, right=1.0)
    n = s.size
    i = np.arange(1, n + 1)
    return float(max(np.abs(f - i / n).max(), np.abs(f - (i - 1) / n).max()))


def _edgeworth_curves(phi):
    acvf = arfima_acvf(ArfimaSpec(d=0.08, phi=phi), 499)
    return acvf, {k: edgeworth_density_rho0(k, acvf, 500, 0.08) for k in (1, 3, 6, 9)}


def test_criterion4_edgeworth_tracks_monte_carlo():
    """Expansion CDF vs Monte Carlo empirical CDF of the zero-mean acf."""
    lines, ok = [], True
    for phi in (0.3, 0.6):
        acvf, curves = _edgeworth_curves(phi)
        paths = simulate_gaussian_batch(
            acvf, 500, 10_000, make_stream(SEED, 4, int(10 * phi))
        )
        for k in (1, 3, 6, 9):
            sup = _ks_against_curve(sample_acf_zero_rows(paths, k), curves[k])
            cell_ok = sup < 0.03
            ok &= cell_ok
            lines.append(f"phi={phi} k={k}: {sup:.4f}")
    _verdict("criterion 4a (Edgeworth vs MC, sup < 0.03)", ok, "; ".join(lines))


def test_criterion4_sbs_reproduces_edgeworth():
    """Averaged SBS CDF vs expansion CDF of the zero-mean acf.

    Expected red: see the module docstring and the repository notes.
    """
    lines, ok = [], True
    for phi in (0.3, 0.6):
        acvf, curves = _edgeworth_curves(phi)
        cfg = ExperimentConfig(
            process=ArfimaSpec(d=0.08, phi=phi), t=500, r=1000, b=1000,
            statistic="acf0", lags=(1, 3, 6, 9),
            methods=(BootstrapMethod("sbs"),), seed=SEED,
        )
        res = run_experiment(cfg, workers=WORKERS)
        for k in (1, 3, 6, 9):
            avg = average_bootstrap_distribution(res.draws[("sbs", f"acf0_{k}")].values)
            sup = _ks_against_curve(avg, curves[k])
            cell_ok = sup < 0.03
            ok &= cell_ok
            lines.append(f"phi={phi} k={k}: {sup:.4f}")
    _verdict("criterion 4b (averaged SBS vs Edgeworth, sup < 0.03)", ok, "; ".join(lines))


def test_criterion5_table3_orderings():
    """Table 3 orderings at d=0.4: PFSBS beats SBS, FPFBS never beats PFSBS."""
    lines, ok = [], True
    for phi in (0.3, 0.6):
        cfg = ExperimentConfig(
            process=ArfimaSpec(d=0.4, phi=phi), t=500, r=1000, b=1000,
            statistic="acf", lags=(1, 3, 6, 9),
            methods=(
                BootstrapMethod("sbs"),
                BootstrapMethod("pfsbs"),
                BootstrapMethod("fpfbs"),
            ),
            seed=SEED,
        )
        res = run_experiment(cfg, workers=WORKERS)
        for k in (1, 3, 6, 9):
            sid = f"acf_{k}"
            mc_points = res.mc[sid]
            grid = default_grid(mc_points, cfg.grid_size)
            mc_de = kde(mc_points, grid, source="MC")
            reports = {}
            for kind in ("sbs", "pfsbs", "fpfbs"):
                avg = average_bootstrap_distribution(res.draws[(kind, sid)].values)
                reports[kind] = gof_measures(kde(avg, grid, source=kind), mc_de, mc_points)
            for measure in ("rmsd", "kld", "gini"):
                s = getattr(reports["sbs"], measure)
                p = getattr(reports["pfsbs"], measure)
                f = getattr(reports["fpfbs"], measure)
                cell_ok = (p / s < 1.0) and (f >= p)
                ok &= cell_ok
                if not cell_ok:
                    lines.append(
                        f"phi={phi} k={k} {measure}: pf/sbs={p / s:.2f} fp/pf={f / p:.2f}"
                    )
    detail = "all 24 PFSBS/SBS ratios < 1 and FPFBS >= PFSBS throughout" if ok \
        else "violations: " + "; ".join(lines)
    _verdict("criterion 5 (Table 3 orderings)", ok, detail)


def test_criterion6_exact_math_suite():
    """Deterministic exact-math checks, sub-second total."""
    checks = []

    rng = np.random.default_rng(0)
    y = rng.standard_normal(200)
    rt = apply_frac_filter(apply_frac_filter(y, 0.4), -0.4)
    checks.append(("fracdiff round-trip 1e-10", np.abs(rt - y).max() < 1e-10))

    from scipy.special import gammaln

    dh = 0.3
    coeffs = frac_coeffs(-dh, 10**6).coeffs
    limit = math.exp(gammaln(1 - 2 * dh) - 2 * gammaln(1 - dh))
    checks.append(
        ("Parseval partial sum 1%", abs(np.dot(coeffs, coeffs) - limit) / limit < 0.01)
    )

    gy = arfima_acvf(ArfimaSpec(d=0.3, phi=0.3), 52).values
    gw = fn_acvf(0.3, 1.0, 52).values
    k = np.arange(1, 51)
    ident = np.abs((1.09) * gy[k] - 0.3 * (gy[k + 1] + gy[k - 1]) - gw[k]).max()
    ident = max(ident, abs(1.09 * gy[0] - 0.6 * gy[1] - gw[0]))
    checks.append(("ARFIMA filter identity 1e-8", ident / gw[0] < 1e-8))

    acvf = arfima_acvf(ArfimaSpec(d=0.3, phi=0.5), 10)
    sol = levinson_solve(acvf, 10)
    phi_full = np.concatenate([[1.0], sol.phi])
    resid = max(
        abs(
            sum(phi_full[j] * acvf.values[abs(j - kk)] for j in range(11))
            - (sol.sigma2 if kk == 0 else 0.0)
        )
        for kk in range(11)
    )
    checks.append(("Yule-Walker residual 1e-10", resid < 1e-10))

    rng = np.random.default_rng(1)
    b = rng.standard_normal((6, 6))
    b = 0.5 * (b + b.T)
    m = rng.standard_normal((6, 6))
    sigma = m @ m.T + 6 * np.eye(6)
    kappas = quadform_cumulants(b, sigma, r_max=4)
    lam = np.linalg.eigvals(b @ sigma).real
    eig_ok = all(
        abs(kappas[r - 1] - 2.0 ** (r - 1) * math.factorial(r - 1) * np.sum(lam**r))
        <= 1e-8 * abs(kappas[r - 1])
        for r in (1, 2, 3, 4)
    )
    checks.append(("cumulant trace vs eigenvalue 1e-8", eig_ok))

    # u = -k1/sqrt(k2) = -1.3/sqrt(2)
    gauss = 0.5 * (1 + math.erf(-1.3 / (math.sqrt(2.0) * math.sqrt(2.0))))
    checks.append(
        ("expansion collapses to Phi(u)",
         abs(expansion_cdf((1.3, 2.0, 0.0, 0.0)) - gauss) < 1e-14)
    )

    wn = fn_acvf(0.0, 1.0, 49)
    checks.append(
        ("white noise F(0) = 1/2", abs(edgeworth_cdf_W(0.0, 1, wn, 50, 0.0) - 0.5) < 1e-12)
    )

    checks.append(("M_T(500) = 38", max_aic_order(500) == 38))

    avg_ok = (
        np.array_equal(average_bootstrap_distribution([[3.0, 1.0, 2.0]]), [1, 2, 3])
        and np.array_equal(average_bootstrap_distribution([[1.0, 3.0], [5.0, 7.0]]), [3, 5])
        and np.array_equal(average_bootstrap_distribution([[2.0, 1.0], [2.0, 1.0]]), [1, 2])
    )
    checks.append(("average bootstrap distribution examples", avg_ok))

    ok = all(flag for _, flag in checks)
    detail = "; ".join(f"{name} {'ok' if flag else 'FAILED'}" for name, flag in checks)
    _verdict("criterion 6 (exact-math suite)", ok, detail)


def _rate_slope(d):
    truth = levinson_solve(fn_acvf(d, 1.0, 5), 5)
    medians = []
    sizes = (250, 1000, 4000)
    for t in sizes:
        acvf = fn_acvf(d, 1.0, t - 1)
        paths = simulate_gaussian_batch(
            acvf, t, 200, make_stream(SEED, 7, int(10 * d), t)
        )
        errs = [yw_coefficient_error(fit(p, 5, "yule_walker"), truth) for p in paths]
        medians.append(np.median(errs))
    return float(np.polyfit(np.log(sizes), np.log(medians), 1)[0])


def test_criterion7_rate_short_memory():
    slope = _rate_slope(0.0)
    ok = abs(slope - (-1.0)) <= 0.25
    _verdict("criterion 7a (rate sanity d=0)", ok, f"slope {slope:+.3f} vs -1.0 +/- 0.25")


def test_criterion7_rate_long_memory():
    """Expected red: see the module docstring and the repository notes."""
    slope = _rate_slope(0.4)
    ok = abs(slope - (-0.2)) <= 0.25
    _verdict("criterion 7b (rate sanity d=0.4)", ok, f"slope {slope:+.3f} vs -0.2 +/- 0.25")
