"""Command line front end.

Subcommands: simulate, acvf, fit, bootstrap, edgeworth, experiment, report.
Exit codes: 0 success, 2 configuration error (including argparse failures),
3 numerical failure (the message carries the failing replication index when
one exists).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import __version__, reports
from .acvf import ArfimaSpec, arfima_acvf
from .bootstrap import BootstrapMethod, fit_for_method, pfsbs_draw_batch, \
    resolve_prefilter_d, sbs_draw_batch, BootstrapDraws
from .errors import ConfigError, FibootError, FibootNumericalError
from .harness import ExperimentConfig, run_experiment, write_experiment, _stat_rows
from .ar_sieve import fit as sieve_fit, select_order_aic
from .edgeworth import edgeworth_density_rho0
from .levinson import simulate_gaussian
from .presets import PRESET_NAMES, preset_configs
from .streams import make_stream


def _write_series(path, series) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["t", "y"])
        for t, y in enumerate(series, start=1):
            w.writerow([t, repr(float(y))])


def _read_series(path) -> np.ndarray:
    try:
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
    except OSError as exc:
        raise ConfigError(f"cannot read series file {path}: {exc}") from exc
    if not rows:
        raise ConfigError(f"series file {path} is empty")
    header = rows[0]
    body = rows[1:] if any(not _is_float(c) for c in header) else rows
    col = len(body[0]) - 1  # last column holds the values
    try:
        return np.array([float(r[col]) for r in body])
    except (ValueError, IndexError) as exc:
        raise ConfigError(f"malformed series file {path}: {exc}") from exc


def _is_float(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def _process_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=float, required=True, help="memory exponent, |d| < 0.5")
    p.add_argument("--phi", type=float, default=0.0, help="AR(1) coefficient")
    p.add_argument("--sigma2", type=float, default=1.0, help="innovation variance")


def _out_dir(args) -> str:
    os.makedirs(args.out_dir, exist_ok=True)
    return args.out_dir


def _cmd_simulate(args) -> int:
    spec = ArfimaSpec(d=args.d, phi=args.phi, sigma2=args.sigma2)
    acvf = arfima_acvf(spec, args.T - 1)
    path = simulate_gaussian(acvf, args.T, make_stream(args.seed, 0, 0))
    out = os.path.join(_out_dir(args), "path.csv")
    _write_series(out, path)
    print(out)
    return 0


def _cmd_acvf(args) -> int:
    spec = ArfimaSpec(d=args.d, phi=args.phi, sigma2=args.sigma2)
    out = os.path.join(_out_dir(args), "acvf.csv")
    arfima_acvf(spec, args.maxlag).to_csv(out)
    print(out)
    return 0


def _cmd_fit(args) -> int:
    series = _read_series(args.input)
    if args.order == "aic":
        sel = select_order_aic(series, args.method)
        h = sel.h_hat
    else:
        h = int(args.order)
    fitted = sieve_fit(series, h, args.method)
    out_json = os.path.join(_out_dir(args), "fit.json")
    with open(out_json, "w") as f:
        f.write(fitted.to_json() + "\n")
    fitted.to_csv(os.path.join(args.out_dir, "fit.csv"))
    print(out_json)
    return 0


def _cmd_bootstrap(args) -> int:
    series = _read_series(args.input)
    method = BootstrapMethod(
        kind=args.method,
        order_rule="aic" if args.order == "aic" else int(args.order),
        estimator=args.estimator,
    )
    rng = make_stream(args.seed, 0)
    if method.kind == "sbs":
        fitted = fit_for_method(series, method)
        paths = sbs_draw_batch(series, fitted, args.B, rng)
        d_pre = None
    else:
        d_pre = resolve_prefilter_d(method, series)
        paths, fitted = pfsbs_draw_batch(series, d_pre, method, args.B, rng)
    cfg = ExperimentConfig(
        process=ArfimaSpec(d=0.0, phi=0.0), t=series.size, r=1, b=args.B,
        statistic=args.statistic, lags=tuple(args.lags or ()),
        methods=(method,), seed=args.seed,
    )
    out = _out_dir(args)
    for i, sid in enumerate(cfg.stat_ids()):
        vals = _stat_rows(paths, cfg)[:, i]
        draws = BootstrapDraws(
            values=vals[None, :], statistic=sid, method=method,
            master_seed=args.seed, h_per_rep=np.array([fitted.h]),
            d_pre_per_rep=None if d_pre is None else np.array([d_pre]),
        )
        base = os.path.join(out, f"draws_{method.kind}_{sid}")
        draws.to_csv(base + ".csv")
        draws.write_metadata(base + ".meta.json")
        print(base + ".csv")
    if args.keep_paths:
        np.savetxt(os.path.join(out, "bootstrap_paths.csv"), paths, delimiter=",")
    return 0


def _cmd_edgeworth(args) -> int:
    spec = ArfimaSpec(d=args.d, phi=args.phi, sigma2=args.sigma2)
    acvf = arfima_acvf(spec, args.T - 1)
    curve = edgeworth_density_rho0(
        args.lag, acvf, args.T, args.d, override=args.override
    )
    out = os.path.join(_out_dir(args), f"edgeworth_k{args.lag}.csv")
    curve.to_csv(out)
    print(out)
    return 0


def _cmd_experiment(args) -> int:
    if (args.config is None) == (args.preset is None):
        raise ConfigError("give exactly one of --config or --preset")
    out = _out_dir(args)
    if args.config is not None:
        try:
            with open(args.config) as f:
                cfg_dict = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load config {args.config}: {exc}") from exc
        if args.seed is not None:
            cfg_dict["seed"] = args.seed
        if args.keep_paths:
            cfg_dict["keep_paths"] = True
        cells = [("cell", ExperimentConfig.from_dict(cfg_dict))]
    else:
        cells = preset_configs(args.preset, seed=args.seed if args.seed is not None
                               else 20260809, r=args.R, b=args.B)
    for name, cfg in cells:
        result = run_experiment(cfg, workers=args.threads)
        write_experiment(result, os.path.join(out, name))
        print(os.path.join(out, name))
    return 0


def _cmd_report(args) -> int:
    cells = reports.discover_cells(args.out_dir)
    if args.preset in ("table1", "table2"):
        path = os.path.join(args.out_dir, f"{args.preset}.csv")
        reports.write_ratio_table(cells, path)
        print(path)
    elif args.preset == "table3":
        path = os.path.join(args.out_dir, "table3.csv")
        reports.write_gof_table(cells, path)
        print(path)
    elif args.preset in ("fig5", "fig6"):
        for name, res in cells.items():
            for path in reports.write_figure_density_data(
                res, args.out_dir, prefix=args.preset
            ):
                print(path)
    else:
        path = os.path.join(args.out_dir, "ratios.csv")
        try:
            reports.write_ratio_table(cells, path)
            print(path)
        except ConfigError:
            pass
        path = os.path.join(args.out_dir, "gof.csv")
        try:
            reports.write_gof_table(cells, path)
            print(path)
        except ConfigError:
            pass
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="fiboot",
        description="Sieve bootstrap inference for fractionally integrated series",
    )
    p.add_argument("--version", action="version", version=f"fiboot {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="emit one exact Gaussian ARFIMA path")
    _process_args(ps)
    ps.add_argument("--T", type=int, required=True)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out-dir", default=".")
    ps.set_defaults(func=_cmd_simulate)

    pa = sub.add_parser("acvf", help="emit the exact autocovariance table")
    _process_args(pa)
    pa.add_argument("--maxlag", type=int, required=True)
    pa.add_argument("--out-dir", default=".")
    pa.set_defaults(func=_cmd_acvf)

    pf = sub.add_parser("fit", help="fit the AR sieve to a series file")
    pf.add_argument("--input", required=True, help="CSV with the series in the last column")
    pf.add_argument("--method", default="burg",
                    choices=("burg", "yule_walker", "least_squares"))
    pf.add_argument("--order", default="aic", help="'aic' or a fixed order")
    pf.add_argument("--out-dir", default=".")
    pf.set_defaults(func=_cmd_fit)

    pb = sub.add_parser("bootstrap", help="bootstrap statistic draws for one series")
    pb.add_argument("--input", required=True)
    pb.add_argument("--method", default="sbs", choices=("sbs", "pfsbs", "fpfbs"))
    pb.add_argument("--B", type=int, default=1000)
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--statistic", default="mean",
                    choices=("mean", "renorm_mean", "acf", "acf0"))
    pb.add_argument("--lags", type=int, nargs="*", default=None)
    pb.add_argument("--order", default="aic")
    pb.add_argument("--estimator", default="burg",
                    choices=("burg", "yule_walker", "least_squares"))
    pb.add_argument("--keep-paths", action="store_true")
    pb.add_argument("--out-dir", default=".")
    pb.set_defaults(func=_cmd_bootstrap)

    pe = sub.add_parser("edgeworth", help="expansion curve for the zero-mean autocorrelation")
    _process_args(pe)
    pe.add_argument("--T", type=int, required=True)
    pe.add_argument("--lag", type=int, required=True)
    pe.add_argument("--override", action="store_true",
                    help="evaluate outside the d < 0.1 validity region")
    pe.add_argument("--out-dir", default=".")
    pe.set_defaults(func=_cmd_edgeworth)

    px = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    px.add_argument("--config", help="experiment config JSON")
    px.add_argument("--preset", choices=PRESET_NAMES)
    px.add_argument("--seed", type=int, default=None)
    px.add_argument("--threads", type=int, default=1,
                    help="worker processes for replications")
    px.add_argument("--R", type=int, default=1000, help="replications (presets)")
    px.add_argument("--B", type=int, default=1000, help="bootstrap draws (presets)")
    px.add_argument("--keep-paths", action="store_true")
    px.add_argument("--out-dir", default=".")
    px.set_defaults(func=_cmd_experiment)

    pr = sub.add_parser("report", help="tables and figure data from stored draws")
    pr.add_argument("--preset", choices=PRESET_NAMES, default=None)
    pr.add_argument("--out-dir", default=".")
    pr.set_defaults(func=_cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"fiboot: config error: {exc}", file=sys.stderr)
        return 2
    except FibootNumericalError as exc:
        print(f"fiboot: numerical failure: {exc}", file=sys.stderr)
        return 3
    except FibootError as exc:
        print(f"fiboot: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
