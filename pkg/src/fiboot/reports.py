"""Table and figure-data builders over stored experiment cells.

Reports are pure functions of the stored draws (plus exact second-moment
theory), so regenerating them from the same cell directories is
byte-identical.
"""

from __future__ import annotations

import csv
import os

import numpy as np

from .edgeworth import edgeworth_density_rho0
from .acvf import arfima_acvf
from .errors import ConfigError
from .harness import (
    ExperimentResult,
    average_bootstrap_distribution,
    default_grid,
    gof_measures,
    kde,
    read_experiment,
    stdev_ratio,
)

GOF_MEASURES = ("rmsd", "kld", "gini")


def discover_cells(root) -> dict:
    """Map cell_name -> loaded ExperimentResult for every subdir with a manifest."""
    cells = {}
    for name in sorted(os.listdir(root)):
        sub = os.path.join(root, name)
        if os.path.isdir(sub) and os.path.exists(os.path.join(sub, "manifest.json")):
            cells[name] = read_experiment(sub)
    if not cells:
        raise ConfigError(f"no stored experiment cells under {root}")
    return cells


def ratio_table_rows(cells: dict) -> list:
    """Standard-deviation ratio rows for mean-statistic cells, all methods."""
    rows = []
    for name, res in sorted(cells.items()):
        cfg = res.config
        if cfg.statistic != "mean":
            continue
        for (kind, sid), draws in sorted(res.draws.items()):
            rows.append(
                {
                    "cell": name,
                    "phi": cfg.process.phi,
                    "T": cfg.t,
                    "d": cfg.process.d,
                    "method": kind,
                    "ratio_pct": stdev_ratio(draws, cfg.process, cfg.t),
                }
            )
    if not rows:
        raise ConfigError("no mean-statistic cells found for a ratio table")
    return rows


def write_ratio_table(cells: dict, path) -> None:
    rows = ratio_table_rows(cells)
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=["cell", "phi", "T", "d", "method", "ratio_pct"])
        w.writeheader()
        for row in rows:
            row = dict(row)
            row["ratio_pct"] = f"{row['ratio_pct']:.1f}"
            w.writerow(row)


def gof_table_rows(cells: dict) -> list:
    """Goodness-of-fit rows (absolute and relative-to-SBS) for acf cells."""
    rows = []
    for name, res in sorted(cells.items()):
        cfg = res.config
        if cfg.statistic not in ("acf", "acf0"):
            continue
        for sid in cfg.stat_ids():
            lag = int(sid.rsplit("_", 1)[1])
            mc_points = res.mc[sid]
            grid = default_grid(mc_points, cfg.grid_size)
            mc_density = kde(mc_points, grid, cfg.bandwidth_rule, source="MC")
            reports = {}
            for m in cfg.methods:
                avg = average_bootstrap_distribution(res.draws[(m.kind, sid)].values)
                subject = kde(avg, grid, cfg.bandwidth_rule, source=m.kind.upper())
                reports[m.kind] = gof_measures(subject, mc_density, mc_points)
            base = reports.get("sbs")
            for kind, rep in reports.items():
                for measure in GOF_MEASURES:
                    value = getattr(rep, measure)
                    ratio = ""
                    if base is not None and kind != "sbs":
                        denom = getattr(base, measure)
                        ratio = value / denom if denom != 0.0 else ""
                    rows.append(
                        {
                            "cell": name,
                            "phi": cfg.process.phi,
                            "d": cfg.process.d,
                            "T": cfg.t,
                            "lag": lag,
                            "method": kind,
                            "measure": measure,
                            "value": value,
                            "ratio_to_sbs": ratio,
                        }
                    )
    if not rows:
        raise ConfigError("no autocorrelation cells found for a goodness-of-fit table")
    return rows


def write_gof_table(cells: dict, path) -> None:
    rows = gof_table_rows(cells)
    fields = ["cell", "phi", "d", "T", "lag", "method", "measure", "value", "ratio_to_sbs"]
    with open(path, "w", newline="") as f:
        w = csv.DictWriter(f, fieldnames=fields)
        w.writeheader()
        for row in rows:
            row = dict(row)
            row["value"] = repr(float(row["value"]))
            if row["ratio_to_sbs"] != "":
                row["ratio_to_sbs"] = repr(float(row["ratio_to_sbs"]))
            w.writerow(row)


def write_figure_density_data(result: ExperimentResult, out_dir,
                              prefix: str = "fig") -> list:
    """Per-lag density curves: MC, averaged bootstrap, and the expansion.

    Emits one CSV per lag with the Monte Carlo kernel density, the averaged
    bootstrap kernel density per method, and (for zero-mean autocorrelation
    cells with d inside the validity region) the expansion density
    interpolated onto the same grid.
    """
    cfg = result.config
    if cfg.statistic not in ("acf", "acf0"):
        raise ConfigError("figure density data needs an autocorrelation statistic")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    acvf = arfima_acvf(cfg.process, cfg.t - 1) if cfg.statistic == "acf0" else None
    for sid in cfg.stat_ids():
        lag = int(sid.rsplit("_", 1)[1])
        mc_points = result.mc[sid]
        grid = default_grid(mc_points, cfg.grid_size)
        columns = {"x": grid, "mc_density": kde(mc_points, grid, cfg.bandwidth_rule).pdf}
        for m in cfg.methods:
            avg = average_bootstrap_distribution(result.draws[(m.kind, sid)].values)
            columns[f"{m.kind}_density"] = kde(avg, grid, cfg.bandwidth_rule).pdf
        if acvf is not None and cfg.process.d < 0.1:
            curve = edgeworth_density_rho0(lag, acvf, cfg.t, cfg.process.d)
            columns["edgeworth_density"] = np.interp(
                grid, curve.x, curve.density, left=0.0, right=0.0
            )
        path = os.path.join(out_dir, f"{prefix}_{sid}.csv")
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            names = list(columns)
            w.writerow(names)
            for i in range(grid.size):
                w.writerow([repr(float(columns[n][i])) for n in names])
        written.append(path)
    return written
