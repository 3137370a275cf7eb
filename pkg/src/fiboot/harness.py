"""Monte Carlo experiment engine: replications, averaging, densities, tables.

One experiment simulates R paths of an ARFIMA(1, d, 0) process, computes the
configured statistic on each, and produces B bootstrap values of the same
statistic per replication and method.  Replication r derives its streams as
(r, 0) for the data path and (r, method_id) for each bootstrap method, with
fixed method ids, so adding methods or reordering replications never changes
an existing stream, and parallel runs reduce to exactly the serial result.

Summaries follow a common recipe: sort each replication's B draws, average
the order statistics across replications ("average bootstrap distribution"),
kernel-smooth with a Gaussian kernel at the robust bandwidth
1.06*min(sd, IQR/1.349)*n^(-1/5), and score distributional fit by RMSD, a
sample Kullback-Leibler divergence, and twice the PP-plot area, all
evaluated at the sorted Monte Carlo statistic values.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .acvf import AcvfSequence, ArfimaSpec, arfima_acvf, exact_mean_variance
from .bootstrap import (
    BootstrapDraws,
    BootstrapMethod,
    fit_for_method,
    pfsbs_draw_batch,
    resolve_prefilter_d,
    sbs_draw_batch,
)
from .errors import ConfigError, DegenerateVarianceError, DomainError, ReplicationError
from .levinson import simulate_gaussian
from .stats import sample_acf_rows, sample_acf_zero_rows
from .streams import make_stream

__all__ = [
    "STATISTICS",
    "METHOD_STREAM_IDS",
    "ExperimentConfig",
    "ExperimentResult",
    "DensityEstimate",
    "GofReport",
    "run_experiment",
    "average_bootstrap_distribution",
    "column_quantiles",
    "kde",
    "silverman_bandwidth",
    "gof_measures",
    "stdev_ratio",
    "write_experiment",
    "read_experiment",
]

STATISTICS = ("mean", "renorm_mean", "acf", "acf0")

# Stable stream ids per method kind; the data path uses id 0.  Append-only.
METHOD_STREAM_IDS = {"sbs": 1, "pfsbs": 2, "fpfbs": 3}

KLD_DENSITY_FLOOR = 1e-12


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one Monte Carlo experiment cell."""

    process: ArfimaSpec
    t: int
    r: int
    b: int
    statistic: str = "mean"
    lags: tuple = ()
    methods: tuple = (BootstrapMethod("sbs"),)
    seed: int = 0
    bandwidth_rule: str = "silverman"
    grid_size: int = 512
    keep_paths: bool = False

    def __post_init__(self):
        if self.statistic not in STATISTICS:
            raise ConfigError(f"unknown statistic {self.statistic!r}")
        if self.r < 1 or self.b < 1 or self.t < 8:
            raise ConfigError("need R >= 1, B >= 1, T >= 8")
        lags = tuple(int(k) for k in self.lags)
        object.__setattr__(self, "lags", lags)
        if self.statistic in ("acf", "acf0"):
            if not lags:
                raise ConfigError(f"statistic {self.statistic!r} needs a lag list")
            if any(not 1 <= k < self.t for k in lags):
                raise ConfigError(f"lags {lags} out of range for T={self.t}")
        elif lags:
            raise ConfigError(f"statistic {self.statistic!r} takes no lags")
        methods = tuple(self.methods)
        object.__setattr__(self, "methods", methods)
        kinds = [m.kind for m in methods]
        if len(set(kinds)) != len(kinds):
            raise ConfigError("duplicate bootstrap method kinds in one experiment")

    def stat_ids(self) -> tuple:
        if self.statistic in ("mean", "renorm_mean"):
            return (self.statistic,)
        return tuple(f"{self.statistic}_{k}" for k in self.lags)

    def to_dict(self) -> dict:
        return {
            "process": {"d": self.process.d, "phi": self.process.phi,
                        "sigma2": self.process.sigma2},
            "T": self.t,
            "R": self.r,
            "B": self.b,
            "statistic": self.statistic,
            "lags": list(self.lags),
            "methods": [m.to_dict() for m in self.methods],
            "seed": self.seed,
            "bandwidth_rule": self.bandwidth_rule,
            "grid_size": self.grid_size,
            "keep_paths": self.keep_paths,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        try:
            proc = d["process"]
            return cls(
                process=ArfimaSpec(d=proc["d"], phi=proc["phi"],
                                   sigma2=proc.get("sigma2", 1.0)),
                t=d["T"],
                r=d["R"],
                b=d["B"],
                statistic=d.get("statistic", "mean"),
                lags=tuple(d.get("lags", ())),
                methods=tuple(BootstrapMethod.from_dict(m)
                              for m in d.get("methods", [{"kind": "sbs"}])),
                seed=d.get("seed", 0),
                bandwidth_rule=d.get("bandwidth_rule", "silverman"),
                grid_size=d.get("grid_size", 512),
                keep_paths=d.get("keep_paths", False),
            )
        except (KeyError, TypeError, DomainError) as exc:
            raise ConfigError(f"bad experiment config: {exc}") from exc

    def config_hash(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canon.encode()).hexdigest()


@dataclass
class ExperimentResult:
    """Per-statistic Monte Carlo values and bootstrap draws for one config."""

    config: ExperimentConfig
    mc: dict
    draws: dict  # (method_kind, stat_id) -> BootstrapDraws
    paths: np.ndarray | None = None


@dataclass(frozen=True)
class DensityEstimate:
    """A density and its CDF on a grid, tagged with its source."""

    x: np.ndarray
    pdf: np.ndarray
    cdf: np.ndarray
    source: str = ""


@dataclass(frozen=True)
class GofReport:
    """Distributional fit of a subject density against a comparator."""

    rmsd: float
    kld: float
    gini: float
    subject: str
    comparator: str
    n_clipped: int = 0


def _stat_rows(rows: np.ndarray, config: ExperimentConfig) -> np.ndarray:
    """Statistic values for each row; shape (n_rows, n_stat_ids).

    Mean-type statistics center at the known process mean zero; bootstrap
    paths are generated from centered data, so zero is the right center on
    both sides.
    """
    x = np.asarray(rows, dtype=float)
    if config.statistic == "mean":
        return x.mean(axis=1)[:, None]
    if config.statistic == "renorm_mean":
        scale = config.t ** (0.5 - config.process.d)
        return (scale * x.mean(axis=1))[:, None]
    fn = sample_acf_rows if config.statistic == "acf" else sample_acf_zero_rows
    return np.column_stack([fn(x, k) for k in config.lags])


def _run_replication(rep: int, config: ExperimentConfig, acvf_values: np.ndarray):
    acvf = AcvfSequence(acvf_values)
    try:
        path = simulate_gaussian(acvf, config.t, make_stream(config.seed, rep, 0))
        mc_vals = _stat_rows(path[None, :], config)[0]
        per_method = {}
        for m in config.methods:
            rng = make_stream(config.seed, rep, METHOD_STREAM_IDS[m.kind])
            if m.kind == "sbs":
                fit = fit_for_method(path, m)
                draws = sbs_draw_batch(path, fit, config.b, rng)
                d_pre = math.nan
            else:
                d_pre = resolve_prefilter_d(m, path)
                draws, fit = pfsbs_draw_batch(path, d_pre, m, config.b, rng)
            per_method[m.kind] = (_stat_rows(draws, config), fit.h, d_pre)
    except Exception as exc:  # surface the replication index and stream key
        raise ReplicationError(rep, (config.seed, rep), exc) from exc
    return rep, mc_vals, per_method, path if config.keep_paths else None


def run_experiment(config: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run all replications of one experiment cell.

    ``workers`` > 1 distributes replications over a process pool; results
    are written into slots indexed by replication, so worker count and
    scheduling never change the output.
    """
    acvf = arfima_acvf(config.process, config.t - 1)
    stat_ids = config.stat_ids()
    mc = {sid: np.empty(config.r) for sid in stat_ids}
    values = {
        (m.kind, sid): np.empty((config.r, config.b))
        for m in config.methods
        for sid in stat_ids
    }
    h_per = {m.kind: np.empty(config.r, dtype=int) for m in config.methods}
    d_pre_per = {m.kind: np.full(config.r, np.nan) for m in config.methods}
    paths = np.empty((config.r, config.t)) if config.keep_paths else None

    def _store(rep, mc_vals, per_method, path):
        for i, sid in enumerate(stat_ids):
            mc[sid][rep] = mc_vals[i]
        for kind, (vals, h, d_pre) in per_method.items():
            for i, sid in enumerate(stat_ids):
                values[(kind, sid)][rep] = vals[:, i]
            h_per[kind][rep] = h
            d_pre_per[kind][rep] = d_pre
        if paths is not None:
            paths[rep] = path

    if workers > 1 and config.r > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, config.r // (workers * 8))
            results = pool.map(
                _run_replication,
                range(config.r),
                (config for _ in range(config.r)),
                (acvf.values for _ in range(config.r)),
                chunksize=chunk,
            )
            for rep, mc_vals, per_method, path in results:
                _store(rep, mc_vals, per_method, path)
    else:
        for rep in range(config.r):
            _store(*_run_replication(rep, config, acvf.values))

    draws = {
        (m.kind, sid): BootstrapDraws(
            values=values[(m.kind, sid)],
            statistic=sid,
            method=m,
            master_seed=config.seed,
            stream_ids=[[r, METHOD_STREAM_IDS[m.kind]] for r in range(config.r)],
            h_per_rep=h_per[m.kind],
            d_pre_per_rep=d_pre_per[m.kind] if m.kind != "sbs" else None,
        )
        for m in config.methods
        for sid in stat_ids
    }
    return ExperimentResult(config=config, mc=mc, draws=draws, paths=paths)


def average_bootstrap_distribution(values) -> np.ndarray:
    """Columnwise mean of row-sorted draws; non-decreasing by construction."""
    v = np.asarray(values)
    if v.ndim != 2 or v.dtype == object:
        raise DomainError("draws must form a rectangular R x B array")
    return np.sort(np.asarray(v, dtype=float), axis=1).mean(axis=0)


def column_quantiles(values, qs) -> np.ndarray:
    """Per-column quantiles of the row-sorted draws, shape (len(qs), B)."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 2:
        raise DomainError("draws must form a rectangular R x B array")
    return np.quantile(np.sort(v, axis=1), np.asarray(qs), axis=0)


def silverman_bandwidth(points: np.ndarray) -> float:
    """1.06 * min(sd, IQR/1.349) * n^(-1/5)."""
    pts = np.asarray(points, dtype=float)
    sd = float(pts.std(ddof=1))
    q75, q25 = np.percentile(pts, [75.0, 25.0])
    scale = min(sd, (q75 - q25) / 1.349)
    return 1.06 * scale * pts.size ** (-0.2)


def kde(points, grid, bandwidth="silverman", source: str = "") -> DensityEstimate:
    """Gaussian kernel density estimate with cumulative-trapezoid CDF."""
    pts = np.asarray(points, dtype=float)
    x = np.asarray(grid, dtype=float)
    if pts.ndim != 1 or pts.size < 2:
        raise DomainError("need at least two points for a density estimate")
    bw = silverman_bandwidth(pts) if bandwidth == "silverman" else float(bandwidth)
    if not bw > 0.0:
        raise DegenerateVarianceError("degenerate spread: bandwidth is not positive")
    z = (x[:, None] - pts[None, :]) / bw
    pdf = np.exp(-0.5 * z * z).mean(axis=1) / (bw * math.sqrt(2.0 * math.pi))
    cdf = np.concatenate(
        [[0.0], np.cumsum(0.5 * (pdf[1:] + pdf[:-1]) * np.diff(x))]
    )
    return DensityEstimate(x=x, pdf=pdf, cdf=cdf, source=source)


def default_grid(points, grid_size: int = 512, pad_sd: float = 4.0) -> np.ndarray:
    """Evaluation grid spanning the points plus a multiple of their spread."""
    pts = np.asarray(points, dtype=float)
    pad = pad_sd * max(pts.std(), 1e-12)
    return np.linspace(pts.min() - pad, pts.max() + pad, grid_size)


def gof_measures(subject: DensityEstimate, comparator: DensityEstimate,
                 mc_points) -> GofReport:
    """RMSD, sample KLD, and GINI (twice the PP-plot area) at the MC points.

    Densities and CDFs are interpolated at the sorted Monte Carlo values;
    points outside a grid clip to its edge and are counted.  Densities are
    floored at 1e-12 before logs, and the PP-plot area integrates
    |P_subject - P_comparator| against the comparator CDF by trapezoid.
    """
    s = np.sort(np.asarray(mc_points, dtype=float))
    clipped = int(
        np.sum((s < subject.x[0]) | (s > subject.x[-1])
               | (s < comparator.x[0]) | (s > comparator.x[-1]))
    )
    p_bs = np.interp(s, subject.x, subject.pdf)
    p_mc = np.interp(s, comparator.x, comparator.pdf)
    cdf_bs = np.interp(s, subject.x, subject.cdf)
    cdf_mc = np.interp(s, comparator.x, comparator.cdf)
    rmsd = float(np.sqrt(np.mean((p_mc - p_bs) ** 2)))
    kld = float(np.mean(np.log(np.maximum(p_mc, KLD_DENSITY_FLOOR)
                               / np.maximum(p_bs, KLD_DENSITY_FLOOR))))
    gini = float(2.0 * np.trapezoid(np.abs(cdf_bs - cdf_mc), cdf_mc))
    return GofReport(rmsd=rmsd, kld=kld, gini=gini,
                     subject=subject.source, comparator=comparator.source,
                     n_clipped=clipped)


def stdev_ratio(draws, process: ArfimaSpec, t: int) -> float:
    """SD of the averaged bootstrap mean distribution over the exact SD, in percent."""
    values = draws.values if isinstance(draws, BootstrapDraws) else np.asarray(draws)
    avg = average_bootstrap_distribution(values)
    exact = exact_mean_variance(arfima_acvf(process, t - 1), t)
    return float(100.0 * avg.std(ddof=1) / math.sqrt(exact))


# ---------------------------------------------------------------------------
# Persistence: one directory per experiment cell.

def write_experiment(result: ExperimentResult, out_dir) -> None:
    """Write manifest, Monte Carlo values, and per-method draw files."""
    os.makedirs(out_dir, exist_ok=True)
    cfg = result.config
    manifest = {
        "config": cfg.to_dict(),
        "config_sha256": cfg.config_hash(),
        "master_seed": cfg.seed,
        "package_version": __version__,
        "numpy_version": np.__version__,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2)
    stat_ids = cfg.stat_ids()
    mc_mat = np.column_stack([result.mc[sid] for sid in stat_ids])
    with open(os.path.join(out_dir, "mc_values.csv"), "w", newline="") as f:
        f.write(",".join(["replication"] + list(stat_ids)) + "\n")
        for rep in range(cfg.r):
            f.write(",".join([str(rep)] + [repr(float(v)) for v in mc_mat[rep]]) + "\n")
    for (kind, sid), draws in result.draws.items():
        base = os.path.join(out_dir, f"draws_{kind}_{sid}")
        draws.to_csv(base + ".csv")
        draws.write_metadata(base + ".meta.json")
    if result.paths is not None:
        np.savetxt(
            os.path.join(out_dir, "paths.csv"),
            result.paths, delimiter=",",
            header="one row per replication", comments="# ",
        )


def read_experiment(out_dir) -> ExperimentResult:
    """Reload a stored experiment cell (draws and Monte Carlo values)."""
    with open(os.path.join(out_dir, "manifest.json")) as f:
        manifest = json.load(f)
    cfg = ExperimentConfig.from_dict(manifest["config"])
    stat_ids = cfg.stat_ids()
    mc_mat = np.genfromtxt(
        os.path.join(out_dir, "mc_values.csv"), delimiter=",", skip_header=1
    ).reshape(cfg.r, -1)
    mc = {sid: mc_mat[:, 1 + i] for i, sid in enumerate(stat_ids)}
    draws = {}
    for m in cfg.methods:
        for sid in stat_ids:
            base = os.path.join(out_dir, f"draws_{m.kind}_{sid}")
            draws[(m.kind, sid)] = BootstrapDraws.from_csv(
                base + ".csv", base + ".meta.json"
            )
    return ExperimentResult(config=cfg, mc=mc, draws=draws)
