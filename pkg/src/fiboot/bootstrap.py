"""Sieve bootstrap generators: raw, pre-filtered, and fixed pre-filter.

The raw generator (``sbs_draw``) resamples the fitted sieve's standardized
residuals with replacement, rescales them by the fitted innovation standard
deviation, and runs the fitted recursion forward with initial values taken
from a randomly positioned block of the observed (centered) data.  There is
no burn-in: the path starts at the random data block.

The pre-filtered generator fractionally differences the data with an
exponent d_pre (estimated per series for PFSBS, fixed for FPFBS), applies
the raw generator to the filtered series, and integrates each bootstrap path
back with the exponent -d_pre on the expanding window.  Pre-filter exponents
must lie in the open window (-0.5, 0.5*(1 - eps)); the nominal fixed value
0.5 is clamped to 0.5 - 1e-3 and the clamp is recorded in run metadata.

Randomness: residual indices come from floor(uniform * T) and the starting
block index tau from the discrete uniform distribution on {h, ..., T}, drawn
before the residual indices.  Batch variants draw all tau values first, then
the full index block, so a batch is deterministic in (series, fit, B,
stream) but consumes the stream differently from B single draws.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import ar_sieve, stats
from .acvf import AcvfSequence
from .errors import AdmissibilityError, DomainError, InsufficientLagsError
from .fracdiff import apply_frac_filter, apply_frac_filter_many

__all__ = [
    "ADMISSIBLE_EPS",
    "BootstrapMethod",
    "BootstrapDraws",
    "PercentileSet",
    "check_admissible",
    "resolve_prefilter_d",
    "fit_for_method",
    "sbs_draw",
    "sbs_draw_batch",
    "pfsbs_draw",
    "pfsbs_draw_batch",
    "sieve_implied_acvf",
    "percentile_set",
]

METHOD_KINDS = ("sbs", "pfsbs", "fpfbs")

# Admissible open window for pre-filter exponents: (-0.5, 0.5*(1 - eps)).
ADMISSIBLE_EPS = 1e-3
NOMINAL_FIXED_PREFILTER = 0.5


@dataclass(frozen=True)
class BootstrapMethod:
    """Configuration of one bootstrap generator.

    kind: "sbs", "pfsbs", or "fpfbs".  prefilter_d overrides the pre-filter
    exponent (fpfbs defaults to the nominal 0.5, clamped into the window;
    pfsbs estimates per series when it is None).  order_rule is a fixed
    integer order or "aic"; estimator one of the sieve fitting methods.
    """

    kind: str
    prefilter_d: float | None = None
    order_rule: int | str = "aic"
    estimator: str = "burg"
    prefilter_bandwidth: int | None = None
    prefilter_offset: float = 0.0

    def __post_init__(self):
        if self.kind not in METHOD_KINDS:
            raise DomainError(f"unknown bootstrap kind {self.kind!r}")
        if self.estimator not in ar_sieve.METHODS:
            raise DomainError(f"unknown estimator {self.estimator!r}")
        if not (self.order_rule == "aic" or isinstance(self.order_rule, int)):
            raise DomainError("order_rule must be 'aic' or a fixed integer order")
        if isinstance(self.order_rule, int) and self.order_rule < 0:
            raise DomainError("fixed order must be non-negative")
        if self.kind == "sbs" and self.prefilter_d is not None:
            raise DomainError("sbs takes no pre-filter exponent")
        if self.kind == "pfsbs" and self.prefilter_d is not None:
            check_admissible(self.prefilter_d)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "prefilter_d": self.prefilter_d,
            "order_rule": self.order_rule,
            "estimator": self.estimator,
            "prefilter_bandwidth": self.prefilter_bandwidth,
            "prefilter_offset": self.prefilter_offset,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BootstrapMethod":
        return cls(**d)


def admissible_window() -> tuple[float, float]:
    return (-0.5, 0.5 * (1.0 - ADMISSIBLE_EPS))


def check_admissible(d_pre: float) -> float:
    lo, hi = admissible_window()
    if not lo < d_pre < hi:
        raise AdmissibilityError(
            f"pre-filter exponent {d_pre} outside the open window ({lo}, {hi})"
        )
    return float(d_pre)


def resolve_prefilter_d(method: BootstrapMethod, series) -> float | None:
    """Effective pre-filter exponent for one series, or None for raw SBS.

    fpfbs: the configured (nominally 0.5) fixed value clamped into the
    window.  pfsbs: the configured override, or the local Whittle estimate
    at bandwidth floor(T^0.65) plus the additive offset, clamped.
    """
    if method.kind == "sbs":
        return None
    if method.kind == "fpfbs":
        requested = (
            NOMINAL_FIXED_PREFILTER if method.prefilter_d is None else method.prefilter_d
        )
        return stats.clamp_memory_exponent(requested)
    if method.prefilter_d is not None:
        return check_admissible(method.prefilter_d)
    y = np.asarray(series, dtype=float)
    n = method.prefilter_bandwidth or stats.default_lw_bandwidth(y.size)
    est = stats.local_whittle(stats.periodogram(y), n)
    return stats.clamp_memory_exponent(est.d_hat + method.prefilter_offset)


def fit_for_method(series, method: BootstrapMethod) -> ar_sieve.SieveFit:
    """Fit the sieve for a generator: fixed order, or AIC-selected."""
    if method.order_rule == "aic":
        h = ar_sieve.select_order_aic(series, method.estimator).h_hat
    else:
        h = int(method.order_rule)
    return ar_sieve.fit(series, h, method.estimator)


def _draw_tau(rng, t: int, h: int) -> int:
    # discrete uniform on {h, ..., T}
    return h + int(math.floor(rng.random() * (t - h + 1)))


def _recursion(eps_star: np.ndarray, init: np.ndarray, phi_bar: np.ndarray) -> np.ndarray:
    """Run y*(t) = -sum_j phi(j) y*(t-j) + eps*(t) for a 2-d batch."""
    b, t = eps_star.shape
    h = phi_bar.size
    if h == 0:
        return eps_star.copy()
    phi_rev = phi_bar[::-1].copy()
    buf = np.empty((b, h + t))
    buf[:, :h] = init
    for s in range(t):
        buf[:, h + s] = eps_star[:, s] - buf[:, s: h + s] @ phi_rev
    return buf[:, h:]


def sbs_draw(series, fit: ar_sieve.SieveFit, rng, return_details: bool = False):
    """One raw sieve bootstrap path of the same length as the data.

    Draws T residual indices by floor(uniform*T), rescales the resampled
    standardized residuals by sigma_bar, initializes the recursion at the
    data block ending at the random position tau, and iterates the fitted
    recursion with no burn-in.
    """
    y = np.asarray(series, dtype=float)
    t = y.size
    h = fit.h
    if t != fit.n_obs:
        raise DomainError("series length differs from the fitted series length")
    if h >= t:
        raise DomainError(f"order {h} must be below series length {t}")
    yc = y - y.mean()
    if h > 0:
        tau = _draw_tau(rng, t, h)
        init = yc[tau - h: tau]
    else:
        tau = None
        init = np.empty(0)
    idx = np.floor(rng.random(t) * t).astype(np.int64)
    eps_star = fit.sigma_bar * fit.residuals_std[idx]
    path = _recursion(eps_star[None, :], init[None, :], fit.phi_bar)[0]
    if return_details:
        return path, eps_star, tau
    return path


def sbs_draw_batch(series, fit: ar_sieve.SieveFit, n_draws: int, rng) -> np.ndarray:
    """``n_draws`` raw sieve bootstrap paths as rows of one array.

    All tau values are drawn first, then the full residual-index block, so
    the batch is a deterministic function of (series, fit, n_draws, stream).
    """
    y = np.asarray(series, dtype=float)
    t = y.size
    h = fit.h
    if t != fit.n_obs:
        raise DomainError("series length differs from the fitted series length")
    if h >= t:
        raise DomainError(f"order {h} must be below series length {t}")
    if n_draws < 1:
        raise DomainError("need at least one draw")
    yc = y - y.mean()
    if h > 0:
        taus = h + np.floor(rng.random(n_draws) * (t - h + 1)).astype(np.int64)
        init = yc[taus[:, None] - h + np.arange(h)[None, :]]
    else:
        init = np.empty((n_draws, 0))
    idx = np.floor(rng.random((n_draws, t)) * t).astype(np.int64)
    eps_star = fit.sigma_bar * fit.residuals_std[idx]
    return _recursion(eps_star, init, fit.phi_bar)


def pfsbs_draw(series, d_pre: float, method: BootstrapMethod, rng) -> np.ndarray:
    """One pre-filtered sieve bootstrap path.

    Difference the data with exponent d_pre, sieve-bootstrap the filtered
    series, and integrate the bootstrap path back with exponent -d_pre.
    With d_pre = 0 this reproduces the raw draw exactly.
    """
    check_admissible(d_pre)
    w = apply_frac_filter(series, d_pre)
    fit = fit_for_method(w, method)
    w_star = sbs_draw(w, fit, rng)
    return apply_frac_filter(w_star, -d_pre)


def pfsbs_draw_batch(series, d_pre: float, method: BootstrapMethod,
                     n_draws: int, rng):
    """Batch pre-filtered draws; returns (paths, fit) with one shared fit."""
    check_admissible(d_pre)
    w = apply_frac_filter(series, d_pre)
    fit = fit_for_method(w, method)
    w_star = sbs_draw_batch(w, fit, n_draws, rng)
    return apply_frac_filter_many(w_star, -d_pre), fit


def sieve_implied_acvf(fit: ar_sieve.SieveFit, sample_acvf: AcvfSequence,
                       maxlag: int) -> AcvfSequence:
    """Autocovariances the fitted sieve implies for its bootstrap paths.

    gamma_bar(k) equals the sample autocovariance up to lag h, and for k > h
    extends by the fitted recursion sum_j phi_bar(j) gamma_bar(k-j) = 0.
    Feeding the result to ``exact_mean_variance`` gives the variance the
    bootstrap distribution of the path mean is aiming at.
    """
    h = fit.h
    if sample_acvf.maxlag < h:
        raise InsufficientLagsError(
            f"sample autocovariances reach lag {sample_acvf.maxlag} < h = {h}"
        )
    if maxlag < h:
        raise InsufficientLagsError(f"maxlag {maxlag} must be at least h = {h}")
    g = np.empty(maxlag + 1)
    g[: h + 1] = sample_acvf.values[: h + 1]
    phi_rev = fit.phi_bar[::-1].copy()
    for k in range(h + 1, maxlag + 1):
        g[k] = -np.dot(g[k - h: k], phi_rev) if h > 0 else 0.0
    return AcvfSequence(g)


@dataclass(frozen=True)
class PercentileSet:
    """Symmetric percentile set {s : (s - center)^2 <= halfwidth^2}."""

    center: float
    halfwidth: float
    alpha: float

    @property
    def lo(self) -> float:
        return self.center - self.halfwidth

    @property
    def hi(self) -> float:
        return self.center + self.halfwidth

    def contains(self, s: float) -> bool:
        return (s - self.center) ** 2 <= self.halfwidth ** 2


def percentile_set(draws, alpha: float) -> PercentileSet:
    """Elliptical percentile set for a scalar statistic.

    Centers on the bootstrap mean and takes the empirical (1 - alpha)
    quantile of the squared centered draws as the squared half-width.
    """
    v = np.asarray(draws, dtype=float)
    if v.ndim != 1 or v.size < 20:
        raise DomainError("need at least 20 one-dimensional draws")
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    center = float(v.mean())
    q = float(np.quantile((v - center) ** 2, 1.0 - alpha))
    return PercentileSet(center=center, halfwidth=math.sqrt(q), alpha=alpha)


@dataclass
class BootstrapDraws:
    """R x B bootstrap statistic values plus per-replication metadata."""

    values: np.ndarray
    statistic: str
    method: BootstrapMethod
    master_seed: int
    stream_ids: list = field(default_factory=list)
    h_per_rep: np.ndarray | None = None
    d_pre_per_rep: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise DomainError("draw values must form an R x B array")
        if not np.all(np.isfinite(v)):
            raise DomainError("every draw must be finite")
        self.values = v

    @property
    def n_replications(self) -> int:
        return self.values.shape[0]

    @property
    def n_draws(self) -> int:
        return self.values.shape[1]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["replication", "draw", "value"])
            for r in range(self.values.shape[0]):
                for b in range(self.values.shape[1]):
                    w.writerow([r, b, repr(float(self.values[r, b]))])

    def metadata(self) -> dict:
        meta = {
            "statistic": self.statistic,
            "method": self.method.to_dict(),
            "master_seed": self.master_seed,
            "stream_ids": list(self.stream_ids),
            "n_replications": int(self.values.shape[0]),
            "n_draws": int(self.values.shape[1]),
        }
        if self.h_per_rep is not None:
            meta["h_per_replication"] = [int(h) for h in self.h_per_rep]
        if self.d_pre_per_rep is not None:
            meta["d_pre_per_replication"] = [
                None if not np.isfinite(d) else float(d) for d in self.d_pre_per_rep
            ]
        return meta

    def write_metadata(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.metadata(), f, indent=2)
        return None

    @classmethod
    def from_csv(cls, csv_path, meta_path) -> "BootstrapDraws":
        with open(meta_path) as f:
            meta = json.load(f)
        r, b = meta["n_replications"], meta["n_draws"]
        values = np.empty((r, b))
        with open(csv_path, newline="") as f:
            for row in csv.DictReader(f):
                values[int(row["replication"]), int(row["draw"])] = float(row["value"])
        d_pre = meta.get("d_pre_per_replication")
        return cls(
            values=values,
            statistic=meta["statistic"],
            method=BootstrapMethod.from_dict(meta["method"]),
            master_seed=meta["master_seed"],
            stream_ids=meta.get("stream_ids", []),
            h_per_rep=np.array(meta["h_per_replication"])
            if "h_per_replication" in meta
            else None,
            d_pre_per_rep=np.array(
                [np.nan if d is None else d for d in d_pre], dtype=float
            )
            if d_pre is not None
            else None,
        )
