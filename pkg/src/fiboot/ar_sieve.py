"""Autoregressive sieve fitting with Yule-Walker, Burg, or least squares.

All estimators return coefficients in the phi(0) = 1 convention of
``fiboot.levinson``.  Data are mean-centered before fitting and the mean is
added back nowhere.  Residuals use circular initial values, y(1-j) =
y(T-j+1), and are standardized to mean zero and unit variance with divisor
T, so a fit always carries exactly T standardized residuals ready for
resampling.

Estimator notes:

* Yule-Walker feeds the divisor-T sample autocovariances (which keep the
  Toeplitz system positive definite) into the Levinson recursion, so the
  fitted polynomial is always stable.
* Burg minimizes summed forward and backward prediction error through
  reflection coefficients, which are bounded by one in modulus.
* Least squares regresses y(t) on its lags over t = h+1..T with no
  stability constraint.

Order selection minimizes log(sigma2_h) + 2h/T over h = 0..floor((log T)^2),
with sigma2_h the selected estimator's own residual variance at order h and
exact ties resolved toward the smaller order.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .acvf import AcvfSequence
from .errors import (
    DegenerateVarianceError,
    DomainError,
    OrderMismatchError,
    SingularDesignError,
)
from .levinson import LevinsonSolution, levinson_solve

__all__ = [
    "METHODS",
    "SieveFit",
    "OrderSelection",
    "fit",
    "select_order_aic",
    "max_aic_order",
    "yw_coefficient_error",
    "burg_coeffs",
    "yule_walker_coeffs",
    "least_squares_coeffs",
    "sample_acvf_divisor_t",
]

METHODS = ("yule_walker", "burg", "least_squares")


@dataclass(frozen=True)
class SieveFit:
    """A fitted AR(h) sieve plus its standardized residuals."""

    method: str
    h: int
    phi_bar: np.ndarray
    sigma2_bar: float
    residuals_std: np.ndarray
    n_obs: int

    @property
    def sigma_bar(self) -> float:
        return math.sqrt(self.sigma2_bar)

    def to_json(self) -> str:
        return json.dumps(
            {
                "method": self.method,
                "h": self.h,
                "phi_bar": [float(p) for p in self.phi_bar],
                "sigma2_bar": float(self.sigma2_bar),
                "n_obs": self.n_obs,
            },
            indent=2,
        )

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["method", "h", "sigma2_bar", "j", "phi_bar_j"])
            if self.h == 0:
                w.writerow([self.method, 0, repr(self.sigma2_bar), "", ""])
            for j, p in enumerate(self.phi_bar, start=1):
                w.writerow([self.method, self.h, repr(self.sigma2_bar), j, repr(float(p))])


@dataclass(frozen=True)
class OrderSelection:
    """AIC order choice: selected order, search cap, and the AIC trace."""

    h_hat: int
    m_cap: int
    aic: np.ndarray


def max_aic_order(t: int) -> int:
    """Search cap floor((log T)^2) for the sieve order."""
    return int(math.floor(math.log(t) ** 2))


def sample_acvf_divisor_t(series, maxlag: int) -> AcvfSequence:
    """Mean-centered sample autocovariances with divisor T."""
    y = np.asarray(series, dtype=float)
    t = y.size
    if maxlag >= t:
        raise DomainError(f"maxlag {maxlag} must be below series length {t}")
    yc = y - y.mean()
    values = np.empty(maxlag + 1)
    for k in range(maxlag + 1):
        values[k] = np.dot(yc[: t - k], yc[k:]) / t
    if not values[0] > 0.0:
        raise DegenerateVarianceError("series has zero sample variance")
    return AcvfSequence(values)


def _validate_series(series, h: int) -> np.ndarray:
    y = np.ascontiguousarray(series, dtype=float)
    if y.ndim != 1:
        raise DomainError("series must be one-dimensional")
    t = y.size
    if h < 0 or h >= t:
        raise DomainError(f"order h={h} must satisfy 0 <= h < T={t}")
    if t < max(h + 1, 2):
        raise DomainError(f"series of length {t} too short for order {h}")
    return y


def _burg_sweep(yc: np.ndarray, max_order: int):
    """Reflection coefficients k_1..k_M and variances E_0..E_M in one pass."""
    n = yc.size
    ef = yc.copy()
    eb = yc.copy()
    e = float(np.dot(yc, yc) / n)
    ks = np.zeros(max_order)
    es = np.empty(max_order + 1)
    es[0] = e
    for m in range(1, max_order + 1):
        f = ef[m:]
        b = eb[m - 1:n - 1]
        den = np.dot(f, f) + np.dot(b, b)
        if den > 0.0:
            k = 2.0 * np.dot(f, b) / den
            ks[m - 1] = k
            e *= 1.0 - k * k
            ef[m:] = f - k * b
            eb[m:] = b - k * f
        # den == 0: the series is already perfectly predicted; remaining
        # reflections are zero and the variance stays put.
        es[m] = e
    return ks, es


def _coeffs_from_reflections(ks: np.ndarray, h: int) -> np.ndarray:
    pi = np.empty(0)
    for m in range(1, h + 1):
        nxt = np.empty(m)
        if m > 1:
            nxt[: m - 1] = pi - ks[m - 1] * pi[::-1]
        nxt[m - 1] = ks[m - 1]
        pi = nxt
    return pi


def burg_coeffs(series, h: int):
    """Burg estimate at order h: (phi_bar, sigma2_bar, reflections)."""
    y = _validate_series(series, h)
    yc = y - y.mean()
    ks, es = _burg_sweep(yc, h)
    return -_coeffs_from_reflections(ks, h), float(es[h]), ks


def yule_walker_coeffs(series, h: int):
    """Yule-Walker estimate at order h: (phi_bar, sigma2_bar, pacf)."""
    y = _validate_series(series, h)
    acvf = sample_acvf_divisor_t(y, h)
    sol = levinson_solve(acvf, h)
    return sol.phi, sol.sigma2, sol.pacf


def least_squares_coeffs(series, h: int):
    """Least-squares estimate at order h: (phi_bar, sigma2_bar).

    Minimizes sum_{t=h+1}^{T} (y(t) + sum_j phi(j) y(t-j))^2; the residual
    variance is the mean square over the T-h fitted observations.
    """
    y = _validate_series(series, h)
    yc = y - y.mean()
    t = yc.size
    if h == 0:
        return np.empty(0), float(np.dot(yc, yc) / t), None
    x = np.column_stack([yc[h - j: t - j] for j in range(1, h + 1)])
    target = yc[h:]
    coef, _, rank, _ = np.linalg.lstsq(x, target, rcond=None)
    if rank < h:
        raise SingularDesignError(f"lag design matrix has rank {rank} < {h}")
    resid = target - x @ coef
    return -coef, float(np.dot(resid, resid) / (t - h)), None


def _circular_residuals(yc: np.ndarray, phi_bar: np.ndarray) -> np.ndarray:
    t = yc.size
    eps = yc.copy()
    for j, p in enumerate(phi_bar, start=1):
        eps += p * np.roll(yc, j)
    return eps


def fit(series, h: int, method: str = "burg") -> SieveFit:
    """Fit an AR(h) sieve and attach its standardized residuals.

    Raises ``DegenerateVarianceError`` when the residual spread collapses
    (constant series, or a perfectly predictable one).
    """
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}, expected one of {METHODS}")
    y = _validate_series(series, h)
    yc = y - y.mean()
    if method == "burg":
        phi_bar, sigma2_bar, _ = burg_coeffs(y, h)
    elif method == "yule_walker":
        phi_bar, sigma2_bar, _ = yule_walker_coeffs(y, h)
    else:
        phi_bar, sigma2_bar, _ = least_squares_coeffs(y, h)
    eps = _circular_residuals(yc, phi_bar)
    s2 = float(np.var(eps))
    if not s2 > 0.0:
        raise DegenerateVarianceError("residuals have zero variance")
    residuals_std = (eps - eps.mean()) / math.sqrt(s2)
    return SieveFit(
        method=method,
        h=h,
        phi_bar=np.asarray(phi_bar, dtype=float),
        sigma2_bar=float(sigma2_bar),
        residuals_std=residuals_std,
        n_obs=y.size,
    )


def select_order_aic(series, method: str = "burg", m_cap: int | None = None) -> OrderSelection:
    """Pick the sieve order by AIC over h = 0..floor((log T)^2)."""
    y = np.asarray(series, dtype=float)
    t = y.size
    if t < 8:
        raise DomainError(f"need T >= 8 for order selection, got {t}")
    cap = max_aic_order(t) if m_cap is None else int(m_cap)
    cap = min(cap, t - 1)
    if method == "burg":
        _, es = _burg_sweep(y - y.mean(), cap)
        sigma2 = es
    elif method == "yule_walker":
        from .levinson import prediction_variances

        sigma2 = prediction_variances(sample_acvf_divisor_t(y, cap), cap)
    elif method == "least_squares":
        sigma2 = np.array([least_squares_coeffs(y, h)[1] for h in range(cap + 1)])
    else:
        raise DomainError(f"unknown method {method!r}, expected one of {METHODS}")
    with np.errstate(divide="ignore"):
        aic = np.log(sigma2) + 2.0 * np.arange(cap + 1) / t
    h_hat = int(np.argmin(aic))  # argmin takes the first minimum: small h wins ties
    return OrderSelection(h_hat=h_hat, m_cap=cap, aic=aic)


def yw_coefficient_error(fitted: SieveFit, truth: LevinsonSolution) -> float:
    """Squared coefficient error sum_{j=1}^{h} (phi_bar(j) - phi(j))^2."""
    if fitted.h != truth.order:
        raise OrderMismatchError(f"orders differ: fit {fitted.h} vs truth {truth.order}")
    diff = fitted.phi_bar - truth.phi
    return float(np.dot(diff, diff))
