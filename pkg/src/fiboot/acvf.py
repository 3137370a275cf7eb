"""Second-moment theory for fractional noise and ARFIMA(1, d, 0).

Closed-form autocovariances (the Sowell-style p = 1 form, evaluated through
the Gauss hypergeometric series), the exact finite-sample variance of the
sample mean, and the asymptotic variance/bias constants of the re-normalized
mean.

Conventions: the process is (1 - phi*L)(1 - L)^d y(t) = e(t) with innovation
variance sigma2, so its short-run transfer function evaluated at frequency
zero is kappa(1) = 1/(1 - phi).  All Gamma evaluations go through log-gamma
with the arguments kept positive, so nothing overflows at large lags and the
d = 0 case never touches a Gamma pole (the lag recursions handle it
natively).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, InsufficientLagsError

__all__ = [
    "ArfimaSpec",
    "AcvfSequence",
    "Asymptotics",
    "fn_acvf",
    "arfima_acvf",
    "hyp2f1",
    "exact_mean_variance",
    "asymptotics",
]


@dataclass(frozen=True)
class ArfimaSpec:
    """Parameters of a stationary, invertible ARFIMA(1, d, 0) process."""

    d: float
    phi: float
    sigma2: float = 1.0

    def __post_init__(self):
        if not abs(self.d) < 0.5:
            raise DomainError(f"|d| must be below 0.5, got {self.d}")
        if not abs(self.phi) < 1.0:
            raise DomainError(f"|phi| must be below 1, got {self.phi}")
        if not self.sigma2 > 0.0:
            raise DomainError(f"sigma2 must be positive, got {self.sigma2}")


@dataclass(frozen=True)
class AcvfSequence:
    """Autocovariances gamma(0..K) of a stationary process.

    The constructor checks only the cheap invariants (shape, gamma(0) > 0,
    finiteness); full positive-definiteness can be asserted with
    ``is_positive_definite`` which runs the Levinson recursion and demands
    strictly positive prediction variances at every order.
    """

    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise DomainError("autocovariances must form a non-empty 1-d sequence")
        if not np.all(np.isfinite(v)):
            raise DomainError("autocovariances must be finite")
        if not v[0] > 0.0:
            raise DomainError(f"gamma(0) must be positive, got {v[0]}")
        object.__setattr__(self, "values", v)

    @property
    def maxlag(self) -> int:
        return self.values.size - 1

    def gamma(self, k: int) -> float:
        """gamma(k) = gamma(-k)."""
        k = abs(int(k))
        if k > self.maxlag:
            raise InsufficientLagsError(f"lag {k} exceeds maxlag {self.maxlag}")
        return float(self.values[k])

    def is_positive_definite(self) -> bool:
        from .levinson import prediction_variances

        try:
            v = prediction_variances(self, self.maxlag)
        except Exception:
            return False
        return bool(np.all(v > 0.0))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["lag", "gamma"])
            for k, g in enumerate(self.values):
                w.writerow([k, repr(float(g))])

    @classmethod
    def from_csv(cls, path) -> "AcvfSequence":
        with open(path, newline="") as f:
            rows = list(csv.DictReader(f))
        return cls(np.array([float(r["gamma"]) for r in rows]))


@dataclass(frozen=True)
class Asymptotics:
    """Large-T constants for the sample mean of an ARFIMA(1, d, 0) process.

    omega2 is the variance of the limiting normal of T^(1/2-d)*(ybar - mu);
    mean_var_approx = T^(2d-1)*omega2 approximates Var[ybar]; acvf_bias is
    the lag-independent asymptotic bias E[gammahat(k) - gamma(k)].
    """

    omega2: float
    mean_var_approx: float
    acvf_bias: float


def fn_acvf(d: float, sigma2: float, maxlag: int) -> AcvfSequence:
    """Autocovariances of fractional noise (1 - L)^(-d) e(t).

    gamma(0) = sigma2 * Gamma(1-2d) / Gamma(1-d)^2 and
    gamma(k) = gamma(k-1) * (k-1+d) / (k-d); the ratio form is exact for
    d = 0 (white noise) and never evaluates Gamma at a pole.
    """
    if not abs(d) < 0.5:
        raise DomainError(f"|d| must be below 0.5, got {d}")
    if not sigma2 > 0.0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    if maxlag < 0:
        raise DomainError("maxlag must be non-negative")
    g0 = sigma2 * math.exp(math.lgamma(1.0 - 2.0 * d) - 2.0 * math.lgamma(1.0 - d))
    values = np.empty(maxlag + 1)
    values[0] = g0
    if maxlag > 0:
        k = np.arange(1, maxlag + 1, dtype=float)
        values[1:] = g0 * np.cumprod((k - 1.0 + d) / (k - d))
    return AcvfSequence(values)


def hyp2f1(a: float, b: float, c: float, z: float, *,
           rtol: float = 1e-12, max_terms: int = 100_000) -> float:
    """Gauss hypergeometric series 2F1(a, b; c; z) for |z| < 1.

    Plain term-by-term summation of the Gauss series to relative tolerance
    ``rtol``; raises ``ConvergenceError`` if ``max_terms`` terms do not
    suffice.
    """
    if not abs(z) < 1.0:
        raise DomainError(f"series requires |z| < 1, got z={z}")
    if c <= 0.0 and float(c).is_integer():
        raise DomainError(f"c must not be a non-positive integer, got c={c}")
    total = 1.0
    term = 1.0
    for m in range(max_terms):
        term *= (a + m) * (b + m) / ((c + m) * (1.0 + m)) * z
        total += term
        if abs(term) <= rtol * abs(total):
            return total
    raise ConvergenceError(
        f"2F1({a},{b};{c};{z}) did not reach rtol={rtol} in {max_terms} terms"
    )


def arfima_acvf(spec: ArfimaSpec, maxlag: int) -> AcvfSequence:
    """Exact autocovariances of ARFIMA(1, d, 0).

    Writes y(t) = w(t)/(1 - phi*L) with w fractional noise and sums the
    resulting two-sided geometric convolution in closed form:

        gamma_y(k) = [ gamma_w(k)*H(k) + S(k) + phi^k*gamma_w(0)*(H(0)-1) ]
                     / (1 - phi^2),

    where H(k) = 2F1(1, k+d; k+1-d; phi) accumulates the tail
    sum_{m>=0} phi^m gamma_w(k+m) and S(k) = sum_{m=1}^{k} phi^m gamma_w(k-m)
    is carried by a one-term recursion.  The result is validated in the test
    suite against the exact second-difference identity that links gamma_y to
    the fractional-noise autocovariances.
    """
    if maxlag < 0:
        raise DomainError("maxlag must be non-negative")
    gw = fn_acvf(spec.d, spec.sigma2, maxlag)
    phi = spec.phi
    if phi == 0.0:
        return gw
    g = np.empty(maxlag + 1)
    h0 = hyp2f1(1.0, spec.d, 1.0 - spec.d, phi)
    scale = 1.0 / (1.0 - phi * phi)
    running = 0.0  # S(k)
    phi_k = 1.0
    for k in range(maxlag + 1):
        hk = h0 if k == 0 else hyp2f1(1.0, k + spec.d, k + 1.0 - spec.d, phi)
        g[k] = scale * (gw.values[k] * hk + running + phi_k * gw.values[0] * (h0 - 1.0))
        running = phi * (gw.values[k] + running)
        phi_k *= phi
    return AcvfSequence(g)


def exact_mean_variance(acvf: AcvfSequence, t: int) -> float:
    """Exact Var[ybar_T] = (1/T) * sum_{|k|<T} (1 - |k|/T) gamma(k)."""
    if t < 1:
        raise DomainError("T must be at least 1")
    if acvf.maxlag < t - 1:
        raise InsufficientLagsError(
            f"need gamma up to lag {t - 1}, have maxlag {acvf.maxlag}"
        )
    g = acvf.values[:t]
    if t == 1:
        return float(g[0])
    k = np.arange(1, t, dtype=float)
    return float((g[0] + 2.0 * np.dot(1.0 - k / t, g[1:])) / t)


def asymptotics(spec: ArfimaSpec, t: int) -> Asymptotics:
    """Asymptotic constants for the sample mean at sample size T.

    omega2 = (sigma*kappa(1))^2 Gamma(1-2d) / [(1+2d) Gamma(1+d) Gamma(1-d)]
    with kappa(1) = 1/(1-phi); the Gamma factors collapse to 1 at d = 0.
    """
    if t < 2:
        raise DomainError("T must be at least 2")
    d = spec.d
    kappa1 = 1.0 / (1.0 - spec.phi)
    log_gamma_ratio = (
        math.lgamma(1.0 - 2.0 * d)
        - math.lgamma(1.0 + d)
        - math.lgamma(1.0 - d)
    )
    omega2 = spec.sigma2 * kappa1 * kappa1 * math.exp(log_gamma_ratio) / (1.0 + 2.0 * d)
    scale = float(t) ** (2.0 * d - 1.0)
    return Asymptotics(
        omega2=omega2,
        mean_var_approx=omega2 * scale,
        acvf_bias=-omega2 * scale,
    )
