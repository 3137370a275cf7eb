"""Second-order Edgeworth expansion for zero-mean sample autocorrelations.

For a zero-mean Gaussian vector x ~ N(0, Sigma) the event
{sqrt(T)(rhohat0(k) - rho(k)) < c} coincides with {x'Bx < 0} where
B = A - (rho(k) + c/sqrt(T)) I and A carries 1/2 on the two lag-k diagonals.
The cumulants of the quadratic form are
kappa_r = 2^(r-1) (r-1)! tr[(B Sigma)^r], and the expansion evaluates

    F(c) = Phi(u) - { e3/6 H2(u) + e4/24 H3(u) + e3^2/72 H5(u) } phi(u)

at u = -kappa_1/sqrt(kappa_2), with e_r the standardized cumulants and
H2, H3, H5 the Hermite polynomials u^2-1, u^3-3u, u^5-10u^3+15u.

The expansion is a valid second-order approximation only for memory
exponents d < 0.1; calls outside that region raise unless ``override`` is
set.  Curve evaluation re-derives the cumulants at every grid point (B
depends on c).  The reference path computes dense matrix powers per point;
the curve evaluator instead expands tr[(A*Sigma - s*Sigma)^r] once into
traces of fixed words in A*Sigma and Sigma, after which each grid point is a
degree-4 polynomial in s = rho(k) + c/sqrt(T).  The two paths agree to
floating-point accuracy and the test suite pins them together at 1e-8.

Densities on the rhohat0 scale come from central finite differences of the
CDF (the cumulants' dependence on c makes analytic derivatives error-prone);
the default grid spans +/-6 asymptotic standard deviations in steps of
sd/25.  Monotonicity or positivity failures of the raw expansion are
recorded in per-point validity flags, never repaired.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .acvf import AcvfSequence
from .errors import DomainError, LagError, SingularityError, ValidityError

__all__ = [
    "ToeplitzCov",
    "EdgeworthCurve",
    "build_A",
    "build_B",
    "toeplitz_cov",
    "quadform_cumulants",
    "expansion_cdf",
    "edgeworth_cdf_W",
    "edgeworth_density_rho0",
    "asymptotic_sd_rho0",
]

VALIDITY_LIMIT = 0.1


@dataclass(frozen=True)
class ToeplitzCov:
    """Symmetric positive-definite Toeplitz covariance of dimension T."""

    sigma: np.ndarray

    @property
    def dim(self) -> int:
        return self.sigma.shape[0]


@dataclass(frozen=True)
class EdgeworthCurve:
    """Expansion evaluated on a grid, on the rhohat0 scale.

    x are statistic values, c = sqrt(T)(x - rho) the corresponding expansion
    arguments, kappas the four quadratic-form cumulants per point, and valid
    flags where the raw expansion is monotone with non-negative density.
    """

    lag: int
    rho: float
    t: int
    d: float
    x: np.ndarray
    c: np.ndarray
    cdf: np.ndarray
    density: np.ndarray
    kappas: np.ndarray
    valid: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["x", "cdf", "density", "kappa1", "kappa2", "kappa3", "kappa4", "valid"])
            for i in range(self.x.size):
                w.writerow(
                    [repr(float(self.x[i])), repr(float(self.cdf[i])),
                     repr(float(self.density[i]))]
                    + [repr(float(k)) for k in self.kappas[i]]
                    + [int(self.valid[i])]
                )


def toeplitz_cov(acvf: AcvfSequence, t: int) -> ToeplitzCov:
    """Build the T x T Toeplitz covariance and verify positive definiteness."""
    if acvf.maxlag < t - 1:
        raise DomainError(f"need gamma up to lag {t - 1}, have {acvf.maxlag}")
    idx = np.abs(np.arange(t)[:, None] - np.arange(t)[None, :])
    sigma = acvf.values[idx]
    try:
        np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise SingularityError("covariance matrix is not positive definite") from exc
    return ToeplitzCov(sigma=sigma)


def build_A(t: int, k: int) -> np.ndarray:
    """Band matrix with 1/2 on the two lag-k diagonals (identity for k = 0)."""
    if k == 0:
        return np.eye(t)
    if not 1 <= k < t:
        raise LagError(f"lag {k} out of range for T={t}")
    a = np.zeros((t, t))
    i = np.arange(t - k)
    a[i, i + k] = 0.5
    a[i + k, i] = 0.5
    return a


def build_B(t: int, k: int, rho_k: float, c: float) -> np.ndarray:
    """B = A - (rho(k) + c/sqrt(T)) I for the lag-k quadratic form."""
    if not 1 <= k < t:
        raise LagError(f"lag {k} out of range for T={t}")
    b = build_A(t, k)
    shift = rho_k + c / math.sqrt(t)
    b[np.diag_indices(t)] -= shift
    return b


def quadform_cumulants(b: np.ndarray, sigma, r_max: int = 4) -> np.ndarray:
    """Cumulants of x'Bx for x ~ N(0, Sigma): 2^(r-1)(r-1)! tr[(B Sigma)^r].

    Reference dense path: powers of M = B Sigma accumulated by matrix
    multiplication, r_max at most 4.
    """
    s = sigma.sigma if isinstance(sigma, ToeplitzCov) else np.asarray(sigma, dtype=float)
    if not 1 <= r_max <= 4:
        raise DomainError("r_max must be between 1 and 4")
    if b.shape != s.shape or b.shape[0] != b.shape[1]:
        raise DomainError("B and Sigma must be square with matching shapes")
    m = b @ s
    traces = [np.trace(m)]
    if r_max >= 2:
        m2 = m @ m
        traces.append(np.trace(m2))
    if r_max >= 3:
        traces.append(np.sum(m2 * m.T))
    if r_max >= 4:
        traces.append(np.sum(m2 * m2.T))
    return np.array(
        [2.0 ** (r - 1) * math.factorial(r - 1) * tr for r, tr in enumerate(traces, start=1)]
    )


def _norm_pdf(u: float) -> float:
    return math.exp(-0.5 * u * u) / math.sqrt(2.0 * math.pi)


def _norm_cdf(u: float) -> float:
    return 0.5 * (1.0 + math.erf(u / math.sqrt(2.0)))


def expansion_cdf(kappas, terms: str = "second") -> float:
    """Evaluate the expansion from the four cumulants of the quadratic form.

    With the third and fourth cumulants both zero this collapses to the
    Gaussian leading term Phi(u).  ``terms="first"`` keeps only the
    skewness correction.
    """
    k1, k2, k3, k4 = (float(k) for k in kappas)
    if not k2 > 0.0:
        raise SingularityError("second cumulant must be positive")
    u = -k1 / math.sqrt(k2)
    e3 = k3 / k2 ** 1.5
    e4 = k4 / (k2 * k2)
    h2 = u * u - 1.0
    h3 = u ** 3 - 3.0 * u
    h5 = u ** 5 - 10.0 * u ** 3 + 15.0 * u
    if terms == "first":
        correction = e3 / 6.0 * h2
    elif terms == "second":
        correction = e3 / 6.0 * h2 + e4 / 24.0 * h3 + e3 * e3 / 72.0 * h5
    else:
        raise DomainError(f"terms must be 'first' or 'second', got {terms!r}")
    return _norm_cdf(u) - correction * _norm_pdf(u)


def _check_validity(d: float, override: bool) -> None:
    if d >= VALIDITY_LIMIT and not override:
        raise ValidityError(
            f"expansion is valid only for d < {VALIDITY_LIMIT}; got d={d} "
            f"(pass override=True to evaluate anyway)"
        )


def edgeworth_cdf_W(c: float, k: int, acvf: AcvfSequence, t: int, d: float,
                    override: bool = False, terms: str = "second") -> float:
    """Expansion CDF of W = sqrt(T)(rhohat0(k) - rho(k)) at the point c.

    Dense reference path: builds Sigma and B explicitly and takes matrix
    powers.  Use ``edgeworth_density_rho0`` for whole curves.
    """
    _check_validity(d, override)
    cov = toeplitz_cov(acvf, t)
    rho_k = acvf.values[k] / acvf.values[0]
    b = build_B(t, k, rho_k, c)
    kappas = quadform_cumulants(b, cov, r_max=4)
    return expansion_cdf(kappas, terms=terms)


class _WordTraces:
    """Precomputed traces of words in P = A*Sigma and Q = Sigma.

    tr[(P - s Q)^r] for r = 1..4 expands by cyclic invariance into fixed
    combinations of these words, making every grid point O(1) after four
    dense products.
    """

    def __init__(self, a: np.ndarray, sigma: np.ndarray):
        p = a @ sigma
        q = sigma
        p2 = p @ p
        pq = p @ q
        q2 = q @ q
        self.w1p = np.trace(p)
        self.w1q = np.trace(q)
        self.w2pp = np.trace(p2)
        self.w2pq = np.trace(pq)
        self.w2qq = np.trace(q2)
        self.w3ppp = np.sum(p2 * p.T)
        self.w3ppq = np.sum(p2 * q)          # Q symmetric
        self.w3pqq = np.sum(p * q2)
        self.w3qqq = np.sum(q2 * q)
        self.w4pppp = np.sum(p2 * p2.T)
        self.w4pppq = np.sum(p2 * pq.T)      # tr(P^2 P Q)
        self.w4ppqq = np.sum(p2 * q2)
        self.w4pqpq = np.sum(pq * pq.T)
        self.w4pqqq = np.sum(pq * q2)
        self.w4qqqq = np.sum(q2 * q2)

    def cumulants(self, s: float) -> np.ndarray:
        t1 = self.w1p - s * self.w1q
        t2 = self.w2pp - 2.0 * s * self.w2pq + s * s * self.w2qq
        t3 = (
            self.w3ppp
            - 3.0 * s * self.w3ppq
            + 3.0 * s * s * self.w3pqq
            - s ** 3 * self.w3qqq
        )
        t4 = (
            self.w4pppp
            - 4.0 * s * self.w4pppq
            + s * s * (4.0 * self.w4ppqq + 2.0 * self.w4pqpq)
            - 4.0 * s ** 3 * self.w4pqqq
            + s ** 4 * self.w4qqqq
        )
        return np.array([t1, 2.0 * t2, 8.0 * t3, 48.0 * t4])


def asymptotic_sd_rho0(k: int, acvf: AcvfSequence, t: int) -> float:
    """Leading-order standard deviation of rhohat0(k) from the c = 0 form."""
    cov = toeplitz_cov(acvf, t)
    rho_k = acvf.values[k] / acvf.values[0]
    b0 = build_B(t, k, rho_k, 0.0)
    m = b0 @ cov.sigma
    var_q = 2.0 * np.sum(m * m.T)
    return math.sqrt(var_q) / (acvf.values[0] * t)


def edgeworth_density_rho0(k: int, acvf: AcvfSequence, t: int, d: float,
                           grid=None, override: bool = False,
                           span_sd: float = 6.0, terms: str = "second") -> EdgeworthCurve:
    """Expansion CDF and density of rhohat0(k) on a grid of statistic values.

    The default grid is rho(k) +/- span_sd asymptotic standard deviations in
    steps of sd/25.  Each grid point maps to c = sqrt(T)(x - rho(k)) and
    recomputes the quadratic-form cumulants; the density comes from central
    differences of the CDF.
    """
    _check_validity(d, override)
    cov = toeplitz_cov(acvf, t)
    rho_k = float(acvf.values[k] / acvf.values[0])
    if grid is None:
        sd = asymptotic_sd_rho0(k, acvf, t)
        step = sd / 25.0
        n_side = int(round(span_sd * 25.0))
        grid = rho_k + step * np.arange(-n_side, n_side + 1)
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1 or x.size < 3:
        raise DomainError("grid must hold at least 3 points")
    c = math.sqrt(t) * (x - rho_k)
    words = _WordTraces(build_A(t, k), cov.sigma)
    kappas = np.empty((x.size, 4))
    cdf = np.empty(x.size)
    for i, ci in enumerate(c):
        kappas[i] = words.cumulants(rho_k + ci / math.sqrt(t))
        cdf[i] = expansion_cdf(kappas[i], terms=terms)
    density = np.empty(x.size)
    density[1:-1] = (cdf[2:] - cdf[:-2]) / (x[2:] - x[:-2])
    density[0] = (cdf[1] - cdf[0]) / (x[1] - x[0])
    density[-1] = (cdf[-1] - cdf[-2]) / (x[-1] - x[-2])
    monotone = np.ones(x.size, dtype=bool)
    monotone[1:] = cdf[1:] >= cdf[:-1] - 1e-12
    valid = monotone & (density >= -1e-9)
    return EdgeworthCurve(
        lag=k, rho=rho_k, t=t, d=float(d), x=x, c=c, cdf=cdf,
        density=density, kappas=kappas, valid=valid,
    )
