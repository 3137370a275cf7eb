"""Levinson-Durbin machinery: Yule-Walker solutions and exact Gaussian paths.

Sign convention used package-wide: phi(0) = 1 and the prediction error is
eps_h(t) = sum_{j=0}^{h} phi_h(j) y(t-j), so an AR(1) process
y(t) = rho*y(t-1) + e(t) has phi_1(1) = -rho.  Partial autocorrelations are
stored in the predictor parameterization (kappa_1 = gamma(1)/gamma(0)).

``simulate_gaussian`` draws a path with the exact joint law
N(0, Toeplitz(gamma)) through the conditional form of the recursion:
y(t) = yhat_{t-1}(t) + sqrt(v_{t-1}) z(t), where yhat is the order-(t-1)
best linear predictor and v the stage prediction variance.  No Cholesky
factor, no circulant embedding, no burn-in: the draw is exact at every T.
Streams follow the package convention in ``fiboot.streams``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .acvf import AcvfSequence
from .errors import InsufficientLagsError, SingularityError

__all__ = [
    "LevinsonSolution",
    "levinson_solve",
    "prediction_variances",
    "simulate_gaussian",
    "simulate_gaussian_batch",
]


@dataclass(frozen=True)
class LevinsonSolution:
    """Order-h Yule-Walker solution.

    phi holds phi_h(1..h) in the phi(0)=1 sign convention, sigma2 the
    prediction error variance gamma(0)*prod(1-kappa_j^2), pacf the partial
    autocorrelations kappa_1..kappa_h.
    """

    order: int
    phi: np.ndarray
    sigma2: float
    pacf: np.ndarray


def _durbin_step(pi_head: np.ndarray, k: float) -> np.ndarray:
    """Advance predictor coefficients by one order given reflection k."""
    m = pi_head.size + 1
    out = np.empty(m)
    if m > 1:
        out[: m - 1] = pi_head - k * pi_head[::-1]
    out[m - 1] = k
    return out


def levinson_solve(acvf: AcvfSequence, h: int) -> LevinsonSolution:
    """Solve sum_j phi_h(j) gamma(j-k) = delta_0(k) sigma2_h for k = 0..h."""
    if h < 0:
        raise InsufficientLagsError("order must be non-negative")
    if acvf.maxlag < h:
        raise InsufficientLagsError(f"need gamma up to lag {h}, have {acvf.maxlag}")
    g = acvf.values
    v = float(g[0])
    pi = np.empty(0)
    pacf = np.empty(h)
    for m in range(1, h + 1):
        k = (g[m] - np.dot(pi, g[m - 1:0:-1])) / v
        v *= 1.0 - k * k
        if not v > 0.0:
            raise SingularityError(
                f"prediction variance non-positive at order {m}: sequence is not "
                f"positive definite"
            )
        pi = _durbin_step(pi, k)
        pacf[m - 1] = k
    return LevinsonSolution(order=h, phi=-pi, sigma2=v, pacf=pacf)


def prediction_variances(acvf: AcvfSequence, h: int) -> np.ndarray:
    """Stage variances v_0..v_h of the recursion (v_0 = gamma(0)).

    Raises ``SingularityError`` as soon as a stage variance fails to be
    strictly positive, which is the package's positive-definiteness check.
    """
    if acvf.maxlag < h:
        raise InsufficientLagsError(f"need gamma up to lag {h}, have {acvf.maxlag}")
    g = acvf.values
    out = np.empty(h + 1)
    v = float(g[0])
    out[0] = v
    pi = np.empty(0)
    for m in range(1, h + 1):
        k = (g[m] - np.dot(pi, g[m - 1:0:-1])) / v
        v *= 1.0 - k * k
        if not v > 0.0:
            raise SingularityError(f"prediction variance non-positive at order {m}")
        out[m] = v
        pi = _durbin_step(pi, k)
    return out


def simulate_gaussian(acvf: AcvfSequence, t: int, rng) -> np.ndarray:
    """Draw one exact N(0, Toeplitz(gamma)) path of length T.

    rng must expose ``standard_normal``; exactly T normals are consumed, in
    time order, so a given stream always maps to the same path.
    """
    return simulate_gaussian_batch(acvf, t, 1, rng)[0]


def simulate_gaussian_batch(acvf: AcvfSequence, t: int, n_paths: int, rng) -> np.ndarray:
    """Draw ``n_paths`` independent exact Gaussian paths sharing one stream.

    The predictor coefficients depend only on the autocovariances, so the
    recursion is run once and applied to all rows; row i is a deterministic
    function of normals z[i, :].  Normals are consumed as one (n_paths, T)
    block.
    """
    if t < 1:
        raise InsufficientLagsError("T must be at least 1")
    if acvf.maxlag < t - 1:
        raise InsufficientLagsError(f"need gamma up to lag {t - 1}, have {acvf.maxlag}")
    if n_paths < 1:
        raise InsufficientLagsError("need at least one path")
    g = acvf.values
    z = np.asarray(rng.standard_normal((n_paths, t)), dtype=float)
    y = np.empty((n_paths, t))
    v = float(g[0])
    y[:, 0] = np.sqrt(v) * z[:, 0]
    pi = np.empty(0)
    for s in range(1, t):
        k = (g[s] - np.dot(pi, g[s - 1:0:-1])) / v
        v *= 1.0 - k * k
        if not v > 0.0:
            raise SingularityError(f"prediction variance non-positive at order {s}")
        pi = _durbin_step(pi, k)
        # yhat(s) = sum_j pi(j) y(s-j);  pi reversed pairs with ascending time
        y[:, s] = y[:, :s] @ pi[::-1] + np.sqrt(v) * z[:, s]
    return y
