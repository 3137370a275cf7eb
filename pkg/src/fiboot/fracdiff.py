"""Fractional differencing filters from the binomial expansion of (1 - z)^d.

Everything uses the expanding-window convention: filtering a series of length
T uses exactly the first t coefficients at time t, so no pre-sample values
are ever invented and output length equals input length.  Because the
coefficient sequences of (1 - z)^d and (1 - z)^(-d) are exact Cauchy-product
inverses, integration with exponent -d undoes differencing with exponent d
elementwise under this convention, not merely asymptotically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "FracFilter",
    "frac_coeffs",
    "apply_frac_filter",
    "apply_frac_filter_many",
]


@dataclass(frozen=True)
class FracFilter:
    """First ``n`` coefficients of (1 - z)^d.

    Invariants: ``coeffs[0] == 1`` and ``coeffs[j] = coeffs[j-1]*(j-1-d)/j``,
    so the d = 0 filter is exactly the identity and for d in (0, 1) every
    coefficient past the first is strictly negative.
    """

    d: float
    coeffs: np.ndarray

    def __len__(self) -> int:
        return len(self.coeffs)


def frac_coeffs(d: float, n: int) -> FracFilter:
    """Compute a_0 .. a_{n-1} of (1 - z)^d by the product recursion.

    The recursion a_j = a_{j-1} * (j - 1 - d) / j is stable for any n; the
    equivalent Gamma-ratio form overflows past j ~ 170.

    Parameters
    ----------
    d : float
        Memory exponent, must exceed -1.
    n : int
        Number of coefficients, at least 1.
    """
    if not d > -1.0:
        raise DomainError(f"memory exponent must exceed -1, got {d}")
    if n < 1:
        raise DomainError(f"need at least one coefficient, got n={n}")
    coeffs = np.empty(n)
    coeffs[0] = 1.0
    if n > 1:
        j = np.arange(1, n, dtype=float)
        coeffs[1:] = np.cumprod((j - 1.0 - d) / j)
    return FracFilter(d=float(d), coeffs=coeffs)


def apply_frac_filter(series, d: float, *, use_fft: bool = False) -> np.ndarray:
    """Apply (1 - z)^d to a series on the expanding window.

    out[t] = sum_{j=0}^{t-1} a_j * y[t-j] in 1-based time, i.e. the truncated
    convolution of the series with the filter coefficients.  Passing -d
    inverts the filter exactly.

    ``use_fft`` evaluates the same sums by circular convolution in
    O(T log T); the direct path is the reference and the default (T <= 1000
    everywhere this package is used, so the direct cost is immaterial).
    """
    y = np.ascontiguousarray(series, dtype=float)
    if y.ndim != 1 or y.size == 0:
        raise DomainError("series must be a non-empty one-dimensional sequence")
    coeffs = frac_coeffs(d, y.size).coeffs
    if use_fft:
        n = 1 << (2 * y.size - 1).bit_length()
        out = np.fft.irfft(np.fft.rfft(coeffs, n) * np.fft.rfft(y, n), n)
        return out[: y.size]
    return np.convolve(y, coeffs)[: y.size]


def apply_frac_filter_many(series_rows, d: float) -> np.ndarray:
    """Filter every row of a 2-d array with (1 - z)^d.

    Evaluates the same expanding-window sums as ``apply_frac_filter`` for each
    row, expressed as one triangular-Toeplitz matrix product so that large
    bootstrap batches stay in BLAS.
    """
    x = np.ascontiguousarray(series_rows, dtype=float)
    if x.ndim != 2 or x.shape[1] == 0:
        raise DomainError("expected a non-empty 2-d array of series rows")
    t = x.shape[1]
    coeffs = frac_coeffs(d, t).coeffs
    offsets = np.arange(t)[:, None] - np.arange(t)[None, :]
    lower = np.where(offsets >= 0, coeffs[np.abs(offsets)], 0.0)
    return x @ lower.T
