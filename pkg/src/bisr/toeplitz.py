"""Algebra on lower-triangular Toeplitz (LTT) matrices in first-column form.

A length-n coefficient vector ``c`` represents the n-by-n lower-triangular
Toeplitz matrix ``M`` with ``M[i, j] = c[i - j]`` for ``i >= j`` and zero
above the diagonal.  Products of LTT matrices are truncated convolutions of
their coefficient vectors, so everything here works on 1-D arrays and no
dense matrix is ever materialized.
"""

from __future__ import annotations

import numpy as np
import scipy.fft
import scipy.signal

# Output lengths below this use the direct convolution path; above it the
# transform-based path wins despite its fixed overhead.
FFT_THRESHOLD = 128


def _as_coeffs(a, name: str = "coeffs") -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 1 or a.size < 1:
        raise ValueError(f"{name} must be a 1-D vector with length >= 1")
    return a


def _pad(v: np.ndarray, n: int) -> np.ndarray:
    if v.size == n:
        return v
    if v.size > n:
        return v[:n]
    out = np.zeros(n)
    out[: v.size] = v
    return out


def _conv_direct(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    return _pad(np.convolve(a, b), n)


def _conv_fft(a: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    size = scipy.fft.next_fast_len(a.size + b.size - 1, real=True)
    fa = scipy.fft.rfft(a, size)
    fb = scipy.fft.rfft(b, size)
    return _pad(scipy.fft.irfft(fa * fb, size), n)


def ltt_mul(a, b, n: int) -> np.ndarray:
    """First n coefficients of the product of two LTT matrices.

    Returns ``c`` with ``c[k] = sum_{j=0..k} a[j] * b[k-j]``, treating
    out-of-range entries as zero.  Inputs longer than ``n`` are truncated
    first since their tails cannot influence the first ``n`` outputs.
    """
    a = _as_coeffs(a, "a")
    b = _as_coeffs(b, "b")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    a = a[:n]
    b = b[:n]
    if a.size == 1:
        return _pad(a[0] * b, n)
    if b.size == 1:
        return _pad(b[0] * a, n)
    if n < FFT_THRESHOLD:
        return _conv_direct(a, b, n)
    return _conv_fft(a, b, n)


def ltt_inverse(a, n: int) -> np.ndarray:
    """First n coefficients of the inverse of the LTT matrix with column a.

    Solves ``conv(a, x) = e_0`` by the forward recurrence
    ``x[0] = 1/a[0]``, ``x[k] = -(1/a[0]) * sum_j a[j] x[k-j]``, evaluated
    as an all-pole IIR filter applied to the unit impulse so the loop runs
    in compiled code.
    """
    a = _as_coeffs(a, "a")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if a[0] == 0.0:
        raise ValueError("singular LTT matrix: leading coefficient is zero")
    a = a[:n]
    impulse = np.zeros(n)
    impulse[0] = 1.0
    if a.size == 1:
        return impulse / a[0]
    return scipy.signal.lfilter([1.0], a, impulse)


def ltt_sqrt(a, n: int) -> np.ndarray:
    """Coefficients of the LTT square root with positive diagonal.

    Returns ``y`` with ``conv(y, y) = a`` truncated to ``n`` terms, via
    ``y[k] = (a[k] - sum_{0<j<k} y[j] y[k-j]) / (2 y[0])``.  The recurrence
    is O(n^2); it is intended as the once-per-configuration reference path.
    """
    a = _as_coeffs(a, "a")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if a[0] <= 0.0:
        raise ValueError(f"leading coefficient must be positive, got {a[0]}")
    a = a[:n]
    y = np.zeros(n)
    y[0] = np.sqrt(a[0])
    for k in range(1, n):
        acc = a[k] if k < a.size else 0.0
        if k >= 2:
            acc -= float(np.dot(y[1:k], y[k - 1:0:-1]))
        y[k] = acc / (2.0 * y[0])
    return y


def r_sequence(n: int) -> np.ndarray:
    """Coefficients of (1 - x)^(-1/2): r[0] = 1, r[j] = r[j-1] (2j-1)/(2j)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    out = np.ones(n)
    if n > 1:
        j = np.arange(1, n, dtype=np.float64)
        out[1:] = np.cumprod((2.0 * j - 1.0) / (2.0 * j))
    return out


def r_tilde_sequence(n: int) -> np.ndarray:
    """Coefficients of (1 - x)^(1/2): r~[0] = 1, r~[j] = r~[j-1] (j - 3/2)/j.

    Equivalently r~[k] = -r[k] / (2k - 1) for k >= 1; the entries are
    negative from index 1 on and increase toward zero.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    out = np.ones(n)
    if n > 1:
        j = np.arange(1, n, dtype=np.float64)
        out[1:] = np.cumprod((j - 1.5) / j)
    return out
