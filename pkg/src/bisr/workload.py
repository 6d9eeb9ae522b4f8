"""Coefficient families for the SGD workload matrix and its square roots.

The workload matrix for n steps of SGD with weight decay ``alpha`` and
momentum ``beta`` is lower-triangular Toeplitz with first-column entries
``a[k] = sum_{j=0..k} alpha^j beta^(k-j)``.  Its square root and inverse
square root are LTT as well, with coefficients given by convolutions of
geometrically scaled binomial-series sequences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .toeplitz import ltt_mul, r_sequence, r_tilde_sequence

# Configurations with alpha - beta below this are rejected: the closed forms
# divide by (alpha - beta) and the family assumes beta < alpha.
NEAR_EQUAL_TOL = 1e-12


@dataclass(frozen=True)
class WorkloadParams:
    """Problem size and optimizer constants (n steps, weight decay, momentum)."""

    n: int
    alpha: float = 1.0
    beta: float = 0.0

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 <= self.beta < 1.0:
            raise ValueError(f"beta must be in [0, 1), got {self.beta}")
        if self.alpha - self.beta < NEAR_EQUAL_TOL:
            raise ValueError(
                f"beta must be strictly below alpha (alpha={self.alpha}, "
                f"beta={self.beta})"
            )


def workload_coeffs(params: WorkloadParams) -> np.ndarray:
    """First column of the workload matrix: a[k] = sum_j alpha^j beta^(k-j)."""
    k = np.arange(params.n, dtype=np.float64)
    if params.beta == 0.0:
        return params.alpha**k
    num = params.alpha ** (k + 1.0) - params.beta ** (k + 1.0)
    return num / (params.alpha - params.beta)


def sqrt_coeffs(params: WorkloadParams) -> np.ndarray:
    """Coefficients of the workload's LTT square root.

    Computed as the convolution of ``r[j] alpha^j`` with ``r[j] beta^j``,
    which matches ``ltt_sqrt(workload_coeffs(params))`` but runs in
    O(n log n).  The entries are positive and strictly decreasing.
    """
    n = params.n
    r = r_sequence(n)
    if params.beta == 0.0:
        if params.alpha == 1.0:
            return r
        return r * params.alpha ** np.arange(n, dtype=np.float64)
    k = np.arange(n, dtype=np.float64)
    return ltt_mul(r * params.alpha**k, r * params.beta**k, n)


def inv_sqrt_coeffs(params: WorkloadParams) -> np.ndarray:
    """Coefficients of the inverse of the workload's LTT square root.

    Convolution of ``r~[j] alpha^j`` with ``r~[j] beta^j``; satisfies
    ``conv(sqrt_coeffs, inv_sqrt_coeffs) = e_0``.
    """
    n = params.n
    rt = r_tilde_sequence(n)
    if params.beta == 0.0:
        if params.alpha == 1.0:
            return rt
        return rt * params.alpha ** np.arange(n, dtype=np.float64)
    k = np.arange(n, dtype=np.float64)
    return ltt_mul(rt * params.alpha**k, rt * params.beta**k, n)
