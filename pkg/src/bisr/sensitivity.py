"""Sensitivity of a strategy matrix under min-separated repeated participation.

A data item may contribute up to ``k`` times, with any two contributions at
least ``b`` steps apart.  For an LTT strategy matrix with non-negative,
non-increasing coefficients the worst case is the evenly spaced pattern
(columns 1, 1+b, ..., 1+(k-1)b) and the sensitivity is the norm of the sum
of those columns.  A Gram-matrix bound and an exhaustive small-n search are
provided as independent routes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .toeplitz import _pad

# Relative slack when classifying coefficient vectors as non-negative and
# non-increasing; absorbs roundoff from the inversion recurrence.
_MONOTONE_TOL = 1e-12


@dataclass(frozen=True)
class ParticipationSchema:
    """Participation model: n steps, min separation b, at most k contributions."""

    n: int
    b: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if not 1 <= self.b <= self.n:
            raise ValueError(f"b must satisfy 1 <= b <= n={self.n}, got {self.b}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if 1 + (self.k - 1) * self.b > self.n:
            raise ValueError(
                f"no b-separated pattern with k={self.k} participations fits "
                f"in n={self.n} steps at separation b={self.b}"
            )


def has_monotone_nonnegative_coeffs(coeffs) -> bool:
    """True when the coefficients are non-negative and non-increasing."""
    c = np.asarray(coeffs, dtype=np.float64)
    tol = _MONOTONE_TOL * max(1.0, float(abs(c[0])))
    return bool(np.all(c >= -tol) and np.all(np.diff(c) <= tol))


def monotone_envelope(coeffs) -> np.ndarray:
    """Smallest non-increasing, non-negative sequence dominating the input.

    Entry j becomes ``max(0, max_{t >= j} coeffs[t])``; for already monotone
    non-negative inputs this is the identity.
    """
    c = np.asarray(coeffs, dtype=np.float64)
    env = np.maximum.accumulate(c[::-1])[::-1]
    return np.maximum(env, 0.0)


def sens_monotone_toeplitz(
    c_coeffs, schema: ParticipationSchema, *, majorize: bool = False
) -> float:
    """Sensitivity of an LTT strategy matrix via the evenly spaced pattern.

    For non-negative, non-increasing coefficients this equals the exact
    sensitivity: the norm of the sum of the k columns spaced b apart.  Other
    coefficient vectors are rejected unless ``majorize`` is set, in which
    case they are first replaced by their monotone envelope and the result
    is an upper bound.
    """
    c = _pad(np.asarray(c_coeffs, dtype=np.float64), schema.n)
    if not has_monotone_nonnegative_coeffs(c):
        if not majorize:
            raise ValueError(
                "coefficients are not non-negative and non-increasing; "
                "pass majorize=True for the envelope upper bound"
            )
        c = monotone_envelope(c)
    v = np.zeros(schema.n)
    for j in range(schema.k):
        off = j * schema.b
        v[off:] += c[: schema.n - off]
    return float(np.linalg.norm(v))


class _GramCache:
    """Entries of C^T C for an LTT matrix C, computed per lag on demand.

    For columns i <= j the Gram entry is the dot product of the first
    ``n - j`` coefficients with the same coefficients shifted by ``j - i``;
    prefix sums per lag make each query O(1).
    """

    def __init__(self, c: np.ndarray):
        self._c = c
        self._n = c.size
        self._prefix = {}

    def __call__(self, i: int, j: int) -> float:
        lag = abs(i - j)
        if lag >= self._n:
            return 0.0
        pref = self._prefix.get(lag)
        if pref is None:
            prod = self._c[: self._n - lag] * self._c[lag:]
            pref = np.concatenate(([0.0], np.cumsum(prod)))
            self._prefix[lag] = pref
        count = self._n - max(i, j)
        return float(pref[min(count, pref.size - 1)])


def count_patterns(n: int, b: int, k: int) -> int:
    """Number of index sets of size <= k with pairwise separation >= b."""
    total = 0
    for s in range(k + 1):
        m = n - (s - 1) * (b - 1)
        if m >= s:
            total += math.comb(m, s)
    return total


def sens_gram_upper_bound(
    c_coeffs,
    schema: ParticipationSchema,
    *,
    fixed_pattern: bool = False,
    pattern_limit: int = 10_000_000,
) -> float:
    """Upper bound on sensitivity from absolute Gram-matrix sums.

    Maximizes ``sqrt(sum_{i,j in pi} |(C^T C)[i, j]|)`` over separated index
    sets.  With ``fixed_pattern`` only the evenly spaced pattern is
    evaluated; otherwise every pattern is enumerated, which is rejected when
    the pattern count exceeds ``pattern_limit``.  The bound is tight when
    all Gram entries are non-negative.
    """
    n, b, k = schema.n, schema.b, schema.k
    c = _pad(np.asarray(c_coeffs, dtype=np.float64), n)
    gram = _GramCache(c)

    if fixed_pattern:
        idx = [j * b for j in range(k)]
        total = sum(abs(gram(i, j)) for i in idx for j in idx)
        return float(np.sqrt(total))

    if count_patterns(n, b, k) > pattern_limit:
        raise ValueError(
            f"enumerating all patterns for n={n}, b={b}, k={k} exceeds the "
            f"limit of {pattern_limit}; use fixed_pattern=True"
        )

    best = 0.0

    def extend(start: int, chosen: list[int], total: float) -> None:
        nonlocal best
        best = max(best, total)
        if len(chosen) == k:
            return
        for i in range(start, n):
            added = abs(gram(i, i)) + 2.0 * sum(abs(gram(j, i)) for j in chosen)
            chosen.append(i)
            extend(i + b, chosen, total + added)
            chosen.pop()

    extend(0, [], 0.0)
    return float(np.sqrt(best))


def brute_force_sensitivity(c_coeffs, schema: ParticipationSchema) -> float:
    """Exhaustive sensitivity over all separated column subsets (n <= 24).

    Materializes the dense strategy matrix and maximizes the norm of the
    summed participating columns.  Branches whose best possible norm cannot
    beat the incumbent are pruned, which preserves exactness.
    """
    n, b, k = schema.n, schema.b, schema.k
    if n > 24:
        raise ValueError(f"brute force search requires n <= 24, got {n}")
    c = _pad(np.asarray(c_coeffs, dtype=np.float64), n)
    dense = np.zeros((n, n))
    for j in range(n):
        dense[j:, j] = c[: n - j]
    max_col = float(np.max(np.linalg.norm(dense, axis=0)))

    best = 0.0

    def extend(start: int, depth: int, vec: np.ndarray) -> None:
        nonlocal best
        norm = float(np.linalg.norm(vec))
        best = max(best, norm)
        if depth == k or norm + (k - depth) * max_col <= best:
            return
        for i in range(start, n):
            extend(i + b, depth + 1, vec + dense[:, i])

    extend(0, 0, np.zeros(n))
    return best
