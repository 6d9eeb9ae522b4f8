"""Factorizations A = B C of the workload matrix in coefficient form.

Every factorization stores three coefficient vectors: the strategy matrix C,
the postprocessing matrix B, and the noising band (the first column of the
banded inverse of C).  Only the banded-inverse kinds (``bisr`` and
``optimized``) guarantee that the stored band really is the complete inverse
of C; for ``bsr`` the inverse of C is not banded and the full length-n
inverse is stored instead.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .toeplitz import ltt_inverse, ltt_mul
from .workload import WorkloadParams, inv_sqrt_coeffs, sqrt_coeffs, workload_coeffs


class FactorizationKind(str, enum.Enum):
    BISR = "bisr"
    BSR = "bsr"
    IDENTITY = "identity"
    OPTIMIZED = "optimized"


@dataclass(frozen=True)
class Factorization:
    """A workload factorization A = B C with a stored noising band.

    Invariants (up to floating-point error): ``conv(c_coeffs, c_inv_band)``
    is the unit impulse, and ``conv(b_coeffs, c_coeffs)`` reproduces the
    workload coefficients.
    """

    params: WorkloadParams
    kind: FactorizationKind
    bandwidth: int
    c_inv_band: np.ndarray
    c_coeffs: np.ndarray
    b_coeffs: np.ndarray


def _check_bandwidth(params: WorkloadParams, p: int) -> None:
    if not isinstance(p, (int, np.integer)) or p < 1 or p > params.n:
        raise ValueError(f"bandwidth must satisfy 1 <= p <= n={params.n}, got {p}")


def bisr(params: WorkloadParams, p: int) -> Factorization:
    """Banded inverse square root: truncate the inverse square root of the
    workload to p bands, then re-invert to obtain the strategy matrix."""
    _check_bandwidth(params, p)
    n = params.n
    band = inv_sqrt_coeffs(params)[:p]
    c = ltt_inverse(band, n)
    b = ltt_mul(workload_coeffs(params), band, n)
    return Factorization(params, FactorizationKind.BISR, p, band, c, b)


def bsr(params: WorkloadParams, p: int) -> Factorization:
    """Banded square root: truncate the square root of the workload to p
    bands.  Its inverse is not banded, so the stored "band" is the full
    length-n inverse."""
    _check_bandwidth(params, p)
    n = params.n
    c = np.zeros(n)
    c[:p] = sqrt_coeffs(params)[:p]
    c_inv = ltt_inverse(c[:p], n)
    b = ltt_mul(workload_coeffs(params), c_inv, n)
    return Factorization(params, FactorizationKind.BSR, p, c_inv, c, b)


def identity_factorization(params: WorkloadParams) -> Factorization:
    """The trivial factorization B = A, C = I."""
    n = params.n
    c = np.zeros(n)
    c[0] = 1.0
    return Factorization(
        params,
        FactorizationKind.IDENTITY,
        1,
        np.array([1.0]),
        c,
        workload_coeffs(params),
    )


def from_inverse_band(params: WorkloadParams, c_inv_band) -> Factorization:
    """Assemble a factorization from an arbitrary normalized noising band."""
    band = np.asarray(c_inv_band, dtype=np.float64)
    if band.ndim != 1 or band.size < 1:
        raise ValueError("c_inv_band must be a 1-D vector with length >= 1")
    if band[0] != 1.0:
        raise ValueError(f"c_inv_band[0] must be 1 (normalized), got {band[0]}")
    _check_bandwidth(params, band.size)
    n = params.n
    c = ltt_inverse(band, n)
    b = ltt_mul(workload_coeffs(params), band, n)
    return Factorization(params, FactorizationKind.OPTIMIZED, band.size, band, c, b)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _fmt_array(xs: np.ndarray) -> str:
    return "[" + ", ".join(_fmt(x) for x in xs) + "]"


def to_json(f: Factorization) -> str:
    """Serialize a factorization; floats carry 17 significant digits."""
    fields = [
        f'"kind": {json.dumps(f.kind.value)}',
        f'"n": {f.params.n}',
        f'"alpha": {_fmt(f.params.alpha)}',
        f'"beta": {_fmt(f.params.beta)}',
        f'"p": {f.bandwidth}',
        f'"c_inv_band": {_fmt_array(f.c_inv_band)}',
        f'"c_coeffs": {_fmt_array(f.c_coeffs)}',
        f'"b_coeffs": {_fmt_array(f.b_coeffs)}',
    ]
    return "{" + ", ".join(fields) + "}"


def from_json(text: str) -> Factorization:
    doc = json.loads(text)
    params = WorkloadParams(n=doc["n"], alpha=doc["alpha"], beta=doc["beta"])
    return Factorization(
        params,
        FactorizationKind(doc["kind"]),
        int(doc["p"]),
        np.asarray(doc["c_inv_band"], dtype=np.float64),
        np.asarray(doc["c_coeffs"], dtype=np.float64),
        np.asarray(doc["b_coeffs"], dtype=np.float64),
    )
