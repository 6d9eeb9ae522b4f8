"""Expected factorization error, bandwidth sweeps, and bandwidth selection.

The root-mean-square error of the privately estimated workload product at
unit noise multiplier is ``sens * sqrt(||B||_F^2 / n)``, where the
sensitivity is taken over the participation schema and the Frobenius norm
is accumulated from the coefficients of B (subdiagonal i appears n - i
times).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .factorization import Factorization, FactorizationKind, bisr, bsr
from .sensitivity import (
    ParticipationSchema,
    has_monotone_nonnegative_coeffs,
    sens_monotone_toeplitz,
)
from .workload import WorkloadParams

CSV_HEADER = "kind,n,alpha,beta,k,b,p,sensitivity,b_frob_sq,rmse"


@dataclass(frozen=True)
class ErrorReport:
    """Expected error of one factorization under one participation schema.

    ``noise_scale`` is the noise standard deviation the error assumes; it
    equals the sensitivity (noise calibrated at unit multiplier).
    ``majorized`` records that the sensitivity is the monotone-envelope
    upper bound rather than the exact value.
    """

    rmse: float
    b_frobenius_sq: float
    sensitivity: float
    schema: ParticipationSchema
    factorization_kind: FactorizationKind
    bandwidth: int
    noise_scale: float
    majorized: bool = False


def b_frobenius_squared(b_coeffs) -> float:
    """||B||_F^2 from coefficients: subdiagonal i has n - i entries."""
    b = np.asarray(b_coeffs, dtype=np.float64)
    weights = np.arange(b.size, 0, -1, dtype=np.float64)
    return float(weights @ (b * b))


def expected_error(f: Factorization, schema: ParticipationSchema) -> ErrorReport:
    """Expected error of a factorization at unit noise multiplier."""
    if schema.n != f.params.n:
        raise ValueError(
            f"schema covers n={schema.n} steps but factorization has n={f.params.n}"
        )
    frob_sq = b_frobenius_squared(f.b_coeffs)
    majorize = f.kind == FactorizationKind.OPTIMIZED
    majorized = majorize and not has_monotone_nonnegative_coeffs(f.c_coeffs)
    sens = sens_monotone_toeplitz(f.c_coeffs, schema, majorize=majorize)
    rmse = sens * math.sqrt(frob_sq / schema.n)
    return ErrorReport(
        rmse=rmse,
        b_frobenius_sq=frob_sq,
        sensitivity=sens,
        schema=schema,
        factorization_kind=f.kind,
        bandwidth=f.bandwidth,
        noise_scale=sens,
        majorized=majorized,
    )


_SWEEP_BUILDERS = {
    FactorizationKind.BISR: bisr,
    FactorizationKind.BSR: bsr,
}


def rmse_bandwidth_sweep(
    params: WorkloadParams,
    schema: ParticipationSchema,
    kind: FactorizationKind,
    bandwidths: Iterable[int],
) -> list[ErrorReport]:
    """One error report per bandwidth, ordered by bandwidth."""
    builder = _SWEEP_BUILDERS.get(FactorizationKind(kind))
    if builder is None:
        raise ValueError(f"bandwidth sweeps support bisr and bsr, got {kind}")
    bandwidths = sorted(bandwidths)
    if not bandwidths:
        raise ValueError("bandwidth list must not be empty")
    return [expected_error(builder(params, p), schema) for p in bandwidths]


def bandwidth_grid(n: int, b: int) -> list[int]:
    """Dyadic candidate bandwidths plus b and ceil(b log b), capped at n."""
    grid = set()
    p = 1
    while p <= n:
        grid.add(p)
        p *= 2
    grid.add(min(b, n))
    grid.add(min(math.ceil(b * math.log(max(b, 2))), n))
    return sorted(grid)


def select_bandwidth(params: WorkloadParams, schema: ParticipationSchema) -> int:
    """Bandwidth minimizing the banded-inverse error over the candidate grid.

    Ties go to the smaller bandwidth, which needs the smaller noise buffer.
    """
    reports = rmse_bandwidth_sweep(
        params, schema, FactorizationKind.BISR, bandwidth_grid(params.n, schema.b)
    )
    best = min(reports, key=lambda r: (r.rmse, r.bandwidth))
    return best.bandwidth


def sweep_csv_row(params: WorkloadParams, r: ErrorReport) -> str:
    """One CSV row for a report; floats carry 12 significant digits."""
    return ",".join(
        [
            r.factorization_kind.value,
            str(params.n),
            format(params.alpha, ".12g"),
            format(params.beta, ".12g"),
            str(r.schema.k),
            str(r.schema.b),
            str(r.bandwidth),
            format(r.sensitivity, ".12g"),
            format(r.b_frobenius_sq, ".12g"),
            format(r.rmse, ".12g"),
        ]
    )


def write_sweep_csv(
    params: WorkloadParams, reports: Iterable[ErrorReport], out: IO[str]
) -> None:
    out.write(CSV_HEADER + "\n")
    for r in reports:
        out.write(sweep_csv_row(params, r) + "\n")
