"""Numerical optimization of the noising band (BandInvMF).

Minimizes the squared expected error ``sens^2 * ||B||_F^2 / n`` over the
free coefficients of a banded inverse correlation matrix, starting from the
banded inverse square root.  The sensitivity factor in the objective is the
Gram bound at the evenly spaced participation pattern, evaluated directly
on the strategy coefficients; it is the exact sensitivity whenever those
coefficients come out non-negative and non-increasing, and reported errors
re-check that condition (see ``metrics.expected_error``).

Gradients come from central finite differences and steps from a
backtracking line search, so the accepted loss sequence is non-increasing
and the result never falls behind the initialization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable, NamedTuple

import numpy as np

from .factorization import Factorization, bisr, from_inverse_band
from .metrics import b_frobenius_squared
from .sensitivity import ParticipationSchema, sens_gram_upper_bound
from .toeplitz import ltt_inverse, ltt_mul
from .workload import WorkloadParams, workload_coeffs

TRACE_CSV_HEADER = "iteration,loss,step_size"

_MAX_BACKTRACKS = 30
_CURVATURE_FLOOR = 1e-16


@dataclass(frozen=True)
class OptimizerConfig:
    steps: int = 20
    fd_step: float = 1e-6
    step_size: float = 0.1
    shrink: float = 0.5
    min_improvement: float = 1e-12

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.fd_step <= 0:
            raise ValueError(f"fd_step must be positive, got {self.fd_step}")
        if self.step_size <= 0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError(f"shrink must be in (0, 1), got {self.shrink}")
        if self.min_improvement < 0:
            raise ValueError(
                f"min_improvement must be non-negative, got {self.min_improvement}"
            )


class TraceEntry(NamedTuple):
    iteration: int
    loss: float
    step_size: float


def band_inv_loss(
    c_inv_band, params: WorkloadParams, schema: ParticipationSchema
) -> float:
    """Squared expected error of the factorization built from a noising band.

    Returns ``sens^2 * ||B||_F^2 / n`` with the sensitivity taken as the
    Gram bound at the evenly spaced pattern.  Bands whose inverse overflows
    get an infinite loss, which the line search treats as a rejection.
    """
    band = np.asarray(c_inv_band, dtype=np.float64)
    if band.ndim != 1 or not 1 <= band.size <= params.n:
        raise ValueError(f"band must be 1-D with 1 <= len <= n={params.n}")
    if band[0] != 1.0:
        raise ValueError(f"band[0] must be 1 (normalized), got {band[0]}")
    if schema.n != params.n:
        raise ValueError(f"schema n={schema.n} does not match params n={params.n}")
    n = params.n
    with np.errstate(over="ignore", invalid="ignore"):
        c = ltt_inverse(band, n)
        if not np.all(np.isfinite(c)):
            return math.inf
        b = ltt_mul(workload_coeffs(params), band, n)
        sens = sens_gram_upper_bound(c, schema, fixed_pattern=True)
        value = sens * sens * b_frobenius_squared(b) / n
    return value if math.isfinite(value) else math.inf


def optimize_band(
    params: WorkloadParams,
    schema: ParticipationSchema,
    p: int,
    config: OptimizerConfig | None = None,
    trace: list[TraceEntry] | None = None,
) -> Factorization:
    """Optimize the p band coefficients, starting from the banded inverse
    square root.

    Coefficient 0 stays pinned at 1.  Central-difference gradients of the
    loss drive the descent; the direction is scaled by a running inverse
    curvature estimate (raw gradient steps crawl on the narrow valleys this
    objective develops at larger bandwidths) and the step is chosen by
    backtracking, so accepted losses decrease monotonically.  When ``trace``
    is a list, one entry per accepted iteration is appended (entry 0 is the
    initialization).  The returned factorization carries the best band seen,
    never worse than the initialization.
    """
    config = config or OptimizerConfig()
    band = bisr(params, p).c_inv_band.copy()
    loss = band_inv_loss(band, params, schema)
    if trace is not None:
        trace.append(TraceEntry(0, loss, 0.0))
    if p == 1:
        return from_inverse_band(params, band)

    best_band = band.copy()
    best_loss = loss
    curvature = np.eye(p)
    prev_band = None
    prev_grad = None
    for iteration in range(1, config.steps + 1):
        grad = np.zeros(p)
        for i in range(1, p):
            bump = np.zeros(p)
            bump[i] = config.fd_step
            up = band_inv_loss(band + bump, params, schema)
            down = band_inv_loss(band - bump, params, schema)
            grad[i] = (up - down) / (2.0 * config.fd_step)

        if prev_grad is not None:
            s = band - prev_band
            y = grad - prev_grad
            sy = float(s @ y)
            if sy > _CURVATURE_FLOOR:
                rho = 1.0 / sy
                left = np.eye(p) - rho * np.outer(s, y)
                curvature = left @ curvature @ left.T + rho * np.outer(s, s)
        direction = curvature @ grad
        direction[0] = 0.0
        if float(direction @ grad) <= 0.0:
            # Curvature model lost positive definiteness; fall back to the
            # raw gradient for this iteration.
            direction = grad.copy()
            curvature = np.eye(p)
            step = config.step_size
        else:
            step = 1.0 if prev_grad is not None else config.step_size

        candidate_loss = None
        for _ in range(_MAX_BACKTRACKS):
            candidate = band - step * direction
            candidate[0] = 1.0
            value = band_inv_loss(candidate, params, schema)
            if value < loss:
                candidate_loss = value
                break
            step *= config.shrink
        if candidate_loss is None:
            break

        improvement = (loss - candidate_loss) / loss
        prev_band, prev_grad = band.copy(), grad
        band, loss = candidate, candidate_loss
        if loss < best_loss:
            best_band, best_loss = band.copy(), loss
        if trace is not None:
            trace.append(TraceEntry(iteration, loss, step))
        if improvement < config.min_improvement:
            break

    return from_inverse_band(params, best_band)


def write_trace_csv(entries: Iterable[TraceEntry], out: IO[str]) -> None:
    out.write(TRACE_CSV_HEADER + "\n")
    for e in entries:
        out.write(
            f"{e.iteration},{format(e.loss, '.12g')},{format(e.step_size, '.12g')}\n"
        )
