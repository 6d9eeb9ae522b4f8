"""Private SGD harness with correlated noise injection.

Runs SGD with per-example clipping, weight decay, and momentum on small
synthetic tasks, adding the streaming correlated noise to each aggregated
gradient.  Per step i:

    x  = sum of clipped per-example gradients
    x^ = x + clip_norm * (correlated noise at multiplier sigma)
    m  = momentum * m + x^
    theta = weight_decay * theta - learning_rate * m

Everything is deterministic given the seeds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO

import numpy as np

from .noise import NoiseStream

TRAJECTORY_CSV_HEADER = "step,loss,param_norm,update_norm"


@dataclass(frozen=True)
class SgdConfig:
    dimension: int
    steps: int
    batch_size: int
    clip_norm: float
    learning_rate: float
    weight_decay: float = 1.0
    momentum: float = 0.0
    noise_multiplier: float = 0.0

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {self.dimension}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.clip_norm <= 0:
            raise ValueError(f"clip_norm must be positive, got {self.clip_norm}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if not 0.0 < self.weight_decay <= 1.0:
            raise ValueError(f"weight_decay must be in (0, 1], got {self.weight_decay}")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.noise_multiplier < 0:
            raise ValueError(
                f"noise_multiplier must be non-negative, got {self.noise_multiplier}"
            )


class QuadraticBowl:
    """Loss 0.5 * ||theta||^2; every example contributes the gradient theta."""

    def loss(self, theta: np.ndarray) -> float:
        return 0.5 * float(theta @ theta)

    def per_example_gradients(self, theta, step: int, batch_size: int) -> np.ndarray:
        return np.tile(np.asarray(theta, dtype=np.float64), (batch_size, 1))


class LinearRegressionTask:
    """Least squares on a fixed synthetic dataset, round-robin minibatches."""

    def __init__(self, dimension: int, num_examples: int = 256, seed: int = 0,
                 label_noise: float = 0.1):
        rng = np.random.default_rng(seed)
        self.features = rng.standard_normal((num_examples, dimension))
        self.weights = rng.standard_normal(dimension)
        self.targets = self.features @ self.weights
        if label_noise > 0:
            self.targets = self.targets + label_noise * rng.standard_normal(num_examples)

    def loss(self, theta: np.ndarray) -> float:
        residual = self.features @ theta - self.targets
        return 0.5 * float(np.mean(residual * residual))

    def per_example_gradients(self, theta, step: int, batch_size: int) -> np.ndarray:
        start = (step - 1) * batch_size
        idx = (start + np.arange(batch_size)) % self.features.shape[0]
        x = self.features[idx]
        residual = x @ np.asarray(theta, dtype=np.float64) - self.targets[idx]
        return residual[:, None] * x


@dataclass
class SgdResult:
    theta: np.ndarray
    trajectory: list[tuple[int, float, float, float]]


def dp_sgd_run(
    config: SgdConfig, c_inv_band, task, seed: int, theta0=None
) -> SgdResult:
    """Run the private SGD loop and return the final parameters.

    ``task`` must provide ``loss(theta)`` and
    ``per_example_gradients(theta, step, batch_size)``; steps are numbered
    from 1.  The trajectory records (step, loss, param_norm, update_norm).
    """
    d = config.dimension
    if theta0 is None:
        theta = np.zeros(d)
    else:
        theta = np.array(theta0, dtype=np.float64)
        if theta.shape != (d,):
            raise ValueError(f"theta0 must have shape ({d},), got {theta.shape}")
    momentum = np.zeros(d)
    stream = NoiseStream(c_inv_band, d, seed)
    trajectory = []
    for step in range(1, config.steps + 1):
        grads = np.asarray(
            task.per_example_gradients(theta, step, config.batch_size),
            dtype=np.float64,
        )
        if grads.shape != (config.batch_size, d):
            raise ValueError(
                f"per-example gradients must have shape ({config.batch_size}, {d}), "
                f"got {grads.shape}"
            )
        if not np.all(np.isfinite(grads)):
            raise ValueError(f"non-finite gradient at step {step}")
        norms = np.linalg.norm(grads, axis=1)
        safe = np.where(norms == 0.0, 1.0, norms)
        factors = np.minimum(1.0, config.clip_norm / safe)
        aggregate = (factors[:, None] * grads).sum(axis=0)
        noised = aggregate + config.clip_norm * stream.next(config.noise_multiplier)
        momentum = config.momentum * momentum + noised
        update = config.learning_rate * momentum
        theta = config.weight_decay * theta - update
        trajectory.append(
            (
                step,
                float(task.loss(theta)),
                float(np.linalg.norm(theta)),
                float(np.linalg.norm(update)),
            )
        )
    return SgdResult(theta=theta, trajectory=trajectory)


def write_trajectory_csv(result: SgdResult, out: IO[str]) -> None:
    out.write(TRAJECTORY_CSV_HEADER + "\n")
    for step, loss, param_norm, update_norm in result.trajectory:
        out.write(
            f"{step},{format(loss, '.12g')},{format(param_norm, '.12g')},"
            f"{format(update_norm, '.12g')}\n"
        )
