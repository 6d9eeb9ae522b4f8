"""Noise calibration for the Gaussian mechanism.

The exact privacy condition for releasing a sensitivity-``delta_f`` query
with Gaussian noise of standard deviation sigma is

    Phi(delta_f/(2 sigma) - eps sigma/delta_f)
        - exp(eps) * Phi(-delta_f/(2 sigma) - eps sigma/delta_f) <= delta,

with Phi the standard normal CDF.  The left side is continuous and strictly
decreasing in sigma, so the smallest admissible sigma is found by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_MAX_BRACKET_GROWTH = 200
_RELATIVE_TOL = 1e-12


@dataclass(frozen=True)
class PrivacyParams:
    epsilon: float
    delta: float
    sensitivity: float

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if self.sensitivity <= 0:
            raise ValueError(f"sensitivity must be positive, got {self.sensitivity}")


def _normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def gaussian_mechanism_delta(sigma: float, epsilon: float, sensitivity: float) -> float:
    """Left side of the calibration condition at the given noise level."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    shift = epsilon * sigma / sensitivity
    half = sensitivity / (2.0 * sigma)
    return _normal_cdf(half - shift) - math.exp(epsilon) * _normal_cdf(-half - shift)


def calibrate_sigma(pp: PrivacyParams) -> float:
    """Smallest sigma satisfying the calibration condition, to 1e-9 relative.

    The bracket starts at [sensitivity/10, 10*sensitivity] and grows
    geometrically until it straddles the target; bisection then shrinks it
    well past the requested tolerance.
    """
    target = pp.delta

    def excess(sigma: float) -> float:
        return gaussian_mechanism_delta(sigma, pp.epsilon, pp.sensitivity)

    lo = pp.sensitivity / 10.0
    hi = pp.sensitivity * 10.0
    for _ in range(_MAX_BRACKET_GROWTH):
        if excess(hi) <= target:
            break
        hi *= 2.0
    else:
        raise ValueError("failed to bracket sigma from above; delta too extreme")
    for _ in range(_MAX_BRACKET_GROWTH):
        if excess(lo) > target:
            break
        lo /= 2.0
    else:
        raise ValueError("failed to bracket sigma from below; delta too extreme")

    # hi always satisfies the condition; lo never does.
    while hi - lo > _RELATIVE_TOL * hi:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if excess(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi
