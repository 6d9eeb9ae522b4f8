"""Streaming correlated noise with a fixed-size vector buffer.

Each training step draws a fresh Gaussian vector and emits the weighted sum
of the last ``p`` draws, with the weights given by the noising band.  Draws
are keyed by (seed, step) through a counter-based generator, so the
streaming path and the offline transform path produce bit-identical
Gaussians without sharing generator state, and replaying a seed reproduces
the stream exactly.
"""

from __future__ import annotations

import collections

import numpy as np
import scipy.fft
from scipy.special import ndtri

_U64 = (1 << 64) - 1


def standard_normal_row(seed: int, step: int, dimension: int) -> np.ndarray:
    """Deterministic standard-normal vector for one (seed, step) pair.

    Uniforms come from a counter-based bit generator keyed by seed and step;
    Gaussians are produced by the inverse normal CDF so the mapping from
    bits to values is identical on every platform.
    """
    key = np.array([seed & _U64, step & _U64], dtype=np.uint64)
    bits = np.random.Philox(key=key).random_raw(dimension)
    uniforms = (bits >> np.uint64(11)) * 2.0**-53 + 2.0**-54
    return ndtri(uniforms)


class NoiseStream:
    """Sequential source of correlated noise increments.

    Holds at most ``len(band)`` past noise vectors; the oldest is evicted
    when a new draw arrives.  ``next`` returns
    ``sum_t band[t] * Z[step - t]`` over the buffered draws, excluding any
    clip-norm scaling, which callers apply themselves.
    """

    def __init__(self, band, dimension: int, seed: int):
        band = np.asarray(band, dtype=np.float64)
        if band.ndim != 1 or band.size < 1:
            raise ValueError("band must be a 1-D vector with length >= 1")
        if dimension < 1:
            raise ValueError(f"dimension must be >= 1, got {dimension}")
        self.band = band
        self.bandwidth = band.size
        self.dimension = dimension
        self.seed = seed
        self.step = 0
        self._buffer = collections.deque(maxlen=band.size)

    @property
    def buffer_size(self) -> int:
        return len(self._buffer)

    def next(self, sigma: float) -> np.ndarray:
        """Draw the next noise vector and return the correlated increment."""
        if sigma < 0:
            raise ValueError(f"sigma must be non-negative, got {sigma}")
        z = standard_normal_row(self.seed, self.step, self.dimension) * sigma
        self._buffer.appendleft(z)
        recent = np.stack(self._buffer)
        out = self.band[: recent.shape[0]] @ recent
        self.step += 1
        return out


def noise_stream_next(state: NoiseStream, sigma: float):
    """Functional wrapper around NoiseStream.next: (output, updated state)."""
    return state.next(sigma), state


def noise_offline(
    c_inv_band, n: int, dimension: int, sigma: float, seed: int
) -> np.ndarray:
    """All n correlated noise vectors at once via transform convolution.

    Generates the same Gaussian block as the streaming path (same seed and
    step keys) and convolves each column with the band in the frequency
    domain.  Row i matches the i-th streaming output.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    band = np.asarray(c_inv_band, dtype=np.float64)[:n]
    z = np.stack([standard_normal_row(seed, i, dimension) for i in range(n)]) * sigma
    size = scipy.fft.next_fast_len(n + band.size - 1, real=True)
    spectrum = scipy.fft.rfft(z, size, axis=0) * scipy.fft.rfft(band, size)[:, None]
    return scipy.fft.irfft(spectrum, size, axis=0)[:n]
