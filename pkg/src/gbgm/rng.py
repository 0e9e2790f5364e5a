"""Seedable, splittable random streams.

Every stochastic operation in the package draws from a ``numpy.random.Generator``
backed by PCG64.  Per-image streams are derived from ``(master_seed, index)``
through ``numpy.random.SeedSequence`` (the index is used as the spawn key), so
a stream depends only on those two integers and never on scheduling order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

_U64 = 1 << 64


@dataclass(frozen=True)
class RngStream:
    """A ``(seed, stream_id)`` pair naming one independent PCG64 stream."""

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= self.seed < _U64):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if not (0 <= self.stream_id < _U64):
            raise ValueError(f"stream_id must be a 64-bit unsigned integer, got {self.stream_id}")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(seq))


def derive_stream(master_seed: int, index: int) -> RngStream:
    return RngStream(int(master_seed), int(index))


RngLike = Union[None, int, RngStream, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    """Coerce ``rng`` to a Generator.

    ``None`` and ints go through stream 0 of that seed, so ``as_generator(7)``
    and ``derive_stream(7, 0).generator()`` produce the same draws.  Passing a
    Generator returns it unchanged (and it will be advanced by the caller).
    """
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    if rng is None:
        rng = 0
    if isinstance(rng, (int, np.integer)):
        return RngStream(int(rng), 0).generator()
    raise TypeError(f"cannot build a generator from {type(rng).__name__}")


def uniform_open(rng: np.random.Generator, low: float, high: float, size=None):
    """Uniform draws strictly inside ``(low, high)``.

    One ``rng.random()`` double is consumed per element, in C (row-major)
    order, then mapped affinely onto the interval.  The affine map can land
    on an endpoint with probability ~2**-53; such values are nudged one ulp
    inward.
    """
    if not low < high:
        raise ValueError(f"empty interval ({low}, {high})")
    u = rng.random(size)
    r = low + (high - low) * u
    return np.clip(r, math.nextafter(low, high), math.nextafter(high, low))
