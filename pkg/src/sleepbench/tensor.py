"""Dense float64 arrays and a deterministic random number generator.

Arrays are plain ``numpy.ndarray`` objects with dtype float64 and rank 1 to 3.
:func:`as_array` is the single entry point that validates and converts input.

:class:`Rng` wraps numpy's PCG64 bit generator. PCG64 output is fully
specified by its seed (via ``SeedSequence``) and is identical across
platforms, which is the property the benchmark relies on for reproducible
reports. ``Rng.spawn`` derives independent child streams.
"""
from __future__ import annotations

import zlib
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, ParameterError

MAX_RANK = 3


def as_array(values, *, rank: int | Sequence[int] | None = None) -> np.ndarray:
    """Convert ``values`` to a contiguous float64 array of rank 1-3.

    ``rank`` optionally restricts the accepted rank(s).
    """
    arr = np.asarray(values, dtype=np.float64)
    if not 1 <= arr.ndim <= MAX_RANK:
        raise DimensionError(f"rank must be 1..{MAX_RANK}, got shape {arr.shape}")
    if any(extent < 1 for extent in arr.shape):
        raise DimensionError(f"every extent must be >= 1, got shape {arr.shape}")
    if rank is not None:
        allowed = (rank,) if isinstance(rank, int) else tuple(rank)
        if arr.ndim not in allowed:
            raise DimensionError(f"expected rank in {allowed}, got shape {arr.shape}")
    return np.ascontiguousarray(arr)


def matmul(a, b) -> np.ndarray:
    """Matrix product of two rank-2 arrays."""
    a = as_array(a, rank=2)
    b = as_array(b, rank=2)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply shapes {a.shape} and {b.shape}")
    return a @ b


def _seed_words(seed) -> list[int]:
    if isinstance(seed, (int, np.integer)):
        return [int(seed) & 0xFFFFFFFFFFFFFFFF]
    words = []
    for part in seed:
        if isinstance(part, str):
            words.append(zlib.crc32(part.encode("utf-8")))
        else:
            words.append(int(part) & 0xFFFFFFFFFFFFFFFF)
    return words


class Rng:
    """Seedable, single-owner random stream.

    ``seed`` is an integer or a sequence mixing integers and strings; strings
    are folded in with CRC-32 so that e.g. ``Rng((7, "sleep_study", 0))``
    is stable across processes (unlike ``hash``).
    """

    def __init__(self, seed: int | Iterable[int | str] = 0):
        self._seq = np.random.SeedSequence(_seed_words(seed))
        self._gen = np.random.Generator(np.random.PCG64(self._seq))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def spawn(self, n: int = 1) -> list["Rng"]:
        children = []
        for seq in self._seq.spawn(n):
            child = Rng.__new__(Rng)
            child._seq = seq
            child._gen = np.random.Generator(np.random.PCG64(seq))
            children.append(child)
        return children

    def uniform(self, shape, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
        return rand_uniform(self, shape, lo, hi)

    def normal(self, shape, loc: float = 0.0, scale: float = 1.0) -> np.ndarray:
        return self._gen.normal(loc, scale, size=shape)

    def permutation(self, n: int) -> np.ndarray:
        return self._gen.permutation(n)

    def integers(self, lo: int, hi: int, size=None):
        return self._gen.integers(lo, hi, size=size)

    def choice(self, options, size=None):
        return self._gen.choice(options, size=size)


def rand_uniform(rng: Rng, shape, lo: float, hi: float) -> np.ndarray:
    """Uniform samples in ``[lo, hi)``; advances ``rng``."""
    if not lo < hi:
        raise ParameterError(f"rand_uniform needs lo < hi, got lo={lo}, hi={hi}")
    shape = (shape,) if isinstance(shape, (int, np.integer)) else tuple(shape)
    out = lo + (hi - lo) * rng.generator.random(shape)
    # lo + (hi-lo)*u can round up to hi for extreme ranges
    return np.minimum(out, np.nextafter(hi, lo))
