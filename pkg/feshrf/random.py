#!/usr/bin/env python 3.11.0
# -*-coding:utf-8 -*-
# @Author  : Shuang Song
# @Contact   : SongshGeo@gmail.com
# GitHub   : https://github.com/SongshGeo
# Website: https://cv.songshgeo.com/

"""
Seeded random streams split into fixed chunks.

Every chunk owns a child `SeedSequence` and a PCG64 generator, so the
numbers drawn for chunk j only depend on (seed, j). Chunks can then be
consumed by any number of threads and concatenated in order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, List, Optional, Tuple, TypeVar

import numpy as np

from feshrf.errors import DomainError
from feshrf.tools.func import worker_count

T = TypeVar("T")

CHUNK_SIZE = 2**16


class ChunkedRandom:
    """Reproducible random generators for `n` draws cut into chunks.

    Parameters:
        seed:
            Root entropy of the stream.
        chunk_size:
            Number of draws handled by one generator.
    """

    def __init__(self, seed: int, chunk_size: int = CHUNK_SIZE) -> None:
        if chunk_size < 1:
            raise DomainError(f"Chunk size must be >= 1, got {chunk_size}.")
        self.seed = seed
        self.chunk_size = chunk_size

    def __repr__(self) -> str:
        return f"<ChunkedRandom: seed={self.seed}, chunk={self.chunk_size}>"

    def sizes(self, n: int) -> List[int]:
        """Number of draws in each chunk."""
        if n < 1:
            raise DomainError(f"Need at least one draw, got {n}.")
        full, rest = divmod(n, self.chunk_size)
        return [self.chunk_size] * full + ([rest] if rest else [])

    def generators(self, n: int) -> Iterator[Tuple[int, np.random.Generator]]:
        """Yield (size, generator) for every chunk of `n` draws."""
        sizes = self.sizes(n)
        children = np.random.SeedSequence(self.seed).spawn(len(sizes))
        for size, child in zip(sizes, children):
            yield size, np.random.Generator(np.random.PCG64(child))

    def map(
        self,
        func: Callable[[int, np.random.Generator], T],
        n: int,
        threads: Optional[int] = None,
    ) -> List[T]:
        """Apply `func(size, generator)` to every chunk, in chunk order."""
        jobs = list(self.generators(n))
        workers = min(worker_count(threads), len(jobs))
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(lambda job: func(*job), jobs))
        return [func(size, rng) for size, rng in jobs]
