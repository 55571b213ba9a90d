"""Seedable samplers for the Gaussian ensembles G_beta(N, q) and spherical S_beta(N, r).

Every draw owns one random stream: the generator for (seed, stream) is
``PCG64(SeedSequence(seed, spawn_key=(stream,)))``, so batches are
reproducible draw-by-draw no matter how they are scheduled across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .matrix import EnsembleSpec, SelfAdjointMatrix, frobenius_norm, scale

_TINY_NORM = 1e-300


@dataclass(frozen=True)
class RngState:
    seed: int
    stream: int = 0

    def __post_init__(self):
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.stream < 0:
            raise ValueError("stream must be nonnegative")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed, spawn_key=(self.stream,))))

    def substream(self, offset: int) -> RngState:
        return RngState(self.seed, self.stream + offset)


def _draw_gaussian(beta: int, dim: int, q: float, gen: np.random.Generator) -> SelfAdjointMatrix:
    # density exp(-(beta q / 4)(sum a_ii^2 + 2 sum |a_ij|^2))
    diag = gen.standard_normal(dim) * math.sqrt(2.0 / (beta * q))
    m = dim * (dim - 1) // 2
    off = gen.standard_normal((m, beta)) * math.sqrt(1.0 / (beta * q))
    return SelfAdjointMatrix(beta, diag, off)


def sample_gaussian(spec: EnsembleSpec, rng: RngState) -> SelfAdjointMatrix:
    """One draw from G_beta(N, q).

    Diagonal entries are Normal(0, 2/(beta q)); each scalar component of an
    off-diagonal entry is Normal(0, 1/(beta q)). The diagonal is drawn first,
    then the off-diagonal components in row-major upper-triangle order.
    """
    if spec.kind != "gaussian":
        raise ValueError("sample_gaussian needs a Gaussian ensemble spec")
    return _draw_gaussian(int(spec.beta), spec.dim, float(spec.q), rng.generator())


def sample_spherical(spec: EnsembleSpec, rng: RngState) -> SelfAdjointMatrix:
    """One draw from S_beta(N, r), projecting a G_beta(N, 1) draw radially onto the sphere."""
    if spec.kind != "spherical":
        raise ValueError("sample_spherical needs a spherical ensemble spec")
    gen = rng.generator()
    r = spec.r
    while True:
        a = _draw_gaussian(int(spec.beta), spec.dim, 1.0, gen)
        norm = frobenius_norm(a)
        if norm > _TINY_NORM:
            return scale(a, r / norm)


def sample(spec: EnsembleSpec, rng: RngState) -> SelfAdjointMatrix:
    if spec.kind == "gaussian":
        return sample_gaussian(spec, rng)
    return sample_spherical(spec, rng)


def sample_batch(spec: EnsembleSpec, count: int, rng: RngState, workers: int = 1) -> list[SelfAdjointMatrix]:
    """``count`` independent draws; draw i uses stream ``rng.stream + i``."""
    if count < 1:
        raise ValueError("count must be at least 1")
    states = [rng.substream(i) for i in range(count)]
    if workers <= 1:
        return [sample(spec, s) for s in states]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda s: sample(spec, s), states))
