"""Seeded random block-constrained QPs.

Dense case: entries of ``Hhat`` (n x n), ``c``, ``e`` and each ``A_i`` are
uniform on the open interval (0, 1), and ``H = Hhat Hhat^T / max(Hhat)``.

Sparse case (``h_density < 1``): each lower-triangle entry of ``H``
(diagonal included) is nonzero with probability ``h_density``, nonzero
values uniform on (0, 1), mirrored to the upper triangle.

Random numbers come from numpy's PCG64 seeded with ``[seed, tag]``, one
independent stream per quantity, so changing the density never shifts the
values drawn for ``A``, ``c`` or ``e``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvariantViolation
from .model import BlockQp

__all__ = ["GenSpec", "generate", "uniform_open", "stream"]

_TAGS = {"hessian": 11, "hessian_pattern": 12, "c": 13, "e": 14, "A": 15}


def stream(seed: int, purpose: str) -> np.random.Generator:
    return np.random.default_rng([int(seed), _TAGS[purpose]])


def uniform_open(rng: np.random.Generator, size) -> np.ndarray:
    """Uniform samples on (0, 1); exact zeros are redrawn."""
    u = rng.random(size)
    zero = u == 0
    while zero.any():
        u[zero] = rng.random(int(zero.sum()))
        zero = u == 0
    return u


@dataclass(frozen=True)
class GenSpec:
    n: int
    block_dims: tuple[tuple[int, int], ...]
    h_density: float = 1.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "block_dims", tuple((int(a), int(b)) for a, b in self.block_dims))
        if sum(ni for ni, _ in self.block_dims) != self.n:
            raise InvariantViolation("sum of n_i equals n")
        if any(not 0 <= mi < ni for ni, mi in self.block_dims):
            raise InvariantViolation("m_i < n_i for every block")
        if not 0.0 < self.h_density <= 1.0:
            raise InvariantViolation("h_density in (0, 1]", f"got {self.h_density}")
        if self.seed < 0:
            raise InvariantViolation("seed >= 0")

    @property
    def m(self) -> int:
        return sum(mi for _, mi in self.block_dims)


def _symmetrize_upper(M: np.ndarray) -> np.ndarray:
    return np.triu(M) + np.triu(M, 1).T


def dense_hessian(n: int, seed: int) -> np.ndarray:
    Hhat = uniform_open(stream(seed, "hessian"), (n, n))
    # mirror one triangle so H is symmetric bit for bit
    return _symmetrize_upper((Hhat @ Hhat.T) / Hhat.max())


def sparse_hessian(n: int, density: float, seed: int) -> np.ndarray:
    mask = stream(seed, "hessian_pattern").random((n, n)) < density
    values = uniform_open(stream(seed, "hessian"), (n, n))
    lower = np.tril(np.where(mask, values, 0.0))
    return lower + np.tril(lower, -1).T


def generate(spec: GenSpec) -> BlockQp:
    n, m = spec.n, spec.m
    if spec.h_density >= 1.0:
        H = dense_hessian(n, spec.seed)
    else:
        H = sparse_hessian(n, spec.h_density, spec.seed)
    c = uniform_open(stream(spec.seed, "c"), n)
    e = uniform_open(stream(spec.seed, "e"), m)
    rng = stream(spec.seed, "A")
    blocks = [uniform_open(rng, (mi, ni)) for ni, mi in spec.block_dims]
    return BlockQp(n, spec.block_dims, H, blocks, c, e)


def equal_blocks(count: int, n_i: int, m_i: int) -> tuple[tuple[int, int], ...]:
    return tuple((n_i, m_i) for _ in range(count))


def spec_for(n: int, block_dims: Sequence[tuple[int, int]], h_density: float = 1.0, seed: int = 0) -> GenSpec:
    return GenSpec(n, tuple(block_dims), h_density, seed)
