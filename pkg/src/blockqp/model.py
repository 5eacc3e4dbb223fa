"""Block-constrained QP instances, KKT assembly and the BLOCKQP v1 file format.

The QP is

    minimize    1/2 x^T H x + c^T x
    subject to  A x = e

with ``A = blkdiag(A_1, ..., A_N)`` and ``A_i`` of shape ``(m_i, n_i)``.
Its KKT matrix is ``[[H, A^T], [A, 0]]`` with every variable column first
(grouped by block) followed by every constraint row (grouped by block).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InvariantViolation, ProblemParseError

__all__ = [
    "BlockQp",
    "BlockLayout",
    "KktMatrix",
    "KktRhs",
    "assemble_kkt",
    "build_rhs",
    "read_problem",
    "write_problem",
]

FORMAT_HEADER = "BLOCKQP 1"


def _frozen(a, ndim: int, name: str) -> np.ndarray:
    arr = np.array(a, dtype=np.float64, copy=True)
    if arr.ndim != ndim:
        raise InvariantViolation(f"{name} must be {ndim}-dimensional", f"got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BlockQp:
    """An equality-constrained QP whose constraint matrix is block diagonal.

    ``n`` and ``block_dims`` are stored explicitly (as in the file format) and
    checked against the arrays on construction.  Arrays are copied and made
    read-only.
    """

    n: int
    block_dims: tuple[tuple[int, int], ...]
    H: np.ndarray
    A_blocks: tuple[np.ndarray, ...]
    c: np.ndarray
    e: np.ndarray

    def __post_init__(self):
        dims = tuple((int(ni), int(mi)) for ni, mi in self.block_dims)
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "block_dims", dims)
        object.__setattr__(self, "H", _frozen(self.H, 2, "H"))
        object.__setattr__(self, "c", _frozen(self.c, 1, "c"))
        object.__setattr__(self, "e", _frozen(self.e, 1, "e"))
        object.__setattr__(
            self, "A_blocks", tuple(_frozen(A, 2, f"A_{i + 1}") for i, A in enumerate(self.A_blocks))
        )
        self.validate()

    @property
    def m(self) -> int:
        return sum(mi for _, mi in self.block_dims)

    @property
    def N(self) -> int:
        return len(self.block_dims)

    @property
    def s(self) -> int:
        return self.n + self.m

    def validate(self) -> None:
        n, m = self.n, self.m
        if self.N == 0:
            raise InvariantViolation("N >= 1", "no constraint blocks")
        if sum(ni for ni, _ in self.block_dims) != n:
            raise InvariantViolation(
                "sum of n_i equals n", f"sum n_i = {sum(ni for ni, _ in self.block_dims)}, n = {n}"
            )
        for i, (ni, mi) in enumerate(self.block_dims):
            if not 0 <= mi < ni:
                raise InvariantViolation("m_i < n_i for every block", f"block {i + 1}: n_i={ni}, m_i={mi}")
        if not m < n:
            raise InvariantViolation("m < n", f"m={m}, n={n}")
        if self.H.shape != (n, n):
            raise InvariantViolation("H is n x n", f"shape {self.H.shape}")
        if not np.array_equal(self.H, self.H.T):
            raise InvariantViolation("H is symmetric")
        if self.c.shape != (n,):
            raise InvariantViolation("c has length n", f"shape {self.c.shape}")
        if self.e.shape != (m,):
            raise InvariantViolation("e has length m", f"shape {self.e.shape}")
        if len(self.A_blocks) != self.N:
            raise InvariantViolation("one A_i per block", f"{len(self.A_blocks)} blocks for N={self.N}")
        for i, (A, (ni, mi)) in enumerate(zip(self.A_blocks, self.block_dims)):
            if A.shape != (mi, ni):
                raise InvariantViolation("A_i is m_i x n_i", f"block {i + 1}: shape {A.shape}, expected {(mi, ni)}")

    def constraint_matrix(self) -> np.ndarray:
        """The full m x n block-diagonal constraint matrix."""
        A = np.zeros((self.m, self.n))
        r = c = 0
        for Ai, (ni, mi) in zip(self.A_blocks, self.block_dims):
            A[r:r + mi, c:c + ni] = Ai
            r += mi
            c += ni
        return A

    def equals(self, other: "BlockQp") -> bool:
        """Bitwise equality on every numeric field."""
        return (
            self.n == other.n
            and self.block_dims == other.block_dims
            and np.array_equal(self.H, other.H)
            and np.array_equal(self.c, other.c)
            and np.array_equal(self.e, other.e)
            and all(np.array_equal(a, b) for a, b in zip(self.A_blocks, other.A_blocks))
        )


@dataclass(frozen=True)
class BlockLayout:
    """Zero-based, inclusive index ranges of each block inside K.

    ``sC[i]..eC[i]`` are the variable columns of block ``i`` and
    ``sR[i]..eR[i]`` its constraint rows.  Blocks with ``m_i = 0`` have
    ``eR[i] = sR[i] - 1``.
    """

    n: int
    m: int
    sR: np.ndarray
    eR: np.ndarray
    sC: np.ndarray
    eC: np.ndarray
    col_block: np.ndarray = field(repr=False)
    row_block: np.ndarray = field(repr=False)

    @classmethod
    def from_dims(cls, block_dims: Sequence[tuple[int, int]]) -> "BlockLayout":
        ni = np.array([d[0] for d in block_dims], dtype=np.intp)
        mi = np.array([d[1] for d in block_dims], dtype=np.intp)
        n, m = int(ni.sum()), int(mi.sum())
        sC = np.concatenate(([0], np.cumsum(ni)[:-1])).astype(np.intp)
        sR = (n + np.concatenate(([0], np.cumsum(mi)[:-1]))).astype(np.intp)
        col_block = np.repeat(np.arange(len(ni)), ni)
        row_block = np.repeat(np.arange(len(mi)), mi)
        # index by K position: variables then constraints
        owner = np.concatenate((col_block, row_block)).astype(np.intp)
        out = cls(n, m, sR, sR + mi - 1, sC, sC + ni - 1, owner[:n], owner[n:])
        for a in (out.sR, out.eR, out.sC, out.eC, out.col_block, out.row_block):
            a.setflags(write=False)
        return out

    @property
    def N(self) -> int:
        return len(self.sC)

    @property
    def s(self) -> int:
        return self.n + self.m

    def block_of(self, index: int) -> int:
        """Block owning K position ``index`` (variable or constraint)."""
        if index < self.n:
            return int(self.col_block[index])
        return int(self.row_block[index - self.n])

    def columns(self, block: int) -> np.ndarray:
        return np.arange(self.sC[block], self.eC[block] + 1)

    def rows(self, block: int) -> np.ndarray:
        return np.arange(self.sR[block], self.eR[block] + 1)


@dataclass(frozen=True, eq=False)
class KktMatrix:
    entries: np.ndarray
    layout: BlockLayout

    @property
    def s(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.layout.n

    @property
    def m(self) -> int:
        return self.layout.m


@dataclass(frozen=True, eq=False)
class KktRhs:
    g: np.ndarray
    h: np.ndarray

    @property
    def v(self) -> np.ndarray:
        return np.concatenate((self.g, self.h))


def assemble_kkt(problem: BlockQp) -> KktMatrix:
    """Dense KKT matrix ``[[H, A^T], [A, 0]]`` with its block layout."""
    n, m = problem.n, problem.m
    if sum(ni for ni, _ in problem.block_dims) != n:
        raise DimensionMismatch("sum of n_i equals n")
    if sum(A.shape[0] for A in problem.A_blocks) != m:
        raise DimensionMismatch("sum of m_i equals m")
    layout = BlockLayout.from_dims(problem.block_dims)
    K = np.zeros((n + m, n + m))
    K[:n, :n] = problem.H
    for i, A in enumerate(problem.A_blocks):
        rows = slice(layout.sR[i], layout.eR[i] + 1)
        cols = slice(layout.sC[i], layout.eC[i] + 1)
        K[rows, cols] = A
        K[cols, rows] = A.T
    K.setflags(write=False)
    return KktMatrix(K, layout)


def build_rhs(problem: BlockQp, x0) -> KktRhs:
    """Right-hand side ``g = c + H x0``, ``h = A x0 - e`` at the point ``x0``."""
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.shape != (problem.n,):
        raise DimensionMismatch("x0 has length n", f"shape {x0.shape}")
    g = problem.c + problem.H @ x0
    parts = []
    c0 = 0
    for A, (ni, _) in zip(problem.A_blocks, problem.block_dims):
        parts.append(A @ x0[c0:c0 + ni])
        c0 += ni
    h = np.concatenate(parts) - problem.e if parts else -problem.e
    return KktRhs(g, h)


# -- BLOCKQP v1 text format -------------------------------------------------

def _fmt(values) -> str:
    return " ".join(format(float(v), ".17g") for v in values)


def write_problem(problem: BlockQp, path: str | os.PathLike) -> None:
    lines = [FORMAT_HEADER, f"{problem.n} {problem.m} {problem.N}"]
    lines.append(" ".join(f"{ni} {mi}" for ni, mi in problem.block_dims))
    lines.extend(_fmt(row) for row in problem.H)
    lines.append(_fmt(problem.c))
    lines.append(_fmt(problem.e))
    for A in problem.A_blocks:
        lines.extend(_fmt(row) for row in A)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


class _LineReader:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    def next(self, what: str) -> tuple[int, list[str]]:
        lineno = self.pos + 1
        if self.pos >= len(self.lines):
            raise ProblemParseError(lineno, f"unexpected end of file, expected {what}")
        self.pos += 1
        return lineno, self.lines[self.pos - 1].split()

    def numbers(self, count: int, what: str, conv=float) -> list:
        lineno, tok = self.next(what)
        if len(tok) != count:
            raise ProblemParseError(lineno, f"expected {count} values for {what}, got {len(tok)}")
        try:
            return [conv(t) for t in tok]
        except ValueError as exc:
            raise ProblemParseError(lineno, f"bad number in {what}: {exc}") from None


def read_problem(path: str | os.PathLike) -> BlockQp:
    """Parse a BLOCKQP v1 file.

    Raises ``ProblemParseError`` (with a one-based line number) on malformed
    text and ``InvariantViolation`` when the numbers are well formed but
    inconsistent.
    """
    with open(path) as fh:
        rd = _LineReader(fh.read())
    lineno, tok = rd.next("header")
    if " ".join(tok) != FORMAT_HEADER:
        raise ProblemParseError(lineno, f"expected header {FORMAT_HEADER!r}")
    n, m, N = rd.numbers(3, "'n m N'", int)
    if N < 1 or n < 1:
        raise InvariantViolation("n >= 1 and N >= 1", f"n={n}, N={N}")
    flat = rd.numbers(2 * N, "block dimensions", int)
    dims = [(flat[2 * i], flat[2 * i + 1]) for i in range(N)]
    if sum(d[0] for d in dims) != n:
        raise InvariantViolation("sum of n_i equals n", f"sum n_i = {sum(d[0] for d in dims)}, n = {n}")
    if sum(d[1] for d in dims) != m:
        raise InvariantViolation("sum of m_i equals m", f"sum m_i = {sum(d[1] for d in dims)}, m = {m}")
    H = [rd.numbers(n, f"row {i + 1} of H") for i in range(n)]
    c = rd.numbers(n, "c")
    e = rd.numbers(m, "e")
    blocks = []
    for b, (ni, mi) in enumerate(dims):
        blocks.append(np.array([rd.numbers(ni, f"row {r + 1} of A_{b + 1}") for r in range(mi)]).reshape(mi, ni))
    for extra in rd.lines[rd.pos:]:
        rd.pos += 1
        if extra.strip():
            raise ProblemParseError(rd.pos, "trailing data after last block")
    return BlockQp(n, dims, np.array(H), blocks, np.array(c), np.array(e))
