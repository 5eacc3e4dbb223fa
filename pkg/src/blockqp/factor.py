"""Symmetric indefinite factorization ``P^T K P = L B L^T`` of block KKT matrices.

Two strategies share one elimination kernel:

* ``factorize_block_kkt``: ``m`` zero-corner 2x2 pivots ``[[h_ll, a_rl], [a_rl, 0]]``
  chosen block by block (the structured phase), then bounded Bunch-Kaufman on
  the remaining ``(n - m) x (n - m)`` matrix (the dense phase).
* ``factorize_dense_bbk``: bounded Bunch-Kaufman on the whole matrix.

The working matrix is kept dense.  Pivots are moved to the front with
symmetric row/column swaps, so ``work`` is always the trailing square of the
physical array.  Schur updates are restricted to the support of the pivot
columns; zero entries of those columns contribute exact zeros either way, so
restricting is only a matter of speed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import SingularPivot
from .model import BlockLayout, KktMatrix
from .pivoting import PivotKind, bbk_select, select_structured_pivot

__all__ = [
    "EliminationState",
    "Factorization",
    "PivotRecord",
    "block_selection_rng",
    "dense_phase",
    "eliminate_once",
    "factorize_block_kkt",
    "factorize_dense_bbk",
    "nnz",
    "reconstruct",
    "structured_phase",
]

STRUCTURED = "structured"
DENSE = "dense"

# stream tag for block selection; problem generation uses other tags
BLOCK_SELECT_STREAM = 1

def block_selection_rng(seed: int) -> np.random.Generator:
    """PCG64 stream used to pick the next block in the structured phase."""
    return np.random.default_rng([int(seed), BLOCK_SELECT_STREAM])


@dataclass(frozen=True)
class PivotRecord:
    phase: str
    kind: PivotKind
    indices: tuple[int, ...]
    position: int
    ratio: float | None = None
    fill: int = 0


@dataclass
class EliminationState:
    """Mutable state of one factorization run.

    ``a`` holds the partially eliminated matrix in the current symmetric
    ordering; rows/columns before ``eliminated`` are stale.  ``order[i]`` is
    the original K index now at position ``i`` and ``where`` is its inverse.
    ``lt[j, k]`` is the L entry in pivot column ``j`` for original row ``k``.
    """

    a: np.ndarray
    order: np.ndarray
    where: np.ndarray
    lt: np.ndarray
    layout: BlockLayout | None = None
    avail_blocks: list[int] = field(default_factory=list)
    avail_rows: np.ndarray | None = None
    avail_cols: np.ndarray | None = None
    eliminated: int = 0
    blocks: list[np.ndarray] = field(default_factory=list)
    log: list[PivotRecord] = field(default_factory=list)
    seed: int | None = None

    @classmethod
    def start(cls, K: KktMatrix | np.ndarray, layout: BlockLayout | None = None) -> "EliminationState":
        if isinstance(K, KktMatrix):
            layout = K.layout if layout is None else layout
            K = K.entries
        a = np.array(K, dtype=np.float64, copy=True)
        s = a.shape[0]
        if a.shape != (s, s):
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        state = cls(a, np.arange(s), np.arange(s), np.zeros((s, s)), layout)
        if layout is not None:
            state.avail_blocks = [b for b in range(layout.N) if layout.eR[b] >= layout.sR[b]]
            state.avail_rows = np.zeros(s, dtype=bool)
            state.avail_rows[layout.n:] = True
            state.avail_cols = np.zeros(s, dtype=bool)
            state.avail_cols[:layout.n] = True
        return state

    @property
    def s(self) -> int:
        return self.a.shape[0]

    @property
    def work(self) -> np.ndarray:
        """The remaining matrix ``K^(t)`` (a view)."""
        p = self.eliminated
        return self.a[p:, p:]

    @property
    def pivot_count(self) -> int:
        return len(self.log)

    def swap(self, i: int, j: int) -> None:
        """Symmetric interchange of positions ``i`` and ``j`` (both >= eliminated)."""
        if i == j:
            return
        p = self.eliminated
        a = self.a
        a[[i, j], p:] = a[[j, i], p:]
        a[p:, [i, j]] = a[p:, [j, i]]
        oi, oj = self.order[i], self.order[j]
        self.order[i], self.order[j] = oj, oi
        self.where[oi], self.where[oj] = j, i


@dataclass(frozen=True, eq=False)
class Factorization:
    """``P^T K P = L B L^T`` with ``(P^T K P)[i, j] = K[perm[i], perm[j]]``."""

    perm: np.ndarray
    L: np.ndarray
    B: tuple[np.ndarray, ...]
    pivot_log: tuple[PivotRecord, ...]
    strategy: str
    seed: int | None = None

    @property
    def s(self) -> int:
        return len(self.perm)

    def nnz(self) -> int:
        return nnz(self)

    def reconstruct(self) -> np.ndarray:
        return reconstruct(self)

    def block_diagonal(self) -> np.ndarray:
        D = np.zeros((self.s, self.s))
        p = 0
        for blk in self.B:
            k = blk.shape[0]
            D[p:p + k, p:p + k] = blk
            p += k
        return D

    def structured_fill(self) -> int:
        return sum(r.fill for r in self.pivot_log if r.phase == STRUCTURED)

    def max_multiplier(self, phase: str = DENSE) -> float:
        """Largest ``|L[i, j]|`` (i > j) over pivot columns of ``phase``."""
        out = 0.0
        for rec in self.pivot_log:
            if rec.phase != phase:
                continue
            k = rec.kind.value
            cols = self.L[rec.position + k:, rec.position:rec.position + k]
            if cols.size:
                out = max(out, float(np.abs(cols).max()))
        return out

    def solve_flops(self) -> int:
        """Flop count of one forward/block/backward substitution sweep."""
        off = self.nnz() - self.s
        return 4 * off + sum(1 if b.shape[0] == 1 else 6 for b in self.B)


def _inverse(B: np.ndarray) -> np.ndarray:
    if B.shape == (1, 1):
        if B[0, 0] == 0:
            raise SingularPivot("1x1 pivot is zero")
        return np.array([[1.0 / B[0, 0]]])
    b00, b01, b11 = B[0, 0], B[1, 0], B[1, 1]
    det = b00 * b11 - b01 * b01
    if det == 0:
        raise SingularPivot("2x2 pivot has zero determinant")
    return np.array([[b11 / det, -b01 / det], [-b01 / det, b00 / det]])


def _schur_update(W: np.ndarray, C: np.ndarray, binv: np.ndarray) -> int:
    """``W -= C binv C^T`` in place; returns the number of new nonzeros.

    Only rows/columns where the pivot columns are nonzero are visited.  For a
    2x2 inverse with a zero (1, 1) entry every term carries a factor from the
    second pivot column, so the update lives in ``S x T`` and ``T x S`` with
    ``T`` the support of that column (symmetrically for a zero (2, 2) entry).
    """
    size = W.shape[0]
    if size == 0:
        return 0
    c1 = np.ascontiguousarray(C[:, 0])
    if C.shape[1] == 1:
        S = np.flatnonzero(c1)
        if S.size == size:
            return _kernels.update_one_full(W, c1, binv[0, 0])
        return _kernels.update_one(W, S, S, c1, binv[0, 0])

    c2 = np.ascontiguousarray(C[:, 1])
    b00, b01, b11 = binv[0, 0], binv[0, 1], binv[1, 1]
    S = np.flatnonzero((c1 != 0) | (c2 != 0))
    if b00 == 0:
        T = np.flatnonzero(c2)
    elif b11 == 0:
        T = np.flatnonzero(c1)
    else:
        T = S
    if T.size == S.size:
        if S.size == size:
            return _kernels.update_two_full(W, c1, c2, b00, b01, b11)
        return _kernels.update_two(W, S, S, c1, c2, b00, b01, b11)
    # S x T, then the mirror strip T x (S \ T); T x T is covered once
    fill = _kernels.update_two(W, S, T, c1, c2, b00, b01, b11)
    rest = np.setdiff1d(S, T, assume_unique=True)
    fill += _kernels.update_two(W, T, rest, c1, c2, b00, b01, b11)
    return fill


def eliminate_once(
    state: EliminationState,
    pivot: Sequence[int],
    *,
    phase: str = DENSE,
    ratio: float | None = None,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Eliminate the 1x1 or 2x2 pivot on original indices ``pivot``.

    Returns ``(L_cols, B_block, fill)`` where ``L_cols`` are the new L
    columns over the remaining rows (in the post-step ordering) and ``fill``
    counts entries of the Schur complement that were zero in ``Z`` but are
    nonzero afterwards (both triangles).
    """
    k = len(pivot)
    if k not in (1, 2):
        raise ValueError("pivot must have one or two indices")
    p = state.eliminated
    for off, idx in enumerate(pivot):
        state.swap(p + off, int(state.where[idx]))

    a = state.a
    B = a[p:p + k, p:p + k].copy()
    binv = _inverse(B)
    C = a[p + k:, p:p + k].copy()
    if k == 1:
        Lc = C * binv[0, 0]
    else:
        Lc = np.empty_like(C)
        Lc[:, 0] = C[:, 0] * binv[0, 0] + C[:, 1] * binv[1, 0]
        Lc[:, 1] = C[:, 0] * binv[0, 1] + C[:, 1] * binv[1, 1]

    fill = _schur_update(a[p + k:, p + k:], C, binv)

    rest = state.order[p + k:]
    state.lt[p:p + k, rest] = Lc.T
    state.blocks.append(B)
    state.log.append(
        PivotRecord(
            phase=phase,
            kind=PivotKind(k),
            indices=tuple(int(i) for i in pivot),
            position=p,
            ratio=ratio,
            fill=fill,
        )
    )
    state.eliminated = p + k
    return Lc, B, fill


def structured_phase(K: KktMatrix, layout: BlockLayout | None = None, seed: int = 0) -> EliminationState:
    """Apply ``m`` zero-corner pivots, one constraint row at a time.

    Each step draws an available block at random, takes its best-conditioned
    candidate ``(l, r)``, moves ``l`` then ``r`` to the front and eliminates
    them.  The returned state holds the ``(n - m) x (n - m)`` remainder.
    """
    layout = K.layout if layout is None else layout
    state = EliminationState.start(K, layout)
    state.seed = int(seed)
    rng = block_selection_rng(seed)
    for _ in range(layout.m):
        block = state.avail_blocks[int(rng.integers(len(state.avail_blocks)))]
        cand = select_structured_pivot(
            state.a, layout, block, state.avail_rows, state.avail_cols, where=state.where
        )
        r, l = cand.row, cand.col
        assert state.a[state.where[r], state.where[r]] == 0, "constraint diagonal must stay zero"
        eliminate_once(state, (l, r), phase=STRUCTURED, ratio=cand.ratio)
        state.avail_cols[l] = False
        state.avail_rows[r] = False
        if not state.avail_rows[layout.sR[block]:layout.eR[block] + 1].any():
            state.avail_blocks.remove(block)
    return state


def dense_phase(state: EliminationState) -> EliminationState:
    """Bounded Bunch-Kaufman on whatever remains of ``state``."""
    while state.eliminated < state.s:
        piv = bbk_select(state.work)
        p = state.eliminated
        orig = tuple(int(state.order[p + i]) for i in piv.indices)
        eliminate_once(state, orig, phase=DENSE)
    return state


def _finish(state: EliminationState, strategy: str) -> Factorization:
    perm = state.order.copy()
    L = np.ascontiguousarray(state.lt[:, perm].T)
    np.fill_diagonal(L, 1.0)
    perm.setflags(write=False)
    L.setflags(write=False)
    return Factorization(perm, L, tuple(state.blocks), tuple(state.log), strategy, state.seed)


def factorize_block_kkt(K: KktMatrix, layout: BlockLayout | None = None, seed: int = 0) -> Factorization:
    """Structured phase followed by the dense phase."""
    state = structured_phase(K, layout, seed)
    dense_phase(state)
    return _finish(state, STRUCTURED)


def factorize_dense_bbk(K: KktMatrix | np.ndarray) -> Factorization:
    """Whole-matrix bounded Bunch-Kaufman baseline."""
    state = EliminationState.start(K.entries if isinstance(K, KktMatrix) else K)
    dense_phase(state)
    return _finish(state, "bbk")


def nnz(f: Factorization) -> int:
    """Entries of L (unit diagonal included) that are not exactly zero."""
    return int(np.count_nonzero(f.L))


def reconstruct(f: Factorization) -> np.ndarray:
    """``P (L B L^T) P^T`` in the original ordering."""
    M = f.L @ f.block_diagonal() @ f.L.T
    out = np.empty_like(M)
    out[np.ix_(f.perm, f.perm)] = M
    return out
