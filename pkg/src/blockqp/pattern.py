"""Boolean replay of a factorization and a closed-form nonzero count.

The replay works on structural patterns only, so it shares no arithmetic
with the numeric engine: given the pivot sequence the engine chose, it
predicts the pattern of L and the fill-in of each Schur complement.
Accidental numeric cancellation is ignored (probability zero for the
random generator).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvariantViolation
from .factor import PivotRecord
from .model import KktMatrix

__all__ = ["PatternReplay", "pattern_of", "predict_nnz_dense_h", "simulate_pattern"]


def pattern_of(K) -> np.ndarray:
    """Boolean pattern (``True`` = nonzero) of a matrix or ``KktMatrix``."""
    entries = K.entries if isinstance(K, KktMatrix) else np.asarray(K)
    return entries != 0


@dataclass(frozen=True, eq=False)
class PatternReplay:
    L: np.ndarray  # predicted pattern of L in pivot order, unit diagonal included
    perm: np.ndarray
    fill: tuple[int, ...]  # per pivot step, both triangles counted

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.L))

    @property
    def total_fill(self) -> int:
        return sum(self.fill)


def _inverse_pattern(B: np.ndarray) -> np.ndarray:
    if B.shape == (1, 1):
        return B.copy()
    # inv([[x, y], [y, z]]) is proportional to [[z, -y], [-y, x]]
    return np.array([[B[1, 1], B[0, 1]], [B[1, 0], B[0, 0]]])


def simulate_pattern(pattern: np.ndarray, pivot_log: Iterable[PivotRecord | Sequence[int]]) -> PatternReplay:
    """Replay ``pivot_log`` on a boolean pattern.

    Each entry is either a ``PivotRecord`` or a tuple of one or two original
    indices.  Indices never named by the log are eliminated afterwards in
    ascending order as 1x1 pivots.

    With ``L_j`` the pattern of column ``j`` of ``C B^-1``, the update term
    ``C B^-1 C^T`` has pattern ``union_j L_j x C_j``; only those rectangles
    are touched.  Once one of them covers the whole remainder, every later
    step is dense and needs no further work.
    """
    P = np.array(pattern, dtype=bool, copy=True)
    s = P.shape[0]
    if P.shape != (s, s):
        raise ValueError("pattern must be square")
    alive = np.ones(s, dtype=bool)
    order: list[int] = []
    lcols: list[tuple[np.ndarray, np.ndarray | None]] = []  # None = every remaining row
    fills: list[int] = []
    full = False

    steps = [tuple(rec.indices) if isinstance(rec, PivotRecord) else tuple(int(i) for i in rec) for rec in pivot_log]
    named = set()
    for piv in steps:
        for i in piv:
            if not 0 <= i < s:
                raise IndexError(f"pivot index {i} out of range for size {s}")
            if i in named:
                raise IndexError(f"pivot index {i} eliminated twice")
            named.add(i)
    steps += [(int(i),) for i in range(s) if i not in named]

    for piv in steps:
        piv_arr = np.array(piv)
        alive[piv_arr] = False
        rest = np.flatnonzero(alive)
        if full:
            for idx in piv:
                order.append(idx)
                lcols.append((rest, None))
            fills.append(0)
            continue
        Binv = _inverse_pattern(P[np.ix_(piv_arr, piv_arr)])
        C = P[np.ix_(rest, piv_arr)]
        Lpat = np.zeros_like(C)
        for j in range(len(piv)):
            for i in range(len(piv)):
                if Binv[i, j]:
                    Lpat[:, j] |= C[:, i]
        fill = 0
        for j in range(len(piv)):
            rows, cols = rest[Lpat[:, j]], rest[C[:, j]]
            if rows.size == rest.size and cols.size == rest.size:
                full = True
            if rows.size and cols.size:
                region = np.ix_(rows, cols)
                fill += int(np.count_nonzero(~P[region]))
                P[region] = True
        fills.append(fill)
        for j, idx in enumerate(piv):
            order.append(idx)
            lcols.append((rest, Lpat[:, j]))

    perm = np.array(order, dtype=np.intp)
    pos = np.empty(s, dtype=np.intp)
    pos[perm] = np.arange(s)
    L = np.eye(s, dtype=bool)
    for j, (rows, colpat) in enumerate(lcols):
        L[pos[rows if colpat is None else rows[colpat]], j] = True
    return PatternReplay(L, perm, tuple(fills))


def predict_nnz_dense_h(n: int, block_dims: Sequence[tuple[int, int]]) -> int:
    """nnz(L) of the structured factorization when H is dense.

    Eliminating one zero-corner pivot of block ``b`` with ``V`` variables,
    ``v_b`` block variables and ``r_b`` block rows still present adds
    ``v_b - 1`` entries to the first L column (the rest of the pivot row of
    A) and ``(V - 1) + (r_b - 1)`` to the second (the Hessian column plus the
    remaining rows of the block).  Summing over all ``m`` pivots and adding
    a full lower triangle for the dense ``(n - m)`` remainder and the unit
    diagonal gives the count below.
    """
    dims = [(int(a), int(b)) for a, b in block_dims]
    m = sum(mi for _, mi in dims)
    if sum(ni for ni, _ in dims) != n:
        raise InvariantViolation("sum of n_i equals n")
    if not m < n:
        raise InvariantViolation("m < n", f"m={m}, n={n}")
    s = n + m
    r = n - m
    total = s + r * (r - 1) // 2
    total += m * n - m * (m + 1) // 2
    for ni, mi in dims:
        total += mi * ni - mi * (mi + 1) // 2
        total += mi * (mi - 1) // 2
    return total
