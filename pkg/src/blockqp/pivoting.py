"""Pivot choice: zero-corner 2x2 candidates and bounded Bunch-Kaufman."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import Singular, StructurallySingular
from .model import BlockLayout

__all__ = [
    "ALPHA",
    "BbkPivot",
    "PivotKind",
    "StructuredCandidate",
    "bbk_select",
    "cond_inf_zero_corner",
    "select_structured_pivot",
]

ALPHA = (1.0 + math.sqrt(17.0)) / 8.0


def cond_inf_zero_corner(h_ll: float, a_rl: float) -> float:
    """Infinity-norm condition number of ``[[h_ll, a_rl], [a_rl, 0]]``.

    Equal to ``(1 + |h_ll| / |a_rl|)**2``; infinite when ``a_rl == 0``.
    """
    if a_rl == 0:
        return math.inf
    return (1.0 + abs(h_ll) / abs(a_rl)) ** 2


@dataclass(frozen=True)
class StructuredCandidate:
    col: int
    row: int
    h_ll: float
    a_rl: float
    ratio: float

    @property
    def cond(self) -> float:
        return cond_inf_zero_corner(self.h_ll, self.a_rl)


def select_structured_pivot(
    work: np.ndarray,
    layout: BlockLayout,
    block: int,
    avail_rows: np.ndarray,
    avail_cols: np.ndarray,
    where: np.ndarray | None = None,
) -> StructuredCandidate:
    """Best-conditioned zero-corner pivot ``(l, r)`` inside ``block``.

    ``avail_rows`` / ``avail_cols`` are boolean masks over original K
    indices.  ``where`` maps an original index to its current position in
    ``work``; ``None`` means ``work`` is in original order.  The returned
    ``col``/``row`` are original indices.

    Only the largest ``|a_rl|`` of each column can minimise ``|h_ll|/|a_rl|``
    for that column, so columns are ranked by that value first; every pair
    reaching the overall minimum is then examined for the tie-break on
    (row, col).
    """
    rows = layout.rows(block)
    cols = layout.columns(block)
    rows = rows[avail_rows[rows]]
    cols = cols[avail_cols[cols]]
    if rows.size == 0 or cols.size == 0:
        raise StructurallySingular(f"block {block + 1} has no available row/column pair")
    prow = rows if where is None else where[rows]
    pcol = cols if where is None else where[cols]

    a = np.abs(work[np.ix_(prow, pcol)])  # |a_rl|, one row per constraint
    h = np.abs(work[pcol, pcol])
    amax = a.max(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        col_best = np.where(amax > 0, h / amax, np.inf)
    best = col_best.min()
    if not np.isfinite(best):
        raise StructurallySingular(f"every constraint entry of block {block + 1} is zero")

    winner = None
    for j in np.flatnonzero(col_best == best):
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(a[:, j] > 0, h[j] / a[:, j], np.inf)
        # rows are ascending, so the first hit is the smallest row
        i = int(np.flatnonzero(ratios == best)[0])
        key = (int(rows[i]), int(cols[j]))
        if winner is None or key < winner:
            winner = key
    r, l = winner
    pr = r if where is None else where[r]
    pl = l if where is None else where[l]
    return StructuredCandidate(col=l, row=r, h_ll=float(work[pl, pl]), a_rl=float(work[pr, pl]), ratio=float(best))


class PivotKind(Enum):
    ONE = 1
    TWO = 2


@dataclass(frozen=True)
class BbkPivot:
    kind: PivotKind
    indices: tuple[int, ...]

    def __post_init__(self):
        if len(self.indices) != self.kind.value:
            raise ValueError("index count must match pivot size")
        if self.kind is PivotKind.TWO and self.indices[0] == self.indices[1]:
            raise ValueError("2x2 pivot indices must differ")


def _offdiag_max(work: np.ndarray, j: int) -> tuple[int, float]:
    col = np.abs(work[:, j])
    col[j] = -1.0
    i = int(np.argmax(col))
    return i, float(col[i])


def bbk_select(work: np.ndarray, alpha: float = ALPHA) -> BbkPivot:
    """Bounded Bunch-Kaufman pivot for the leading column of ``work``.

    Indices in the result are zero-based positions in ``work``.
    """
    size = work.shape[0]
    if size == 0:
        raise ValueError("empty working matrix")
    k11 = abs(work[0, 0])
    gamma1 = float(np.abs(work[1:, 0]).max()) if size > 1 else 0.0
    if k11 >= alpha * gamma1:
        if k11 == 0:
            raise Singular("leading column of the working matrix is zero")
        return BbkPivot(PivotKind.ONE, (0,))

    l, gamma_l = 0, gamma1
    while True:
        r, _ = _offdiag_max(work, l)
        _, gamma_r = _offdiag_max(work, r)
        if abs(work[r, r]) >= alpha * gamma_r:
            return BbkPivot(PivotKind.ONE, (r,))
        if gamma_l == gamma_r:
            return BbkPivot(PivotKind.TWO, (l, r))
        l, gamma_l = r, gamma_r
