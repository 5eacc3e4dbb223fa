"""Substitution through ``P^T K P = L B L^T`` and end-to-end QP solves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .errors import DimensionMismatch, SingularBlock
from .factor import Factorization, factorize_block_kkt, factorize_dense_bbk
from .model import BlockQp, KktMatrix, assemble_kkt, build_rhs

__all__ = ["QpSolution", "kkt_residual", "solve_qp", "solve_with_factorization"]


@dataclass(frozen=True, eq=False)
class QpSolution:
    x_star: np.ndarray
    lambda_star: np.ndarray
    residual: float
    factorization: Factorization | None = None


def _block_solve(blocks, z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    p = 0
    for B in blocks:
        if B.shape == (1, 1):
            if B[0, 0] == 0:
                raise SingularBlock(f"1x1 block at position {p} is zero")
            out[p] = z[p] / B[0, 0]
            p += 1
            continue
        b00, b01, b11 = B[0, 0], B[1, 0], B[1, 1]
        det = b00 * b11 - b01 * b01
        if det == 0:
            raise SingularBlock(f"2x2 block at position {p} is singular")
        z0, z1 = z[p], z[p + 1]
        out[p] = (b11 * z0 - b01 * z1) / det
        out[p + 1] = (b00 * z1 - b01 * z0) / det
        p += 2
    return out


def solve_with_factorization(f: Factorization, v) -> np.ndarray:
    """Solve ``K z = v``: ``L y = P^T v``, ``B w = y``, ``L^T u = w``, ``z = P u``."""
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (f.s,):
        raise DimensionMismatch("right-hand side has length s", f"shape {v.shape}, s={f.s}")
    y = solve_triangular(f.L, v[f.perm], lower=True, unit_diagonal=True, check_finite=False)
    w = _block_solve(f.B, y)
    u = solve_triangular(f.L, w, lower=True, trans="T", unit_diagonal=True, check_finite=False)
    z = np.empty_like(u)
    z[f.perm] = u
    return z


def kkt_residual(K: KktMatrix | np.ndarray, z, v) -> float:
    """``||K z - v||_2`` with a plain dense product."""
    entries = K.entries if isinstance(K, KktMatrix) else np.asarray(K)
    return float(np.linalg.norm(entries @ np.asarray(z) - np.asarray(v)))


def solve_qp(problem: BlockQp, seed: int = 0, strategy: str = "structured") -> QpSolution:
    """Solve the QP from the KKT system at ``x0 = 0``.

    With ``x0 = 0`` the system is ``K [-x*; lambda*] = [c; -e]``.
    """
    K = assemble_kkt(problem)
    rhs = build_rhs(problem, np.zeros(problem.n))
    v = rhs.v
    if strategy == "structured":
        f = factorize_block_kkt(K, seed=seed)
    elif strategy == "bbk":
        f = factorize_dense_bbk(K)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    z = solve_with_factorization(f, v)
    n = problem.n
    return QpSolution(-z[:n], z[n:], kkt_residual(K, z, v), f)
