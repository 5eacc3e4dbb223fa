"""Compiled symmetric Schur-update kernels.

``W[i, j] -= U[i, j]`` with ``U = C Binv C^T`` written so that ``U[i, j]`` and
``U[j, i]`` are computed by the same sequence of operations (bitwise
symmetric).  Every kernel returns the number of entries that went from
exactly zero to nonzero.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def update_one(W, rows, cols, c, b):
    fill = 0
    for ii in range(rows.size):
        i = rows[ii]
        x = c[i]
        for jj in range(cols.size):
            j = cols[jj]
            old = W[i, j]
            new = old - (x * c[j]) * b
            W[i, j] = new
            if old == 0.0 and new != 0.0:
                fill += 1
    return fill


@numba.njit(cache=True)
def update_two(W, rows, cols, c1, c2, b00, b01, b11):
    fill = 0
    for ii in range(rows.size):
        i = rows[ii]
        x1 = c1[i]
        x2 = c2[i]
        for jj in range(cols.size):
            j = cols[jj]
            u = b01 * (x1 * c2[j] + x2 * c1[j])
            if b00 != 0.0:
                u += b00 * (x1 * c1[j])
            if b11 != 0.0:
                u += b11 * (x2 * c2[j])
            old = W[i, j]
            new = old - u
            W[i, j] = new
            if old == 0.0 and new != 0.0:
                fill += 1
    return fill


@numba.njit(cache=True)
def update_one_full(W, c, b):
    fill = 0
    n = c.size
    for i in range(n):
        x = c[i]
        if x == 0.0:
            continue
        row = W[i]
        for j in range(n):
            old = row[j]
            new = old - (x * c[j]) * b
            row[j] = new
            if old == 0.0 and new != 0.0:
                fill += 1
    return fill


@numba.njit(cache=True)
def update_two_full(W, c1, c2, b00, b01, b11):
    fill = 0
    n = c1.size
    for i in range(n):
        x1 = c1[i]
        x2 = c2[i]
        if x1 == 0.0 and x2 == 0.0:
            continue
        row = W[i]
        for j in range(n):
            u = b01 * (x1 * c2[j] + x2 * c1[j])
            if b00 != 0.0:
                u += b00 * (x1 * c1[j])
            if b11 != 0.0:
                u += b11 * (x2 * c2[j])
            old = row[j]
            new = old - u
            row[j] = new
            if old == 0.0 and new != 0.0:
                fill += 1
    return fill


def warm_up() -> None:
    W = np.zeros((2, 2))
    idx = np.arange(2)
    c = np.ones(2)
    update_one(W, idx, idx, c, 1.0)
    update_two(W, idx, idx, c, c, 0.0, 1.0, 1.0)
    update_one_full(W, c, 1.0)
    update_two_full(W, c, c, 0.0, 1.0, 1.0)
