"""Three kinds of first pivot on a small two-block KKT matrix.

Six variables in two blocks of three, two constraints per block.  We
eliminate one pivot of each kind and print the pattern of what remains:
'x' was already nonzero, '+' is fill-in, '.' is zero.
"""

import numpy as np

from blockqp import BlockQp, assemble_kkt
from blockqp.factor import EliminationState, eliminate_once

rng = np.random.default_rng(3)
R = rng.uniform(1, 2, (6, 6))
H = np.triu(R) + np.triu(R, 1).T
problem = BlockQp(6, ((3, 2), (3, 2)), H, [rng.uniform(1, 2, (2, 3)) for _ in range(2)], np.ones(6), np.ones(4))
K = assemble_kkt(problem)


def show(title, pivot):
    state = EliminationState.start(K)
    before = state.a.copy()
    _, _, fill = eliminate_once(state, pivot)
    rest = state.order[state.eliminated:]
    Z = before[np.ix_(rest, rest)] != 0
    W = state.work != 0
    print(f"{title}: pivot on K indices {pivot}, fill-in = {fill}")
    for i in range(len(rest)):
        print("   " + " ".join("x" if Z[i, j] else "+" if W[i, j] else "." for j in range(len(rest))))
    print()


show("1x1 Hessian diagonal", (4,))
show("2x2 Hessian block", (4, 5))
show("2x2 zero-corner (Hessian diagonal + constraint entry)", (4, 8))
