"""Solve a generated block-constrained QP and check its optimality conditions."""

import numpy as np

from blockqp import GenSpec, generate, solve_qp

problem = generate(GenSpec(500, ((50, 10),) * 10, 1.0, seed=1))
sol = solve_qp(problem, seed=1)

A = problem.constraint_matrix()
print(f"KKT residual          {sol.residual:.2e}")
print(f"||A x - e||          {np.linalg.norm(A @ sol.x_star - problem.e):.2e}")
print(f"||H x + c - A^T l||  {np.linalg.norm(problem.H @ sol.x_star + problem.c - A.T @ sol.lambda_star):.2e}")
print(f"objective            {0.5 * sol.x_star @ problem.H @ sol.x_star + problem.c @ sol.x_star:.6f}")

f = sol.factorization
kinds = [r.kind.value for r in f.pivot_log]
print(f"pivots: {kinds.count(2)} of size 2, {kinds.count(1)} of size 1; nnz(L) = {f.nnz()}")
