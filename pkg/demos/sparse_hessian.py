"""With a sparse Hessian the structured phase can create fill-in.

The zero-corner pivot couples a Hessian column with a constraint row, so
Hessian zeros are no longer safe.  This script measures the fill and nnz(L)
as the Hessian density grows.
"""

from blockqp import GenSpec, assemble_kkt, factorize_block_kkt, generate

dims = ((100, 20),) * 10
for density in (0.1, 0.3, 0.5, 0.7, 1.0):
    K = assemble_kkt(generate(GenSpec(1000, dims, density, seed=0)))
    f = factorize_block_kkt(K, seed=0)
    print(f"density {density:.1f}: structured-phase fill {f.structured_fill():8d}, nnz(L) {f.nnz():8d}")
