"""How much sparser the structured factor is than whole-matrix Bunch-Kaufman.

For a few dense-Hessian configurations we factorize the same KKT matrix both
ways and compare nnz(L) with the closed-form count.
"""

import time

from blockqp import GenSpec, assemble_kkt, factorize_block_kkt, factorize_dense_bbk, generate, predict_nnz_dense_h
from blockqp.bench import format_blocks, parse_blocks

configs = [(500, "10x(50x10)"), (500, "10x(50x40)"), (500, "50x(10x8)"), (1000, "20x(50x40)")]

print(f"{'n':>5} {'blocks':<12} {'predicted':>10} {'structured':>10} {'bbk':>10} {'time':>7}")
for n, text in configs:
    dims = parse_blocks(text)
    K = assemble_kkt(generate(GenSpec(n, dims, 1.0, seed=0)))
    t0 = time.perf_counter()
    ours = factorize_block_kkt(K, seed=0)
    elapsed = time.perf_counter() - t0
    bbk = factorize_dense_bbk(K)
    print(f"{n:5d} {format_blocks(dims):<12} {predict_nnz_dense_h(n, dims):10d} {ours.nnz():10d} {bbk.nnz():10d}"
          f" {elapsed:6.2f}s")
