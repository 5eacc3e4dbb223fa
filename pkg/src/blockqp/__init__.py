"""Sparsity-preserving LBL^T factorization of block-constrained QP KKT matrices."""

from .errors import (
    BlockQpError,
    DimensionMismatch,
    FactorizationError,
    InvariantViolation,
    ProblemParseError,
    Singular,
    SingularBlock,
    SingularPivot,
    StructurallySingular,
)
from .factor import Factorization, factorize_block_kkt, factorize_dense_bbk, nnz, reconstruct
from .generate import GenSpec, generate
from .model import BlockLayout, BlockQp, KktMatrix, assemble_kkt, build_rhs, read_problem, write_problem
from .pattern import predict_nnz_dense_h, simulate_pattern
from .pivoting import bbk_select, cond_inf_zero_corner, select_structured_pivot
from .solve import QpSolution, kkt_residual, solve_qp, solve_with_factorization

__version__ = "0.1.0"
