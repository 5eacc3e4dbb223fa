import numpy as np
import pytest

from blockqp import (
    BlockQp,
    GenSpec,
    SingularBlock,
    assemble_kkt,
    build_rhs,
    factorize_block_kkt,
    factorize_dense_bbk,
    generate,
    kkt_residual,
    solve_qp,
    solve_with_factorization,
)
from blockqp.factor import Factorization


def test_identity_system():
    f = factorize_dense_bbk(np.eye(4))
    v = np.array([1.0, -2.0, 3.0, 0.5])
    np.testing.assert_array_equal(solve_with_factorization(f, v), v)


def test_swap_matrix():
    f = factorize_dense_bbk(np.array([[0.0, 1.0], [1.0, 0.0]]))
    np.testing.assert_allclose(solve_with_factorization(f, [3.0, 5.0]), [5.0, 3.0])


def test_random_system_residual():
    K = assemble_kkt(generate(GenSpec(9, ((4, 1), (5, 2)), 1.0, 12)))
    assert K.s == 12
    v = np.random.default_rng(0).normal(size=12)
    for f in (factorize_block_kkt(K), factorize_dense_bbk(K)):
        z = solve_with_factorization(f, v)
        assert kkt_residual(K, z, v) <= 1e-10 * np.linalg.norm(K.entries) * np.linalg.norm(z)


def test_singular_block_is_reported():
    f = Factorization(np.arange(2), np.eye(2), (np.array([[0.0]]), np.array([[1.0]])), (), "bbk")
    with pytest.raises(SingularBlock):
        solve_with_factorization(f, [1.0, 1.0])


def test_projection_onto_a_line():
    p = BlockQp(2, ((2, 1),), np.eye(2), [[[1.0, 1.0]]], [0.0, 0.0], [2.0])
    for strategy in ("structured", "bbk"):
        sol = solve_qp(p, strategy=strategy)
        np.testing.assert_allclose(sol.x_star, [1.0, 1.0], atol=1e-14)
        np.testing.assert_allclose(sol.lambda_star, [1.0], atol=1e-14)


def test_unconstrained_optimum_already_feasible():
    p = BlockQp(2, ((2, 1),), 2 * np.eye(2), [[[1.0, -1.0]]], [-2.0, -2.0], [0.0])
    sol = solve_qp(p)
    np.testing.assert_allclose(sol.x_star, [1.0, 1.0], atol=1e-14)
    np.testing.assert_allclose(sol.lambda_star, [0.0], atol=1e-14)
    assert sol.residual >= 0


def test_generated_instance_optimality():
    p = generate(GenSpec(500, ((50, 10),) * 10, 1.0, 0))
    sol = solve_qp(p, seed=0)
    A = p.constraint_matrix()
    v = build_rhs(p, np.zeros(500)).v
    assert sol.residual <= 1e-8 * (1 + np.linalg.norm(v))
    assert sol.residual < 1e-9  # order 1e-11 expected
    assert np.linalg.norm(A @ sol.x_star - p.e) <= 1e-8 * (1 + np.linalg.norm(p.e))
    grad = p.H @ sol.x_star + p.c - A.T @ sol.lambda_star
    assert np.linalg.norm(grad) <= 1e-8 * (1 + np.linalg.norm(p.c) + np.linalg.norm(p.H))


def test_strategies_agree():
    p = generate(GenSpec(60, ((20, 5), (40, 12)), 0.5, 2))
    a = solve_qp(p, strategy="structured")
    b = solve_qp(p, strategy="bbk")
    np.testing.assert_allclose(a.x_star, b.x_star, rtol=1e-7, atol=1e-9)
    np.testing.assert_allclose(a.lambda_star, b.lambda_star, rtol=1e-7, atol=1e-9)


def test_residual_trivial_cases():
    K = np.eye(3)
    v = np.array([1.0, 2.0, 2.0])
    assert kkt_residual(K, v, v) == 0.0
    assert kkt_residual(K, np.zeros(3), v) == 3.0


def test_residual_under_single_perturbation():
    K = assemble_kkt(generate(GenSpec(9, ((4, 1), (5, 2)), 1.0, 1)))
    v = np.random.default_rng(1).normal(size=K.s)
    z = np.linalg.solve(K.entries, v)
    exact = K.entries @ z  # so that K z - v is computed against a consistent v
    for j, delta in [(0, 1e-3), (7, -2.5e-4), (11, 3e-2)]:
        zp = z.copy()
        zp[j] += delta
        expected = np.linalg.norm(K.entries[:, j]) * abs(delta)
        assert kkt_residual(K, zp, exact) == pytest.approx(expected, rel=1e-12)


def test_unknown_strategy():
    p = BlockQp(2, ((2, 1),), np.eye(2), [[[1.0, 1.0]]], [0.0, 0.0], [2.0])
    with pytest.raises(ValueError):
        solve_qp(p, strategy="lu")
