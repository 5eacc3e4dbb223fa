import numpy as np
import pytest

from blockqp import GenSpec, InvariantViolation, assemble_kkt, generate


def test_deterministic():
    spec = GenSpec(30, ((10, 3), (20, 4)), 0.5, 17)
    assert generate(spec).equals(generate(spec))


def test_seed_changes_values_not_pattern():
    dims = ((50, 10),) * 10
    a = assemble_kkt(generate(GenSpec(500, dims, 1.0, 1))).entries
    b = assemble_kkt(generate(GenSpec(500, dims, 1.0, 2))).entries
    assert not np.array_equal(a, b)
    np.testing.assert_array_equal(a != 0, b != 0)
    assert np.count_nonzero(a) == 250000 + 2 * 5000


def test_dense_hessian_is_psd_and_symmetric():
    p = generate(GenSpec(40, ((40, 10),), 1.0, 3))
    assert np.array_equal(p.H, p.H.T)
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = rng.normal(size=40)
        assert x @ p.H @ x >= -1e-9 * (x @ x)
    assert np.linalg.eigvalsh(p.H).min() >= -1e-9


def test_entries_strictly_inside_unit_interval():
    p = generate(GenSpec(20, ((8, 3), (12, 5)), 1.0, 4))
    for arr in (p.c, p.e, *p.A_blocks):
        assert np.all((arr > 0) & (arr < 1))


@pytest.mark.parametrize("density", [0.3, 0.5, 0.7])
def test_sparse_density(density):
    p = generate(GenSpec(100, ((50, 10), (50, 10)), density, 5))
    assert abs(np.count_nonzero(p.H) / p.H.size - density) <= 0.03
    assert np.array_equal(p.H, p.H.T)


def test_density_does_not_move_constraints():
    a = generate(GenSpec(30, ((15, 5), (15, 5)), 1.0, 9))
    b = generate(GenSpec(30, ((15, 5), (15, 5)), 0.4, 9))
    assert all(np.array_equal(x, y) for x, y in zip(a.A_blocks, b.A_blocks))
    assert np.array_equal(a.c, b.c) and np.array_equal(a.e, b.e)


@pytest.mark.parametrize(
    "n, dims, density, seed",
    [(10, ((5, 2),), 1.0, 0), (10, ((10, 10),), 1.0, 0), (10, ((10, 2),), 0.0, 0), (10, ((10, 2),), 1.0, -1)],
)
def test_invalid_specs(n, dims, density, seed):
    with pytest.raises(InvariantViolation):
        GenSpec(n, dims, density, seed)
