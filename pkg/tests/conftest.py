import numpy as np
import pytest

from blockqp import BlockQp, GenSpec, assemble_kkt, generate

# (criterion, passed, detail) lines from test_acceptance, echoed at the end of the run
ACCEPTANCE_LOG: list[tuple[int, str, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for number, status, detail in sorted(ACCEPTANCE_LOG):
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}")


def sample_problem(seed: int = 3) -> BlockQp:
    """Six variables in two blocks of three, two constraints per block.

    Entries are generic (uniform on [1, 2)) so no accidental zero appears.
    """
    rng = np.random.default_rng(seed)
    R = rng.uniform(1.0, 2.0, (6, 6))
    H = np.triu(R) + np.triu(R, 1).T
    A = [rng.uniform(1.0, 2.0, (2, 3)), rng.uniform(1.0, 2.0, (2, 3))]
    return BlockQp(6, ((3, 2), (3, 2)), H, A, rng.uniform(1.0, 2.0, 6), rng.uniform(1.0, 2.0, 4))


@pytest.fixture
def sample_kkt():
    return assemble_kkt(sample_problem())


def random_dims(rng: np.random.Generator, max_n: int) -> tuple[int, tuple[tuple[int, int], ...]]:
    """Random block sizes with 2 <= n_i, 1 <= m_i < n_i and sum n_i <= max_n."""
    dims = []
    total = 0
    for _ in range(int(rng.integers(1, 6))):
        ni = int(rng.integers(2, 15))
        if total + ni > max_n:
            break
        dims.append((ni, int(rng.integers(1, ni))))
        total += ni
    if not dims:
        dims = [(2, 1)]
        total = 2
    return total, tuple(dims)


def random_problem(rng: np.random.Generator, max_n: int = 60, density: float = 1.0) -> BlockQp:
    n, dims = random_dims(rng, max_n)
    return generate(GenSpec(n, dims, density, int(rng.integers(0, 2**31))))
