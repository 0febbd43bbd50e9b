import numpy as np
import pytest

from spinstar.bath import BathSpec


def total_spin_multiplets(n):
    """Brute force: diagonalize J^2 on the 2^n product space and count, for each j,
    the states with m = j (one per multiplet). Returns {2j: count}."""
    sx = np.array([[0, 1], [1, 0]]) / 2
    sy = np.array([[0, -1j], [1j, 0]]) / 2
    sz = np.array([[1, 0], [0, -1]]) / 2

    def total(op):
        acc = np.zeros((2**n, 2**n), dtype=complex)
        for k in range(n):
            m = np.array([[1.0]])
            for i in range(n):
                m = np.kron(m, op if i == k else np.eye(2))
            acc += m
        return acc

    jx, jy, jz = total(sx), total(sy), total(sz)
    j2 = jx @ jx + jy @ jy + jz @ jz
    # J^2 and Jz commute; diagonalize J^2 + tiny * Jz to split jointly
    vals, vecs = np.linalg.eigh(j2 + 1e-3 * jz)
    counts = {}
    for v in vecs.T:
        jj = np.real(v.conj() @ j2 @ v)
        m = np.real(v.conj() @ jz @ v)
        j = (-1 + np.sqrt(1 + 4 * jj)) / 2
        if abs(m - j) < 1e-6:
            key = int(round(2 * j))
            counts[key] = counts.get(key, 0) + 1
    return counts


@pytest.fixture
def two_single_spins():
    return BathSpec.from_pairs([(1, 1.0), (1, 1.0)])


# one line per acceptance criterion, shown at the end of every run
ACCEPTANCE_LINES = {}


def report(key, ok, detail):
    line = f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[key] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES, key=str):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
