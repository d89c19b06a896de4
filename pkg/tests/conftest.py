import numpy as np
import pytest

from qvesolve import QveProblem
from qvesolve.generate import generate
from qvesolve.problem_io import build


def scalar_problem(M, a, B):
    return QveProblem(np.array([[M]], float), np.array([a], float), np.array([[[B]]], float))


def two_entry_problem(K):
    """``M = I``, ``a = (1/2, 0)``, ``b(x, y) = (x1 y1 / 2, K x1 y2)``; ``x* = (1, 0)``."""
    B = np.zeros((2, 2, 2))
    B[0, 0, 0] = 0.5
    B[0, 1, 1] = K
    return QveProblem(np.eye(2), np.array([0.5, 0.0]), B)


def random_problem(rng, n, scale=0.5, density=1.0, margin=0.1):
    """Dense problem for which ``e`` is a supersolution with ``F(e) = margin e``."""
    off = -rng.random((n, n)) * (rng.random((n, n)) < density) / n
    np.fill_diagonal(off, 0.0)
    a = rng.random(n)
    B = rng.random((n, n, n)) * (rng.random((n, n, n)) < density) * scale / n**2
    M = off + np.diag(-off.sum(axis=1) + a + B.sum(axis=(0, 1)) + margin)
    return QveProblem(M, a, B)


def planted_problem(rng, n):
    """Sparse problem whose minimal solution typically has zero entries.

    Only one or two entries of ``a`` are positive and ``M``, ``B`` are
    sparse, so positivity spreads along a random subset of indices.
    """
    a = np.zeros(n)
    a[rng.choice(n, size=rng.integers(1, 3), replace=False)] = rng.uniform(0.2, 1.0)
    off = -rng.uniform(0.2, 1.0, (n, n)) * (rng.random((n, n)) < 1.0 / n)
    np.fill_diagonal(off, 0.0)
    B = rng.uniform(0.2, 1.0, (n, n, n)) * (rng.random((n, n, n)) < 1.5 / n**2)
    M = off + np.diag(-off.sum(axis=1) + a + B.sum(axis=(0, 1)) + 0.5)
    return QveProblem(M, a, B)


REGRESSION = [("generic", n, s) for n, s in [(3, 0), (4, 1), (5, 2), (6, 3), (8, 4)]] + [
    ("e1", 3, 0),
    ("e2", 2, 1),
    ("e3", 2, 2),
    ("e4", 2, 3),
    ("treelike", 2, 4),
]


def regression_problems():
    """Generated problems with certified supersolutions, one per entry of ``REGRESSION``."""
    out = []
    for tag, size, seed in REGRESSION:
        pf = generate(tag, size, seed)
        out.append((f"{tag}-{size}-{seed}", build(pf).problem, pf.supersolution))
    return out


@pytest.fixture(scope="session")
def regression():
    return regression_problems()


ACCEPTANCE_LINES = {}


def record_acceptance(number, ok, detail):
    """Store and print the pass/fail line of one acceptance criterion."""
    line = f"ACCEPTANCE {number:2d} {'PASS' if ok else 'FAIL'}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
