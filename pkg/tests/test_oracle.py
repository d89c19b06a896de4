import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_problem, scalar_problem
from qvesolve import check_supersolution, residual
from qvesolve.generate import find_supersolution
from qvesolve.oracle import NoSolutionError, oracle_minimal, scalar_roots


def test_scalar_roots_examples():
    assert scalar_roots(1.0, 3 / 8, 1 / 2) == pytest.approx(0.5, abs=1e-16)
    assert scalar_roots(1.0, 0.0, 1.0) == 0.0
    assert scalar_roots(2.0, 1.0, 0.0) == 0.5
    assert scalar_roots(1.0, 0.5, 0.5) == pytest.approx(1.0)
    assert scalar_roots(1.0, 5 / 8, 1 / 2) is None


@pytest.mark.parametrize("method", [None, "fp1-highprec"])
def test_oracle_scalar(method):
    sol = oracle_minimal(scalar_problem(1.0, 3 / 8, 1 / 2), method=method)
    assert sol.x_ref[0] == pytest.approx(0.5, abs=1e-13)
    zero = oracle_minimal(scalar_problem(1.0, 0.0, 1 / 2), method=method)
    assert zero.x_ref[0] == 0.0
    with pytest.raises(NoSolutionError, match="A1 presumed violated"):
        oracle_minimal(scalar_problem(1.0, 5 / 8, 1 / 2), method=method)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 10), st.floats(0, 1), st.floats(0, 1))
def test_iteration_agrees_with_closed_form(m, a, b):
    p = scalar_problem(m, a, b)
    exact = scalar_roots(m, a, b)
    if exact is None or m * m - 4 * a * b < 1e-3 * m * m:
        return  # near-critical: the iteration is too slow for this check
    sol = oracle_minimal(p, method="fp1-highprec")
    assert abs(sol.x_ref[0] - exact) <= 1e-13 * (1 + exact)


def test_oracle_rejects_unknown_method():
    with pytest.raises(ValueError, match="unknown oracle method"):
        oracle_minimal(scalar_problem(1.0, 0.1, 0.1), method="magic")


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_minimal_below_supersolutions(n, seed):
    rng = np.random.default_rng(seed)
    p = random_problem(rng, n)
    sol = oracle_minimal(p)
    assert np.all(sol.x_ref >= 0)
    assert np.max(np.abs(residual(p, sol.x_ref))) <= 1e-12 * (1 + np.abs(p.a).max())
    assert sol.residual_bound <= 1e-12 * (1 + np.abs(p.a).max())
    y = find_supersolution(p)
    assert check_supersolution(p, y)
    assert np.all(sol.x_ref <= y + 1e-10)
    # random scaled-up points that happen to be supersolutions
    for _ in range(5):
        z = sol.x_ref * rng.uniform(1.0, 1.5, n) + rng.uniform(0, 0.1, n)
        if check_supersolution(p, z):
            assert np.all(sol.x_ref <= z + 1e-10)
