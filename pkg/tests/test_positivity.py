import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import planted_problem, random_problem, two_entry_problem
from qvesolve import QveProblem, SolveOptions, Status, newton, residual
from qvesolve.oracle import brute_support, oracle_minimal
from qvesolve.positivity import inverse_pattern, positivity_pattern, reduce_problem, solve_with_reduction


def test_full_support_after_seeding():
    p = random_problem(np.random.default_rng(0), 4)
    pat = positivity_pattern(p)
    assert pat.support == (0, 1, 2, 3)
    assert pat.full and pat.pops == 0 and pat.minv_applications == 1
    red = reduce_problem(p, pat)
    assert red.problem is p


def test_two_entry_pattern_and_trace():
    pat = positivity_pattern(two_entry_problem(10.0))
    assert pat.support == (0,)
    assert pat.eliminated == (1,)
    assert pat.trace == [(0, ())]


def test_chain_growth():
    # x0 seeded by a; B[0,0,1] feeds x1 from x0 x0; B[1,1,2] feeds x2 from x1 x1
    B = np.zeros((3, 3, 3))
    B[0, 0, 1] = 0.5
    B[1, 1, 2] = 0.5
    p = QveProblem(np.eye(3) * 2, [1.0, 0.0, 0.0], B)
    pat = positivity_pattern(p)
    assert pat.support == (0, 1, 2)
    assert pat.trace[0] == (0, (1,))
    assert pat.trace[1] == (1, (2,))
    assert brute_support(p) == pat.support
    x = oracle_minimal(p).x_ref
    assert np.all(x > 0)


def test_empty_support_returns_zero():
    p = QveProblem(np.eye(2), np.zeros(2), np.ones((2, 2, 2)))
    pat = positivity_pattern(p)
    assert pat.support == ()
    assert reduce_problem(p, pat).problem is None
    rep = solve_with_reduction(p, "newton")
    assert rep.converged and np.all(rep.x == 0)
    assert rep.eliminated == (0, 1)


@pytest.mark.filterwarnings("ignore:reduced matrix:RuntimeWarning")
def test_reduction_rescues_newton():
    p = two_entry_problem(10.0)
    assert newton(p).status == Status.BREAKDOWN_NOT_M
    red = reduce_problem(p, positivity_pattern(p))
    assert red.problem.n == 1
    assert red.problem.M[0, 0] == 1.0 and red.problem.a[0] == 0.5
    assert red.problem.b.apply(np.ones(1), np.ones(1))[0] == 0.5
    rep = solve_with_reduction(p, "newton-cr", SolveOptions(tol=1e-25, maxit=200))
    assert rep.converged
    assert np.max(np.abs(rep.x - [1.0, 0.0])) <= 1e-12
    assert rep.eliminated == (1,)
    assert rep.x[1] == 0.0


def test_full_support_reduction_is_identical_to_direct_solve():
    p = random_problem(np.random.default_rng(3), 5)
    a = newton(p)
    b = solve_with_reduction(p, "newton")
    assert np.array_equal(a.x, b.x)
    assert a.iterations == b.iterations and b.eliminated == ()


def test_inverse_pattern_matches_numeric_inverse():
    M = np.array([[1.0, -0.5, 0.0], [0.0, 1.0, 0.0], [0.0, -0.3, 1.0]])
    assert np.array_equal(inverse_pattern(M), np.linalg.inv(M) > 0)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1))
def test_pattern_matches_brute_force_and_oracle(n, seed):
    rng = np.random.default_rng(seed)
    p = planted_problem(rng, n)
    pat = positivity_pattern(p)
    assert pat.support == brute_support(p)
    assert pat.pops <= n
    assert pat.minv_applications <= n + 1
    inserted = [i for _, new in pat.trace for i in new]
    assert len(inserted) == len(set(inserted))
    # positive entries can be arbitrarily small, so only check each side
    x = oracle_minimal(p).x_ext
    inside = np.zeros(n, dtype=bool)
    inside[list(pat.support)] = True
    assert np.all(x[inside] > 0)
    assert np.all(x[~inside] <= 1e-8)


@pytest.mark.parametrize("method", ["fp1", "funit", "newton", "mnewton", "newton-cr", "mnewton-cr"])
def test_reduced_solve_matches_oracle(method):
    rng = np.random.default_rng(21)
    for _ in range(10):
        p = planted_problem(rng, 6)
        if positivity_pattern(p).full:
            continue
        ref = oracle_minimal(p).x_ref
        rep = solve_with_reduction(p, method, SolveOptions(tol=1e-13, maxit=5000))
        assert rep.converged, rep.message
        assert np.max(np.abs(rep.x - ref)) <= 1e-9
        assert np.max(np.abs(residual(p, rep.x))) <= 1e-12
        assert rep.residuals[-1] == pytest.approx(float(np.max(np.abs(residual(p, rep.x)))))
