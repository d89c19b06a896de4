import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_problem, scalar_problem, two_entry_problem
from qvesolve import (
    QveProblem,
    SolveOptions,
    Splitting,
    Status,
    fixed_point,
    functional_iteration,
    gauss_seidel_iteration,
    make_e1,
    switch_iterations,
)
from qvesolve.bilinear import ZeroBilinear
from qvesolve.oracle import oracle_minimal
from qvesolve.report import A1_VIOLATED

HIST = SolveOptions(tol=1e-12, maxit=2000, record_history=True)


def test_fixed_point_scalar_iterates():
    rep = fixed_point(scalar_problem(1.0, 3 / 8, 1 / 2), HIST)
    assert rep.converged
    assert rep.iterates[1][0] == 0.375
    assert rep.iterates[2][0] == 57 / 128
    assert rep.x[0] == pytest.approx(0.5, abs=1e-11)
    assert not rep.violations


def test_fixed_point_zero_a():
    rep = fixed_point(QveProblem(np.eye(2), np.zeros(2), np.ones((2, 2, 2))), HIST)
    assert rep.converged and rep.iterations == 0
    assert np.all(rep.x == 0)


def test_fixed_point_two_entry_problem_keeps_zero():
    rep = fixed_point(two_entry_problem(3.0), SolveOptions(tol=1e-6, maxit=100_000, record_history=True))
    assert rep.converged
    assert np.all(np.array(rep.iterates)[:, 1] == 0.0)
    assert rep.x[0] == pytest.approx(1.0, abs=2e-3)


def test_fixed_point_divergence_guard():
    rep = fixed_point(scalar_problem(1.0, 5 / 8, 1 / 2), SolveOptions(maxit=10_000))
    assert rep.status == Status.MAXIT
    assert rep.diverged
    assert rep.message == A1_VIOLATED


def test_order_splitting_scalar_iterates():
    p = scalar_problem(1.0, 3 / 8, 1 / 2)
    rep = functional_iteration(p, Splitting.order(p), opts=HIST)
    assert rep.iterates[1][0] == pytest.approx(0.375)
    assert rep.iterates[2][0] == pytest.approx((3 / 8) / (1 - 0.375 / 2))
    assert rep.x[0] == pytest.approx(0.5, abs=1e-11)


def test_depth_splitting_reproduces_fixed_point():
    rng = np.random.default_rng(5)
    p = random_problem(rng, 5)
    a = fixed_point(p, HIST)
    b = functional_iteration(p, Splitting.depth(p), opts=HIST)
    assert a.iterations == b.iterations
    assert max(np.max(np.abs(u - v)) for u, v in zip(a.iterates, b.iterates)) <= 1e-14


def test_breakdown_on_two_entry_problem():
    # b(., x) = diag(x1 / 2, 0) never breaks down; the swapped variant does
    p = two_entry_problem(10.0)
    plain = functional_iteration(p, Splitting.order(p), opts=SolveOptions(maxit=50))
    assert plain.status == Status.MAXIT
    rep = functional_iteration(p, Splitting.order_swapped(p), opts=SolveOptions(maxit=50))
    assert rep.status == Status.BREAKDOWN_NOT_M
    assert rep.breakdown_at is not None and rep.breakdown_at >= 1
    assert "not an M-matrix" in rep.message


def test_splitting_validation():
    p = scalar_problem(1.0, 3 / 8, 1 / 2)
    bad = Splitting(np.eye(1) * 2, np.zeros((1, 1)), p.b, ZeroBilinear(1))
    with pytest.raises(ValueError, match="M = N - P"):
        functional_iteration(p, bad)
    bad_b = Splitting(p.M, np.zeros((1, 1)), 0.5 * p.b, ZeroBilinear(1))
    with pytest.raises(ValueError, match="b1"):
        functional_iteration(p, bad_b)
    with pytest.raises(ValueError, match="nonsingular"):
        Splitting(np.zeros((1, 1)), np.zeros((1, 1)), p.b, ZeroBilinear(1))
    with pytest.raises(ValueError, match="unknown splitting"):
        Splitting.from_name(p, "thickness")


def test_starting_point_checks():
    p = scalar_problem(1.0, 3 / 8, 1 / 2)
    with pytest.raises(ValueError, match="nonnegative"):
        functional_iteration(p, Splitting.order(p), x0=[-0.1])
    with pytest.raises(ValueError, match="F\\(x0\\) <= 0"):
        functional_iteration(p, Splitting.order(p), x0=[0.9])
    rep = functional_iteration(p, Splitting.order(p), x0=[0.25], opts=HIST)
    assert rep.converged and rep.iterates[0][0] == 0.25


def test_gauss_seidel_scalar_equals_plain():
    p = scalar_problem(1.0, 3 / 8, 1 / 2)
    a = functional_iteration(p, Splitting.order(p), opts=HIST)
    b = gauss_seidel_iteration(p, Splitting.order(p), opts=HIST)
    assert a.iterations == b.iterations
    assert np.allclose(np.array(a.iterates), np.array(b.iterates), atol=0)


def test_gauss_seidel_strict_gain_in_fed_entry():
    # entry 0 feeds entry 1 through P in the Jacobi splitting
    M = np.array([[1.0, 0.0], [-0.5, 1.0]])
    B = np.zeros((2, 2, 2))
    B[0, 0, 0] = 0.25
    p = QveProblem(M, [0.5, 0.0], B)
    s = Splitting.jacobi(p)
    plain = functional_iteration(p, s, opts=HIST)
    gs = gauss_seidel_iteration(p, s, opts=HIST)
    assert gs.iterates[1][1] > plain.iterates[1][1]
    assert gs.iterates[1][0] >= plain.iterates[1][0]
    assert gs.iterations <= plain.iterations


def test_switching_thicknesses_on_e1():
    rng = np.random.default_rng(11)
    B = rng.random((3, 3, 3))
    B *= 0.6 / B.sum(axis=(0, 1))
    p = make_e1(1.0 - B.sum(axis=(0, 1)), B, normalized=True)
    sched = [Splitting.order(p), Splitting.order_swapped(p)]
    rep = switch_iterations(p, sched, opts=HIST)
    assert rep.converged and not rep.violations
    ref = fixed_point(p, SolveOptions(tol=1e-12, maxit=20_000))
    assert np.max(np.abs(rep.x - ref.x)) <= 1e-10
    single = switch_iterations(p, [Splitting.order(p)], opts=HIST)
    direct = functional_iteration(p, Splitting.order(p), opts=HIST)
    assert np.array_equal(single.x, direct.x)
    with pytest.raises(ValueError):
        switch_iterations(p, [])


@settings(max_examples=15, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_family_invariants_on_random_problems(n, seed):
    p = random_problem(np.random.default_rng(seed), n)
    ref = oracle_minimal(p).x_ref
    runs = {
        name: functional_iteration(p, Splitting.from_name(p, name), opts=HIST)
        for name in ("order", "depth", "jacobi", "half")
    }
    runs["gs"] = gauss_seidel_iteration(p, Splitting.order(p), opts=HIST)
    for name, rep in runs.items():
        assert rep.converged, name
        assert not rep.violations, (name, rep.violations)
        assert all(np.all(x <= ref + 1e-9) for x in rep.iterates), name
    best = runs["order"]
    for name in ("depth", "jacobi", "half"):
        other = runs[name]
        for k in range(min(len(best.iterates), len(other.iterates))):
            assert np.all(best.iterates[k] >= other.iterates[k] - 1e-12), (name, k)
    for k in range(min(len(best.iterates), len(runs["gs"].iterates))):
        assert np.all(runs["gs"].iterates[k] >= best.iterates[k] - 1e-12)
