import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_problem, scalar_problem, two_entry_problem
from qvesolve import (
    QveProblem,
    SolveOptions,
    Status,
    derivative,
    make_e2,
    modified_newton,
    modified_newton_cr_form,
    newton,
    newton_cr_form,
    residual,
)
from qvesolve.newton import gprime, rx_matrix
from qvesolve.oracle import oracle_minimal

HIST = SolveOptions(tol=1e-13, maxit=100, record_history=True)
SCALAR = (1.0, 3 / 8, 1 / 2)


def test_newton_scalar_iterates():
    rep = newton(scalar_problem(*SCALAR), HIST)
    assert rep.iterates[1][0] == pytest.approx(0.375, abs=1e-15)
    assert rep.iterates[2][0] == pytest.approx(39 / 80, abs=1e-15)
    assert rep.converged and rep.x[0] == pytest.approx(0.5, abs=1e-14)
    assert not rep.violations


def test_modified_newton_scalar_first_step():
    rep = modified_newton(scalar_problem(*SCALAR), HIST)
    assert rep.iterates[1][0] == pytest.approx(6 / 13, abs=1e-15)
    assert rep.x[0] == pytest.approx(0.5, abs=1e-13)


def test_cr_forms_scalar():
    p = scalar_problem(*SCALAR)
    rep = newton_cr_form(p, HIST)
    assert rep.iterates[2][0] == pytest.approx(39 / 80, abs=1e-15)
    rep = modified_newton_cr_form(p, HIST)
    assert rep.iterates[1][0] == pytest.approx(6 / 13, abs=1e-15)


@pytest.mark.parametrize("solver", [newton, modified_newton, newton_cr_form, modified_newton_cr_form])
def test_zero_a_gives_zero(solver):
    rep = solver(QveProblem(np.eye(2), np.zeros(2), np.ones((2, 2, 2))), HIST)
    assert rep.converged and rep.iterations == 0
    assert np.all(rep.x == 0)


def test_newton_breaks_down_on_two_entry_problem():
    rep = newton(two_entry_problem(10.0), HIST)
    assert rep.status == Status.BREAKDOWN_NOT_M
    assert rep.breakdown_at is not None


def test_critical_newton_halves_the_error():
    rep = newton(scalar_problem(1.0, 0.5, 0.5), SolveOptions(tol=1e-14, maxit=30, record_history=True))
    err = [1.0 - x[0] for x in rep.iterates[:25]]
    ratios = [err[k + 1] / err[k] for k in range(len(err) - 1)]
    assert all(abs(r - 0.5) <= 0.05 for r in ratios)


def test_quadratic_convergence_constant_is_stable():
    p = random_problem(np.random.default_rng(8), 5)
    ref = oracle_minimal(p).x_ext
    rep = newton(p, HIST)
    err = [float(np.max(np.abs(x - ref))) for x in rep.iterates]
    consts = [err[k + 1] / err[k] ** 2 for k in range(len(err) - 1) if err[k + 1] > 1e-12 and err[k] < 0.5]
    assert len(consts) >= 2
    assert max(consts) <= 10 * min(consts)


def test_newton_residual_identities():
    p = random_problem(np.random.default_rng(2), 4)
    rep = newton(p, HIST)
    for x0, x1 in zip(rep.iterates, rep.iterates[1:]):
        w = x1 - x0
        assert np.max(np.abs(-residual(p, x1) - p.b.apply(w, w))) <= 1e-12
        # F'_{x_k} x_{k+1} = a - b(x_k, x_k)
        lhs = derivative(p, x0) @ x1 - (p.a - p.b.apply(x0, x0))
        assert np.max(np.abs(lhs)) <= 1e-11


def test_gprime_identity_at_solution():
    p = random_problem(np.random.default_rng(4), 4)
    x = newton(p, HIST).x
    _, Gp = gprime(p, x)
    expected = np.linalg.solve(rx_matrix(p, x), derivative(p, x))
    assert np.max(np.abs(Gp - expected)) <= 1e-8


def test_e2_modified_newton_residuals_dominate():
    rng = np.random.default_rng(0)
    e2 = make_e2(rng.random((4, 4)) * 0.05, rng.random((4, 4)) * 0.05)
    a = newton(e2.problem, HIST)
    b = modified_newton(e2.problem, HIST)
    for k in range(min(len(a.residuals), len(b.residuals))):
        assert b.residuals[k] <= a.residuals[k] * (1 + 1e-12)
    c = modified_newton_cr_form(e2.problem, HIST)
    for u, v in zip(b.iterates, c.iterates):
        assert np.max(np.abs(u - v)) <= 1e-10


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_newton_family_properties(n, seed):
    p = random_problem(np.random.default_rng(seed), n)
    ref = oracle_minimal(p).x_ref
    nw = newton(p, HIST)
    mn = modified_newton(p, HIST)
    nc = newton_cr_form(p, HIST)
    mc = modified_newton_cr_form(p, HIST)
    for rep in (nw, mn, nc, mc):
        assert rep.converged
        assert not rep.violations
        assert np.max(np.abs(rep.x - ref)) <= 1e-10
    for k in range(min(len(nw.iterates), len(mn.iterates))):
        assert np.all(mn.iterates[k] >= nw.iterates[k] - 1e-12)
    for u, v in zip(nw.iterates, nc.iterates):
        assert np.max(np.abs(u - v)) <= 1e-12
    for u, v in zip(mn.iterates, mc.iterates):
        assert np.max(np.abs(u - v)) <= 1e-10
