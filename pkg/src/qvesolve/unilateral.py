"""Logarithmic and Cyclic Reduction for ``X = A + B X + C X^2``.

``A, B, C`` are nonnegative ``m x m`` matrices with ``(A + B + C) e <= e``.
Neither algorithm ever inverts ``C``, which is typically strongly singular.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import as_square, check_nonnegative
from .iterations import Breakdown, factor_or_breakdown
from .mmatrix import Classification, MMatrixHandle, SingularMatrixError
from .report import SolveOptions, Status, _Recorder

__all__ = ["UnilateralProblem", "graeffe_step_check", "solve_cr", "solve_lr"]


@dataclass(frozen=True, eq=False)
class UnilateralProblem:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        A = as_square(self.A, name="A").astype(float)
        m = A.shape[0]
        B = as_square(self.B, m, "B").astype(float)
        C = as_square(self.C, m, "C").astype(float)
        for name, X in (("A", A), ("B", B), ("C", C)):
            check_nonnegative(X, name)
            X.setflags(write=False)
        rows = (A + B + C).sum(axis=1)
        if np.any(rows > 1 + 1e-12):
            i = int(np.argmax(rows))
            raise ValueError(f"row {i} of A + B + C sums to {float(rows[i])!r} > 1")
        h = MMatrixHandle(np.eye(m) - B)
        if h.classification != Classification.NONSINGULAR:
            raise ValueError("I - B is not a nonsingular M-matrix")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)

    @property
    def m(self):
        return self.A.shape[0]

    def residual(self, X):
        return X - self.A - self.B @ X - self.C @ X @ X

    def residual_norm(self, X):
        return float(np.max(np.abs(self.residual(X))))

    def drift(self):
        """``pi (C - A) e`` for the stationary vector ``pi`` of ``A + B + C``.

        Only meaningful when ``A + B + C`` is stochastic; zero drift is the
        null-recurrent (critical) case where both reductions slow to linear
        convergence.
        """
        S = self.A + self.B + self.C
        vals, vecs = np.linalg.eig(S.T)
        pi = np.real(vecs[:, np.argmin(np.abs(vals - 1))])
        pi = pi / pi.sum()
        return float(pi @ (self.C - self.A) @ np.ones(self.m))

    def is_stochastic(self, tol=1e-12):
        return bool(np.all(np.abs((self.A + self.B + self.C).sum(axis=1) - 1) <= tol))


def _warn_if_critical(p):
    if p.is_stochastic() and abs(p.drift()) <= 1e-10:
        warnings.warn(
            "zero drift (null-recurrent case): reduction converges only linearly",
            RuntimeWarning,
            stacklevel=3,
        )


def _solve(h, V):
    try:
        return h.solve(V)
    except SingularMatrixError as exc:
        raise Breakdown(Status.BREAKDOWN_SINGULAR, str(exc)) from exc


def solve_lr(p, opts=None):
    """Logarithmic Reduction.

    Stops once the last correction ``U B_{-1}`` and the residual are both
    below ``opts.tol`` in max-norm. ``report.residuals`` holds the residual
    of ``X`` after each step.
    """
    opts = opts or SolveOptions()
    _warn_if_critical(p)
    rec = _Recorder(opts, "lr")
    eye = np.eye(p.m)
    h0 = MMatrixHandle(eye - p.B)
    Bm = h0.solve(p.A)
    Bp = h0.solve(p.C)
    X = Bm.copy()
    U = Bp.copy()
    # with U = 0 no later correction can change X
    corr = 0.0 if not np.any(U) else np.inf
    for k in range(opts.maxit + 1):
        rnorm = p.residual_norm(X)
        rec.push(k, X, rnorm)
        if corr <= opts.tol and rnorm <= opts.tol:
            return rec.report(X, Status.CONVERGED, k)
        if k == opts.maxit:
            break
        try:
            h = factor_or_breakdown(eye - Bp @ Bm - Bm @ Bp, f"I - B1 B-1 - B-1 B1 at step {k}", ztol=1e-13)
            Bm = _solve(h, Bm @ Bm)
            Bp = _solve(h, Bp @ Bp)
        except Breakdown as exc:
            return rec.report(X, exc.status, k, message=str(exc), breakdown_at=k)
        delta = U @ Bm
        corr = float(np.max(np.abs(delta)))
        X_new = X + delta
        rec.check_monotone(k, X, X_new)
        X = X_new
        U = U @ Bp
    return rec.report(X, Status.MAXIT, opts.maxit, message="maximum number of iterations reached")


def solve_cr(p, opts=None):
    """Cyclic Reduction.

    ``S`` accumulates ``S <- S - C R^{-1} A`` from ``S = I - B``, and the
    approximation is ``X = S^{-1} A_0``. Stops when successive approximations
    differ by at most ``opts.tol`` and the residual is below ``opts.tol``.
    """
    opts = opts or SolveOptions()
    _warn_if_critical(p)
    rec = _Recorder(opts, "cr")
    eye = np.eye(p.m)
    R = eye - p.B
    S = R.copy()
    A, C, A0 = p.A.copy(), p.C.copy(), p.A
    X = np.zeros_like(A0)
    for k in range(opts.maxit + 1):
        try:
            hr = factor_or_breakdown(R, f"R at step {k}", ztol=1e-13)
            RiA = _solve(hr, A)
            RiC = _solve(hr, C)
            S = S - C @ RiA
            hs = factor_or_breakdown(S, f"S at step {k}", ztol=1e-13)
            X_new = _solve(hs, A0)
        except Breakdown as exc:
            return rec.report(X, exc.status, k, message=str(exc), breakdown_at=k)
        change = float(np.max(np.abs(X_new - X)))
        X = X_new
        rnorm = p.residual_norm(X)
        rec.push(k, X, rnorm)
        if change <= opts.tol and rnorm <= opts.tol:
            return rec.report(X, Status.CONVERGED, k)
        R, A, C = R - A @ RiC - C @ RiA, A @ RiA, C @ RiC
    return rec.report(X, Status.MAXIT, opts.maxit, message="maximum number of iterations reached")


def graeffe_step_check(p, X):
    """Defect of the squared equation for ``Y = X^2``.

    With ``B_{-1} = (I - B)^{-1} A``, ``B_1 = (I - B)^{-1} C`` and
    ``K = I - B_{-1} B_1 - B_1 B_{-1}``, a solution ``X`` of
    ``X = B_{-1} + B_1 X^2`` gives ``Y = X^2`` solving
    ``Y = K^{-1} B_{-1}^2 + K^{-1} B_1^2 Y^2``. Returns the max-norm defect.
    """
    X = as_square(X, p.m, "X")
    eye = np.eye(p.m)
    h0 = MMatrixHandle(eye - p.B)
    Bm = h0.solve(p.A)
    Bp = h0.solve(p.C)
    K = eye - Bm @ Bp - Bp @ Bm
    hk = MMatrixHandle(K)
    if hk.zero_pivot is not None:
        raise SingularMatrixError(hk.zero_pivot)
    Y = X @ X
    defect = Y - hk.solve(Bm @ Bm) - hk.solve(Bp @ Bp) @ Y @ Y
    return float(np.max(np.abs(defect)))
