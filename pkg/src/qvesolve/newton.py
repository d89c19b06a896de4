"""Newton-type methods for ``M x = a + b(x, x)``, all started from ``x_0 = 0``.

* :func:`newton` solves ``F'_{x_k} (x_{k+1} - x_k) = -F(x_k)``.
* :func:`modified_newton` applies Newton's method to
  ``G(x) = x - R_x^{-1} a`` with ``R_x = M - b(., x)``; its iterates dominate
  those of :func:`newton`.
* :func:`newton_cr_form` and :func:`modified_newton_cr_form` carry the same
  iterations in the reduction-like form that only updates a vector and a
  matrix (resp. a premultiplied bilinear map) from step to step.
"""

import numpy as np

from .core import derivative, residual
from .iterations import Breakdown, factor_or_breakdown
from .mmatrix import SingularMatrixError
from .report import SolveOptions, Status, _Recorder

__all__ = [
    "gprime",
    "modified_newton",
    "modified_newton_cr_form",
    "newton",
    "newton_cr_form",
]

# G'_x is formed from computed inverses whose nonnegativity holds only up
# to roundoff; off-diagonal entries up to this level are clipped
_ZTOL = 1e-13


def _solve(h, v):
    try:
        return h.solve(v)
    except SingularMatrixError as exc:
        raise Breakdown(Status.BREAKDOWN_SINGULAR, str(exc)) from exc


def _norm(v):
    return float(np.max(np.abs(v)))


def newton(p, opts=None):
    """Newton's method.

    When history is recorded, each step checks ``x_k <= x_{k+1}`` and the
    identity ``-F(x_{k+1}) = b(w, w)`` with ``w = x_{k+1} - x_k``.
    """
    opts = opts or SolveOptions()
    rec = _Recorder(opts, "newton")
    x = np.zeros(p.n)
    r = residual(p, x)
    for k in range(opts.maxit + 1):
        rnorm = _norm(r)
        rec.push(k, x, rnorm)
        rec.check_sign(k, r)
        if rnorm <= opts.tol:
            return rec.report(x, Status.CONVERGED, k)
        if k == opts.maxit:
            break
        try:
            h = factor_or_breakdown(derivative(p, x), f"F'_x at step {k}")
            w = _solve(h, -r)
        except Breakdown as exc:
            return rec.report(x, exc.status, k, message=str(exc), breakdown_at=k)
        x_new = x + w
        r = residual(p, x_new)
        if opts.record_history:
            rec.check_monotone(k, x, x_new)
            bww = p.b.apply(w, w)
            scale = max(1.0, _norm(bww))
            rec.check(_norm(-r - bww) <= 1e-12 * scale + 1e-15 * _norm(p.a), f"step {k}: -F(x_k+1) != b(w, w)")
        x = x_new
    return rec.report(x, Status.MAXIT, opts.maxit, message="maximum number of iterations reached")


def rx_matrix(p, x):
    """``R_x = M - b(., x)``."""
    return p.M - p.b.right_matrix(x)


def gprime(p, x):
    """Return ``(G(x), G'_x)`` for ``G(x) = x - R_x^{-1} a``.

    ``G'_x = I - R_x^{-1} b(R_x^{-1} a, .)``.
    """
    hr = factor_or_breakdown(rx_matrix(p, x), "R_x")
    y = _solve(hr, p.a)
    Gp = np.eye(p.n) - _solve(hr, p.b.left_matrix(y))
    return x - y, Gp


def modified_newton(p, opts=None):
    """Newton's method on ``G(x) = x - (M - b(., x))^{-1} a``.

    When ``M`` is diagonal and ``b(., x)`` is diagonal (the E2 realization)
    ``R_x`` is diagonal and is inverted entrywise.
    """
    opts = opts or SolveOptions()
    rec = _Recorder(opts, "mnewton")
    x = np.zeros(p.n)
    for k in range(opts.maxit + 1):
        r = residual(p, x)
        rnorm = _norm(r)
        rec.push(k, x, rnorm)
        rec.check_sign(k, r)
        if rnorm <= opts.tol:
            return rec.report(x, Status.CONVERGED, k)
        if k == opts.maxit:
            break
        try:
            G, Gp = gprime(p, x)
            hg = factor_or_breakdown(Gp, f"G'_x at step {k}", ztol=_ZTOL)
            w = -_solve(hg, G)
        except Breakdown as exc:
            return rec.report(x, exc.status, k, message=str(exc), breakdown_at=k)
        x_new = x + w
        rec.check_monotone(k, x, x_new)
        x = x_new
    return rec.report(x, Status.MAXIT, opts.maxit, message="maximum number of iterations reached")


def newton_cr_form(p, opts=None):
    """Newton's method as the reduction-like loop

        w <- Mt^{-1} at;  x <- x + w;  at <- b(w, w);  Mt <- Mt - b(w, .) - b(., w)

    with ``Mt = M``, ``at = a`` initially. At step ``k`` one has
    ``Mt = F'_{x_k}`` and ``at = -F(x_k)``, so the tracked ``at`` serves as the
    residual for the stopping test; no residual is recomputed, which avoids
    the cancellation in ``M x - a - b(x, x)`` near a singular solution.
    """
    opts = opts or SolveOptions()
    rec = _Recorder(opts, "newton-cr")
    x = np.zeros(p.n)
    Mt = np.array(p.M, dtype=float)
    at = np.array(p.a, dtype=float)
    for k in range(opts.maxit + 1):
        rnorm = _norm(at)
        rec.push(k, x, rnorm)
        if rnorm <= opts.tol:
            return rec.report(x, Status.CONVERGED, k)
        if k == opts.maxit:
            break
        try:
            h = factor_or_breakdown(Mt, f"reduced matrix at step {k}")
            w = _solve(h, at)
        except Breakdown as exc:
            return rec.report(x, exc.status, k, message=str(exc), breakdown_at=k)
        rec.check_monotone(k, x, x + w)
        x = x + w
        at = p.b.apply(w, w)
        Mt = Mt - p.b.left_matrix(w) - p.b.right_matrix(w)
    return rec.report(x, Status.MAXIT, opts.maxit, message="maximum number of iterations reached")


def modified_newton_cr_form(p, opts=None):
    """Modified Newton method as the reduction-like loop

        K  <- I - bt(., w);   at <- K^{-1} at;   bt <- K^{-1} bt
        w  <- (I - bt(at, .))^{-1} (at - x);   x <- x + w

    where ``bt = Q b`` with ``Q = R_{x_k}^{-1}`` kept as an explicit matrix.
    The loop starts from ``Q = M^{-1}`` (so ``at = M^{-1} a``), which reduces
    to ``at = a``, ``bt = b`` when ``M = I``.
    """
    opts = opts or SolveOptions()
    rec = _Recorder(opts, "mnewton-cr")
    n = p.n
    eye = np.eye(n)
    x = np.zeros(n)
    w = np.zeros(n)
    Q = p.mhandle.inverse()
    at = p.mhandle.solve(p.a)
    for k in range(opts.maxit + 1):
        r = residual(p, x)
        rnorm = _norm(r)
        rec.push(k, x, rnorm)
        rec.check_sign(k, r)
        if rnorm <= opts.tol:
            return rec.report(x, Status.CONVERGED, k)
        if k == opts.maxit:
            break
        try:
            if k > 0:
                hk = factor_or_breakdown(eye - Q @ p.b.right_matrix(w), f"I - bt(., w) at step {k}", ztol=_ZTOL)
                at = _solve(hk, at)
                Q = _solve(hk, Q)
            hg = factor_or_breakdown(eye - Q @ p.b.left_matrix(at), f"I - bt(at, .) at step {k}", ztol=_ZTOL)
            w = _solve(hg, at - x)
        except Breakdown as exc:
            return rec.report(x, exc.status, k, message=str(exc), breakdown_at=k)
        rec.check_monotone(k, x, x + w)
        x = x + w
    return rec.report(x, Status.MAXIT, opts.maxit, message="maximum number of iterations reached")
