"""Monotone functional iterations for ``M x = a + b(x, x)``.

Given splittings ``M = N - P`` and ``b = b1 + b2`` the iteration is

    (N - b1(., x_k)) x_{k+1} = a + P x_k + b2(x_k, x_k),

which for ``N = M``, ``P = 0``, ``b1 = 0`` is the basic fixed-point iteration
``x_{k+1} = M^{-1}(a + b(x_k, x_k))``. Started from a point with
``0 <= x_0 <= x*`` and ``F(x_0) <= 0`` every member of the family increases
monotonically to the minimal solution.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import NotZMatrixError, as_square, as_vector, check_nonnegative
from .bilinear import BilinearMap, ZeroBilinear, agree_as_quadratic
from .core import residual
from .mmatrix import Classification, MMatrixHandle, SingularMatrixError
from .report import A1_VIOLATED, SolveOptions, Status, _Recorder

__all__ = [
    "Breakdown",
    "Splitting",
    "fixed_point",
    "functional_iteration",
    "gauss_seidel_iteration",
    "switch_iterations",
]


class Breakdown(Exception):
    """A matrix to be inverted lost the nonsingular M-matrix property."""

    def __init__(self, status, message):
        super().__init__(message)
        self.status = status


def factor_or_breakdown(Z, what, ztol=0.0):
    """Factor ``Z`` or raise :class:`Breakdown` if it is not a usable M-matrix."""
    try:
        h = MMatrixHandle(Z, ztol=ztol)
    except NotZMatrixError as exc:
        raise Breakdown(Status.BREAKDOWN_NOT_M, f"{what}: {exc}") from exc
    if h.classification == Classification.NOT_M:
        raise Breakdown(Status.BREAKDOWN_NOT_M, f"{what} is not an M-matrix")
    if h.classification == Classification.SINGULAR:
        warnings.warn(f"{what} is numerically a singular M-matrix", RuntimeWarning, stacklevel=3)
        if h.zero_pivot is not None:
            raise Breakdown(Status.BREAKDOWN_SINGULAR, f"{what} is singular (pivot {h.zero_pivot})")
    return h


@dataclass(frozen=True, eq=False)
class Splitting:
    """``M = N - P`` and ``b = b1 + b2`` with ``N`` a nonsingular M-matrix,
    ``P >= 0`` and ``b1, b2`` nonnegative.

    ``b1 + b2`` only has to agree with the problem's ``b`` as a quadratic
    form, so ``b1 = b.swap()`` is admissible and gives the second variant of
    the ``order`` iteration.
    """

    N: np.ndarray
    P: np.ndarray
    b1: BilinearMap
    b2: BilinearMap
    name: str = "custom"

    def __post_init__(self):
        N = as_square(self.N, name="N").astype(float)
        P = as_square(self.P, N.shape[0], "P").astype(float)
        check_nonnegative(P, "P")
        if self.b1.n != N.shape[0] or self.b2.n != N.shape[0]:
            raise ValueError("splitting bilinear maps have the wrong dimension")
        h = MMatrixHandle(N)
        if h.classification != Classification.NONSINGULAR:
            raise ValueError(f"N must be a nonsingular M-matrix ({h.classification.value})")
        N.setflags(write=False)
        P.setflags(write=False)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "_nhandle", h)

    def validate(self, p, tol=1e-12):
        """Raise ``ValueError`` unless this splitting fits problem ``p``."""
        scale = 1.0 + float(np.max(np.abs(p.M)))
        if self.N.shape != p.M.shape or np.max(np.abs(self.N - self.P - p.M)) > tol * scale:
            raise ValueError("splitting does not satisfy M = N - P")
        if not agree_as_quadratic(self.b1 + self.b2, p.b):
            raise ValueError("splitting does not satisfy b1(x, x) + b2(x, x) = b(x, x)")

    # named members of the family -------------------------------------------
    @classmethod
    def order(cls, p):
        """``P = 0, b2 = 0``: the fastest member of the family."""
        return cls(p.M, np.zeros_like(p.M), p.b, ZeroBilinear(p.n), "order")

    @classmethod
    def order_swapped(cls, p):
        """``P = 0, b2 = 0`` applied to ``b~(x, y) = b(y, x)``."""
        return cls(p.M, np.zeros_like(p.M), p.b.swap(), ZeroBilinear(p.n), "order-swapped")

    @classmethod
    def depth(cls, p):
        """``P = 0, b1 = 0``: the basic fixed-point iteration."""
        return cls(p.M, np.zeros_like(p.M), ZeroBilinear(p.n), p.b, "depth")

    @classmethod
    def jacobi(cls, p, theta=1.0):
        """``N = diag(M)`` and ``b1 = theta b``, ``b2 = (1 - theta) b``."""
        N = np.diag(np.diag(p.M))
        return cls(N, N - p.M, theta * p.b, (1.0 - theta) * p.b, f"jacobi-{theta:g}")

    @classmethod
    def half(cls, p):
        return cls(p.M, np.zeros_like(p.M), 0.5 * p.b, 0.5 * p.b, "half")

    @classmethod
    def from_name(cls, p, name):
        makers = {
            "order": cls.order,
            "order-swapped": cls.order_swapped,
            "depth": cls.depth,
            "jacobi": cls.jacobi,
            "half": cls.half,
        }
        try:
            return makers[name](p)
        except KeyError:
            raise ValueError(f"unknown splitting {name!r}; choose from {sorted(makers)}") from None

    # iteration map ---------------------------------------------------------
    def jmatrix(self, x):
        """``J(x) = N - b1(., x)``."""
        return self.N - self.b1.right_matrix(x)

    def rhs(self, p, x):
        """``g(x) = a + P x + b2(x, x)``."""
        return p.a + self.P @ x + self.b2.apply(x, x)

    def step(self, p, x):
        """One application of ``f(x) = J(x)^{-1} g(x)``."""
        if isinstance(self.b1, ZeroBilinear):
            h = self._nhandle
        else:
            h = factor_or_breakdown(self.jmatrix(x), "N - b1(., x)")
        try:
            return h.solve(self.rhs(p, x))
        except SingularMatrixError as exc:
            raise Breakdown(Status.BREAKDOWN_SINGULAR, str(exc)) from exc


def _start(p, x0):
    if x0 is None:
        return np.zeros(p.n)
    x0 = as_vector(x0, p.n, "x0").astype(float)
    if np.any(x0 < 0):
        raise ValueError("starting point must be nonnegative")
    r = residual(p, x0)
    if np.any(r > 1e-10 * (1.0 + np.max(np.abs(p.a)))):
        raise ValueError("starting point must satisfy F(x0) <= 0")
    return x0.copy()


def _iterate(p, step_for, x0, opts, solver):
    """Shared driver: ``step_for(k)`` returns the map taking ``x_k`` to ``x_{k+1}``."""
    opts = opts or SolveOptions()
    rec = _Recorder(opts, solver)
    x = _start(p, x0)
    for k in range(opts.maxit + 1):
        r = residual(p, x)
        rnorm = float(np.max(np.abs(r)))
        rec.push(k, x, rnorm)
        rec.check_sign(k, r)
        if rnorm <= opts.tol:
            return rec.report(x, Status.CONVERGED, k)
        if k == opts.maxit:
            break
        try:
            x_new = step_for(k)(x)
        except Breakdown as exc:
            return rec.report(x, exc.status, k, message=f"step {k}: {exc}", breakdown_at=k)
        if not np.all(np.isfinite(x_new)) or np.max(np.abs(x_new)) > opts.guard:
            return rec.report(x, Status.MAXIT, k, message=A1_VIOLATED, diverged=True)
        rec.check_monotone(k, x, x_new)
        x = x_new
    return rec.report(x, Status.MAXIT, opts.maxit, message="maximum number of iterations reached")


def fixed_point(p, opts=None):
    """Basic iteration ``x_{k+1} = M^{-1}(a + b(x_k, x_k))`` from ``x_0 = 0``.

    Iterates that exceed ``opts.guard`` in max-norm end the run with
    ``diverged=True``: no nonnegative solution exists in that case.
    """
    def step(x):
        return p.mhandle.solve(p.a + p.b.apply(x, x))

    return _iterate(p, lambda k: step, None, opts, "fp1")


def functional_iteration(p, s, x0=None, opts=None):
    """Run the functional iteration defined by splitting ``s``.

    Returns a report with status ``breakdown-not-M`` (and the offending
    iterate) when ``N - b1(., x_k)`` is not an M-matrix, which happens on
    problems whose minimal solution has zero entries.
    """
    s.validate(p)
    return _iterate(p, lambda k: (lambda x: s.step(p, x)), x0, opts, f"funit[{s.name}]")


def _gs_step(p, s, x):
    # y runs from x_k towards x_{k+1}: entry i is refreshed from f(y) as soon
    # as it is computed; the returned f(y') dominates f(x_k) and keeps F <= 0
    y = x.copy()
    z = None
    for i in range(p.n):
        z = s.step(p, y)
        y[i] = z[i]
    return z


def gauss_seidel_iteration(p, s, x0=None, opts=None):
    """Gauss-Seidel variant of :func:`functional_iteration`.

    Entries are swept in natural order ``0..n-1``. While computing step
    ``k + 1``, each entry already refreshed replaces the corresponding entry
    of ``x_k`` in both ``J`` and ``g``; the step result is ``f(y)`` for the
    partially refreshed vector ``y``, so ``x_k <= y`` and the iterate is never
    below the plain functional-iteration iterate.
    """
    s.validate(p)
    return _iterate(p, lambda k: (lambda x: _gs_step(p, s, x)), x0, opts, f"gs[{s.name}]")


def switch_iterations(p, schedule, x0=None, opts=None):
    """Apply ``schedule[k % len(schedule)]`` at step ``k``."""
    schedule = list(schedule)
    if not schedule:
        raise ValueError("schedule must contain at least one splitting")
    for s in schedule:
        s.validate(p)
    names = "/".join(s.name for s in schedule)
    return _iterate(
        p, lambda k: (lambda x: schedule[k % len(schedule)].step(p, x)), x0, opts, f"switch[{names}]"
    )
