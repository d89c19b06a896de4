"""Support of the minimal solution and reduction to its nonzero entries.

When the minimal solution ``x*`` has zero entries, the matrices inverted by
functional iterations and Newton's method may stop being M-matrices. All the
iterates stay in ``W = {x : x_i = 0 whenever x*_i = 0}``, so the problem can
be restricted to the entries of the support beforehand.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .bilinear import DenseBilinear, ProjectedBilinear
from .core import QveProblem, residual
from .report import SolveOptions, SolveReport, Status

__all__ = [
    "PositivityPattern",
    "ReducedProblem",
    "inverse_pattern",
    "positivity_pattern",
    "reduce_problem",
    "solve_with_reduction",
]


def inverse_pattern(M):
    """Nonzero pattern of ``M^{-1}`` for a nonsingular M-matrix ``M``.

    ``(M^{-1})_ij > 0`` exactly when ``i == j`` or ``j`` is reachable from
    ``i`` along nonzero off-diagonal entries of ``M`` (Neumann series of the
    Jacobi splitting). Computed by a boolean transitive closure, so no
    floating-point threshold is involved.
    """
    M = np.asarray(M)
    n = M.shape[0]
    adj = (M != 0) & ~np.eye(n, dtype=bool)
    reach = np.eye(n, dtype=bool) | adj
    while True:
        nxt = reach | ((reach.astype(np.int64) @ adj.astype(np.int64)) > 0)
        if np.array_equal(nxt, reach):
            return reach
        reach = nxt


@dataclass
class PositivityPattern:
    """Support ``S`` of the minimal solution plus an audit trail.

    ``trace`` lists ``(t, inserted)`` for every index ``t`` popped from the
    work queue; ``minv_applications`` counts pattern products with
    ``M^{-1}`` (at most ``n + 1``).
    """

    n: int
    support: tuple
    trace: list = field(default_factory=list)
    pops: int = 0
    minv_applications: int = 0

    @property
    def eliminated(self):
        return tuple(i for i in range(self.n) if i not in set(self.support))

    @property
    def full(self):
        return len(self.support) == self.n


def positivity_pattern(p):
    """Compute ``{i : x*_i > 0}`` combinatorially.

    Seeds the support with the positive entries of ``M^{-1} a`` and then pops
    indices ``t`` from a FIFO queue, adding every index where
    ``M^{-1}(b(e_S, e_t) + b(e_t, e_S))`` is positive. Products of
    nonnegative numbers are exactly zero only for structural zeros, so the
    pattern of ``b(e_S, e_t)`` is read off the floating-point value and then
    propagated through the boolean pattern of ``M^{-1}``.
    """
    n = p.n
    reach = inverse_pattern(p.M)
    result = PositivityPattern(n=n, support=())

    def minv(mask):
        result.minv_applications += 1
        return (reach.astype(np.int64) @ mask.astype(np.int64)) > 0

    in_s = minv(p.a > 0)
    queue = deque(int(i) for i in np.flatnonzero(in_s))
    while queue and not in_s.all():
        t = queue.popleft()
        result.pops += 1
        e_s = in_s.astype(float)
        e_t = np.zeros(n)
        e_t[t] = 1.0
        v = p.b.apply(e_s, e_t) + p.b.apply(e_t, e_s)
        new = np.flatnonzero(minv(v > 0) & ~in_s)
        in_s[new] = True
        queue.extend(int(i) for i in new)
        result.trace.append((t, tuple(int(i) for i in new)))
    result.support = tuple(int(i) for i in np.flatnonzero(in_s))
    return result


@dataclass
class ReducedProblem:
    """Problem restricted to the entries ``index``; ``problem`` is None when
    the support is empty (the minimal solution is zero)."""

    n_full: int
    index: np.ndarray
    problem: QveProblem | None

    def embed(self, x_hat):
        x = np.zeros(self.n_full)
        x[self.index] = x_hat
        return x


def reduce_problem(p, pat):
    """Project ``p`` onto the support in ``pat``:
    ``M^ = Pi M Pi^T``, ``a^ = Pi a``, ``b^(x, y) = Pi b(Pi^T x, Pi^T y)``."""
    idx = np.asarray(pat.support, dtype=int)
    if idx.size == 0:
        return ReducedProblem(p.n, idx, None)
    if idx.size == p.n:
        return ReducedProblem(p.n, idx, p)
    if isinstance(p.b, DenseBilinear):
        b_hat = DenseBilinear(p.b.kij[np.ix_(idx, idx, idx)], layout="kij", check=False)
    else:
        b_hat = ProjectedBilinear(p.b, idx)
    M_hat = p.M[np.ix_(idx, idx)]
    return ReducedProblem(p.n, idx, QveProblem(M_hat, p.a[idx], b_hat, tag=p.tag))


def solve_with_reduction(p, method, opts=None):
    """Compute the support, solve the reduced problem, embed zeros.

    ``method`` is a solver name understood by :func:`qvesolve.solvers.get_solver`
    or a callable ``solver(problem, opts) -> SolveReport``. The report's
    ``eliminated`` field lists the indices fixed to zero; its residual
    history refers to the reduced problem, except that the last entry is the
    residual of the embedded solution in the full problem.
    """
    from .solvers import get_solver

    opts = opts or SolveOptions()
    solver = get_solver(method) if isinstance(method, str) else method
    pat = positivity_pattern(p)
    red = reduce_problem(p, pat)
    if red.problem is None:
        return SolveReport(
            x=np.zeros(p.n),
            status=Status.CONVERGED,
            iterations=0,
            solver=f"{getattr(solver, '__name__', method)}+reduce",
            residuals=[float(np.max(np.abs(p.a)))],
            eliminated=pat.eliminated,
            message="empty support: the minimal solution is zero",
        )
    rep = solver(red.problem, opts)
    x = red.embed(rep.x)
    rep.x = x
    rep.eliminated = pat.eliminated
    rep.solver = f"{rep.solver}+reduce"
    if rep.residuals:
        rep.residuals[-1] = float(np.max(np.abs(residual(p, x))))
    if opts.record_history:
        rep.iterates = [red.embed(v) for v in rep.iterates]
    return rep
