"""Solver options and the common result record."""

import enum
import time
from dataclasses import dataclass, field

import numpy as np


class Status(str, enum.Enum):
    CONVERGED = "converged"
    MAXIT = "maxit"
    BREAKDOWN_SINGULAR = "breakdown-singular"
    BREAKDOWN_NOT_M = "breakdown-not-M"


EXIT_CODES = {
    Status.CONVERGED: 0,
    Status.BREAKDOWN_SINGULAR: 2,
    Status.BREAKDOWN_NOT_M: 2,
    Status.MAXIT: 3,
}

A1_VIOLATED = "A1 presumed violated: iterates exceeded the divergence guard"


@dataclass(frozen=True)
class SolveOptions:
    """Stopping parameters shared by all solvers.

    ``tol`` bounds the max-norm of the residual; ``guard`` is the iterate
    max-norm beyond which a monotone iteration is declared divergent.
    """

    tol: float = 1e-12
    maxit: int = 500
    record_history: bool = False
    guard: float = 1e12
    check_tol: float = 1e-12

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if int(self.maxit) < 1:
            raise ValueError("maxit must be at least 1")


@dataclass
class SolveReport:
    """Outcome of one solver run.

    ``residuals[k]`` is the residual max-norm of the ``k``-th iterate
    (``k = 0`` is the starting point) and ``times[k]`` the seconds elapsed
    since the solver started when it was recorded; ``iterates`` is filled only when
    history recording was requested. ``violations`` lists any invariant
    (monotonicity, residual sign, ...) that failed during a recorded run.
    """

    x: np.ndarray
    status: Status
    iterations: int
    solver: str = ""
    residuals: list = field(default_factory=list)
    times: list = field(default_factory=list)
    iterates: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    message: str = ""
    breakdown_at: int | None = None
    diverged: bool = False
    eliminated: tuple = ()

    @property
    def converged(self):
        return self.status == Status.CONVERGED

    @property
    def exit_code(self):
        return EXIT_CODES[self.status]

    @property
    def residual_norm(self):
        return self.residuals[-1] if self.residuals else float("nan")


class _Recorder:
    """Collects residuals/iterates and checks monotone-iteration invariants."""

    def __init__(self, opts, solver):
        self.opts = opts
        self.solver = solver
        self.residuals = []
        self.times = []
        self._t0 = time.perf_counter()
        self.iterates = []
        self.violations = []

    def push(self, k, x, res_norm):
        self.residuals.append(float(res_norm))
        self.times.append(time.perf_counter() - self._t0)
        if self.opts.record_history:
            self.iterates.append(np.array(x, copy=True))

    def check(self, cond, what):
        if self.opts.record_history and not cond:
            self.violations.append(what)

    def check_monotone(self, k, x_old, x_new):
        if not self.opts.record_history:
            return
        scale = max(1.0, float(np.max(np.abs(x_new))))
        if np.any(x_new < x_old - self.opts.check_tol * scale):
            self.violations.append(f"step {k}: iterate decreased")

    def check_sign(self, k, r, tol=1e-10):
        if not self.opts.record_history:
            return
        if np.any(r > tol):
            self.violations.append(f"step {k}: F(x_k) has positive entry {float(np.max(r))!r}")

    def report(self, x, status, iterations, **kw):
        return SolveReport(
            x=np.asarray(x),
            status=status,
            iterations=iterations,
            solver=self.solver,
            residuals=self.residuals,
            times=self.times,
            iterates=self.iterates,
            violations=self.violations,
            **kw,
        )
