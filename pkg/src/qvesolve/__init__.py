"""Minimal nonnegative solutions of quadratic vector equations

    M x = a + b(x, x),

with ``M`` a nonsingular M-matrix, ``a >= 0`` and ``b`` a nonnegative
bilinear map. Functional iterations, Newton-type methods, Logarithmic and
Cyclic Reduction, and a positivity-pattern reduction for problems whose
solution has zero entries.
"""

from .bilinear import BilinearMap, DenseBilinear, ZeroBilinear
from .core import (
    InvalidProblemError,
    QveProblem,
    SupersolutionCertificate,
    certify_supersolution,
    check_supersolution,
    derivative,
    residual,
    taylor_check,
)
from .iterations import (
    Splitting,
    fixed_point,
    functional_iteration,
    gauss_seidel_iteration,
    switch_iterations,
)
from .mmatrix import Classification, MMatrixHandle, classify_zmatrix, spectral_radius
from .models import make_e1, make_e2, make_e3, make_e4, make_treelike, unvec, vec
from .newton import modified_newton, modified_newton_cr_form, newton, newton_cr_form
from .positivity import positivity_pattern, reduce_problem, solve_with_reduction
from .report import SolveOptions, SolveReport, Status
from .solvers import get_solver
from .unilateral import UnilateralProblem, solve_cr, solve_lr

__version__ = "0.1.0"

__all__ = [
    "BilinearMap",
    "Classification",
    "DenseBilinear",
    "InvalidProblemError",
    "MMatrixHandle",
    "QveProblem",
    "SolveOptions",
    "SolveReport",
    "Splitting",
    "Status",
    "SupersolutionCertificate",
    "UnilateralProblem",
    "ZeroBilinear",
    "certify_supersolution",
    "check_supersolution",
    "classify_zmatrix",
    "derivative",
    "fixed_point",
    "functional_iteration",
    "gauss_seidel_iteration",
    "get_solver",
    "make_e1",
    "make_e2",
    "make_e3",
    "make_e4",
    "make_treelike",
    "modified_newton",
    "modified_newton_cr_form",
    "newton",
    "newton_cr_form",
    "positivity_pattern",
    "reduce_problem",
    "residual",
    "solve_cr",
    "solve_lr",
    "solve_with_reduction",
    "spectral_radius",
    "switch_iterations",
    "taylor_check",
    "unvec",
    "vec",
]
