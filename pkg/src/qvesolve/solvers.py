"""Solver lookup by name, shared by the reduction pipeline and the CLI."""

from functools import partial

from .iterations import Splitting, fixed_point, functional_iteration, gauss_seidel_iteration
from .newton import modified_newton, modified_newton_cr_form, newton, newton_cr_form

__all__ = ["QVE_SOLVERS", "get_solver"]

#: solvers acting on a :class:`~qvesolve.core.QveProblem`
QVE_SOLVERS = ("fp1", "funit", "gs", "newton", "newton-cr", "mnewton", "mnewton-cr")


def _splitting_solver(run, splitting, p, opts):
    return run(p, Splitting.from_name(p, splitting), opts=opts)


def get_solver(name, splitting="order"):
    """Return ``solver(problem, opts) -> SolveReport`` for ``name``.

    ``splitting`` selects the member of the functional-iteration family for
    ``funit`` and ``gs`` and is ignored otherwise.
    """
    direct = {
        "fp1": fixed_point,
        "newton": newton,
        "newton-cr": newton_cr_form,
        "mnewton": modified_newton,
        "mnewton-cr": modified_newton_cr_form,
    }
    if name in direct:
        return direct[name]
    if name == "funit":
        return partial(_splitting_solver, functional_iteration, splitting)
    if name == "gs":
        return partial(_splitting_solver, gauss_seidel_iteration, splitting)
    raise ValueError(f"unknown solver {name!r}; choose from {', '.join(QVE_SOLVERS)}")
