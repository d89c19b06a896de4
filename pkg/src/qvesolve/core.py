"""The quadratic vector equation ``M x = a + b(x, x)`` and its residual map."""

from dataclasses import dataclass, field

import numpy as np

from ._validation import as_square, as_vector, check_nonnegative, check_zmatrix
from .bilinear import BilinearMap, DenseBilinear
from .mmatrix import Classification, MMatrixHandle

SIGN_TOL = 1e-13
SUPERSOLUTION_TOL = 1e-9


class InvalidProblemError(ValueError):
    """The data do not define a quadratic vector equation with the required
    sign structure."""


@dataclass(frozen=True, eq=False)
class QveProblem:
    """Data ``(M, a, b)`` of ``M x = a + b(x, x)``.

    ``M`` must be a nonsingular M-matrix, ``a >= 0`` and ``b`` a nonnegative
    bilinear map; all three are checked on construction. A dense ``b`` may be
    passed as an ``(n, n, n)`` array in ``B[i, j, k]`` order.
    """

    M: np.ndarray
    a: np.ndarray
    b: BilinearMap
    tag: str = "generic"
    mhandle: MMatrixHandle = field(init=False, repr=False)

    def __post_init__(self):
        M = as_square(self.M, name="M").astype(float)
        n = M.shape[0]
        a = as_vector(self.a, n, "a").astype(float)
        b = self.b
        if not isinstance(b, BilinearMap):
            b = DenseBilinear(b)
        if b.n != n:
            raise InvalidProblemError(f"bilinear map has dimension {b.n}, M is {n}x{n}")
        try:
            check_zmatrix(M, "M")
            check_nonnegative(a, "a")
        except ValueError as exc:
            raise InvalidProblemError(str(exc)) from exc
        handle = MMatrixHandle(M)
        if handle.classification != Classification.NONSINGULAR:
            raise InvalidProblemError(
                f"M is not a nonsingular M-matrix ({handle.classification.value})"
            )
        M.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "mhandle", handle)

    @property
    def n(self):
        return self.M.shape[0]

    def with_bilinear(self, b):
        """Same equation with a different bilinear extension of the quadratic form."""
        return QveProblem(self.M, self.a, b, tag=self.tag)

    def swapped(self):
        """Same equation with ``b(x, y)`` replaced by ``b(y, x)``."""
        return self.with_bilinear(self.b.swap())


@dataclass(frozen=True)
class SupersolutionCertificate:
    """A vector ``y >= 0`` with ``F(y) >= 0``; implies a minimal solution
    ``x* <= y`` exists."""

    y: np.ndarray
    min_residual: float


def _as_point(p, x, name="x"):
    return as_vector(x, p.n, name)


def residual(p, x):
    """``F(x) = M x - a - b(x, x)``."""
    x = _as_point(p, x)
    return p.M @ x - p.a - p.b.apply(x, x)


def derivative(p, x):
    """Frechet derivative ``F'_x = M - b(x, .) - b(., x)`` as a matrix."""
    x = _as_point(p, x)
    return p.M - p.b.left_matrix(x) - p.b.right_matrix(x)


def taylor_check(p, x, y):
    """Max-norm defect of ``F(y) = F(x) + F'_x (y - x) - b(y - x, y - x)``.

    The expansion is exact for quadratic maps, so the defect is pure roundoff.
    """
    x = _as_point(p, x)
    y = _as_point(p, y, "y")
    d = y - x
    rhs = residual(p, x) + derivative(p, x) @ d - p.b.apply(d, d)
    return float(np.max(np.abs(residual(p, y) - rhs)))


def check_supersolution(p, y, tol=SUPERSOLUTION_TOL):
    """True iff ``y >= 0`` and ``F(y) >= -tol`` componentwise."""
    y = _as_point(p, y, "y")
    if np.any(y < 0):
        return False
    return bool(np.all(residual(p, y) >= -tol))


def certify_supersolution(p, y, tol=SUPERSOLUTION_TOL):
    """Return a :class:`SupersolutionCertificate` for ``y`` or raise ``ValueError``."""
    y = _as_point(p, y, "y")
    r = residual(p, y)
    if np.any(y < 0) or np.any(r < -tol):
        i = int(np.argmin(r))
        raise ValueError(f"not a supersolution: F(y)[{i}] = {float(r[i])!r}")
    y = y.copy()
    y.setflags(write=False)
    return SupersolutionCertificate(y, float(np.min(r)))
