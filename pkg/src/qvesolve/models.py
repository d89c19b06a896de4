"""Constructors turning concrete equation classes into :class:`QveProblem` s.

Matrix unknowns are vectorized by stacking columns (``vec(X) =
X.reshape(-1, order="F")``), for which

    vec(A X B) = (B^T kron A) vec(X).
"""

import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import DimensionError, as_matrix, as_square, as_vector, check_nonnegative
from .bilinear import BilinearMap
from .core import QveProblem
from .mmatrix import Classification, MMatrixHandle, is_irreducible
from .unilateral import UnilateralProblem

__all__ = [
    "E2Problem",
    "E3Problem",
    "E4Problem",
    "ProductSumBilinear",
    "TransportBilinear",
    "TreeLikeProblem",
    "make_e1",
    "make_e2",
    "make_e3",
    "make_e4",
    "make_treelike",
    "unvec",
    "vec",
]


def vec(X):
    """Stack the columns of ``X`` into one vector."""
    return np.asarray(X).reshape(-1, order="F")


def unvec(x, shape):
    """Inverse of :func:`vec` for a matrix of the given ``shape``."""
    return np.asarray(x).reshape(shape, order="F")


class TransportBilinear(BilinearMap):
    """``b([u1; v1], [u2; v2]) = [u1 * (P v2); v1 * (Pt u2)]``.

    ``b(., y)`` is the diagonal matrix ``diag([P v_y; Pt u_y])``, so linear
    systems with ``I - b(., y)`` cost ``O(m)``.
    """

    right_matrix_is_diagonal = True

    def __init__(self, P, Pt):
        P = as_square(P, name="P").astype(float)
        Pt = as_square(Pt, P.shape[0], "Pt").astype(float)
        check_nonnegative(P, "P")
        check_nonnegative(Pt, "Pt")
        self.m = P.shape[0]
        super().__init__(2 * self.m)
        self.P, self.Pt = P, Pt

    def _split(self, x):
        return x[: self.m], x[self.m :]

    def apply(self, x, y):
        u1, v1 = self._split(self._check(x))
        u2, v2 = self._split(self._check(y, "y"))
        return np.concatenate([u1 * (self.P @ v2), v1 * (self.Pt @ u2)])

    def left_matrix(self, x):
        u, v = self._split(self._check(x))
        L = np.zeros((self.n, self.n))
        L[: self.m, self.m :] = u[:, None] * self.P
        L[self.m :, : self.m] = v[:, None] * self.Pt
        return L

    def right_matrix(self, y):
        u, v = self._split(self._check(y, "y"))
        return np.diag(np.concatenate([self.P @ v, self.Pt @ u]))

    def __repr__(self):
        return f"TransportBilinear(m={self.m})"


class ProductSumBilinear(BilinearMap):
    """``b(x, y) = vec(sum_i L_i X R_i Y)`` with ``X = unvec(x)``, ``Y = unvec(y)``.

    Parameters
    ----------
    terms : sequence of (L, R)
        Nonnegative pairs; ``L`` is ``p x p`` and ``R`` is ``q x p`` when
        the unknown is ``p x q``.
    shape : tuple of int
        Shape ``(p, q)`` of the matrix unknown.
    """

    def __init__(self, terms, shape):
        p, q = (int(s) for s in shape)
        super().__init__(p * q)
        self.shape = (p, q)
        self.terms = []
        for i, (L, R) in enumerate(terms):
            L = as_matrix(L, (p, p), f"L[{i}]")
            R = as_matrix(R, (q, p), f"R[{i}]")
            check_nonnegative(L, f"L[{i}]")
            check_nonnegative(R, f"R[{i}]")
            self.terms.append((L, R))

    def apply(self, x, y):
        X = unvec(self._check(x), self.shape)
        Y = unvec(self._check(y, "y"), self.shape)
        return vec(sum(L @ X @ R @ Y for L, R in self.terms))

    def left_matrix(self, x):
        X = unvec(self._check(x), self.shape)
        K = sum(L @ X @ R for L, R in self.terms)
        return np.kron(np.eye(self.shape[1]), K)

    def right_matrix(self, y):
        Y = unvec(self._check(y, "y"), self.shape)
        return sum(np.kron((R @ Y).T, L) for L, R in self.terms)

    def __repr__(self):
        return f"ProductSumBilinear(shape={self.shape}, terms={len(self.terms)})"


def make_e1(a, b, normalized=False, tol=1e-12):
    """Markovian binary tree equation ``x = a + b(x, x)`` (``M = I``).

    With ``normalized=True`` the identity ``a + b(e, e) = e`` is verified, which
    makes ``e`` a supersolution and bounds the extinction probabilities by 1.
    """
    a = as_vector(a, name="a")
    p = QveProblem(np.eye(a.size), a, b, tag="e1")
    if normalized:
        e = np.ones(p.n)
        defect = float(np.max(np.abs(p.a + p.b.apply(e, e) - e)))
        if defect > tol:
            raise ValueError(f"normalization a + b(e, e) = e violated, max defect {defect!r}")
    return p


@dataclass(frozen=True, eq=False)
class E2Problem:
    """``u = u * (P v) + e``, ``v = v * (Pt u) + e`` as one vector ``w = [u; v]``."""

    P: np.ndarray
    Pt: np.ndarray
    problem: QveProblem

    @property
    def m(self):
        return self.P.shape[0]

    def split(self, x):
        return x[: self.m], x[self.m :]


def make_e2(P, Pt):
    b = TransportBilinear(P, Pt)
    n = b.n
    problem = QveProblem(np.eye(n), np.ones(n), b, tag="e2")
    return E2Problem(b.P, b.Pt, problem)


def _mmatrix_check(Z, name):
    h = MMatrixHandle(Z)
    if h.classification == Classification.NONSINGULAR:
        return
    if h.classification == Classification.SINGULAR and is_irreducible(-Z + np.diag(np.diag(Z))):
        warnings.warn(f"{name} is a singular irreducible M-matrix (critical case)", RuntimeWarning, stacklevel=3)
        return
    raise ValueError(f"{name} must be a nonsingular or singular irreducible M-matrix")


@dataclass(frozen=True, eq=False)
class E3Problem:
    """Riccati equation ``X C X + B - A X - X D = 0`` with ``X`` of shape ``(m1, m2)``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    problem: QveProblem

    @property
    def shape(self):
        return self.B.shape

    def unvec(self, x):
        return unvec(x, self.shape)

    def riccati_residual(self, X):
        return X @ self.C @ X + self.B - self.A @ X - X @ self.D


def make_e3(A, B, C, D):
    """Vectorize the Riccati equation: ``M = I kron A + D^T kron I``,
    ``a = vec(B)``, ``b(x, y) = vec(X C Y)``.

    The block matrix ``[[D, -C], [-B, A]]`` must be a nonsingular M-matrix or
    a singular irreducible one (then a warning is issued).
    """
    B = as_matrix(B, name="B")
    m1, m2 = B.shape
    A = as_matrix(A, (m1, m1), "A")
    C = as_matrix(C, (m2, m1), "C")
    D = as_matrix(D, (m2, m2), "D")
    check_nonnegative(B, "B")
    check_nonnegative(C, "C")
    big = np.block([[D, -C], [-B, A]])
    _mmatrix_check(big, "[[D, -C], [-B, A]]")
    M = np.kron(np.eye(m2), A) + np.kron(D.T, np.eye(m1))
    b = ProductSumBilinear([(np.eye(m1), C)], (m1, m2))
    return E3Problem(A, B, C, D, QveProblem(M, vec(B), b, tag="e3"))


@dataclass(frozen=True, eq=False)
class E4Problem:
    """``X = A + B X + C X^2`` in both vectorized and native form."""

    problem: QveProblem
    unilateral: UnilateralProblem

    @property
    def m(self):
        return self.unilateral.m

    def unvec(self, x):
        return unvec(x, (self.m, self.m))


def make_e4(A, B, C):
    """Vectorized form ``M = I kron (I - B)``, ``a = vec(A)``,
    ``b(x, y) = vec(C X Y)``, so that ``b(x, x) = vec(C X^2)``."""
    u = UnilateralProblem(A, B, C)
    m = u.m
    M = np.kron(np.eye(m), np.eye(m) - u.B)
    b = ProductSumBilinear([(u.C, np.eye(m))], (m, m))
    return E4Problem(QveProblem(M, vec(u.A), b, tag="e4"), u)


@dataclass(frozen=True, eq=False)
class TreeLikeProblem:
    """Tree-like process equation rewritten for ``Y = -X^{-1}``:
    ``(I - B) Y = I + sum_i A_i Y D_i Y``."""

    B: np.ndarray
    A: tuple
    D: tuple
    problem: QveProblem

    @property
    def m(self):
        return self.B.shape[0]

    def unvec(self, y):
        return unvec(y, (self.m, self.m))

    def to_x(self, y):
        """``X = -Y^{-1}``; raises ``LinAlgError`` if ``Y`` is singular."""
        Y = self.unvec(y)
        if np.linalg.cond(Y) > 1e14:
            raise np.linalg.LinAlgError("Y is numerically singular; X = -Y^{-1} undefined")
        return -np.linalg.inv(Y)

    def to_t(self, y):
        """``T = X + I``, the minimal nonnegative substochastic solution."""
        return self.to_x(y) + np.eye(self.m)


def make_treelike(B, A, D, tol=1e-12):
    """Build the tree-like problem from ``B`` and lists ``A = [A_i]``, ``D = [D_i]``.

    Each ``B + D_j + sum_i A_i`` must be stochastic to ``tol``.
    """
    B = as_square(B, name="B").astype(float)
    m = B.shape[0]
    A = tuple(as_square(Ai, m, f"A[{i}]").astype(float) for i, Ai in enumerate(A))
    D = tuple(as_square(Di, m, f"D[{i}]").astype(float) for i, Di in enumerate(D))
    if len(A) != len(D) or not A:
        raise DimensionError("A and D must be nonempty lists of the same length")
    for name, X in [("B", B), *((f"A[{i}]", X) for i, X in enumerate(A)), *((f"D[{i}]", X) for i, X in enumerate(D))]:
        check_nonnegative(X, name)
    SA = sum(A)
    for j, Dj in enumerate(D):
        rows = (B + Dj + SA).sum(axis=1)
        if np.max(np.abs(rows - 1)) > tol:
            raise ValueError(f"B + D[{j}] + sum A_i is not stochastic (row sums {rows})")
    eye = np.eye(m)
    M = np.kron(eye, eye - B)
    b = ProductSumBilinear(list(zip(A, D)), (m, m))
    return TreeLikeProblem(B, A, D, QveProblem(M, vec(eye), b, tag="treelike"))
