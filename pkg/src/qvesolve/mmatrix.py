"""M-matrix classification, factorized solves and nonnegative spectral radii.

A Z-matrix ``Z`` is written as ``s I - P`` with ``s = max(diag Z) + 1`` and
``P >= 0``; it is a nonsingular M-matrix when ``rho(P) < s`` and a singular
one when ``rho(P) = s``.
"""

import enum
import warnings
from collections import deque
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from ._validation import NotZMatrixError, as_square, as_vector, check_zmatrix

__all__ = [
    "Classification",
    "MMatrixHandle",
    "NotZMatrixError",
    "SingularMatrixError",
    "SpectralEstimate",
    "classify_zmatrix",
    "is_irreducible",
    "msolve",
    "spectral_radius",
]

DEFAULT_CLASSIFY_TOL = 1e-10


class Classification(str, enum.Enum):
    NONSINGULAR = "nonsingular-M"
    SINGULAR = "singular-M"
    NOT_M = "not-M"


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised by :func:`msolve` when the LU factorization has a zero pivot."""

    def __init__(self, pivot):
        self.pivot = int(pivot)
        super().__init__(f"singular factorization: zero pivot at index {self.pivot}")


class SpectralEstimate(NamedTuple):
    value: float
    converged: bool
    iterations: int
    lower: float
    upper: float


def spectral_radius(P, tol=1e-12, maxit=10_000):
    """Estimate the spectral radius of a nonnegative matrix by power iteration.

    The iteration runs on ``P + sigma I`` with ``sigma = ||P||_inf / 2`` (which
    removes the periodicity of irreducible cyclic matrices without changing
    the Perron vector) from the all-ones vector. It stops when successive
    estimates satisfy ``|l_{k+1} - l_k| <= tol |l_k|`` or when the
    Collatz-Wielandt bounds ``min(Pv / v) <= rho <= max(Pv / v)`` close to
    within ``tol``.

    For reducible ``P`` the Perron vector may have zero entries and the
    returned value can underestimate ``rho(P)`` when the iteration is stopped
    early; the ``upper`` bound stays valid.

    Returns
    -------
    SpectralEstimate
        ``value`` is the estimate; ``converged`` is False if ``maxit`` was
        reached, in which case ``value`` is the last estimate.
    """
    P = as_square(P, name="P")
    if np.any(P < 0):
        raise ValueError("spectral_radius expects a nonnegative matrix")
    n = P.shape[0]
    norm = np.max(np.sum(P, axis=1))
    if norm == 0.0:
        return SpectralEstimate(0.0, True, 0, 0.0, 0.0)
    sigma = 0.5 * norm
    S = P + sigma * np.eye(n)
    v = np.ones(n)
    lam_prev = None
    lam, lo, hi = norm, 0.0, norm
    for it in range(1, maxit + 1):
        w = S @ v
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(v > 0, w / v, np.nan)
        if np.all(v > 0):
            lo = max(lo, float(np.nanmin(ratios)) - sigma)
            hi = min(hi, float(np.nanmax(ratios)) - sigma)
        lam = float(np.max(w) / np.max(v)) - sigma
        v = w / np.max(w)
        if hi - lo <= tol * max(hi, np.finfo(float).tiny):
            return SpectralEstimate(0.5 * (hi + lo), True, it, lo, hi)
        if lam_prev is not None and abs(lam - lam_prev) <= tol * abs(lam_prev):
            return SpectralEstimate(lam, True, it, lo, hi)
        lam_prev = lam
    return SpectralEstimate(lam, False, maxit, lo, hi)


def classify_zmatrix(Z, tol=DEFAULT_CLASSIFY_TOL, maxit=2_000, ztol=0.0):
    """Classify a Z-matrix as a nonsingular M-matrix, singular M-matrix or neither.

    Power iteration with Collatz-Wielandt bounds is run on ``P = sI - Z``.
    The bounds give certified answers quickly in the common well-separated
    cases; if neither bound nor the estimate settles the question within
    ``maxit`` steps, the spectral radius is taken from a dense eigenvalue
    computation instead.

    Parameters
    ----------
    ztol : float
        Off-diagonal entries up to ``ztol`` are treated as roundoff and
        clipped to zero; larger positive entries raise ``NotZMatrixError``.
    """
    Z = np.array(as_square(Z, name="Z"), dtype=float)
    check_zmatrix(Z, "Z", tol=ztol)
    if ztol > 0:
        off = ~np.eye(Z.shape[0], dtype=bool)
        Z[off & (Z > 0)] = 0.0
    if np.any(np.diag(Z) < 0):
        return Classification.NOT_M
    s = float(np.max(np.diag(Z))) + 1.0
    P = s * np.eye(Z.shape[0]) - Z
    if not np.all(np.isfinite(P)):
        return Classification.NOT_M
    lo_cut, hi_cut = s * (1 - tol), s * (1 + tol)

    n = P.shape[0]
    v = np.ones(n)
    lam_prev = None
    for _ in range(maxit):
        w = P @ v
        ratios = w / v
        lo, hi = float(np.min(ratios)), float(np.max(ratios))
        if hi < lo_cut:
            return Classification.NONSINGULAR
        if lo > hi_cut:
            return Classification.NOT_M
        lam = float(np.max(w) / np.max(v))
        settled = lam_prev is not None and abs(lam - lam_prev) <= tol * lam
        if settled and lam > hi_cut:
            return Classification.NOT_M
        if lo >= lo_cut and hi <= hi_cut:
            return Classification.SINGULAR
        lam_prev = lam
        v = w / np.max(w)
        if np.any(v <= 0):
            break
    rho = float(np.max(np.abs(np.linalg.eigvals(P))))
    if rho < lo_cut:
        return Classification.NONSINGULAR
    if rho > hi_cut:
        return Classification.NOT_M
    return Classification.SINGULAR


class MMatrixHandle:
    """A Z-matrix together with its classification and LU factorization.

    The handle is immutable; :func:`msolve` (or :meth:`solve`) reuses the
    stored factorization.
    """

    def __init__(self, Z, tol=DEFAULT_CLASSIFY_TOL, ztol=0.0):
        Z = np.array(as_square(Z, name="Z"), dtype=float)
        self.n = Z.shape[0]
        self._diag = None
        if not np.any(Z - np.diag(np.diag(Z))):
            d = np.diag(Z).copy()
            self._diag = d
            if np.any(d < 0):
                self.classification = Classification.NOT_M
            elif np.min(d) <= tol * (float(np.max(d)) + 1.0):
                self.classification = Classification.SINGULAR
            else:
                self.classification = Classification.NONSINGULAR
            zero = np.flatnonzero(d == 0)
            self.zero_pivot = int(zero[0]) if zero.size else None
            Z.setflags(write=False)
            self.Z = Z
            return
        self.classification = classify_zmatrix(Z, tol=tol, ztol=ztol)
        Z.setflags(write=False)
        self.Z = Z
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            self._lu, self._piv = sla.lu_factor(Z, check_finite=False)
        diag = np.abs(np.diag(self._lu))
        scale = max(float(np.max(np.abs(Z))), np.finfo(float).tiny)
        zero = np.flatnonzero(diag <= np.finfo(float).eps * scale * 1e-3)
        self.zero_pivot = int(zero[0]) if zero.size else None

    @property
    def is_nonsingular_m(self):
        return self.classification == Classification.NONSINGULAR

    def solve(self, v):
        """Return ``Z^{-1} v`` (vector or matrix right-hand side)."""
        if self.zero_pivot is not None:
            raise SingularMatrixError(self.zero_pivot)
        v = np.asarray(v, dtype=float)
        if self._diag is not None:
            return v / self._diag if v.ndim == 1 else v / self._diag[:, None]
        return sla.lu_solve((self._lu, self._piv), v, check_finite=False)

    def inverse(self):
        return self.solve(np.eye(self.n))

    def __repr__(self):
        return f"MMatrixHandle(n={self.n}, {self.classification.value})"


def msolve(h, v):
    """Apply ``Z^{-1}`` to ``v`` using the factorization stored in ``h``."""
    v = as_vector(v, h.n, "v") if np.ndim(v) <= 1 else np.asarray(v, dtype=float)
    return h.solve(v)


def is_irreducible(P):
    """True iff the directed graph of the nonzero entries is strongly connected.

    Self-loops are ignored; a 1x1 matrix counts as irreducible.
    """
    P = as_square(P, name="P")
    n = P.shape[0]
    if n == 1:
        return True
    adj = (P != 0) & ~np.eye(n, dtype=bool)

    def reaches_all(a):
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for j in np.flatnonzero(a[i] & ~seen):
                seen[j] = True
                queue.append(j)
        return bool(seen.all())

    return reaches_all(adj) and reaches_all(adj.T)
