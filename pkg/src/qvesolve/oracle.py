"""Reference answers for testing: extended-precision minimal solutions,
brute-force supports and closed-form scalar roots.

Nothing here shares code paths with the production solvers beyond the
problem container and the bilinear map's ``apply``.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NoSolutionError",
    "OracleSolution",
    "brute_support",
    "oracle_minimal",
    "scalar_roots",
]

_LD = np.longdouble


class NoSolutionError(RuntimeError):
    """No nonnegative solution could be certified."""


@dataclass(frozen=True)
class OracleSolution:
    """Minimal solution computed by :func:`oracle_minimal`.

    ``x_ext`` holds the iterate in ``np.longdouble``; ``x_ref`` is its
    rounding to double. ``residual_bound`` is the max-norm residual of
    ``x_ext`` evaluated in extended precision.
    """

    x_ref: np.ndarray
    method: str
    residual_bound: float
    iterations: int = 0
    x_ext: np.ndarray | None = None


def scalar_roots(Mcoef, acoef, Bcoef):
    """Smallest nonnegative root of ``B x^2 - M x + a = 0`` or ``None``.

    Uses ``x = 2a / (M + sqrt(M^2 - 4aB))``, which is free of cancellation
    for ``M > 0``.
    """
    Mc, ac, Bc = float(Mcoef), float(acoef), float(Bcoef)
    if Mc <= 0 or ac < 0 or Bc < 0:
        raise ValueError("need M > 0, a >= 0, B >= 0")
    disc = Mc * Mc - 4.0 * ac * Bc
    if disc < 0:
        return None
    return 2.0 * ac / (Mc + math.sqrt(disc))


def _refined_inverse(M, sweeps=3):
    # Newton-Schulz on top of the double-precision inverse
    Mx = M.astype(_LD)
    X = np.linalg.inv(M).astype(_LD)
    eye = np.eye(M.shape[0], dtype=_LD)
    for _ in range(sweeps):
        X = X + X @ (eye - Mx @ X)
    # M^{-1} >= 0 exactly; negative entries are rounding noise
    return np.maximum(X, 0)


def _residual_ld(p, Mx, ax, x):
    return Mx @ x - ax - p.b.apply(x, x)


def oracle_minimal(p, target_residual=None, method=None, maxit=200_000, guard=1e12):
    """Minimal nonnegative solution of ``p`` to extended precision.

    Parameters
    ----------
    p : QveProblem
    target_residual : float, optional
        Stop once the extended-precision residual is below this value.
        Defaults to ``1e-14 * (1 + max|a|)``.
    method : {None, "fp1-highprec", "scalar-closed-form"}
        ``None`` picks the closed form for ``n == 1``.
    maxit : int
        Iteration cap for the fixed-point iteration.
    guard : float
        Divergence threshold on the iterate max-norm.

    Raises
    ------
    NoSolutionError
        If the scalar discriminant is negative or the iterates pass ``guard``.
    RuntimeError
        If the iterates fail to increase monotonically or ``maxit`` is hit
        (e.g. on a critical problem, where convergence is sublinear).
    """
    ascale = 1.0 + float(np.max(np.abs(p.a)))
    target = 1e-14 * ascale if target_residual is None else float(target_residual)
    Mx, ax = p.M.astype(_LD), p.a.astype(_LD)
    if method is None:
        method = "scalar-closed-form" if p.n == 1 else "fp1-highprec"

    if method == "scalar-closed-form":
        if p.n != 1:
            raise ValueError("closed form needs n == 1")
        bcoef = float(p.b.apply(np.ones(1), np.ones(1))[0])
        root = scalar_roots(p.M[0, 0], p.a[0], bcoef)
        if root is None:
            raise NoSolutionError("A1 presumed violated: negative discriminant, no real root")
        x = np.array([root], dtype=_LD)
        res = float(np.max(np.abs(_residual_ld(p, Mx, ax, x))))
        return OracleSolution(np.array([root]), method, res, 0, x)

    if method != "fp1-highprec":
        raise ValueError(f"unknown oracle method {method!r}")
    Minv = _refined_inverse(p.M)
    x = np.zeros(p.n, dtype=_LD)
    slack = 8 * np.finfo(_LD).eps
    for k in range(1, maxit + 1):
        x_new = Minv @ (ax + p.b.apply(x, x))
        if np.any(x_new < x - slack * np.max(np.abs(x_new))):
            raise RuntimeError(f"oracle iterate decreased at step {k}")
        if not np.all(np.isfinite(x_new)) or np.max(x_new) > guard:
            raise NoSolutionError("A1 presumed violated: fixed-point iterates exceeded the divergence guard")
        stalled = np.array_equal(x_new, x)
        x = x_new
        res = float(np.max(np.abs(_residual_ld(p, Mx, ax, x))))
        if res <= target or stalled:
            return OracleSolution(x.astype(float), method, res, k, x)
    raise RuntimeError(f"oracle did not reach residual {target:g} in {maxit} steps (residual {res:.3g})")


def brute_support(p, steps=None):
    """Support of the minimal solution by literal pattern iteration.

    Iterates ``S <- pattern(M^{-1} a) | {k : (M^{-1} B)_{ijk} > 0, i, j in S}``
    to a fixed point. The pattern of ``M^{-1}`` comes from the explicit
    numerical inverse with relative threshold ``1e-13``; the tensor pattern
    comes from evaluating ``b`` on basis pairs.
    """
    n = p.n
    Minv = np.linalg.inv(p.M)
    minv_pat = Minv > 1e-13 * np.max(np.abs(Minv))
    T = p.b.to_dense().kij > 0
    # (M^{-1} B)[k, i, j] > 0 iff some l has Minv[k, l] > 0 and T[l, i, j] > 0
    MB = np.einsum("kl,lij->kij", minv_pat.astype(np.int64), T.astype(np.int64)) > 0
    seed = (minv_pat.astype(np.int64) @ (p.a > 0).astype(np.int64)) > 0
    S = seed.copy()
    for _ in range(n + 1 if steps is None else int(steps)):
        grown = seed | np.any(MB[:, S][:, :, S], axis=(1, 2))
        if np.array_equal(grown, S):
            break
        S = grown
    return tuple(int(i) for i in np.flatnonzero(S))
