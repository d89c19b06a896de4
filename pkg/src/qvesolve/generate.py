"""Seeded random instances with supersolution certificates.

Every generator draws from ``numpy.random.default_rng(seed)`` so a fixed
seed gives the same file. Knobs:

``scale``
    generic: size of the quadratic term relative to ``M``; e1: ``b(e, e)``
    level in ``(0, 1)``; e2: bound on the row sums of ``P``, ``Pt``;
    e3: diagonal-dominance margin of the block M-matrix; e4: row-sum level
    of ``A + B + C`` in ``(0, 1]``; treelike: probability mass of ``D_j``.
``density``
    fraction of structurally nonzero entries in the random matrices.

The E2 family is synthetic: ``P`` and ``Pt`` are uniform on
``[0, scale / m]`` entrywise, masked by ``density``.
"""

import numpy as np

from .core import certify_supersolution, check_supersolution, derivative
from .mmatrix import MMatrixHandle
from .newton import newton
from .oracle import scalar_roots
from .problem_io import ProblemFile, build
from .report import SolveOptions

__all__ = ["GenerationError", "find_supersolution", "generate"]

DEFAULT_SCALE = {"generic": 0.5, "e1": 0.5, "e2": 0.1, "e3": 0.2, "e4": 1.0, "treelike": 0.2}


class GenerationError(ValueError):
    """Knobs out of range or no supersolution could be certified."""


def find_supersolution(p):
    """Return ``y >= 0`` with ``F(y) >= 0`` or raise :class:`GenerationError`.

    Tries multiples ``c e`` first; otherwise solves the equation and uses
    ``y = x* + eps F'_{x*}^{-1} e``, for which ``F(y) = eps e - eps^2 b(v, v)``.
    """
    e = np.ones(p.n)
    for c in np.geomspace(1e-3, 1e3, 61):
        if check_supersolution(p, c * e, tol=0.0):
            return c * e
    rep = newton(p, SolveOptions(tol=1e-13, maxit=200))
    failure = f"newton status {rep.status.value}, residual {rep.residual_norm:.3g}"
    if rep.converged:
        h = MMatrixHandle(derivative(p, rep.x))
        if h.is_nonsingular_m:
            v = np.maximum(h.solve(e), 0.0)
            eps = min(1.0, 0.5 / max(float(np.max(p.b.apply(v, v))), 1e-300))
            y = rep.x + eps * v
            if check_supersolution(p, y, tol=0.0):
                return y
            failure = f"min F(y) = {float(np.min(p.M @ y - p.a - p.b.apply(y, y)))!r}"
        else:
            failure = "F' at the computed solution is not a nonsingular M-matrix"
    raise GenerationError(f"no supersolution certified ({failure})")


def _mask(rng, shape, density):
    return rng.random(shape) < density if density < 1 else np.ones(shape, dtype=bool)


def _generic(rng, n, scale, density):
    off = -rng.random((n, n)) * _mask(rng, (n, n), density) / n
    np.fill_diagonal(off, 0.0)
    a = rng.random(n) * _mask(rng, n, density)
    B = rng.random((n, n, n)) * _mask(rng, (n, n, n), density) * scale / n**2
    bee = B.sum(axis=(0, 1))
    # diagonal makes F(e) = 0.1 e, so e is a strict supersolution
    M = off + np.diag(-off.sum(axis=1) + a + bee + 0.1)
    return {"M": M, "a": a, "B": B}


def _e1(rng, n, scale, density):
    if not 0 < scale < 1:
        raise GenerationError("e1 needs 0 < scale < 1")
    B = rng.random((n, n, n)) * _mask(rng, (n, n, n), density)
    sums = B.sum(axis=(0, 1))
    sums[sums == 0] = 1.0
    target = scale * rng.uniform(0.5, 1.0, n)
    B = B * (target / sums)
    return {"a": 1.0 - B.sum(axis=(0, 1)), "B": B, "normalized": True}


def _e2(rng, m, scale, density):
    P = rng.random((m, m)) * _mask(rng, (m, m), density) * scale / m
    Pt = rng.random((m, m)) * _mask(rng, (m, m), density) * scale / m
    return {"P": P, "Ptilde": Pt}


def _e3(rng, m, scale, density):
    k = 2 * m
    off = rng.random((k, k)) * _mask(rng, (k, k), density)
    np.fill_diagonal(off, 0.0)
    big = np.diag(off.sum(axis=1) * (1 + scale) + scale) - off
    D, C = big[:m, :m], -big[:m, m:]
    B, A = -big[m:, :m], big[m:, m:]
    return {"A": A, "B": B, "C": C, "D": D}


def _drift(A, C, S):
    vals, vecs = np.linalg.eig(S.T)
    pi = np.real(vecs[:, np.argmin(np.abs(vals - 1))])
    return float(pi / pi.sum() @ (C - A) @ np.ones(S.shape[0]))


def _e4(rng, m, scale, density):
    if not 0 < scale <= 1:
        raise GenerationError("e4 needs 0 < scale <= 1")
    for _ in range(1000):
        W = rng.random((m, 3 * m)) * _mask(rng, (m, 3 * m), density)
        if np.any(W.sum(axis=1) == 0):
            continue
        W = W / W.sum(axis=1, keepdims=True) * scale
        A, B, C = W[:, :m], W[:, m : 2 * m], W[:, 2 * m :]
        # stay away from the null-recurrent case
        if scale < 1 or abs(_drift(A, C, A + B + C)) > 0.05:
            return {"A": A, "B": B, "C": C}
    raise GenerationError("could not draw a non-critical e4 instance")


def _treelike(rng, m, scale, density, d=2):
    if not 0 < scale < 0.5:
        raise GenerationError("treelike needs 0 < scale < 0.5")

    def rows(total):
        X = rng.random((m, m)) * _mask(rng, (m, m), density) + 1e-3
        return X / X.sum(axis=1, keepdims=True) * total

    # D_j carries mass scale, the A_i carry 0.5 in total, B the rest
    B = rows(0.5 - scale)
    A = [rows(0.5 / d) for _ in range(d)]
    D = [rows(scale) for _ in range(d)]
    return {"B": B, "A": A, "D": D}


_MAKERS = {"generic": _generic, "e1": _e1, "e2": _e2, "e3": _e3, "e4": _e4, "treelike": _treelike}


def generate(tag, size, seed=0, scale=None, density=1.0):
    """Return a :class:`ProblemFile` for model ``tag`` with a certified supersolution.

    ``size`` is ``n`` for generic/e1 and the block size ``m`` otherwise. A
    generic instance of size 1 also records its closed-form root under
    ``expected``.
    """
    if tag not in _MAKERS:
        raise GenerationError(f"unknown model {tag!r}; choose from {sorted(_MAKERS)}")
    size = int(size)
    if size < 1:
        raise GenerationError("size must be positive")
    if not 0 < density <= 1:
        raise GenerationError("density must lie in (0, 1]")
    scale = DEFAULT_SCALE[tag] if scale is None else float(scale)
    if scale <= 0:
        raise GenerationError("scale must be positive")
    rng = np.random.default_rng(seed)
    data = _MAKERS[tag](rng, size, scale, density)
    pf = ProblemFile(tag, data, meta={"seed": int(seed), "size": size, "scale": scale, "density": float(density)})
    p = build(pf).problem
    y = find_supersolution(p)
    certify_supersolution(p, y, tol=0.0)
    pf.supersolution = y
    if tag == "generic" and size == 1:
        root = scalar_roots(p.M[0, 0], p.a[0], p.b.apply(np.ones(1), np.ones(1))[0])
        pf.expected = {"x": np.array([root])}
    return pf
