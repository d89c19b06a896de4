"""Nonnegative vector bilinear maps b(x, y).

Every realization exposes the same four capabilities:

``apply(x, y)``
    the vector ``b(x, y)``;
``left_matrix(x)``
    the matrix of ``w -> b(x, w)``;
``right_matrix(y)``
    the matrix of ``w -> b(w, y)``;
``swap()``
    the map ``(x, y) -> b(y, x)``.

Dense tensors follow the convention ``b(x, y)_k = sum_ij B[i, j, k] x_i y_j``
when supplied by users; internally the tensor is held output-major as
``T[k, i, j] = B[i, j, k]`` so that ``left_matrix`` and ``right_matrix`` are
single contractions over a contiguous block.
"""

import numpy as np

from ._validation import DimensionError, as_square, check_nonnegative


def _frozen(arr):
    arr = np.array(arr, dtype=float, copy=True)
    arr.setflags(write=False)
    return arr


class BilinearMap:
    """Base class. Subclasses implement :meth:`apply`; the matrix forms have
    basis-evaluation fallbacks."""

    #: whether ``right_matrix(y)`` is diagonal for every ``y``
    right_matrix_is_diagonal = False

    def __init__(self, n):
        n = int(n)
        if n < 1:
            raise ValueError("dimension must be positive")
        self.n = n

    def apply(self, x, y):
        raise NotImplementedError

    def __call__(self, x, y):
        return self.apply(x, y)

    def _check(self, x, name="x"):
        x = np.asarray(x)
        if x.shape != (self.n,):
            raise DimensionError(f"{name} has shape {x.shape}, expected ({self.n},)")
        return x

    def left_matrix(self, x):
        x = self._check(x)
        eye = np.eye(self.n)
        return np.column_stack([self.apply(x, eye[j]) for j in range(self.n)])

    def right_matrix(self, y):
        y = self._check(y, "y")
        eye = np.eye(self.n)
        return np.column_stack([self.apply(eye[i], y) for i in range(self.n)])

    def swap(self):
        return SwappedBilinear(self)

    def to_dense(self):
        """Materialize the tensor by evaluating on all basis pairs."""
        eye = np.eye(self.n)
        T = np.empty((self.n, self.n, self.n))
        for i in range(self.n):
            for j in range(self.n):
                T[:, i, j] = self.apply(eye[i], eye[j])
        return DenseBilinear(T, layout="kij")

    def __add__(self, other):
        if not isinstance(other, BilinearMap):
            return NotImplemented
        return SumBilinear(self, other)

    def __mul__(self, alpha):
        return ScaledBilinear(self, alpha)

    __rmul__ = __mul__


class DenseBilinear(BilinearMap):
    """Bilinear map given by a nonnegative ``n x n x n`` tensor.

    Parameters
    ----------
    B : array_like, shape (n, n, n)
        Tensor entries. With ``layout="ijk"`` (default), ``B[i, j, k]`` is the
        coefficient of ``x_i y_j`` in output entry ``k``. ``layout="kij"``
        takes the internal output-major order directly.
    """

    def __init__(self, B, layout="ijk", check=True):
        B = np.asarray(B, dtype=float)
        if B.ndim != 3 or not (B.shape[0] == B.shape[1] == B.shape[2]):
            raise DimensionError(f"tensor must be n x n x n, got {B.shape}")
        if layout == "ijk":
            T = np.transpose(B, (2, 0, 1))
        elif layout == "kij":
            T = B
        else:
            raise ValueError(f"unknown layout {layout!r}")
        if check:
            check_nonnegative(T, "bilinear tensor")
        super().__init__(B.shape[0])
        self._T = _frozen(np.ascontiguousarray(T))

    @property
    def kij(self):
        """Output-major tensor ``T[k, i, j]``."""
        return self._T

    @property
    def tensor(self):
        """Tensor in user order ``B[i, j, k]``."""
        return np.transpose(self._T, (1, 2, 0))

    def apply(self, x, y):
        x = self._check(x)
        y = self._check(y, "y")
        return np.einsum("kij,i,j->k", self._T, x, y)

    def left_matrix(self, x):
        x = self._check(x)
        return np.einsum("kij,i->kj", self._T, x)

    def right_matrix(self, y):
        y = self._check(y, "y")
        return np.einsum("kij,j->ki", self._T, y)

    def swap(self):
        return DenseBilinear(np.transpose(self._T, (0, 2, 1)), layout="kij", check=False)

    def to_dense(self):
        return self

    def __repr__(self):
        return f"DenseBilinear(n={self.n})"


class ZeroBilinear(BilinearMap):
    right_matrix_is_diagonal = True

    def apply(self, x, y):
        x = self._check(x)
        self._check(y, "y")
        return np.zeros(self.n, dtype=np.result_type(x, float))

    def left_matrix(self, x):
        self._check(x)
        return np.zeros((self.n, self.n))

    def right_matrix(self, y):
        self._check(y, "y")
        return np.zeros((self.n, self.n))

    def swap(self):
        return self

    def __repr__(self):
        return f"ZeroBilinear(n={self.n})"


class SwappedBilinear(BilinearMap):
    """``(x, y) -> b(y, x)``; swapping again returns the wrapped map."""

    def __init__(self, base):
        super().__init__(base.n)
        self.base = base

    def apply(self, x, y):
        return self.base.apply(y, x)

    def left_matrix(self, x):
        return self.base.right_matrix(x)

    def right_matrix(self, y):
        return self.base.left_matrix(y)

    def swap(self):
        return self.base

    def __repr__(self):
        return f"SwappedBilinear({self.base!r})"


class SumBilinear(BilinearMap):
    def __init__(self, *terms):
        n = {t.n for t in terms}
        if len(n) != 1:
            raise DimensionError("summands have different dimensions")
        super().__init__(n.pop())
        self.terms = tuple(terms)
        self.right_matrix_is_diagonal = all(t.right_matrix_is_diagonal for t in terms)

    def apply(self, x, y):
        return sum(t.apply(x, y) for t in self.terms)

    def left_matrix(self, x):
        return sum(t.left_matrix(x) for t in self.terms)

    def right_matrix(self, y):
        return sum(t.right_matrix(y) for t in self.terms)

    def swap(self):
        return SumBilinear(*(t.swap() for t in self.terms))


class ScaledBilinear(BilinearMap):
    def __init__(self, base, alpha):
        alpha = float(alpha)
        if alpha < 0:
            raise ValueError("scale factor must be nonnegative")
        super().__init__(base.n)
        self.base = base
        self.alpha = alpha
        self.right_matrix_is_diagonal = base.right_matrix_is_diagonal

    def apply(self, x, y):
        return self.alpha * self.base.apply(x, y)

    def left_matrix(self, x):
        return self.alpha * self.base.left_matrix(x)

    def right_matrix(self, y):
        return self.alpha * self.base.right_matrix(y)

    def swap(self):
        return ScaledBilinear(self.base.swap(), self.alpha)


class ProjectedBilinear(BilinearMap):
    """``(x, y) -> Pi b(Pi^T x, Pi^T y)`` where ``Pi`` keeps the entries in
    ``index``."""

    def __init__(self, base, index):
        index = np.asarray(index, dtype=int)
        if index.ndim != 1 or index.size == 0:
            raise ValueError("projection needs a nonempty index list")
        super().__init__(index.size)
        self.base = base
        self.index = index
        self.right_matrix_is_diagonal = base.right_matrix_is_diagonal

    def _embed(self, x):
        full = np.zeros(self.base.n, dtype=np.result_type(x, float))
        full[self.index] = x
        return full

    def apply(self, x, y):
        x = self._check(x)
        y = self._check(y, "y")
        return self.base.apply(self._embed(x), self._embed(y))[self.index]

    def left_matrix(self, x):
        L = self.base.left_matrix(self._embed(self._check(x)))
        return L[np.ix_(self.index, self.index)]

    def right_matrix(self, y):
        R = self.base.right_matrix(self._embed(self._check(y, "y")))
        return R[np.ix_(self.index, self.index)]


class PremultipliedBilinear(BilinearMap):
    """``(x, y) -> Q b(x, y)`` for a fixed matrix ``Q``.

    Nonnegativity of the result requires ``Q >= 0``; this is not enforced so
    that roundoff-level negative entries of computed inverses are tolerated.
    """

    def __init__(self, Q, base):
        Q = as_square(Q, base.n, "Q")
        super().__init__(base.n)
        self.Q = _frozen(Q)
        self.base = base

    def apply(self, x, y):
        return self.Q @ self.base.apply(x, y)

    def left_matrix(self, x):
        return self.Q @ self.base.left_matrix(x)

    def right_matrix(self, y):
        return self.Q @ self.base.right_matrix(y)

    def swap(self):
        return PremultipliedBilinear(self.Q, self.base.swap())


def agree_as_quadratic(b1, b2, n_probes=4, rtol=1e-12, seed=0):
    """Check ``b1(x, x) == b2(x, x)`` on deterministic random nonnegative probes."""
    rng = np.random.default_rng(seed)
    for _ in range(n_probes):
        x = rng.random(b1.n)
        u, v = b1.apply(x, x), b2.apply(x, x)
        scale = 1.0 + max(np.max(np.abs(u)), np.max(np.abs(v)))
        if np.max(np.abs(u - v)) > rtol * scale:
            return False
    return True


def agree_as_bilinear(b1, b2, n_probes=4, rtol=1e-12, seed=0):
    """Check ``b1(x, y) == b2(x, y)`` on random probe pairs."""
    rng = np.random.default_rng(seed)
    for _ in range(n_probes):
        x, y = rng.random(b1.n), rng.random(b1.n)
        u, v = b1.apply(x, y), b2.apply(x, y)
        scale = 1.0 + max(np.max(np.abs(u)), np.max(np.abs(v)))
        if np.max(np.abs(u - v)) > rtol * scale:
            return False
    return True
