"""Input coercion and shape/sign checks shared by the public constructors."""

import numpy as np


class DimensionError(ValueError):
    """Operand shapes do not agree."""


class NotZMatrixError(ValueError):
    """A matrix required to be a Z-matrix has a positive off-diagonal entry."""


def as_vector(x, n=None, name="x"):
    """Return ``x`` as a 1-D float array, optionally checking its length."""
    arr = np.asarray(x)
    if arr.dtype.kind not in "fc":
        arr = arr.astype(float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be a vector, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise DimensionError(f"{name} has length {arr.shape[0]}, expected {n}")
    return arr


def as_square(A, n=None, name="A"):
    """Return ``A`` as a square 2-D float array."""
    arr = np.asarray(A)
    if arr.dtype.kind not in "fc":
        arr = arr.astype(float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise DimensionError(f"{name} is {arr.shape[0]}x{arr.shape[0]}, expected {n}x{n}")
    return arr


def as_matrix(A, shape=None, name="A"):
    arr = np.asarray(A, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be a matrix, got shape {arr.shape}")
    if shape is not None and arr.shape != tuple(shape):
        raise DimensionError(f"{name} has shape {arr.shape}, expected {tuple(shape)}")
    return arr


def check_nonnegative(arr, name, tol=0.0):
    """Raise ``ValueError`` naming the first entry below ``-tol``."""
    arr = np.asarray(arr)
    bad = np.argwhere(arr < -tol)
    if bad.size:
        idx = tuple(int(i) for i in bad[0])
        raise ValueError(f"{name} must be nonnegative; entry {idx} is {float(arr[idx])!r}")


def check_zmatrix(Z, name="matrix", tol=0.0):
    """Raise ``NotZMatrixError`` if an off-diagonal entry exceeds ``tol``."""
    off = Z - np.diag(np.diag(Z))
    bad = np.argwhere(off > tol)
    if bad.size:
        i, j = (int(v) for v in bad[0])
        raise NotZMatrixError(
            f"{name}: positive off-diagonal entry at ({i},{j}) = {float(Z[i, j])!r}"
        )
