"""
Dense float64 primitives shared by every module.

Matrices and vectors are plain `numpy.ndarray` objects; `as_matrix` and
`as_vector` are the validating constructors.
"""

import numpy as np

from ..exceptions import DimMismatchError, NonFiniteError, ZeroVectorError


ZERO_NORM = 1e-12


def as_vector(data, what='vector'):
    v = np.array(data, dtype=np.float64)
    if v.ndim != 1:
        raise DimMismatchError(v.shape, '(dim,)', f"{what} must be one-dimensional")
    if not np.all(np.isfinite(v)):
        raise NonFiniteError(what)
    return v


def as_matrix(data, what='matrix'):
    m = np.array(data, dtype=np.float64)
    if m.ndim != 2:
        raise DimMismatchError(m.shape, '(rows, cols)', f"{what} must be two-dimensional")
    if not np.all(np.isfinite(m)):
        raise NonFiniteError(what)
    return m


def l2_normalize(v):
    v = np.asarray(v, dtype=np.float64)
    norm = np.sqrt(np.dot(v, v))
    if norm < ZERO_NORM:
        raise ZeroVectorError(norm)
    return v / norm


def normalize_rows(m):
    m = np.asarray(m, dtype=np.float64)
    norms = np.sqrt(np.sum(m*m, axis=-1, keepdims=True))
    if np.any(norms < ZERO_NORM):
        raise ZeroVectorError(float(norms.min()), 'cannot normalize rows')
    return m / norms


def cosine(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimMismatchError(a.shape, b.shape)
    value = np.dot(l2_normalize(a), l2_normalize(b))
    return float(min(1.0, max(-1.0, value)))


def cosine_matrix(a, b):
    """Pairwise cosines between the rows of `a` (M x d) and `b` (L x d)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape[-1] != b.shape[-1]:
        raise DimMismatchError(a.shape, b.shape)
    return normalize_rows(a) @ normalize_rows(b).T


def softmax(x, axis=-1):
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise NonFiniteError('softmax input')
    shifted = x - np.max(x, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def log_softmax(x, axis=-1):
    x = np.asarray(x, dtype=np.float64)
    m = np.max(x, axis=axis, keepdims=True)
    return x - (m + np.log(np.sum(np.exp(x - m), axis=axis, keepdims=True)))


def matmul(a, b):
    """
    `a @ b` with each entry summed over `k` in ascending order, so the result
    does not depend on the BLAS build. Used where bit-stable output matters.
    """

    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimMismatchError(a.shape, b.shape, 'matmul shapes are not aligned')
    out = np.zeros((a.shape[0], b.shape[1]))
    for k in range(a.shape[1]):
        out += a[:, k:k + 1]*b[k:k + 1, :]
    return out
