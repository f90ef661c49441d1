"""Dense linear-algebra substrate: symmetric eigendecomposition, pseudoinverse,
submatrix determinants, least squares, truncated-SVD baselines.

All matrices are plain float ndarrays in row-major order; index subsets are
0-based, strictly increasing integer arrays.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionError, ValidationError

# relative cutoff for numerical rank decisions, scaled by max(n, d) at use sites
RANK_RTOL = 1e-10


class SymmetricEigen(NamedTuple):
    eigenvalues: np.ndarray   # sorted descending
    eigenvectors: np.ndarray  # orthonormal columns, same order


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-d float array."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValidationError(f"{name} contains non-finite entries")
    return a


def as_vector(v, name: str = "vector") -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DimensionError(f"{name} must be 1-dimensional, got shape {v.shape}")
    if not np.isfinite(v).all():
        raise ValidationError(f"{name} contains non-finite entries")
    return v


def as_subset(indices, n: int, name: str = "subset") -> np.ndarray:
    """Validate a strictly increasing index set over range(n)."""
    s = np.asarray(indices, dtype=np.intp)
    if s.ndim != 1:
        raise DimensionError(f"{name} must be a flat index list")
    if s.size:
        if s.min() < 0 or s.max() >= n:
            raise ValidationError(f"{name} has indices outside [0, {n})")
        if np.any(np.diff(s) <= 0):
            raise ValidationError(f"{name} must be strictly increasing (got {s.tolist()})")
    return s


def check_symmetric(a: np.ndarray, rtol: float = 1e-12, name: str = "matrix") -> np.ndarray:
    """Require near-symmetry and return the symmetrized matrix."""
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    scale = max(1.0, float(np.abs(a).max()) if a.size else 0.0)
    asym = float(np.abs(a - a.T).max()) if a.size else 0.0
    if asym > rtol * scale:
        raise ValidationError(f"{name} is not symmetric (max asymmetry {asym:.3e})")
    return 0.5 * (a + a.T)


def eig_sym(a) -> SymmetricEigen:
    """Eigendecomposition of a symmetric matrix, eigenvalues sorted descending.

    Eigenvalues smaller than 1e-12 times the spectral radius are snapped to
    zero so that downstream probability computations stay nonnegative.
    """
    a = as_matrix(a)
    a = check_symmetric(a, rtol=1e-12)
    w, q = np.linalg.eigh(a)
    order = np.argsort(w)[::-1]
    w = w[order]
    q = q[:, order]
    if w.size:
        cap = 1e-12 * max(np.abs(w).max(), 0.0)
        w[np.abs(w) < cap] = 0.0
    return SymmetricEigen(w, q)


def pinv(a) -> np.ndarray:
    """Moore-Penrose pseudoinverse; singular values below
    1e-10 * max(shape) * sigma_max are treated as zero."""
    a = as_matrix(a)
    if a.size == 0:
        return a.T.copy()
    return np.linalg.pinv(a, rcond=RANK_RTOL * max(a.shape))


def det_submatrix(a, rows, cols) -> float:
    """Determinant of the square submatrix a[rows][:, cols]; empty subset -> 1."""
    a = as_matrix(a)
    rows = as_subset(rows, a.shape[0], "rows")
    cols = as_subset(cols, a.shape[1], "cols")
    if rows.size != cols.size:
        raise DimensionError(f"row and column subsets differ in size ({rows.size} vs {cols.size})")
    if rows.size == 0:
        return 1.0
    return float(np.linalg.det(a[np.ix_(rows, cols)]))


def lstsq(x, y) -> np.ndarray:
    """Minimum-norm least-squares solution of ||X w - y||^2."""
    x = as_matrix(x, "X")
    y = as_vector(y, "y")
    if x.shape[0] != y.shape[0]:
        raise DimensionError(f"X has {x.shape[0]} rows but y has length {y.shape[0]}")
    w, *_ = np.linalg.lstsq(x, y, rcond=RANK_RTOL * max(x.shape))
    return w


def numerical_rank(a) -> int:
    a = as_matrix(a)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > RANK_RTOL * max(a.shape) * s[0]))


def truncated_svd_error(a, r: int, norm: str = "fro2") -> float:
    """Error of the best rank-r approximation: sum of trailing singular values,
    squared for norm="fro2", plain for norm="nuclear"."""
    a = as_matrix(a)
    if not 0 <= r <= min(a.shape):
        raise ValidationError(f"rank r={r} outside [0, {min(a.shape)}]")
    if norm not in ("fro2", "nuclear"):
        raise ValidationError(f"unknown norm {norm!r}, expected 'fro2' or 'nuclear'")
    s = np.linalg.svd(a, compute_uv=False)
    tail = s[r:]
    return float(np.sum(tail**2)) if norm == "fro2" else float(np.sum(tail))
