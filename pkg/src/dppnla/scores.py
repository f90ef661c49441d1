"""Row importance scores and i.i.d. sampling distributions.

Exact leverage scores l_i = x_i^T (X^T X)^+ x_i, their ridge-regularized
variant, coherence, effective dimension, and a sketch-based fast
approximation of the leverage scores.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .errors import NumericalDegeneracyError, ValidationError

# sketch size constants; see leverage_approx
SKETCH_ROWS_FACTOR = 4.0   # SRHT rows per d*log2(n)
SKETCH_COLS_FACTOR = 8.0   # Gaussian columns per log2(n)


def leverage_exact(x) -> np.ndarray:
    """Exact leverage scores; zero rows get score 0, sum equals rank(X)."""
    x = linalg.as_matrix(x, "X")
    g = x.T @ x
    ginv = linalg.pinv(g)
    lev = np.einsum("ij,ij->i", x @ ginv, x)
    return np.clip(lev, 0.0, 1.0)


def ridge_leverage_exact(x, lam: float) -> np.ndarray:
    """Ridge leverage scores x_i^T (X^T X + lam I)^{-1} x_i for lam > 0."""
    x = linalg.as_matrix(x, "X")
    if not lam > 0:
        raise ValidationError(f"ridge parameter must be positive, got {lam}")
    d = x.shape[1]
    g = x.T @ x + lam * np.eye(d)
    lev = np.einsum("ij,ji->i", x, np.linalg.solve(g, x.T))
    return np.clip(lev, 0.0, 1.0)


def coherence(x) -> float:
    """mu = max_i (n/d) l_i, the non-uniformity of the leverage scores."""
    x = linalg.as_matrix(x, "X")
    n, d = x.shape
    return float(n / d * leverage_exact(x).max())


def effective_dimension(x, lam: float) -> float:
    """Sum of ridge leverage scores; equals tr(X X^T (X X^T + lam I)^{-1})."""
    return float(ridge_leverage_exact(x, lam).sum())


def sampling_distribution(x, kind: str) -> np.ndarray:
    """Row-sampling probabilities: 'uniform', 'squared_norm' or 'leverage'."""
    x = linalg.as_matrix(x, "X")
    n, d = x.shape
    if kind == "uniform":
        return np.full(n, 1.0 / n)
    if kind == "squared_norm":
        norms = np.einsum("ij,ij->i", x, x)
        total = norms.sum()
        if total <= 0:
            raise ValidationError("squared-norm distribution undefined for an all-zero matrix")
        return norms / total
    if kind == "leverage":
        lev = leverage_exact(x)
        total = lev.sum()
        if total <= 0:
            raise ValidationError("leverage distribution undefined for an all-zero matrix")
        return lev / total
    raise ValidationError(f"unknown sampling kind {kind!r}")


def leverage_approx(
    x,
    seed,
    rows_factor: float = SKETCH_ROWS_FACTOR,
    cols_factor: float = SKETCH_COLS_FACTOR,
    max_retries: int = 3,
) -> np.ndarray:
    """Fast approximate leverage scores via a two-stage sketch.

    Stage one subsamples the randomized Hadamard transform of X (sign flips,
    Hadamard, ceil(rows_factor * d * log2 n) sampled rows) to form an
    invertible proxy R of X^T X. Stage two estimates the squared row norms of
    X R^{-1/2}: through a Gaussian sketch with ceil(cols_factor * log2 n)
    columns when that is narrower than d, and exactly otherwise (a sketch
    wider than d costs more than the exact product and is never used).
    The target accuracy is a constant multiplicative factor per score.

    Deterministic given (x, seed). Retries with a derived seed when the
    sketched Gram proxy is numerically singular.
    """
    from ._srht import srht_transform

    x = linalg.as_matrix(x, "X")
    n, d = x.shape
    if n < d:
        raise ValidationError(f"need n >= d, got shape {x.shape}")
    n2 = 1 << max(0, n - 1).bit_length()
    m = int(np.ceil(rows_factor * d * np.log2(max(n, 2))))
    r = int(np.ceil(cols_factor * np.log2(max(n, 2))))

    for attempt in range(max_retries):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=[int(seed), attempt]))
        signs = np.where(rng.integers(0, 2, size=n) == 0, -1.0, 1.0)
        work, x32 = srht_transform(x, signs)
        rows = rng.integers(0, n2, size=m)
        xs = work[rows]
        # S = sqrt(n2/m) P H_orth D with H_orth = H/sqrt(n2); scales fold to 1/m
        rmat = (xs.T @ xs).astype(np.float64) / m
        w, v = np.linalg.eigh(rmat)
        if w[-1] <= 0 or w[0] <= linalg.RANK_RTOL * max(n, d) * w[-1]:
            continue  # sketch lost rank, retry with fresh randomness
        w = np.maximum(w, 1e-12 * w[-1])
        whitener = ((v / np.sqrt(w)) @ v.T).astype(np.float32)
        if r < d:
            gauss = (rng.standard_normal((d, r)) / np.sqrt(r)).astype(np.float32)
            z = x32 @ (whitener @ gauss)
        else:
            z = x32 @ whitener
        return np.einsum("ij,ij->i", z, z).astype(np.float64)

    raise NumericalDegeneracyError(
        f"sketch rank deficient after {max_retries} attempts (n={n}, d={d}, m={m})"
    )
