"""Sketched least-squares estimators and their exact-expectation oracles.

The i.i.d. row-sampling estimator rescales sampled rows by 1/sqrt(k p_j);
the determinantal estimators solve the subproblem indexed by a DPP sample
with no rescaling at all, which is what makes them unbiased. Expectation
oracles enumerate every subset with its exact probability, so unbiasedness
and the closed-form error factors can be checked to floating-point accuracy
at desk scale.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from . import linalg
from .dpp import _as_rng, pmf_lensemble, sample_kdpp, sample_lensemble
from .errors import DimensionError, GeneralPositionError, ValidationError


def _check_problem(x, y):
    x = linalg.as_matrix(x, "X")
    y = linalg.as_vector(y, "y")
    if x.shape[0] != y.shape[0]:
        raise DimensionError(f"X has {x.shape[0]} rows but y has length {y.shape[0]}")
    return x, y


def loss(x, y, w) -> float:
    """Squared residual norm ||X w - y||^2."""
    x, y = _check_problem(x, y)
    w = linalg.as_vector(w, "w")
    if w.shape[0] != x.shape[1]:
        raise DimensionError(f"w has length {w.shape[0]}, expected {x.shape[1]}")
    r = x @ w - y
    return float(r @ r)


def iid_sketch_solve(x, y, dist, k: int, seed, return_info: bool = False):
    """Sketch-and-solve with k i.i.d. rows from `dist`, rescaled by
    1/sqrt(k p_j); returns the minimum-norm solution of the subproblem.

    With return_info=True also returns {'indices', 'rank_deficient'};
    rank-deficient subproblems fall back to the pseudoinverse solution
    rather than erroring, so sweeps over k never fault.
    """
    x, y = _check_problem(x, y)
    dist = linalg.as_vector(dist, "dist")
    if dist.shape[0] != x.shape[0]:
        raise DimensionError("distribution length does not match row count")
    if k < 1:
        raise ValidationError("sample size k must be >= 1")
    if np.any(dist < 0) or abs(dist.sum() - 1.0) > 1e-8:
        raise ValidationError("dist must be a probability vector")
    rng = _as_rng(seed)
    idx = rng.choice(x.shape[0], size=k, p=dist)
    scale = 1.0 / np.sqrt(k * dist[idx])
    xs = x[idx] * scale[:, None]
    ys = y[idx] * scale
    w, _, rank, _ = np.linalg.lstsq(xs, ys, rcond=linalg.RANK_RTOL * max(xs.shape))
    if return_info:
        return w, {"indices": idx, "rank_deficient": rank < x.shape[1]}
    return w


def projection_dpp_lsq(x, y, seed) -> np.ndarray:
    """Unbiased least-squares estimator: solve the d x d system indexed by
    S ~ d-DPP_L(X X^T). Requires full column rank."""
    x, y = _check_problem(x, y)
    n, d = x.shape
    if n < d or linalg.numerical_rank(x) < d:
        raise ValidationError("X must be tall with full column rank")
    s = sample_kdpp(x @ x.T, d, seed)
    return np.linalg.solve(x[s], y[s])


def lensemble_ridge(x, y, lam: float, seed) -> np.ndarray:
    """Unbiased ridge estimator: minimum-norm solution of the subproblem
    indexed by S ~ DPP_L(X X^T / lam); the empty sample gives the zero vector."""
    x, y = _check_problem(x, y)
    if not lam > 0:
        raise ValidationError(f"ridge parameter must be positive, got {lam}")
    s = sample_lensemble(x @ x.T / lam, seed)
    if s.size == 0:
        return np.zeros(x.shape[1])
    return linalg.lstsq(x[s], y[s])


def expected_estimator_exact(x, y, law: str, lam: float | None = None) -> np.ndarray:
    """Exact E[estimator] by enumeration.

    law='projection_dpp': sum over size-d subsets weighted by squared volume.
    law='lensemble': sum over all subsets of DPP_L(X X^T / lam).
    """
    x, y = _check_problem(x, y)
    n, d = x.shape
    if n > 20:
        raise ValidationError("enumeration oracle capped at n <= 20")
    if law == "projection_dpp":
        total = 0.0
        acc = np.zeros(d)
        for s in combinations(range(n), d):
            idx = list(s)
            det = np.linalg.det(x[idx])
            weight = det * det
            if weight == 0.0:
                continue
            acc += weight * np.linalg.solve(x[idx], y[idx])
            total += weight
        if total <= 0.0:
            raise GeneralPositionError("X has no non-degenerate size-d row subset")
        return acc / total
    if law == "lensemble":
        if lam is None or not lam > 0:
            raise ValidationError("law='lensemble' needs a positive lam")
        pmf = pmf_lensemble(x @ x.T / lam)
        acc = np.zeros(d)
        for s, p in pmf.probs.items():
            if p == 0.0 or len(s) == 0:
                continue
            idx = list(s)
            acc += p * linalg.lstsq(x[idx], y[idx])
        return acc
    raise ValidationError(f"unknown law {law!r}")


def _general_position_minors(x) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Determinants of all size-d row subsets, erroring on a degenerate one."""
    n, d = x.shape
    subsets = list(combinations(range(n), d))
    dets = np.array([np.linalg.det(x[list(s)]) for s in subsets])
    scale = max(np.abs(dets).max(), 1e-300)
    bad = np.abs(dets) <= 1e-12 * scale
    if bad.any():
        which = subsets[int(np.argmax(bad))]
        raise GeneralPositionError(f"rows {list(which)} are degenerate; general position required")
    return subsets, dets


def expected_loss_exact(x, y) -> float:
    """Exact E L(X_S^{-1} y_S) under the size-d projection DPP; equals
    (d+1) L(w*) when rows are in general position."""
    x, y = _check_problem(x, y)
    if x.shape[0] > 20:
        raise ValidationError("enumeration oracle capped at n <= 20")
    subsets, dets = _general_position_minors(x)
    weights = dets**2
    weights /= weights.sum()
    out = 0.0
    for s, wgt in zip(subsets, weights):
        idx = list(s)
        w = np.linalg.solve(x[idx], y[idx])
        out += wgt * loss(x, y, w)
    return float(out)


def expected_mse_exact(x, sigma: float) -> float:
    """Exact E ||X_S^{-1} y_S - w_true||^2 under y = X w_true + N(0, sigma^2 I)
    and S ~ d-DPP_L(X X^T); the noise expectation is integrated analytically,
    leaving sigma^2 E tr((X_S^T X_S)^{-1})."""
    x = linalg.as_matrix(x, "X")
    if sigma < 0:
        raise ValidationError("sigma must be nonnegative")
    if x.shape[0] > 20:
        raise ValidationError("enumeration oracle capped at n <= 20")
    subsets, dets = _general_position_minors(x)
    weights = dets**2
    weights /= weights.sum()
    out = 0.0
    for s, wgt in zip(subsets, weights):
        inv = np.linalg.inv(x[list(s)])
        out += wgt * float(np.sum(inv * inv))
    return sigma * sigma * float(out)


def subspace_embedding_check(x, sketch, eps: float) -> bool:
    """Whether the already-sketched matrix SX distorts every squared norm of
    the column space of X by at most a factor 1 +- eps."""
    x = linalg.as_matrix(x, "X")
    sketch = linalg.as_matrix(sketch, "SX")
    if sketch.shape[1] != x.shape[1]:
        raise DimensionError("sketch and X must have the same number of columns")
    if eps < 0:
        raise ValidationError("eps must be nonnegative")
    q, r = np.linalg.qr(x)
    if np.abs(np.diag(r)).min() <= linalg.RANK_RTOL * max(x.shape) * np.abs(np.diag(r)).max():
        raise ValidationError("X must have full column rank")
    m = np.linalg.solve(r.T, sketch.T).T  # = SX R^{-1} = S Q
    sv = np.linalg.svd(m, compute_uv=False)
    slack = 1e-12  # rounding headroom so the identity sketch passes at eps = 0
    return bool(sv.max() ** 2 <= 1.0 + eps + slack and sv.min() ** 2 >= 1.0 - eps - slack)
