"""Row/column subset selection and Nystrom approximation.

Er(S) = ||X - X P_S||_F^2 measures how well the rows indexed by S span the
rest of the matrix; sampling S from a k-DPP with k = ceil(r + r/eps - 1)
brings its expectation within (1+eps) of the best rank-r error. The Nystrom
pendant does the same for PSD kernels in the nuclear norm.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

import numpy as np

from . import linalg
from .dpp import check_lensemble, pmf_kdpp, sample_kdpp
from .errors import ValidationError


@dataclass(frozen=True)
class SubsetApproxReport:
    subset: np.ndarray
    error: float
    baseline: float   # best rank-r error in the matching norm
    ratio: float      # error / baseline; 1 if both vanish, inf if only baseline does


_ZERO_TOL = 1e-12  # errors below this are rounding dust from exact-rank inputs


def _ratio(error: float, baseline: float) -> float:
    if baseline > _ZERO_TOL:
        return error / baseline
    return 1.0 if error <= _ZERO_TOL else float("inf")


def _row_span_basis(rows: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the row span of `rows`."""
    if rows.size == 0:
        return np.zeros((rows.shape[1], 0))
    _, s, vt = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((rows.shape[1], 0))
    keep = s > linalg.RANK_RTOL * max(rows.shape) * s[0]
    return vt[keep].T


def reconstruction_error(x, subset) -> float:
    """Er(S) = ||X - X P_S||_F^2 with P_S the projection onto the row span of
    X_S; the empty subset gives ||X||_F^2."""
    x = linalg.as_matrix(x, "X")
    s = linalg.as_subset(subset, x.shape[0], "subset")
    total = float(np.sum(x * x))
    if s.size == 0:
        return total
    basis = _row_span_basis(x[s])
    captured = float(np.sum((x @ basis) ** 2))
    return max(total - captured, 0.0)


def subset_size_for(r: int, eps: float) -> int:
    """k = ceil(r + r/eps - 1), the worst-case optimal sample size."""
    if r < 1:
        raise ValidationError("target rank r must be >= 1")
    if not eps > 0:
        raise ValidationError("eps must be positive")
    return int(ceil(r + r / eps - 1))


def css_kdpp(x, r: int, eps: float, seed) -> SubsetApproxReport:
    """Row subset selection via the k-DPP of the outer-product kernel;
    reports Er(S) against the best rank-r Frobenius error."""
    x = linalg.as_matrix(x, "X")
    k = subset_size_for(r, eps)
    if k > linalg.numerical_rank(x):
        raise ValidationError(
            f"subset size k={k} exceeds rank(X)={linalg.numerical_rank(x)}; increase eps"
        )
    s = sample_kdpp(x @ x.T, k, seed)
    err = reconstruction_error(x, s)
    baseline = linalg.truncated_svd_error(x, r, "fro2")
    return SubsetApproxReport(s, err, baseline, _ratio(err, baseline))


def expected_err_exact(x, k: int) -> float:
    """Exact E Er(S) under the size-k DPP of X X^T, by enumeration."""
    x = linalg.as_matrix(x, "X")
    pmf = pmf_kdpp(x @ x.T, k)
    return float(
        sum(p * reconstruction_error(x, list(s)) for s, p in pmf.probs.items() if p > 0.0)
    )


def nystrom(l, subset) -> np.ndarray:
    """Nystrom approximation L[:, S] pinv(L[S, S]) L[S, :]; empty S gives 0."""
    l = check_lensemble(l)
    s = linalg.as_subset(subset, l.shape[0], "subset")
    if s.size == 0:
        return np.zeros_like(l)
    c = l[:, s]
    approx = c @ linalg.pinv(l[np.ix_(s, s)]) @ c.T
    return 0.5 * (approx + approx.T)


def nystrom_error_nuclear(l, approx) -> float:
    """Nuclear-norm error ||L - Lhat||_*; both PSD with Lhat <= L, so this
    equals tr(L) - tr(Lhat) up to eigenvalue clipping."""
    diff = np.asarray(l) - np.asarray(approx)
    return float(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.T))).sum())


def nystrom_kdpp(l, r: int, eps: float, seed) -> SubsetApproxReport:
    """Nystrom approximation from a k-DPP landmark subset; reports the
    nuclear error against the best rank-r nuclear error."""
    l = check_lensemble(l)
    k = subset_size_for(r, eps)
    if k > linalg.numerical_rank(l):
        raise ValidationError(
            f"subset size k={k} exceeds rank(L)={linalg.numerical_rank(l)}; increase eps"
        )
    s = sample_kdpp(l, k, seed)
    err = nystrom_error_nuclear(l, nystrom(l, s))
    baseline = linalg.truncated_svd_error(l, r, "nuclear")
    return SubsetApproxReport(s, err, baseline, _ratio(err, baseline))


def expected_nystrom_error_exact(l, k: int) -> float:
    """Exact E ||L - Lhat(S)||_* under the size-k DPP of L, by enumeration."""
    l = check_lensemble(l)
    pmf = pmf_kdpp(l, k)
    return float(
        sum(
            p * nystrom_error_nuclear(l, nystrom(l, list(s)))
            for s, p in pmf.probs.items()
            if p > 0.0
        )
    )
