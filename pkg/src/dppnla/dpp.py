"""Determinantal point processes over {0, ..., n-1}.

Covers the three parameterizations (marginal kernel K, L-ensemble kernel L,
orthonormal projection basis U), exhaustive enumeration oracles used as
ground truth throughout the test suite, and exact samplers built from the
Bernoulli eigenvalue mixture plus the sequential projection chain.

Subsets are returned as sorted 0-based integer arrays. Samplers are
deterministic given (input, seed); batch variants derive the i-th draw's
generator from (seed, i) so results do not depend on any loop partitioning.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from . import linalg
from .errors import (
    DegenerateConstraintError,
    EnumerationSizeError,
    NumericalDegeneracyError,
    ValidationError,
)

ENUMERATION_MAX_N = 20
_DET_CHUNK = 1 << 15

Subset = tuple[int, ...]


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def derived_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for draw `index` of a batch keyed by `seed`."""
    return np.random.default_rng(np.random.SeedSequence(entropy=[int(seed), int(index)]))


def check_lensemble(l) -> np.ndarray:
    """Validate a symmetric PSD L-ensemble kernel (tiny negatives tolerated)."""
    l = linalg.as_matrix(l, "L")
    l = linalg.check_symmetric(l, rtol=1e-8, name="L")
    w = np.linalg.eigvalsh(l)
    if w.size and w[0] < -1e-10 * max(w[-1], 1.0):
        raise ValidationError(f"L is not positive semi-definite (min eigenvalue {w[0]:.3e})")
    return l


def check_correlation_kernel(k) -> np.ndarray:
    """Validate a marginal kernel 0 <= K <= I (tolerance 1e-10 on both ends)."""
    k = linalg.as_matrix(k, "K")
    k = linalg.check_symmetric(k, rtol=1e-8, name="K")
    w = np.linalg.eigvalsh(k)
    if w.size and (w[0] < -1e-10 or w[-1] > 1.0 + 1e-10):
        raise ValidationError(
            f"K must have eigenvalues in [0, 1], got range [{w[0]:.3e}, {w[-1]:.3e}]"
        )
    return k


def check_projection_basis(u) -> np.ndarray:
    """Validate an n x k matrix with orthonormal columns."""
    u = linalg.as_matrix(u, "U")
    k = u.shape[1]
    if np.linalg.norm(u.T @ u - np.eye(k)) > 1e-8:
        raise ValidationError("U does not have orthonormal columns")
    return u


def marginal_kernel_from_lensemble(l) -> np.ndarray:
    """Marginal kernel K = L (I + L)^{-1} = I - (I + L)^{-1}."""
    l = check_lensemble(l)
    n = l.shape[0]
    k = np.eye(n) - np.linalg.inv(np.eye(n) + l)
    return 0.5 * (k + k.T)


# ---------------------------------------------------------------------------
# exhaustive pmf oracles


@dataclass(frozen=True)
class PmfTable:
    """Exhaustive subset -> probability map over subsets of {0..n-1}.

    Zero-probability subsets may be omitted; lookups default to 0.
    """

    n: int
    probs: dict[Subset, float]

    def prob(self, subset) -> float:
        return self.probs.get(tuple(int(i) for i in subset), 0.0)

    def total(self) -> float:
        return float(sum(self.probs.values()))

    def support(self) -> list[Subset]:
        return [s for s, p in self.probs.items() if p > 0.0]

    def expected_size(self) -> float:
        return float(sum(len(s) * p for s, p in self.probs.items()))

    @classmethod
    def from_samples(cls, samples, n: int) -> "PmfTable":
        counts = Counter(tuple(int(i) for i in s) for s in samples)
        total = sum(counts.values())
        return cls(n, {s: c / total for s, c in counts.items()})


def tv_distance(p: PmfTable, q: PmfTable) -> float:
    """Total variation distance between two pmf tables on the same ground set."""
    keys = set(p.probs) | set(q.probs)
    return 0.5 * float(sum(abs(p.prob(s) - q.prob(s)) for s in keys))


def _check_enumeration_size(n: int):
    if n > ENUMERATION_MAX_N:
        raise EnumerationSizeError(f"enumeration over 2^{n} subsets refused (cap n <= {ENUMERATION_MAX_N})")


def _principal_minors(a: np.ndarray, k: int) -> tuple[list[Subset], np.ndarray]:
    """All size-k principal minors of a, in lexicographic subset order."""
    n = a.shape[0]
    subsets = list(combinations(range(n), k))
    if k == 0:
        return subsets, np.ones(1)
    idx = np.array(subsets, dtype=np.intp)
    dets = np.empty(len(subsets))
    for lo in range(0, len(subsets), _DET_CHUNK):
        chunk = idx[lo : lo + _DET_CHUNK]
        blocks = a[chunk[:, :, None], chunk[:, None, :]]
        dets[lo : lo + _DET_CHUNK] = np.linalg.det(blocks)
    return subsets, dets


def pmf_lensemble(l) -> PmfTable:
    """Exact L-ensemble law Pr{S} = det(L_S) / det(I + L) over all 2^n subsets."""
    l = check_lensemble(l)
    n = l.shape[0]
    _check_enumeration_size(n)
    norm = float(np.linalg.det(np.eye(n) + l))
    probs: dict[Subset, float] = {}
    for k in range(n + 1):
        subsets, dets = _principal_minors(l, k)
        for s, d in zip(subsets, dets):
            probs[s] = max(float(d), 0.0) / norm
    return PmfTable(n, probs)


def pmf_kdpp(l, k: int) -> PmfTable:
    """Exact size-k conditioned law, proportional to det(L_S) over |S| = k."""
    l = check_lensemble(l)
    n = l.shape[0]
    _check_enumeration_size(n)
    if not 0 <= k <= n:
        raise ValidationError(f"k={k} outside [0, {n}]")
    subsets, dets = _principal_minors(l, k)
    dets = np.maximum(dets, 0.0)
    total = float(dets.sum())
    if total <= 0.0:
        raise DegenerateConstraintError(f"all size-{k} principal minors vanish")
    return PmfTable(n, {s: float(d) / total for s, d in zip(subsets, dets)})


def pmf_correlation(k) -> PmfTable:
    """Exact law of DPP(K) by enumeration: Pr{S=A} = (-1)^{n-|A|} det(K - I_Abar)."""
    k = check_correlation_kernel(k)
    n = k.shape[0]
    _check_enumeration_size(n)
    probs: dict[Subset, float] = {}
    for size in range(n + 1):
        subsets = list(combinations(range(n), size))
        comp = np.array(
            [sorted(set(range(n)) - set(s)) for s in subsets], dtype=np.intp
        ).reshape(len(subsets), n - size)
        mats = np.broadcast_to(k, (len(subsets), n, n)).copy()
        rows = np.arange(len(subsets))[:, None]
        mats[rows, comp, comp] -= 1.0
        dets = np.linalg.det(mats) * (-1.0) ** (n - size)
        for s, d in zip(subsets, dets):
            probs[s] = max(float(d), 0.0)
    return PmfTable(n, probs)


def marginals_from_pmf(pmf: PmfTable) -> np.ndarray:
    """Inclusion probability of each index under the given pmf."""
    marg = np.zeros(pmf.n)
    for s, p in pmf.probs.items():
        for i in s:
            marg[i] += p
    return marg


# ---------------------------------------------------------------------------
# exact samplers


def mixture_decompose(k, seed) -> np.ndarray:
    """Draw the projection component of DPP(K): eigendecompose K and keep
    eigenvector i with probability lambda_i (Bernoulli draws consume
    eigenvalues in descending order). Returns an n x j orthonormal basis,
    possibly with j = 0."""
    k = check_correlation_kernel(k)
    w, q = linalg.eig_sym(k)
    w = np.clip(w, 0.0, 1.0)
    rng = _as_rng(seed)
    keep = rng.random(w.size) < w
    return q[:, keep]


def _projection_chain(u: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Sequential sampler for DPP(U U^T), U with k orthonormal columns.

    Pick an index proportionally to current squared row norms, project all
    rows onto the complement of the picked row, repeat k times.
    """
    n, k = u.shape
    if k == 0:
        return np.empty(0, dtype=np.intp)
    v = u.copy()
    p = np.einsum("ij,ij->i", v, v)
    chosen = np.empty(k, dtype=np.intp)
    for step in range(k):
        p = np.maximum(p, 0.0)
        mass = p.sum()
        expected = float(k - step)
        if mass < 1e-12 or mass < expected - 1e-6 * max(expected, 1.0):
            raise NumericalDegeneracyError(
                f"projection chain lost probability mass at step {step} ({mass:.3e} vs {expected})"
            )
        i = int(np.searchsorted(np.cumsum(p), rng.random() * mass, side="right"))
        i = min(i, n - 1)
        chosen[step] = i
        vi = v[i].copy()
        nrm2 = float(vi @ vi)
        v -= np.outer(v @ vi, vi) / nrm2
        p = np.einsum("ij,ij->i", v, v)
        p[chosen[: step + 1]] = 0.0
    return np.sort(chosen)


def sample_projection_dpp(u, seed) -> np.ndarray:
    """Exact sample from the projection DPP of an orthonormal-column basis."""
    u = check_projection_basis(u)
    return _projection_chain(u, _as_rng(seed))


def sample_lensemble(l, seed) -> np.ndarray:
    """Exact sample S ~ DPP_L(L) via the eigenvalue Bernoulli mixture."""
    l = check_lensemble(l)
    w, q = linalg.eig_sym(l)
    w = np.maximum(w, 0.0)
    return _lensemble_draw(w, q, _as_rng(seed))


def _lensemble_draw(w, q, rng) -> np.ndarray:
    marg = w / (1.0 + w)  # K and L share eigenvectors
    keep = rng.random(w.size) < marg
    return _projection_chain(q[:, keep], rng)


def sample_lensemble_many(l, n_draws: int, seed: int) -> list[np.ndarray]:
    """n_draws independent L-ensemble samples; eigendecomposition done once,
    draw i uses the generator derived from (seed, i)."""
    l = check_lensemble(l)
    w, q = linalg.eig_sym(l)
    w = np.maximum(w, 0.0)
    return [_lensemble_draw(w, q, derived_rng(seed, i)) for i in range(n_draws)]


def elementary_symmetric(eigs, kmax: int) -> np.ndarray:
    """Elementary symmetric polynomials e_0..e_kmax of nonnegative values."""
    eigs = linalg.as_vector(eigs, "eigs")
    if np.any(eigs < 0):
        raise ValidationError("elementary_symmetric expects nonnegative values")
    return _esp_table(eigs, kmax)[-1].copy()


def _esp_table(eigs: np.ndarray, kmax: int) -> np.ndarray:
    """Newton-triangle table E[m, j] = e_j(eigs[:m]), shape (len+1, kmax+1)."""
    m = eigs.size
    table = np.zeros((m + 1, kmax + 1))
    table[:, 0] = 1.0
    for i in range(1, m + 1):
        upto = min(i, kmax)
        table[i, 1 : upto + 1] = table[i - 1, 1 : upto + 1] + eigs[i - 1] * table[i - 1, 0:upto]
    return table


def _select_k_eigenvalues(w: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Indices of an eigenvalue subset of size k with Pr(E) ~ prod_{i in E} w_i."""
    table = _esp_table(w, k)
    if table[-1, k] <= 0.0:
        raise DegenerateConstraintError(f"no eigenvalue subset of size {k} has positive weight")
    picked = []
    j = k
    for m in range(w.size, 0, -1):
        if j == 0:
            break
        if table[m, j] <= 0.0:
            raise NumericalDegeneracyError("elementary symmetric recursion lost mass")
        if rng.random() < w[m - 1] * table[m - 1, j - 1] / table[m, j]:
            picked.append(m - 1)
            j -= 1
    if j != 0:
        raise NumericalDegeneracyError("eigenvalue selection terminated early")
    return np.array(picked[::-1], dtype=np.intp)


def sample_kdpp(l, k: int, seed) -> np.ndarray:
    """Exact sample from k-DPP_L(L): choose k eigenvalues via the elementary
    symmetric polynomial recursion, then run the projection chain on the
    selected eigenvectors. With k = rank(L) this is the projection DPP."""
    l = check_lensemble(l)
    w, q = linalg.eig_sym(l)
    w = np.maximum(w, 0.0)
    rank = int(np.sum(w > linalg.RANK_RTOL * max(l.shape) * (w[0] if w.size else 0.0)))
    if not 0 <= k <= rank:
        raise ValidationError(f"k={k} exceeds numerical rank {rank}")
    rng = _as_rng(seed)
    idx = _select_k_eigenvalues(w, k, rng)
    return _projection_chain(q[:, idx], rng)


def sample_kdpp_many(l, k: int, n_draws: int, seed: int) -> list[np.ndarray]:
    """n_draws independent k-DPP samples with per-draw derived generators."""
    l = check_lensemble(l)
    w, q = linalg.eig_sym(l)
    w = np.maximum(w, 0.0)
    rank = int(np.sum(w > linalg.RANK_RTOL * max(l.shape) * (w[0] if w.size else 0.0)))
    if not 0 <= k <= rank:
        raise ValidationError(f"k={k} exceeds numerical rank {rank}")
    out = []
    for i in range(n_draws):
        rng = derived_rng(seed, i)
        idx = _select_k_eigenvalues(w, k, rng)
        out.append(_projection_chain(q[:, idx], rng))
    return out
