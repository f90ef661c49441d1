"""Accelerated DPP sampling.

Two routes around the full eigendecomposition sampler:

* distortion-free intermediate sampling for projection DPPs: oversample
  O(k^2) indices i.i.d. from the basis row norms, accept the batch with
  probability det((1/t) Ut^T Ut), then run the exact chain on the small
  accepted domain. The correction step makes the output law exact.

* a lazy Metropolis swap chain whose stationary law is the size-k
  L-ensemble: swap one member for one non-member, accept with
  (1/2) min{1, det(L_T)/det(L_S)}.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import combinations
from math import ceil, log

import numpy as np

from . import linalg
from .dpp import _projection_chain, _as_rng, check_lensemble, check_projection_basis, derived_rng
from .errors import InitializationError, NumericalDegeneracyError, RetryBudgetError, ValidationError


@dataclass(frozen=True)
class IntermediateConfig:
    oversample_factor: float = 3.0  # t = ceil(factor * k^2) i.i.d. draws
    max_rejections: int = 1000

    def __post_init__(self):
        if self.oversample_factor < 1:
            raise ValidationError("oversample_factor must be >= 1")
        if self.max_rejections < 1:
            raise ValidationError("max_rejections must be >= 1")


def _intermediate_draw(u, p_cum, t, k, rng, max_rejections) -> np.ndarray:
    for _ in range(max_rejections):
        idx = np.searchsorted(p_cum, rng.random(t), side="right")
        rows = u[idx]
        norms2 = np.einsum("ij,ij->i", rows, rows)
        ut = rows / np.sqrt(norms2)[:, None]
        # rows carry the importance weight sqrt(k)/||v||, so the Gram proxy
        # (k/t) Ut^T Ut has mean I; det <= (tr/k)^k = 1 by AM-GM, and the
        # acceptance rate approaches 1 - k^2/t instead of decaying like k^-k
        accept_p = float(np.linalg.det((ut.T @ ut) * (k / t)))
        if not -1e-9 <= accept_p <= 1.0 + 1e-9:
            raise NumericalDegeneracyError(f"acceptance probability {accept_p} outside [0, 1]")
        if rng.random() < accept_p:
            q, _ = np.linalg.qr(ut)
            local = _projection_chain(q[:, :k], rng)
            subset = np.sort(idx[local])
            if np.unique(subset).size != k:
                raise NumericalDegeneracyError("duplicate indices selected together")
            return subset
    raise RetryBudgetError(
        f"no acceptance in {max_rejections} rounds (t={t}, k={k})"
    )


def _intermediate_setup(u, cfg):
    n, k = u.shape
    if k < 1:
        raise ValidationError("intermediate sampling needs a basis of rank >= 1")
    p = np.maximum(np.einsum("ij,ij->i", u, u), 0.0)
    p_cum = np.cumsum(p / p.sum())
    p_cum[-1] = 1.0
    t = int(ceil(cfg.oversample_factor * k * k))
    return p_cum, t, k


def sample_projection_dpp_intermediate(u, seed, config: IntermediateConfig | None = None) -> np.ndarray:
    """Exact projection-DPP sample through the oversample/accept/reduce route.

    Duplicate indices in the i.i.d. stage are kept as distinct domain
    elements; they can never be selected together (zero volume), so the
    mapped-back subset always has k distinct indices.
    """
    u = check_projection_basis(u)
    cfg = config or IntermediateConfig()
    p_cum, t, k = _intermediate_setup(u, cfg)
    return _intermediate_draw(u, p_cum, t, k, _as_rng(seed), cfg.max_rejections)


def sample_projection_dpp_intermediate_many(
    u, n_draws: int, seed: int, config: IntermediateConfig | None = None
) -> list[np.ndarray]:
    u = check_projection_basis(u)
    cfg = config or IntermediateConfig()
    p_cum, t, k = _intermediate_setup(u, cfg)
    return [
        _intermediate_draw(u, p_cum, t, k, derived_rng(seed, i), cfg.max_rejections)
        for i in range(n_draws)
    ]


# ---------------------------------------------------------------------------
# Metropolis swap chain


@dataclass(frozen=True)
class ChainState:
    current: tuple[int, ...]  # sorted, fixed size k
    log_det: float            # log det(L_{S,S}) of the current subset
    step_count: int = 0


def _logdet_subset(l: np.ndarray, subset) -> float:
    sub = l[np.ix_(subset, subset)]
    sign, val = np.linalg.slogdet(sub)
    return val if sign > 0 else -np.inf


def chain_state(l, subset) -> ChainState:
    """Build a chain state, requiring det(L_S) > 0."""
    l = check_lensemble(l)
    s = linalg.as_subset(subset, l.shape[0], "subset")
    ld = _logdet_subset(l, s)
    if not np.isfinite(ld):
        raise ValidationError(f"subset {s.tolist()} has vanishing determinant")
    return ChainState(tuple(int(i) for i in s), ld, 0)


def mcmc_step(l, state: ChainState, rng) -> ChainState:
    """One lazy Metropolis transition of the size-k swap chain.

    Proposes T = S u {j} \\ {i} with i in S and j outside S uniform, accepts
    with probability (1/2) min{1, det(L_T)/det(L_S)}; the determinant of the
    proposal is always computed from scratch, so the cached log-determinant
    of the current state never drifts.
    """
    l = np.asarray(l, dtype=float)
    rng = _as_rng(rng)
    n = l.shape[0]
    s = state.current
    k = len(s)
    out = [j for j in range(n) if j not in s]
    i = int(rng.integers(k))
    j = out[int(rng.integers(n - k))]
    proposal = tuple(sorted(s[:i] + s[i + 1 :] + (j,)))
    ld_new = _logdet_subset(l, proposal)
    ratio = np.exp(min(ld_new - state.log_det, 0.0)) if np.isfinite(ld_new) else 0.0
    if rng.random() < 0.5 * ratio:
        return ChainState(proposal, ld_new, state.step_count + 1)
    return replace(state, step_count=state.step_count + 1)


def greedy_initial_subset(l, k: int, seed=0) -> np.ndarray:
    """Size-k subset with positive determinant: top-k diagonal entries, then
    random repair swaps; fails after n*k fruitless candidates."""
    l = check_lensemble(l)
    n = l.shape[0]
    if not 1 <= k <= n:
        raise ValidationError(f"k={k} outside [1, {n}]")
    rng = _as_rng(seed)
    subset = np.sort(np.argsort(l.diagonal())[::-1][:k])
    best = float(np.linalg.det(l[np.ix_(subset, subset)]))
    if best <= 0.0 and k >= n:
        raise InitializationError(f"the only size-{k} subset has determinant {best}")
    tries = 0
    while best <= 0.0:
        if tries >= n * k:
            raise InitializationError(
                f"no size-{k} subset with positive determinant found after {tries} swaps"
            )
        tries += 1
        cand = subset.copy()
        pos = int(rng.integers(k))
        out = np.setdiff1d(np.arange(n), subset)
        cand[pos] = out[int(rng.integers(out.size))]
        cand = np.sort(cand)
        val = float(np.linalg.det(l[np.ix_(cand, cand)]))
        if val > best:
            subset, best = cand, val
    return subset


def default_step_budget(n: int, k: int, eps: float, constant: float = 4.0) -> int:
    """ceil(C k^2 n log(n/eps)) transitions; C defaults to 4."""
    if not 0 < eps < 1:
        raise ValidationError(f"eps must be in (0, 1), got {eps}")
    return max(1, int(ceil(constant * k * k * n * log(n / eps))))


def sample_kdpp_mcmc(l, k: int, steps: int, seed) -> np.ndarray:
    """Approximate k-DPP sample: greedy start, then `steps` swap transitions."""
    l = check_lensemble(l)
    rng = _as_rng(seed)
    state = chain_state(l, greedy_initial_subset(l, k, rng))
    for _ in range(steps):
        state = mcmc_step(l, state, rng)
    return np.array(state.current, dtype=np.intp)


def mcmc_sample_batch(l, k: int, steps: int, n_chains: int, seed: int) -> np.ndarray:
    """Run n_chains independent swap chains for `steps` transitions each,
    vectorized across chains; returns an (n_chains, k) array of final subsets.

    Each chain starts from the same greedy subset; chain randomness comes
    from a single generator keyed by `seed`, with all per-step proposals
    drawn as (n_chains,) blocks, so the result is deterministic in seed and
    independent of any internal chunking.
    """
    l = check_lensemble(l)
    n = l.shape[0]
    rng = np.random.default_rng(seed)
    start = greedy_initial_subset(l, k, rng)
    current = np.tile(start, (n_chains, 1))
    logdet = np.full(n_chains, _logdet_subset(l, start))
    member = np.zeros((n_chains, n), dtype=bool)
    member[:, start] = True
    rows = np.arange(n_chains)
    for _ in range(steps):
        pos = rng.integers(0, k, size=n_chains)
        out_rank = rng.integers(0, n - k, size=n_chains)
        u_accept = rng.random(n_chains)
        # map the rank of a non-member to its index
        nonmember_cum = np.cumsum(~member, axis=1)
        j = np.argmax(nonmember_cum == (out_rank + 1)[:, None], axis=1)
        cand = current.copy()
        cand[rows, pos] = j
        cand.sort(axis=1)
        blocks = l[cand[:, :, None], cand[:, None, :]]
        sign, ld_new = np.linalg.slogdet(blocks)
        ratio = np.where(sign > 0, np.exp(np.minimum(ld_new - logdet, 0.0)), 0.0)
        accept = u_accept < 0.5 * ratio
        if np.any(accept):
            acc = rows[accept]
            old = current[acc, pos[accept]]
            member[acc, old] = False
            member[acc, j[accept]] = True
            current[accept] = cand[accept]
            logdet[accept] = ld_new[accept]
    return current


def mcmc_transition_matrix(l, k: int) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """Exact one-step transition matrix of the swap chain over all size-k
    subsets with positive determinant (desk scale; used to verify detailed
    balance and stationarity)."""
    l = check_lensemble(l)
    n = l.shape[0]
    states = []
    dets = []
    for s in combinations(range(n), k):
        d = float(np.linalg.det(l[np.ix_(s, s)]))
        if d > 0.0:
            states.append(s)
            dets.append(d)
    index = {s: i for i, s in enumerate(states)}
    m = len(states)
    p = np.zeros((m, m))
    for a, s in enumerate(states):
        for i in s:
            for j in range(n):
                if j in s:
                    continue
                t = tuple(sorted(set(s) - {i} | {j}))
                prob_move = 1.0 / (k * (n - k))
                if t in index:
                    acc = 0.5 * min(1.0, dets[index[t]] / dets[a])
                    p[a, index[t]] += prob_move * acc
                else:
                    acc = 0.0
                p[a, a] += prob_move * (1.0 - acc)
    return states, p
