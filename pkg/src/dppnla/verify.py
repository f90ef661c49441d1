"""Deterministic verification suites behind `dppnla verify`.

Each check re-derives a distributional identity of the library against an
exhaustive enumeration oracle (or a fixed-seed Monte Carlo smoke run) and
reports observed vs expected values. Scales are kept small so the whole run
stays interactive; the pytest acceptance suite runs the full-size versions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import (
    default_step_budget,
    expected_err_exact,
    expected_estimator_exact,
    expected_loss_exact,
    expected_mse_exact,
    expected_nystrom_error_exact,
    gaussian_problem,
    iid_sketch_solve,
    leverage_approx,
    leverage_exact,
    loss,
    lstsq,
    marginal_kernel_from_lensemble,
    marginals_from_pmf,
    mcmc_sample_batch,
    mcmc_transition_matrix,
    pmf_correlation,
    pmf_kdpp,
    pmf_lensemble,
    random_psd,
    ridge_leverage_exact,
    sample_kdpp_many,
    sample_lensemble_many,
    sample_projection_dpp_intermediate_many,
    sampling_distribution,
    subset_size_for,
    truncated_svd_error,
    tv_distance,
)
from .dpp import PmfTable
from .synthetic import random_projection_basis


@dataclass(frozen=True)
class CheckResult:
    name: str
    suite: str
    passed: bool
    detail: str


def _result(name, suite, passed, detail) -> CheckResult:
    return CheckResult(name, suite, bool(passed), detail)


def _random_kernels(count, n_max, seed, n_min=2):
    rng = np.random.default_rng(seed)
    for i in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        yield random_psd(n, rng.integers(0, 2**31))


def check_normalization(seed=101) -> CheckResult:
    worst = 0.0
    for l in _random_kernels(20, 10, seed):
        pmf = pmf_lensemble(l)
        worst = max(worst, abs(pmf.total() - 1.0))
    return _result(
        "lensemble-normalization", "identities", worst <= 1e-8,
        f"max |sum det(L_S)/det(I+L) - 1| = {worst:.2e}, tolerance 1e-8",
    )


def check_marginal_consistency(seed=102) -> CheckResult:
    worst = 0.0
    for l in _random_kernels(10, 8, seed):
        marg = marginals_from_pmf(pmf_lensemble(l))
        diag = np.diag(marginal_kernel_from_lensemble(l))
        worst = max(worst, float(np.abs(marg - diag).max()))
    return _result(
        "marginals-vs-kernel-diagonal", "identities", worst <= 1e-10,
        f"max deviation {worst:.2e}, tolerance 1e-10",
    )


def _complement_pushforward(pmf: PmfTable) -> PmfTable:
    full = frozenset(range(pmf.n))
    return PmfTable(pmf.n, {tuple(sorted(full - set(s))): p for s, p in pmf.probs.items()})


def check_complement(seed=103) -> CheckResult:
    worst = 0.0
    for l in _random_kernels(8, 6, seed):
        k = marginal_kernel_from_lensemble(l)
        direct = pmf_correlation(np.eye(k.shape[0]) - k)
        pushed = _complement_pushforward(pmf_correlation(k))
        worst = max(worst, tv_distance(direct, pushed))
    return _result(
        "complement-property", "identities", worst <= 1e-10,
        f"max TV between DPP(I-K) and complements of DPP(K): {worst:.2e}",
    )


def check_restriction(seed=104) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for l in _random_kernels(8, 6, seed + 1):
        k = marginal_kernel_from_lensemble(l)
        n = k.shape[0]
        t = sorted(rng.choice(n, size=max(1, n // 2), replace=False).tolist())
        pos = {orig: new for new, orig in enumerate(t)}
        pushed: dict = {}
        for s, p in pmf_correlation(k).probs.items():
            key = tuple(sorted(pos[i] for i in s if i in pos))
            pushed[key] = pushed.get(key, 0.0) + p
        restricted = pmf_correlation(k[np.ix_(t, t)])
        worst = max(worst, tv_distance(PmfTable(len(t), pushed), restricted))
    return _result(
        "restriction-property", "identities", worst <= 1e-10,
        f"max TV between S cap T and DPP(K_T): {worst:.2e}",
    )


def check_negative_correlation(seed=105) -> CheckResult:
    violations = 0
    checked = 0
    for l in _random_kernels(8, 6, seed):
        k = marginal_kernel_from_lensemble(l)
        pmf = pmf_correlation(k)
        marg = marginals_from_pmf(pmf)
        n = k.shape[0]
        joint = np.zeros((n, n))
        for s, p in pmf.probs.items():
            for a in s:
                for b in s:
                    joint[a, b] += p
        for i in range(n):
            for j in range(n):
                if i == j or abs(k[i, j]) < 1e-9 or marg[j] < 1e-12:
                    continue
                checked += 1
                if joint[i, j] / marg[j] >= marg[i] - 1e-12:
                    violations += 1
    return _result(
        "negative-correlation", "identities", violations == 0,
        f"{violations} violations of Pr(i|j) < Pr(i) over {checked} pairs",
    )


def check_cardinality(seed=106) -> CheckResult:
    worst = 0.0
    for l in _random_kernels(10, 8, seed):
        k = marginal_kernel_from_lensemble(l)
        worst = max(worst, abs(pmf_correlation(k).expected_size() - np.trace(k)))
    return _result(
        "expected-size-equals-trace", "identities", worst <= 1e-10,
        f"max |E|S| - tr(K)| = {worst:.2e}",
    )


def check_projection_equivalence(seed=107) -> CheckResult:
    """Size-rank(L) conditioning of the L-ensemble equals the DPP whose
    marginal kernel is the orthogonal projection onto the column space."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(5):
        n, k = 6, 2
        x = rng.standard_normal((n, k))
        l = x @ x.T
        u, _ = np.linalg.qr(x)
        worst = max(worst, tv_distance(pmf_kdpp(l, k), pmf_correlation(u @ u.T)))
    return _result(
        "projection-dpp-two-views", "identities", worst <= 1e-9,
        f"max TV between rank-conditioned L-ensemble and projection-kernel DPP: {worst:.2e}",
    )


def check_projection_marginals(seed=201) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(5):
        n = int(rng.integers(4, 9))
        d = int(rng.integers(1, 4))
        x = rng.standard_normal((n, d))
        marg = marginals_from_pmf(pmf_kdpp(x @ x.T, d))
        worst = max(worst, float(np.abs(marg - leverage_exact(x)).max()))
    return _result(
        "projection-marginals-are-leverage", "theorems", worst <= 1e-10,
        f"max |Pr(i in S) - l_i| = {worst:.2e}",
    )


def check_ridge_marginals(seed=202) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for lam in (0.5, 1.0, 2.0):
        n, d = 7, 3
        x = rng.standard_normal((n, d))
        marg = marginals_from_pmf(pmf_lensemble(x @ x.T / lam))
        worst = max(worst, float(np.abs(marg - ridge_leverage_exact(x, lam)).max()))
    return _result(
        "lensemble-marginals-are-ridge-leverage", "theorems", worst <= 1e-10,
        f"max |Pr(i in S) - l_i^lam| = {worst:.2e}",
    )


def check_unbiased_lsq(seed=203) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(10):
        n = int(rng.integers(5, 10))
        d = int(rng.integers(1, 4))
        x = rng.standard_normal((n, d))
        y = rng.standard_normal(n)
        worst = max(
            worst,
            float(np.abs(expected_estimator_exact(x, y, "projection_dpp") - lstsq(x, y)).max()),
        )
    return _result(
        "unbiased-least-squares", "theorems", worst <= 1e-8,
        f"max |E w_S - w*| = {worst:.2e}, tolerance 1e-8",
    )


def check_unbiased_ridge(seed=204) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for lam in (0.1, 1.0, 10.0):
        n, d = 7, 3
        x = rng.standard_normal((n, d))
        y = rng.standard_normal(n)
        closed = np.linalg.solve(x.T @ x + lam * np.eye(d), x.T @ y)
        got = expected_estimator_exact(x, y, "lensemble", lam=lam)
        worst = max(worst, float(np.abs(got - closed).max()))
    return _result(
        "unbiased-ridge", "theorems", worst <= 1e-8,
        f"max |E w_S - ridge| = {worst:.2e}, tolerance 1e-8",
    )


def check_loss_factor(seed=205) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(8):
        n = int(rng.integers(5, 11))
        d = int(rng.integers(1, 4))
        x = rng.standard_normal((n, d))
        y = rng.standard_normal(n)
        base = loss(x, y, lstsq(x, y))
        if base < 1e-12:
            continue
        worst = max(worst, abs(expected_loss_exact(x, y) / base - (d + 1)))
    return _result(
        "expected-loss-factor-d-plus-1", "theorems", worst <= 1e-8,
        f"max |E L / L(w*) - (d+1)| = {worst:.2e}",
    )


def check_mse_factor(seed=206) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(8):
        n = int(rng.integers(4, 10))
        d = int(rng.integers(1, 4))
        if n <= d:
            continue
        x = rng.standard_normal((n, d))
        base = np.trace(np.linalg.inv(x.T @ x))
        got = expected_mse_exact(x, 0.7)
        worst = max(worst, abs(got / (0.49 * base) - (n - d + 1)))
    return _result(
        "expected-mse-factor", "theorems", worst <= 1e-8,
        f"max |E MSE / (sigma^2 tr((X^T X)^-1)) - (n-d+1)| = {worst:.2e}",
    )


def check_css_bound(seed=207) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for eps in (0.5, 1.0, 2.0):
        n, d, r = 8, 5, 2
        x = rng.standard_normal((n, d))
        k = subset_size_for(r, eps)
        bound = (1 + eps) * truncated_svd_error(x, r, "fro2")
        worst = max(worst, expected_err_exact(x, k) - bound)
    return _result(
        "css-expected-error-bound", "theorems", worst <= 1e-8,
        f"max (E Er - (1+eps) best-rank-r) = {worst:.2e}, must be <= 1e-8",
    )


def check_nystrom_bound(seed=208) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for eps in (0.5, 1.0, 2.0):
        l = random_psd(8, rng.integers(0, 2**31))
        r = 2
        k = subset_size_for(r, eps)
        bound = (1 + eps) * truncated_svd_error(l, r, "nuclear")
        worst = max(worst, expected_nystrom_error_exact(l, k) - bound)
    return _result(
        "nystrom-expected-error-bound", "theorems", worst <= 1e-8,
        f"max (E ||L - Lhat||_* - (1+eps) best-rank-r) = {worst:.2e}",
    )


def check_coherence_benchmark(seed=209) -> CheckResult:
    """Planted-coherence regime: at the same sample size, leverage sampling
    reaches loss ratio <= 1.5 while uniform sampling fails in most seeds."""
    n, d, reps = 400, 5, 60
    k = d * (int(np.ceil(np.log(d))) + 2)  # eps = 0.5 budget split
    x, y, _ = gaussian_problem(n, d, sigma=0.3, seed=seed, planted_row_scale=60.0)
    base = loss(x, y, lstsq(x, y))
    ratios = {}
    for kind in ("leverage", "uniform"):
        dist = sampling_distribution(x, kind)
        vals = []
        for rep in range(reps):
            rng = np.random.default_rng([seed, int(kind == "uniform"), rep])
            vals.append(loss(x, y, iid_sketch_solve(x, y, dist, k, rng)) / base)
        ratios[kind] = np.array(vals)
    lev_ok = float(np.median(ratios["leverage"])) <= 1.5
    uni_fail = float(np.mean(ratios["uniform"] > 1.5)) > 0.5
    return _result(
        "coherence-benchmark", "theorems", lev_ok and uni_fail,
        f"k={k}: leverage median ratio {np.median(ratios['leverage']):.3f} (need <= 1.5), "
        f"uniform failure rate {np.mean(ratios['uniform'] > 1.5):.2f} (need > 0.5)",
    )


def check_sampler_tv_lensemble(seed=301) -> CheckResult:
    l = random_psd(5, 7)
    pmf = pmf_lensemble(l)
    emp = PmfTable.from_samples(sample_lensemble_many(l, 20000, seed), 5)
    tv = tv_distance(pmf, emp)
    return _result(
        "tv-lensemble-sampler", "samplers", tv <= 0.05,
        f"TV(empirical 2e4 draws, enumeration) = {tv:.4f}, smoke tolerance 0.05",
    )


def check_sampler_tv_kdpp(seed=302) -> CheckResult:
    l = random_psd(6, 8)
    pmf = pmf_kdpp(l, 2)
    emp = PmfTable.from_samples(sample_kdpp_many(l, 2, 20000, seed), 6)
    tv = tv_distance(pmf, emp)
    return _result(
        "tv-kdpp-sampler", "samplers", tv <= 0.05,
        f"TV(empirical 2e4 draws, enumeration) = {tv:.4f}, smoke tolerance 0.05",
    )


def check_sampler_tv_intermediate(seed=303) -> CheckResult:
    u = random_projection_basis(7, 2, 9)
    pmf = pmf_kdpp(u @ u.T, 2)
    emp = PmfTable.from_samples(sample_projection_dpp_intermediate_many(u, 20000, seed), 7)
    tv = tv_distance(pmf, emp)
    return _result(
        "tv-intermediate-sampler", "samplers", tv <= 0.05,
        f"TV(empirical 2e4 draws, enumeration) = {tv:.4f}, smoke tolerance 0.05",
    )


def check_mcmc_balance(seed=304) -> CheckResult:
    l = random_psd(5, 11)
    states, p = mcmc_transition_matrix(l, 2)
    pi = np.array([pmf_kdpp(l, 2).prob(s) for s in states])
    flow = pi[:, None] * p
    db = float(np.abs(flow - flow.T).max())
    stat = float(np.abs(pi @ p - pi).max())
    return _result(
        "mcmc-detailed-balance", "samplers", db <= 1e-12 and stat <= 1e-12,
        f"max |pi_S P(S,T) - pi_T P(T,S)| = {db:.2e}, |pi P - pi| = {stat:.2e}",
    )


def check_mcmc_tv(seed=305) -> CheckResult:
    l = random_psd(6, 13)
    k = 2
    steps = default_step_budget(6, k, 0.1)
    finals = mcmc_sample_batch(l, k, steps, 3000, seed)
    emp = PmfTable.from_samples(finals, 6)
    tv = tv_distance(pmf_kdpp(l, k), emp)
    return _result(
        "tv-mcmc-chain", "samplers", tv <= 0.05,
        f"TV after {steps} steps over 3000 chains = {tv:.4f}, smoke tolerance 0.05",
    )


def check_sampler_cardinality(seed=306) -> CheckResult:
    l = random_psd(6, 17)
    k = marginal_kernel_from_lensemble(l)
    lam = np.clip(np.linalg.eigvalsh(k), 0.0, 1.0)
    expect = float(lam.sum())
    se = float(np.sqrt(np.sum(lam * (1 - lam)) / 20000))
    sizes = [s.size for s in sample_lensemble_many(l, 20000, seed)]
    dev = abs(float(np.mean(sizes)) - expect)
    return _result(
        "sampler-expected-size", "samplers", dev <= 3 * se,
        f"|mean size - tr(K)| = {dev:.4f}, 3 binomial SE = {3 * se:.4f}",
    )


def check_approx_leverage(seed=307) -> CheckResult:
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((512, 8))
    exact = leverage_exact(x)
    ok_fracs = []
    for s in range(5):
        approx = leverage_approx(x, seed=1000 + s)
        ok_fracs.append(float(np.mean((approx >= 0.5 * exact) & (approx <= 1.5 * exact))))
    worst = min(ok_fracs)
    return _result(
        "approx-leverage-accuracy", "samplers", worst >= 0.95,
        f"min fraction of scores within [l/2, 3l/2] over 5 seeds = {worst:.3f}",
    )


ALL_CHECKS: list[tuple[str, Callable[[], CheckResult]]] = [
    ("identities", check_normalization),
    ("identities", check_marginal_consistency),
    ("identities", check_complement),
    ("identities", check_restriction),
    ("identities", check_negative_correlation),
    ("identities", check_cardinality),
    ("identities", check_projection_equivalence),
    ("theorems", check_projection_marginals),
    ("theorems", check_ridge_marginals),
    ("theorems", check_unbiased_lsq),
    ("theorems", check_unbiased_ridge),
    ("theorems", check_loss_factor),
    ("theorems", check_mse_factor),
    ("theorems", check_css_bound),
    ("theorems", check_nystrom_bound),
    ("theorems", check_coherence_benchmark),
    ("samplers", check_sampler_tv_lensemble),
    ("samplers", check_sampler_tv_kdpp),
    ("samplers", check_sampler_tv_intermediate),
    ("samplers", check_mcmc_balance),
    ("samplers", check_mcmc_tv),
    ("samplers", check_sampler_cardinality),
    ("samplers", check_approx_leverage),
]

SUITES = ("identities", "theorems", "samplers")


def run_checks(suite: str = "all", extra_kernel: np.ndarray | None = None) -> list[CheckResult]:
    results = []
    if extra_kernel is not None:
        try:
            from .dpp import check_lensemble

            check_lensemble(extra_kernel)
            results.append(_result("input-kernel-valid", "identities", True, "kernel accepted"))
        except Exception as exc:  # report, don't crash: this is a verification outcome
            results.append(_result("input-kernel-valid", "identities", False, str(exc)))
    for tag, check in ALL_CHECKS:
        if suite in ("all", tag):
            results.append(check())
    return results
