"""Determinantal point process sampling and DPP-based randomized linear algebra.

The library pairs every randomized routine with an exhaustive enumeration
oracle, so the distributional identities behind the estimators (unbiasedness,
exact error factors, marginal formulas, approximation bounds) can be checked
exactly at small scale.
"""

from .dpp import (
    PmfTable,
    derived_rng,
    elementary_symmetric,
    marginal_kernel_from_lensemble,
    marginals_from_pmf,
    mixture_decompose,
    pmf_correlation,
    pmf_kdpp,
    pmf_lensemble,
    sample_kdpp,
    sample_kdpp_many,
    sample_lensemble,
    sample_lensemble_many,
    sample_projection_dpp,
    tv_distance,
)
from .estimators import (
    expected_estimator_exact,
    expected_loss_exact,
    expected_mse_exact,
    iid_sketch_solve,
    lensemble_ridge,
    loss,
    projection_dpp_lsq,
    subspace_embedding_check,
)
from .fastsamplers import (
    ChainState,
    IntermediateConfig,
    chain_state,
    default_step_budget,
    greedy_initial_subset,
    mcmc_sample_batch,
    mcmc_step,
    mcmc_transition_matrix,
    sample_kdpp_mcmc,
    sample_projection_dpp_intermediate,
    sample_projection_dpp_intermediate_many,
)
from .linalg import (
    SymmetricEigen,
    det_submatrix,
    eig_sym,
    lstsq,
    numerical_rank,
    pinv,
    truncated_svd_error,
)
from .lowrank import (
    SubsetApproxReport,
    css_kdpp,
    expected_err_exact,
    expected_nystrom_error_exact,
    nystrom,
    nystrom_error_nuclear,
    nystrom_kdpp,
    reconstruction_error,
    subset_size_for,
)
from .scores import (
    coherence,
    effective_dimension,
    leverage_approx,
    leverage_exact,
    ridge_leverage_exact,
    sampling_distribution,
)
from .synthetic import NoiseModel, gaussian_problem, random_projection_basis, random_psd

__version__ = "0.1.0"

__all__ = [
    "ChainState",
    "IntermediateConfig",
    "NoiseModel",
    "PmfTable",
    "SubsetApproxReport",
    "SymmetricEigen",
    "chain_state",
    "coherence",
    "css_kdpp",
    "default_step_budget",
    "derived_rng",
    "det_submatrix",
    "effective_dimension",
    "eig_sym",
    "elementary_symmetric",
    "expected_err_exact",
    "expected_estimator_exact",
    "expected_loss_exact",
    "expected_mse_exact",
    "expected_nystrom_error_exact",
    "gaussian_problem",
    "greedy_initial_subset",
    "iid_sketch_solve",
    "lensemble_ridge",
    "leverage_approx",
    "leverage_exact",
    "loss",
    "lstsq",
    "marginal_kernel_from_lensemble",
    "marginals_from_pmf",
    "mcmc_sample_batch",
    "mcmc_step",
    "mcmc_transition_matrix",
    "mixture_decompose",
    "numerical_rank",
    "nystrom",
    "nystrom_error_nuclear",
    "nystrom_kdpp",
    "pinv",
    "pmf_correlation",
    "pmf_kdpp",
    "pmf_lensemble",
    "projection_dpp_lsq",
    "random_projection_basis",
    "random_psd",
    "reconstruction_error",
    "ridge_leverage_exact",
    "sample_kdpp",
    "sample_kdpp_many",
    "sample_kdpp_mcmc",
    "sample_lensemble",
    "sample_lensemble_many",
    "sample_projection_dpp",
    "sample_projection_dpp_intermediate",
    "sample_projection_dpp_intermediate_many",
    "sampling_distribution",
    "subset_size_for",
    "subspace_embedding_check",
    "truncated_svd_error",
    "tv_distance",
]
