"""Synthetic problem generators for benchmarks and demos."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class NoiseModel:
    w_true: np.ndarray
    sigma: float

    def __post_init__(self):
        if self.sigma < 0:
            raise ValidationError("sigma must be nonnegative")


def gaussian_problem(
    n: int, d: int, sigma: float, seed, planted_row_scale: float | None = None
):
    """Gaussian regression instance (X, y, noise model).

    With planted_row_scale, the first row is stretched by that factor, which
    concentrates leverage on it and drives the coherence towards n/d; uniform
    row sampling then needs far more rows than leverage-based sampling.
    """
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, d))
    if planted_row_scale is not None:
        x[0] *= planted_row_scale
    w_true = rng.standard_normal(d)
    y = x @ w_true + sigma * rng.standard_normal(n)
    return x, y, NoiseModel(w_true, sigma)


def random_psd(n: int, seed, rank: int | None = None, scale: float = 1.0) -> np.ndarray:
    """Random PSD kernel A A^T with A an n x rank Gaussian matrix."""
    rng = np.random.default_rng(seed)
    r = n if rank is None else rank
    a = rng.standard_normal((n, r))
    return scale * (a @ a.T) / max(r, 1)


def random_projection_basis(n: int, k: int, seed) -> np.ndarray:
    """Random n x k matrix with orthonormal columns."""
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, k)))
    return q[:, :k]
