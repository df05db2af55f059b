"""Exponential covariance evaluation and exact Gaussian process simulation.

Two exact samplers are provided: an O(n) Markov recursion specific to the
exponential model, and a dense-Cholesky sampler for general correlation
models that doubles as a cross-validation oracle.
"""

from __future__ import annotations

import math

import numpy as np

from .types import CorrelationModel, CovParams, Design, NotPositiveDefinite, SamplePath

# Relative diagonal jitter tried once before giving up on a factorization.
CHOLESKY_JITTER = 1e-10


def replication_stream(base_seed: int, rep_index: int) -> np.random.Generator:
    """Counter-based Philox stream keyed by (base_seed, rep_index).

    Distinct keys give statistically independent, non-overlapping streams, so
    replications can be generated in any order (or in parallel) and still
    reproduce bit-identically.
    """
    key = np.array([base_seed % 2**64, rep_index % 2**64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def exp_cov(params: CovParams, s: float, t: float) -> float:
    """Stationary exponential covariance sigma2 * exp(-theta |s - t|)."""
    return params.sigma2 * math.exp(-params.theta * abs(s - t))


def simulate_ou(params: CovParams, design: Design, rng: np.random.Generator) -> SamplePath:
    """Exact draw of the stationary Ornstein-Uhlenbeck process on a design.

    Uses the Markov recursion Z_{i+1} = rho_i Z_i + eps_i with
    rho_i = exp(-theta Delta_i) and eps_i ~ N(0, sigma2 (1 - rho_i^2)),
    which reproduces the exponential covariance exactly in distribution.
    """
    n = design.n
    rho = np.exp(-params.theta * design.spacings)
    # 1 - rho^2 via expm1 to stay accurate for tiny theta * Delta.
    sd = np.sqrt(params.sigma2 * (-np.expm1(-2.0 * params.theta * design.spacings)))
    eps = rng.standard_normal(n)
    z = np.empty(n)
    z[0] = math.sqrt(params.sigma2) * eps[0]
    for i in range(n - 1):
        z[i + 1] = rho[i] * z[i] + sd[i] * eps[i + 1]
    return SamplePath(design, z)


def _correlation_matrix(corr: CorrelationModel, points: np.ndarray) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[1] != corr.dim:
        raise ValueError(f"points must have dimension {corr.dim}")
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    return corr.at_distance(dist)


def simulate_general(
    corr: CorrelationModel,
    sigma2: float,
    points: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """Exact draw via dense Cholesky for a general correlation model.

    Returns the value vector (points may be d-dimensional, so no SamplePath).
    Adds a one-shot diagonal jitter if the first factorization fails; raises
    NotPositiveDefinite if the second attempt fails too.
    """
    if sigma2 <= 0 or not math.isfinite(sigma2):
        raise ValueError("sigma2 must be positive and finite")
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    if pts.ndim == 1:
        pts = pts[:, None]
    if len(np.unique(pts, axis=0)) < len(pts):
        raise NotPositiveDefinite("duplicate points make the covariance singular")
    cov = sigma2 * _correlation_matrix(corr, pts)
    try:
        chol = np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        try:
            chol = np.linalg.cholesky(cov + CHOLESKY_JITTER * sigma2 * np.eye(len(pts)))
        except np.linalg.LinAlgError:
            raise NotPositiveDefinite(
                "covariance matrix is not positive definite (after jitter)"
            ) from None
    return chol @ rng.standard_normal(len(pts))
