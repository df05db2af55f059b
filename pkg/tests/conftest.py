"""Shared test oracles: dense-matrix reference implementations that the fast
Markov/per-lag code paths are checked against."""

import numpy as np
import pytest

from paircov import CovParams, Design, SamplePath, WeightSeq


def dense_cov(psi: CovParams, points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    return psi.sigma2 * np.exp(-psi.theta * np.abs(pts[:, None] - pts[None, :]))


def dense_neg2_loglik(psi: CovParams, points, values) -> float:
    """-2 log N(0, Sigma) density without the n ln(2 pi) constant."""
    cov = dense_cov(psi, points)
    z = np.asarray(values, dtype=float)
    sign, logdet = np.linalg.slogdet(cov)
    assert sign > 0
    return float(logdet + z @ np.linalg.solve(cov, z))


def naive_pairwise(psi: CovParams, path: SamplePath, w: WeightSeq, conditional: bool) -> float:
    """Literal double loop over index pairs (i, i+k), k <= K."""
    from paircov import cond_pair_loglik, pair_loglik

    pts = path.design.points
    z = np.asarray(path.values, dtype=float)
    total = 0.0
    for k in range(1, w.K + 1):
        wk = w.at_lag(k)
        if wk == 0.0:
            continue
        for i in range(path.n - k):
            j = i + k
            if conditional:
                # each unordered pair contributes both conditioning directions
                total += wk * (
                    cond_pair_loglik(psi, pts[i], pts[j], z[i], z[j])
                    + cond_pair_loglik(psi, pts[j], pts[i], z[j], z[i])
                )
            else:
                total += wk * pair_loglik(psi, pts[i], pts[j], z[i], z[j])
    return total


def random_path(rng, n: int, equispaced: bool = False) -> SamplePath:
    if equispaced:
        pts = np.linspace(0.0, 1.0, n)
    else:
        pts = np.sort(rng.uniform(size=n))
        pts += np.arange(n) * 1e-9  # keep spacings above the degeneracy floor
        pts = np.clip(pts / max(pts[-1], 1.0), 0.0, 1.0)
        pts = np.unique(pts)
    return SamplePath(Design(pts), rng.standard_normal(len(pts)))


@pytest.fixture
def rng():
    return np.random.default_rng(20260826)
