import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from paircov import (
    CorrelationModel,
    CovParams,
    DegeneratePair,
    Design,
    SamplePath,
    WeightSeq,
    cond_pair_loglik,
    full_neg2_loglik,
    pair_loglik,
    pcl_direct,
    pcl_reindexed,
    pl_direct,
    pl_general,
    pl_reindexed,
)
from .conftest import dense_neg2_loglik, naive_pairwise, random_path

UNIT = CovParams(1.0, 1.0)


def test_pair_loglik_frozen_value():
    # theta=1, sigma2=1, |s-t|=1, zs=zt=0: ln(1 - e^{-2})
    assert pair_loglik(UNIT, 0.0, 1.0, 0.0, 0.0) == pytest.approx(
        math.log(1.0 - math.exp(-2.0)), abs=1e-12
    )
    assert math.log(1.0 - math.exp(-2.0)) == pytest.approx(-0.145413, abs=1e-6)


def test_pair_loglik_with_data():
    # zs=0, zt=1: ln(1 - e^{-2}) + 1/(1 - e^{-2})
    expected = math.log(1.0 - math.exp(-2.0)) + 1.0 / (1.0 - math.exp(-2.0))
    assert pair_loglik(UNIT, 0.0, 1.0, 0.0, 1.0) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(1.011104, abs=1e-6)


def test_pair_loglik_matches_dense_bivariate(rng):
    for _ in range(50):
        psi = CovParams(rng.uniform(0.5, 20), rng.uniform(0.2, 4))
        s, t = sorted(rng.uniform(0, 1, size=2))
        if t - s < 1e-3:
            continue
        zs, zt = rng.standard_normal(2)
        assert pair_loglik(psi, s, t, zs, zt) == pytest.approx(
            dense_neg2_loglik(psi, [s, t], [zs, zt]), rel=1e-10, abs=1e-10
        )


def test_conditional_identity(rng):
    """Joint pair term = marginal term of the first point + conditional term."""
    for _ in range(50):
        psi = CovParams(rng.uniform(0.5, 20), rng.uniform(0.2, 4))
        s, t = 0.1, 0.1 + rng.uniform(0.01, 0.8)
        zs, zt = rng.standard_normal(2)
        joint = pair_loglik(psi, s, t, zs, zt)
        marginal = math.log(psi.sigma2) + zs * zs / psi.sigma2
        assert joint == pytest.approx(
            marginal + cond_pair_loglik(psi, s, t, zs, zt), rel=1e-12, abs=1e-12
        )


def test_degenerate_pair_raises():
    with pytest.raises(DegeneratePair):
        pair_loglik(UNIT, 0.5, 0.5, 0.0, 0.0)
    with pytest.raises(DegeneratePair):
        cond_pair_loglik(UNIT, 0.5, 0.5 + 1e-15, 0.0, 0.0)


def test_pairwise_objectives_match_naive_loops(rng):
    for _ in range(20):
        n = int(rng.integers(3, 40))
        K = int(rng.integers(1, min(n - 1, 5) + 1))
        path = random_path(rng, n, equispaced=bool(rng.integers(2)))
        w = WeightSeq(rng.uniform(0.1, 2.0, size=K))
        psi = CovParams(rng.uniform(0.5, 30), rng.uniform(0.2, 4))
        assert pl_direct(psi, path, w) == pytest.approx(
            naive_pairwise(psi, path, w, conditional=False), rel=1e-10
        )
        assert pcl_direct(psi, path, w) == pytest.approx(
            naive_pairwise(psi, path, w, conditional=True), rel=1e-10
        )


def test_reindexed_identity_100_instances(rng):
    """The triple-sum reindexing is an exact rearrangement of the pair sum."""
    for _ in range(100):
        n = int(rng.integers(3, 200))
        K = int(rng.integers(1, min(n - 1, 5) + 1))
        path = random_path(rng, n, equispaced=bool(rng.integers(2)))
        w = WeightSeq(rng.uniform(0.1, 2.0, size=K))
        psi = CovParams(rng.uniform(0.5, 30), rng.uniform(0.2, 4))
        a, b = pl_direct(psi, path, w), pl_reindexed(psi, path, w)
        assert b == pytest.approx(a, rel=1e-10)
        a, b = pcl_direct(psi, path, w), pcl_reindexed(psi, path, w)
        assert b == pytest.approx(a, rel=1e-10)


def test_n3_k2_hand_enumeration():
    """n=3, K=2: exactly the pairs (1,2), (2,3) at lag 1 and (1,3) at lag 2."""
    path = SamplePath(Design([0.0, 0.4, 1.0]), [0.3, -0.7, 1.1])
    w = WeightSeq([1.0, 0.5])
    psi = CovParams(3.0, 1.2)
    pts, z = path.design.points, path.values
    expected = (
        1.0 * pair_loglik(psi, pts[0], pts[1], z[0], z[1])
        + 1.0 * pair_loglik(psi, pts[1], pts[2], z[1], z[2])
        + 0.5 * pair_loglik(psi, pts[0], pts[2], z[0], z[2])
    )
    assert pl_direct(psi, path, w) == pytest.approx(expected, rel=1e-12)
    assert pl_reindexed(psi, path, w) == pytest.approx(expected, rel=1e-12)


def test_full_loglik_single_and_pair():
    assert full_neg2_loglik(UNIT, SamplePath(Design([0.3]), [0.0])) == pytest.approx(0.0)
    path = SamplePath(Design([0.0, 1.0]), [0.4, -0.2])
    assert full_neg2_loglik(UNIT, path) == pytest.approx(
        pair_loglik(UNIT, 0.0, 1.0, 0.4, -0.2), rel=1e-12
    )


def test_full_loglik_matches_dense_oracle(rng):
    """Acceptance oracle: 200 random instances, n <= 64, 1e-8 relative."""
    for _ in range(200):
        n = int(rng.integers(2, 65))
        path = random_path(rng, n, equispaced=bool(rng.integers(2)))
        psi = CovParams(rng.uniform(0.5, 30), rng.uniform(0.2, 4))
        fast = full_neg2_loglik(psi, path)
        dense = dense_neg2_loglik(psi, path.design.points, path.values)
        assert fast == pytest.approx(dense, rel=1e-8, abs=1e-8)


@settings(max_examples=60, deadline=None)
@given(
    theta=st.floats(0.5, 30),
    sigma2=st.floats(0.2, 4),
    gap=st.floats(0.01, 0.9),
    zs=st.floats(-3, 3),
    zt=st.floats(-3, 3),
)
def test_joint_conditional_decomposition_property(theta, sigma2, gap, zs, zt):
    psi = CovParams(theta, sigma2)
    joint = pair_loglik(psi, 0.05, 0.05 + gap, zs, zt)
    marginal = math.log(sigma2) + zs * zs / sigma2
    cond = cond_pair_loglik(psi, 0.05, 0.05 + gap, zs, zt)
    assert joint == pytest.approx(marginal + cond, rel=1e-10, abs=1e-10)


def test_pl_general_matches_pair_sum(rng):
    corr = CorrelationModel("exponential", theta=4.0)
    pts = np.sort(rng.uniform(size=8))
    y = rng.standard_normal(8)
    sigma2 = 1.7
    psi = CovParams(4.0, sigma2)
    expected = sum(
        pair_loglik(psi, pts[i], pts[j], y[i], y[j])
        for i in range(8)
        for j in range(i + 1, 8)
    )
    assert pl_general(sigma2, pts, y, corr) == pytest.approx(expected, rel=1e-10)


def test_pl_general_weight_function(rng):
    corr = CorrelationModel("exponential", theta=4.0)
    pts = np.sort(rng.uniform(size=10))
    y = rng.standard_normal(10)

    def g(diff):
        return 1.0 if abs(float(np.ravel(diff)[0])) < 0.2 else 0.0

    val = pl_general(1.0, pts, y, corr, weights=g)
    psi = CovParams(4.0, 1.0)
    expected = sum(
        pair_loglik(psi, pts[i], pts[j], y[i], y[j])
        for i in range(10)
        for j in range(i + 1, 10)
        if pts[j] - pts[i] < 0.2
    )
    assert val == pytest.approx(expected, rel=1e-10)


def test_pl_general_degenerate_pair():
    corr = CorrelationModel("exponential", theta=1e-13)
    with pytest.raises(DegeneratePair):
        pl_general(1.0, np.array([0.0, 1.0]), np.array([0.1, 0.2]), corr)
