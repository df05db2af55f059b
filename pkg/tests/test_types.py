import numpy as np
import pytest
from hypothesis import given, strategies as st

from paircov import (
    CorrelationModel,
    CovParams,
    Design,
    ParamBox,
    SamplePath,
    WeightSeq,
    grid_design,
)


def test_cov_params_validation():
    with pytest.raises(ValueError):
        CovParams(0.0, 1.0)
    with pytest.raises(ValueError):
        CovParams(1.0, -1.0)
    assert CovParams(15.0, 2.0).microergodic == 30.0


def test_design_basic():
    d = Design([0.0, 0.5, 1.0])
    assert d.n == 3
    np.testing.assert_allclose(d.spacings, [0.5, 0.5])


def test_design_rejects_bad_points():
    with pytest.raises(ValueError):
        Design([0.0, 1.5])
    with pytest.raises(ValueError):
        Design([0.5, 0.25])
    with pytest.raises(ValueError):
        Design([0.5, 0.5])
    with pytest.raises(ValueError):
        Design([])


def test_design_single_point_allowed():
    assert Design([0.25]).n == 1


@pytest.mark.parametrize("level,n", [(1, 51), (2, 101), (4, 201), (8, 401), (16, 801)])
def test_grid_design_sizes(level, n):
    d = grid_design(level)
    assert d.n == n
    assert d.points[0] == 0.0
    assert d.points[-1] == 1.0
    np.testing.assert_allclose(d.spacings, 0.02 / level)


def test_weight_seq():
    w = WeightSeq([1.0, 0.5])
    assert w.K == 2
    assert w.total == 1.5
    assert w.at_lag(1) == 1.0
    assert w.at_lag(2) == 0.5
    assert w.at_lag(3) == 0.0
    u = WeightSeq.unit(3)
    assert u.K == 3 and u.total == 3.0
    with pytest.raises(ValueError):
        WeightSeq([])
    with pytest.raises(ValueError):
        WeightSeq([-1.0])
    with pytest.raises(ValueError):
        WeightSeq([0.0, 0.0])


def test_sample_path_shape_mismatch():
    with pytest.raises(ValueError):
        SamplePath(Design([0.0, 1.0]), [1.0])


def test_param_box_contains():
    box = ParamBox((1.0, 2.0), (0.5, 1.5))
    assert box.contains(CovParams(1.5, 1.0))
    assert not box.contains(CovParams(3.0, 1.0))
    ray = ParamBox((1.0, 2.0), None)
    assert ray.contains(CovParams(1.5, 100.0))


def test_param_box_single_ray_only():
    with pytest.raises(ValueError):
        ParamBox(None, None)
    with pytest.raises(ValueError):
        ParamBox((2.0, 1.0), (0.5, 1.5))


def test_correlation_model_exponential():
    m = CorrelationModel("exponential", theta=2.0)
    np.testing.assert_allclose(m.at_distance(np.array([0.0, 0.5])), [1.0, np.exp(-1.0)])


def test_correlation_model_matern_validation():
    with pytest.raises(ValueError):
        CorrelationModel("matern", theta=1.0, nu=0.7)
    m = CorrelationModel("matern", theta=1.0, nu=0.5)
    e = CorrelationModel("exponential", theta=1.0)
    r = np.linspace(0.0, 2.0, 9)
    np.testing.assert_allclose(m.at_distance(r), e.at_distance(r), atol=1e-14)


@given(st.floats(0.01, 100), st.floats(0.01, 100))
def test_microergodic_product(theta, sigma2):
    assert CovParams(theta, sigma2).microergodic == pytest.approx(theta * sigma2)


@given(st.integers(1, 5), st.floats(0.0, 3.0))
def test_matern_correlation_bounded(nu_idx, r):
    m = CorrelationModel("matern", theta=5.0, nu=(0.5, 1.5, 2.5)[nu_idx % 3])
    c = float(m.at_distance(np.array([r]))[0])
    assert -1.0 <= c <= 1.0
    if r == 0.0:
        assert c == pytest.approx(1.0)
