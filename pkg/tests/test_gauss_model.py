import math

import numpy as np
import pytest

from coopic.gauss_model import (
    GaussParams,
    LinearGaussianModel,
    conditional_covariance,
    gaussian_cmi,
    level_of,
    n_levels,
    normalize_channel,
)


def test_params_validation_and_phase_reduction():
    with pytest.raises(ValueError):
        GaussParams(-1, 0, 0, 0, 0)
    with pytest.raises(ValueError):
        GaussParams(1, 1, 1, 1, math.inf)
    assert GaussParams(1, 1, 1, 1, 1, -math.pi / 2).theta == pytest.approx(3 * math.pi / 2)
    assert GaussParams(1, 1, 1, 1, 1, 4 * math.pi).theta == pytest.approx(0.0)


def test_normalize_channel():
    params = normalize_channel(1, 1j, -1, 1, 2, 2)
    assert params.magnitudes == (1.0, 1.0, 1.0, 1.0, 2.0)
    assert params.theta == pytest.approx(3 * math.pi / 2)


def test_normalize_channel_requires_reciprocity():
    with pytest.raises(ValueError):
        normalize_channel(1, 1, 1, 1, 1, 2)


def test_gains_keep_direct_links_real():
    gains = GaussParams(2, 3, 4, 5, 1, math.pi).gains()
    assert gains["13"] == 2 and gains["24"] == 5
    assert gains["14"] == pytest.approx(3j)
    assert gains["23"] == pytest.approx(4j)


def test_from_db_and_swap():
    params = GaussParams.from_db(20, 0, 40, -20, 0)
    assert params.h13 == pytest.approx(10.0)
    assert params.h23 == pytest.approx(100.0)
    assert params.swapped().magnitudes == (params.h24, params.h23, params.h14, params.h13, params.hC)


@pytest.mark.parametrize("h,level", [(0.0, 0.0), (0.5, 0.0), (1.0, 0.0), (2.0, 2.0), (8.0, 6.0)])
def test_level_of(h, level):
    assert level_of(h) == pytest.approx(level)


def test_integer_levels():
    levels = n_levels(GaussParams(math.sqrt(8), 2.9, 1.0, 16.0, 0.0), integer=True).levels
    assert levels == (3, 3, 0, 8, 0)


def scalar_model(var: float) -> LinearGaussianModel:
    return LinearGaussianModel.build({"X": var}, {"Y": {"X": 1}})


@pytest.mark.parametrize("var,bits", [(1.0, 1.0), (9.0, math.log2(10))])
def test_cmi_scalar_channel(var, bits):
    model = scalar_model(var)
    assert gaussian_cmi(model, ["X"], ["Y"]) == pytest.approx(bits)
    assert gaussian_cmi(model, ["Y"], ["X"]) == pytest.approx(bits)
    assert gaussian_cmi(model, ["X"], ["Y"], ["X"]) == pytest.approx(0.0)


def test_cmi_conditioning_removes_interference():
    model = LinearGaussianModel.build({"A": 1.0, "B": 4.0}, {"Y": {"A": 1, "B": 1}})
    assert gaussian_cmi(model, ["A"], ["Y"]) == pytest.approx(math.log2(6 / 5))
    assert gaussian_cmi(model, ["A"], ["Y"], ["B"]) == pytest.approx(1.0)


def test_cmi_deterministic_observation_is_unbounded():
    model = LinearGaussianModel.build({"X": 1.0}, {"Y": {"X": 1}}, noise={"Y": 0.0})
    with pytest.raises(ValueError):
        gaussian_cmi(model, ["X"], ["Y"])


def test_cmi_unknown_variable():
    with pytest.raises(ValueError):
        gaussian_cmi(scalar_model(1.0), ["X"], ["Y", "Q"])


def random_model(rng) -> LinearGaussianModel:
    latents = {f"L{i}": float(rng.uniform(0.1, 2.0)) for i in range(3)}
    observed = {}
    for j in range(3):
        observed[f"Y{j}"] = {k: complex(rng.normal(), rng.normal()) for k in latents}
    return LinearGaussianModel.build(latents, observed)


def test_cmi_properties_on_random_models():
    rng = np.random.default_rng(3)
    for _ in range(100):
        model = random_model(rng)
        a = gaussian_cmi(model, ["L0"], ["Y0", "Y1"])
        assert a >= 0
        chain = gaussian_cmi(model, ["L0"], ["Y0"]) + gaussian_cmi(model, ["L0"], ["Y1"], ["Y0"])
        assert a == pytest.approx(chain, abs=1e-9)
        assert gaussian_cmi(model, ["Y0", "Y1"], ["L0"]) == pytest.approx(a, abs=1e-9)
        joint = gaussian_cmi(model, ["L0", "L1"], ["Y2"])
        split = gaussian_cmi(model, ["L0"], ["Y2"]) + gaussian_cmi(model, ["L1"], ["Y2"], ["L0"])
        assert joint == pytest.approx(split, abs=1e-9)


def test_conditional_covariance_scalar():
    model = scalar_model(4.0)
    cov = conditional_covariance(model, ["X"], ["Y"])
    assert cov.shape == (1, 1)
    assert cov[0, 0].real == pytest.approx(4.0 / 5.0)


def test_model_validation():
    with pytest.raises(ValueError):
        LinearGaussianModel.build({"X": -1.0}, {"Y": {"X": 1}})
    with pytest.raises(ValueError):
        LinearGaussianModel.build({"X": 1.0}, {"Y": {"Z": 1}})
    model = scalar_model(2.0)
    assert model.power({"X": 1}) == 2.0
    assert model.scaled(0.5).variances == {"X": 1.0}
