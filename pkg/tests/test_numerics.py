import numpy as np
import pytest
from hypothesis import given, strategies as st

from tameforge.errors import NonFiniteEvaluation
from tameforge.numerics import (ToleranceConfig, as_points, disc_grid, jacobian, jacobians, max_deviation,
                                polydisc_grid, sample_polydisc)


def test_identity_jacobian():
    assert np.allclose(jacobian(lambda Z: Z, np.array([1 + 2j, -0.5j])), np.eye(2), atol=1e-12)


def test_linear_map_jacobian():
    M = np.array([[1, 2j], [3, -1 + 1j]])
    J = jacobian(lambda Z: Z @ M.T, np.array([0.3, 0.7j]))
    assert np.max(np.abs(J - M)) < 1e-10


def test_quadratic_map_jacobian():
    f = lambda Z: np.stack([Z[:, 0], Z[:, 1] + Z[:, 0] ** 2], axis=1)
    J = jacobian(f, np.array([2.0, 0.0]))
    assert np.max(np.abs(J - np.array([[1, 0], [4, 1]]))) < 1e-8


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_jacobian_rejects_nonfinite():
    with pytest.raises(NonFiniteEvaluation):
        jacobian(lambda Z: 1 / (Z - Z), np.array([1.0, 2.0]))


@given(st.integers(2, 6), st.integers(0, 2**31))
def test_jacobian_stable_under_step_halving(degree, seed):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=degree + 1)
    f = lambda Z: np.stack([Z[:, 0], Z[:, 1] + np.polyval(c, Z[:, 0])], axis=1)
    z = sample_polydisc(rng, 1, 2, 1.0)[0]
    cfg = ToleranceConfig()
    half = ToleranceConfig(diff_step=cfg.diff_step / 2)
    assert np.max(np.abs(jacobian(f, z, cfg) - jacobian(f, z, half))) < 10 * cfg.jac_tol


def test_max_deviation_identical_maps():
    assert max_deviation(lambda Z: Z, lambda Z: Z, 1.0, 2) == 0.0


def test_max_deviation_constant_offset():
    c = 0.3 - 0.4j
    assert max_deviation(lambda Z: Z, lambda Z: Z + np.array([c, 0]), 1.0, 2) == pytest.approx(abs(c), abs=1e-15)


def test_max_deviation_shear_reaches_grid_corner():
    shear = lambda Z: np.stack([Z[:, 0], Z[:, 1] + Z[:, 0]], axis=1)
    grid = polydisc_grid(1.0, 2, 7)
    oracle = np.max(np.abs(grid[:, 0]))
    got = max_deviation(lambda Z: Z, shear, 1.0, 2)
    assert got == oracle == 1.0


def test_grid_stays_in_disc():
    g = disc_grid(2.0, 9)
    assert np.all(np.abs(g) <= 2.0 + 1e-12) and 2.0 in g.real


def test_config_validation():
    with pytest.raises(ValueError):
        ToleranceConfig(diff_step=0)
    with pytest.raises(ValueError):
        ToleranceConfig(grid_n=1)


def test_env_override(monkeypatch):
    monkeypatch.setenv("TAMEFORGE_TOL", "1e-5")
    assert ToleranceConfig.from_env().residual_tol == 1e-5


def test_as_points_promotes_single_point():
    assert as_points([1, 2]).shape == (1, 2)


def test_jacobians_batch_shape():
    Z = sample_polydisc(np.random.default_rng(0), 5, 3, 1.0)
    assert jacobians(lambda P: P, Z).shape == (5, 3, 3)
