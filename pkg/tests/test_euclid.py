import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tameforge.autochain import check_volume, inverse, tame_action_residual
from tameforge.errors import FirstCoordinateMismatch, NodeCollision
from tameforge.euclid import AxisSet, c2_relabel, line_to_targets, normalized_images, very_tame_normalize
from tameforge.numerics import sample_polydisc


def test_axis_targets_give_zero_functions():
    b = AxisSet(3, (1, 2, 5))
    ch = line_to_targets(b, b.points())
    assert all(np.allclose(p.fn.values, 0) for p in ch.primitives)
    assert tame_action_residual(ch, b.points(), b.points()) == 0


def test_line_to_targets_in_c3():
    b = AxisSet(3, (1, 2))
    targets = [[1, 5, 7], [2, -1, 0]]
    ch = line_to_targets(b, targets)
    assert len(ch) == 2
    assert tame_action_residual(ch, b.points(), targets) < 1e-9
    assert check_volume(ch, count=50).residual < 1e-6


def test_line_to_targets_unique_quadratic():
    ch = line_to_targets(AxisSet(2, (0, 1, 2)), [[0, 0], [1, 1], [2, 4]])
    x = np.linspace(-2, 2, 7)
    assert np.allclose(ch.primitives[0].fn(x), x**2)


def test_line_to_targets_errors():
    with pytest.raises(FirstCoordinateMismatch):
        line_to_targets(AxisSet(2, (1,)), [[2, 0]])
    with pytest.raises(NodeCollision):
        AxisSet(2, (1, 1))


@pytest.mark.parametrize("alpha,beta", [((1, 2, 3), (1, 2, 3)), ((1, 2, 3), (10, 20, 30)), ((0, 1), (1, 0))])
def test_c2_relabel(alpha, beta):
    ch = c2_relabel(alpha, beta)
    assert len(ch) == 3
    src = np.stack([alpha, np.zeros(len(alpha))], axis=1)
    dst = np.stack([beta, np.zeros(len(beta))], axis=1)
    assert tame_action_residual(ch, src, dst) < 1e-9
    assert check_volume(ch, count=50).residual < 1e-6


def test_c2_relabel_stage_values():
    ch = c2_relabel([1, 2, 3], [10, 20, 30])
    p, q, r = (s.fn for s in ch.primitives)
    assert np.allclose(p([1, 2, 3]), [1, 2, 3])
    assert np.allclose(q([1, 2, 3]), [9, 18, 27])
    assert np.allclose(r([10, 20, 30]), [-1, -2, -3])


def test_normalize_points_on_axis():
    S = [[1, 0], [2, 0], [3, 0]]
    ch = very_tame_normalize(S)
    assert tame_action_residual(ch, S, normalized_images(3)) < 1e-9


def test_normalize_inserts_preliminary_shear():
    S = [[0, 0], [0, 1]]
    ch = very_tame_normalize(S)
    assert len(ch) == 4 and ch.primitives[0].fn.degree == 1
    assert tame_action_residual(ch, S, normalized_images(2)) < 1e-9


@settings(max_examples=25)
@given(st.integers(0, 2**31), st.integers(1, 6))
def test_normalize_random_sets(seed, count):
    S = sample_polydisc(np.random.default_rng(seed), count, 2, 2.0)
    ch = very_tame_normalize(S, seed=seed)
    assert tame_action_residual(ch, S, normalized_images(count)) < 1e-8
    assert tame_action_residual(inverse(ch), ch.apply(S), S) < 1e-9
    assert check_volume(ch, count=50, radius=1.0).residual < 1e-6
