import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tameforge.autochain import apply_precise, tame_action_residual
from tameforge.errors import OffVariety, OverflowGuard
from tameforge.products import (CStarPoint, KRVariety, gizatullin_chain, kr_flow, kr_residual, lattice_points,
                                product_chain, sample_kr_cubic)

KR = KRVariety.preset("kr-cubic")


def test_product_identity_and_example():
    pts = lattice_points(range(1, 6))
    assert tame_action_residual(product_chain([1, 2, 3, 4, 5]), pts, pts) < 1e-8
    ch = product_chain([2, 4, 6, 8, 10])
    assert np.max(np.abs(ch.apply(np.array([3, 1])) - [6, 1])) < 1e-8
    assert tame_action_residual(ch, pts, lattice_points([2, 4, 6, 8, 10])) < 1e-8


def test_product_hand_trace():
    ch = product_chain([2, 4, 6, 8, 10])
    stages = ch.stage_images(lattice_points([3]))
    assert np.allclose(stages[1][0], [3, np.e**3])
    assert np.allclose(stages[2][0], [6, np.e**3])


def test_product_guard():
    with pytest.raises(OverflowGuard):
        product_chain(list(range(1, 14)))


def test_gizatullin_examples():
    pts = lattice_points([1, 2, 3])
    ch = gizatullin_chain(1, [1, 2, 3])
    assert np.allclose(ch.primitives[1].fn.values, 0)
    ch = gizatullin_chain(1, [2, 3, 1])
    assert tame_action_residual(ch, pts, lattice_points([2, 3, 1])) < 1e-7
    n = 2
    stages = ch.stage_images(lattice_points([n]))
    assert np.allclose(stages[1][0], [n, np.exp(n**2)])
    assert np.allclose(stages[2][0], [3, np.exp(n**2)])
    ch0 = gizatullin_chain(0, [3, 1, 2])
    assert tame_action_residual(ch0, pts, lattice_points([3, 1, 2])) < 1e-8


def test_gizatullin_guard():
    with pytest.raises(OverflowGuard):
        gizatullin_chain(1, list(range(1, 7)))


@settings(max_examples=15)
@given(st.permutations([1, 2, 3, 4]), st.integers(0, 1))
def test_chains_keep_second_factor_nonzero(ell, m):
    # exp multipliers underflow in double far from the set, so the check runs in mpmath
    Z = np.random.default_rng(0).normal(size=(20, 2)) * 0.5 + np.array([2, 1])
    for ch in (product_chain(ell), gizatullin_chain(m, ell)):
        w = apply_precise(ch, Z, 30)[:, 1]
        assert all(abs(x) > 0 for x in w)


def test_cstar_point():
    with pytest.raises(ValueError):
        CStarPoint(1, 0)
    assert np.array_equal(CStarPoint(1, 2).as_array(), [1, 2])


def test_kr_residual_examples():
    assert kr_residual([1, -1, 0, 0], KR) == 0
    assert kr_residual([1, 0, 0, 0], KR) == 1


@pytest.mark.parametrize("t", [0, 0.5, 1 - 2j])
def test_kr_flow_example(t):
    out = kr_flow("V", t, np.array([1, -1, 0, 0]), KR)
    assert np.allclose(out, [1, -1 - t**2, t, 0], atol=1e-12)
    assert kr_residual(out, KR) < 1e-10


def test_kr_flow_rejects_off_variety():
    with pytest.raises(OffVariety):
        kr_flow("V", 1.0, [1, 0, 0, 0], KR)


@settings(max_examples=25)
@given(st.integers(0, 2**31))
def test_kr_flow_laws(seed):
    rng = np.random.default_rng(seed)
    P = sample_kr_cubic(rng, 10)
    s, t = rng.uniform(-0.5, 0.5, 2) + 1j * rng.uniform(-0.5, 0.5, 2)
    for field in ("V", "W"):
        out = kr_flow(field, t, P, KR)
        assert kr_residual(out, KR) < 1e-7
        both = kr_flow(field, s, out, KR)
        assert np.max(np.abs(both - kr_flow(field, s + t, P, KR))) < 1e-8
    vw = kr_flow("W", t, kr_flow("V", s, P, KR), KR)
    wv = kr_flow("V", s, kr_flow("W", t, P, KR), KR)
    assert np.max(np.abs(vw - wv)) < 1e-7


def test_kr_flow_small_x_branch():
    P = np.array([[0, 3, 0, 0]], dtype=complex)
    out = kr_flow("W", 0.7, P, KR)
    # x = 0: z1 does not move and y picks up -3 z1^2 t = 0
    assert np.allclose(out, P)
