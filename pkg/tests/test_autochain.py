import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tameforge.autochain import (AutoChain, FlowPrimitive, Lift, ShearPrimitive, apply, apply_precise, basis,
                                 chain_from_dict, chain_jacobians, chain_to_dict, check_symplectic, check_volume,
                                 identity_chain, inverse, linear_form, make_forstneric_shear, make_shear,
                                 round_trip_precise, round_trip_residual, solve_stage, symplectic_matrix,
                                 verify_tame_action)
from tameforge.errors import InvalidShear, LengthMismatch, NonFiniteEvaluation, StageCollision, ZeroDirection
from tameforge.flows import GENERATORS
from tameforge.interp import constant, fit, identity
from tameforge.numerics import jacobians, sample_polydisc
from tameforge.sl2 import sample_sl2
from tameforge.symplectic import axis_points, axis_relabel


def random_shear(rng, dim, degree=3, scale=0.3):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v /= np.linalg.norm(v)
    lam = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    lam[-1] = -(lam[:-1] @ v[:-1]) / v[-1]
    lam /= np.linalg.norm(lam)
    nodes = np.arange(degree + 1, dtype=complex)
    return make_shear(v, lam, fit(nodes, scale * rng.normal(size=degree + 1)))


def random_forstneric(rng, n, degree=3):
    v = rng.normal(size=2 * n) + 1j * rng.normal(size=2 * n)
    v /= np.linalg.norm(v)
    nodes = np.arange(degree + 1, dtype=complex)
    return make_forstneric_shear(v, fit(nodes, 0.3 * rng.normal(size=degree + 1)), n)


def test_empty_chain_is_identity():
    z = np.array([1 + 1j, 2.0])
    assert np.array_equal(apply(identity_chain(2), z), z)


def test_single_shear_constant():
    s = make_shear(basis(2, (1, 1)), basis(2, (0, 1)), constant(1.0))
    assert np.allclose(AutoChain(2, (s,)).apply(np.zeros(2)), [0, 1])


def test_axis_graph_example():
    ch = axis_relabel([1, 2, 3], [4, 9, 16], 2)
    assert np.max(np.abs(ch.apply(axis_points([2], 2))[0] - axis_points([9], 2)[0])) < 1e-12


def test_lambda_v_checked():
    with pytest.raises(InvalidShear):
        make_shear(basis(2, (0, 1)), basis(2, (0, 1)), identity())
    with pytest.raises(ZeroDirection):
        make_forstneric_shear(np.zeros(2), identity(), 1)


def test_forstneric_functional_is_Jv():
    J = symplectic_matrix(2)
    assert np.allclose(J @ basis(4, (0, 1)), -basis(4, (2, 1)))
    s = make_forstneric_shear(basis(4, (2, 1), (3, np.sqrt(2))), identity(), 2)
    assert np.allclose(s.lam, basis(4, (0, 1), (1, np.sqrt(2))))
    s1 = make_forstneric_shear(basis(2, (1, 1)), identity(), 1)
    assert np.allclose(s1.apply(np.array([[2.0, 3.0]])), [[2, 5]])


def test_inverse_empty_and_single():
    assert len(inverse(identity_chain(3))) == 0
    s = make_shear(basis(2, (1, 1)), basis(2, (0, 1)), fit([0, 1, 2], [1, -1, 3]))
    ch = AutoChain(2, (s,))
    Z = sample_polydisc(np.random.default_rng(0), 20, 2, 2.0)
    assert round_trip_residual(ch, Z) < 1e-12
    assert np.allclose(inverse(ch).primitives[0].fn([0, 1, 2]), [-1, 1, -3])


def test_inverse_of_random_six_primitive_chain(rng):
    prims = tuple(random_shear(rng, 3, 2, 0.1) for _ in range(6))
    ch = AutoChain(3, prims)
    Z = sample_polydisc(rng, 20, 3, 1.0)
    assert round_trip_residual(ch, Z) < 1e-9


def test_composite_jacobian_with_inverse_is_identity(rng):
    ch = AutoChain(3, tuple(random_shear(rng, 3, 2) for _ in range(4)))
    both = ch.compose(inverse(ch))
    Z = sample_polydisc(rng, 20, 3, 2.0)
    D = jacobians(both.apply, Z)
    assert np.max(np.abs(D - np.eye(3))) < 1e-6


def test_stagewise_and_differenced_jacobians_agree(rng):
    ch = AutoChain(4, tuple(random_forstneric(rng, 2, 3) for _ in range(3)))
    Z = sample_polydisc(rng, 10, 4, 0.5)
    a = chain_jacobians(ch, Z, stagewise=True)
    b = chain_jacobians(ch, Z, stagewise=False)
    assert np.max(np.abs(a - b)) / max(1, np.max(np.abs(a))) < 1e-7


def test_flow_jacobian_agrees_with_differencing():
    f = fit([0, 1, 2], [0.1, -0.2, 0.3])
    fp = FlowPrimitive("V", 4, 0j, f, basis(4, (2, -1)))
    ch = AutoChain(4, (fp,))
    Z = sample_sl2(np.random.default_rng(3), 5, 0.5)
    a = chain_jacobians(ch, Z, stagewise=True)
    b = chain_jacobians(ch, Z, stagewise=False)
    assert np.max(np.abs(a - b)) < 1e-7


def test_symplectic_checks():
    assert check_symplectic(identity_chain(4), 2).residual < 1e-10
    assert check_volume(identity_chain(2)).residual < 1e-10


@given(st.integers(0, 2**31), st.integers(1, 3))
def test_forstneric_shears_compose_symplectically(seed, n):
    rng = np.random.default_rng(seed)
    ch = AutoChain(2 * n, (random_forstneric(rng, n), random_forstneric(rng, n)))
    assert check_symplectic(ch, n, seed=seed).residual < 1e-6


@given(st.integers(0, 2**31))
def test_single_forstneric_shear_is_symplectic_in_double_route(seed):
    rng = np.random.default_rng(seed)
    ch = AutoChain(4, (random_forstneric(rng, 2, 4),))
    rep = check_symplectic(ch, 2, radius=1.0, stagewise=False, seed=seed)
    assert rep.residual < 1e-6


def test_non_symplectic_shear_detected():
    # direction e2 + a e4 with argument z1 + a z3 is a shear but not a symplectic one
    a = np.sqrt(2)
    s = make_shear(basis(4, (1, 1), (3, a)), basis(4, (0, 1), (2, a)), identity())
    rep = check_symplectic(AutoChain(4, (s,)), 2, radius=1.0)
    assert rep.residual > 1e-3 and not rep.passed


def test_volume_of_shear_compositions(rng):
    y = make_shear(basis(2, (1, 1)), basis(2, (0, 1)), fit(np.arange(6), rng.normal(size=6)))
    assert check_volume(AutoChain(2, (y,))).residual < 1e-8
    x = make_shear(basis(2, (0, 1)), basis(2, (1, 1)), fit(np.arange(5), rng.normal(size=5)))
    assert check_volume(AutoChain(2, (y, x, y))).residual < 1e-6


def test_tame_action_verifier():
    Z = np.array([[1, 2], [3, 4]], dtype=complex)
    assert verify_tame_action(identity_chain(2), Z, Z).residual == 0
    bad = verify_tame_action(identity_chain(2), Z, Z + 1)
    assert not bad.passed
    with pytest.raises(LengthMismatch):
        verify_tame_action(identity_chain(2), Z, Z[:1])


def test_flow_group_law():
    rng = np.random.default_rng(7)
    for name in ("V", "W", "H", "A", "B", "C"):
        Z = sample_sl2(rng, 10, 0.5)
        s, t = 0.4 - 0.3j, -0.7 + 0.2j
        f = GENERATORS[name][0]
        lhs = f(f(Z, np.full(10, t), {}), np.full(10, s), {})
        rhs = f(Z, np.full(10, s + t), {})
        assert np.max(np.abs(lhs - rhs)) < 1e-8, name
    for name, params in (("ProductX", {}), ("ProductY", {}), ("GizPhi", {"m": 2}), ("GizPsi", {"m": 1})):
        Z = sample_polydisc(rng, 10, 2, 1.0) + 0.5
        f = GENERATORS[name][0]
        lhs = f(f(Z, np.full(10, 0.3), params), np.full(10, 0.5j), params)
        assert np.max(np.abs(lhs - f(Z, np.full(10, 0.3 + 0.5j), params))) < 1e-8, name


def test_kernel_condition_enforced():
    with pytest.raises(InvalidShear):
        FlowPrimitive("V", 4, 0j, identity(), basis(4, (0, 1)))


def test_solve_stage_collisions():
    p = solve_stage([1, 2, 1], [5, 6, 5], stage=3)
    assert p.degree == 1
    with pytest.raises(StageCollision) as err:
        solve_stage([1, 2, 1], [5, 6, 7], stage=3)
    assert err.value.stage == 3


def test_linear_form_batch_independent(rng):
    Z = sample_polydisc(rng, 9, 4, 2.0)
    lam = np.array([0.3, 0, -1.7j, 2])
    whole = linear_form(Z, lam)
    assert all(linear_form(Z[i : i + 1], lam)[0] == whole[i] for i in range(9))


def test_serialization_round_trip(rng):
    inner = AutoChain(2, (random_shear(rng, 2),))
    flow = FlowPrimitive("W", 4, 0.5, fit([1, 2], [0.1, 0.2]), basis(4, (1, 1)))
    ch = AutoChain(4, (random_forstneric(rng, 2), flow, Lift(4, (0, 2), inner)), name="mixed")
    d = json.loads(json.dumps(chain_to_dict(ch)))
    back = chain_from_dict(d)
    Z = sample_sl2(rng, 5, 0.5)
    assert np.max(np.abs(back.apply(Z) - ch.apply(Z))) < 1e-10
    assert {"kind", "dim", "v", "lambda", "nodes", "values"} <= set(d["primitives"][0])
    assert "time" in d["primitives"][1]


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_nonfinite_apply_raises():
    s = make_shear(basis(2, (1, 1)), basis(2, (0, 1)), fit(np.arange(30), 2.0 ** np.arange(30)))
    with pytest.raises(NonFiniteEvaluation):
        AutoChain(2, (s,) * 6).apply(np.array([[1e30, 0]]))


def test_precise_route_matches_double(rng):
    ch = AutoChain(3, tuple(random_shear(rng, 3) for _ in range(3)))
    Z = sample_polydisc(rng, 4, 3, 1.0)
    hi = apply_precise(ch, Z, 40).astype(complex)
    assert np.max(np.abs(hi - ch.apply(Z))) < 1e-12


def exact_plane_shear(rng, degree):
    # lambda = (v2, -v1) makes lambda . v vanish exactly in floating point
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    nodes = np.arange(degree + 1, dtype=complex)
    return make_shear(v, np.array([v[1], -v[0]]), fit(nodes, 0.3 * rng.normal(size=degree + 1)))


def test_precise_round_trip_converges(rng):
    ch = AutoChain(2, tuple(exact_plane_shear(rng, 4) for _ in range(4)))
    r, digits, history = round_trip_precise(ch, sample_polydisc(rng, 5, 2, 1.0))
    assert r < 1e-20 and digits >= 30 and history[-1] == (digits, r)


def test_precise_round_trip_exposes_a_wrong_inverse():
    s = make_shear(basis(2, (1, 1)), basis(2, (0, 1)), fit([0, 1], [1, 2]))
    wrong = make_shear(basis(2, (1, 1)), basis(2, (0, 1)), fit([0, 1], [1, 3]))

    ch = AutoChain(2, (s,))
    Z = np.array([[1.0, 0.0]])
    from tameforge import autochain as ac
    original = ShearPrimitive.inverse
    try:
        ShearPrimitive.inverse = lambda self: ac.ShearPrimitive(2, wrong.v, wrong.lam, wrong.fn.scaled(-1))
        r, _, history = round_trip_precise(ch, Z)
    finally:
        ShearPrimitive.inverse = original
    assert r == pytest.approx(1.0) and len(history) == 3
