import numpy as np
import sympy as sp
from hypothesis import given, settings, strategies as st

from tameforge.poly import Polynomial

terms = st.lists(st.tuples(st.integers(-3, 3), st.tuples(st.integers(0, 4), st.integers(0, 3))), min_size=1, max_size=4)


def to_sympy(P, z):
    return sum(complex(c).real * sp.Mul(*[zi**e for zi, e in zip(z, exps)]) for c, exps in P.terms)


@settings(max_examples=30)
@given(terms, st.integers(0, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(1e-3, 1))
def test_difference_quotient_matches_symbolic(raw, var, x0, x1, h):
    P = Polynomial.from_list(2, raw)
    z = sp.symbols("z0 z1")
    hs = sp.Symbol("h")
    expr = to_sympy(P, z)
    shifted = expr.subs(z[var], z[var] + hs)
    dq = sp.cancel((shifted - expr) / hs) if expr != 0 else 0
    point = {z[0]: x0, z[1]: x1, hs: h}
    want = complex(sp.N(sp.sympify(dq).subs(point)))
    got = P.difference_quotient(np.array([x0, x1]), var, h)
    assert abs(got - want) < 1e-9 * max(1, abs(want))


def test_difference_quotient_tends_to_partial():
    P = Polynomial.from_list(2, [(1, (3, 1)), (-2, (0, 2))])
    z = np.array([1.5, -0.5])
    for var in (0, 1):
        assert abs(P.difference_quotient(z, var, 0) - P.partial(z, var)) < 1e-14


def test_evaluation_and_round_trip():
    P = Polynomial.from_list(2, [(2, (1, 0)), (1j, (0, 2))])
    assert P(np.array([3, 2])) == 6 + 4j
    Q = Polynomial.from_list(2, [(complex(*c), e) for c, e in P.to_list()])
    assert Q == P
