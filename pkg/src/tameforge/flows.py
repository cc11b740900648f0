"""Closed-form flows of the complete vector fields used by the constructions.

Each flow takes a batch of points ``Z`` of shape ``(N, dim)``, a time array
broadcastable to ``(N,)`` and a parameter dict, and returns the flowed batch.
SL2 points are stored as ``(a, b, c, d)`` for the matrix ``[[a, b], [c, d]]``.
"""

from __future__ import annotations

import mpmath
import numpy as np

from .poly import Polynomial


def _field(**rows):
    M = np.zeros((4, 4))
    for coord, entries in rows.items():
        for var, coef in entries.items():
            M["abcd".index(coord), "abcd".index(var)] = coef
    return M


# The SL2 generators are linear fields X(z) = M z; their flows are linear in z.
FIELDS = {
    "V": _field(a={"c": 1}, b={"d": 1, "a": -1}, d={"c": -1}),
    "W": _field(a={"b": -1}, c={"a": 1, "d": -1}, d={"b": 1}),
    "H": _field(b={"b": -2}, c={"c": 2}),
    "A": _field(a={"c": 1}, b={"d": 1}),
    "B": _field(c={"a": 1}, d={"b": 1}),
    "C": _field(b={"a": 1}, d={"c": 1}),
}


def _split4(Z):
    return Z[:, 0], Z[:, 1], Z[:, 2], Z[:, 3]


_MP_EXP = np.frompyfunc(mpmath.exp, 1, 1)


def _exp(x):
    """``exp`` that also works on object arrays of mpmath numbers."""
    x = np.asarray(x)
    return _MP_EXP(x) if x.dtype == object else np.exp(x)


def _extended(flow):
    """Evaluate an SL2 flow in extended precision; the result comes back in
    the caller's precision, so an extended caller loses nothing."""
    def wrapped(Z, t, params):
        if np.asarray(Z).dtype == object:
            return flow(Z, t, params)
        Zx = np.asarray(Z).astype(np.clongdouble)
        tx = np.asarray(t).astype(np.clongdouble)
        return flow(Zx, tx, params).astype(np.result_type(np.asarray(Z).dtype, complex))
    wrapped.__name__ = flow.__name__
    wrapped.__doc__ = flow.__doc__
    return wrapped


@_extended
def flow_V(Z, t, params):
    # conjugation by [[1, t], [0, 1]]
    a, b, c, d = _split4(Z)
    return np.stack([a + c * t, b + t * (d - c * t) - a * t, c, d - c * t], axis=1)


@_extended
def flow_W(Z, t, params):
    # conjugation by [[1, 0], [t, 1]]
    a, b, c, d = _split4(Z)
    return np.stack([a - b * t, b, c + t * (a - b * t) - d * t, d + b * t], axis=1)


def flow_H(Z, t, params):
    a, b, c, d = _split4(Z)
    return np.stack([a, _exp(-2 * t) * b, _exp(2 * t) * c, d], axis=1)


@_extended
def flow_A(Z, t, params):
    # left multiplication by [[1, t], [0, 1]]
    a, b, c, d = _split4(Z)
    return np.stack([a + t * c, b + t * d, c, d], axis=1)


@_extended
def flow_B(Z, t, params):
    # left multiplication by [[1, 0], [t, 1]]
    a, b, c, d = _split4(Z)
    return np.stack([a, b, c + t * a, d + t * b], axis=1)


@_extended
def flow_C(Z, t, params):
    # right multiplication by [[1, t], [0, 1]]
    a, b, c, d = _split4(Z)
    return np.stack([a, b + t * a, c, d + t * c], axis=1)


def flow_product_x(Z, t, params):
    return np.stack([Z[:, 0] + t, Z[:, 1]], axis=1)


def flow_product_y(Z, t, params):
    return np.stack([Z[:, 0], _exp(t) * Z[:, 1]], axis=1)


def flow_giz_phi(Z, t, params):
    m = int(params.get("m", 0))
    z, w = Z[:, 0], Z[:, 1]
    return np.stack([z + w**m * t, w], axis=1)


def flow_giz_psi(Z, t, params):
    m = int(params.get("m", 0))
    z, w = Z[:, 0], Z[:, 1]
    return np.stack([z, _exp(z**m * t) * w], axis=1)


def kr_polys(params):
    """Recover ``(a, b)`` polynomials from a flow's parameter dict."""
    var = params["variety"]
    if isinstance(var, dict):
        nvars = int(var["n"]) + 1
        return Polynomial.from_list(nvars, _terms(var["a"])), Polynomial.from_list(nvars, _terms(var["b"]))
    return var.a, var.b


def _terms(raw):
    out = []
    for coef, exps in raw:
        if isinstance(coef, (list, tuple)):
            coef = complex(coef[0], coef[1])
        out.append((coef, exps))
    return out


def kr_shift(Z, t, a: Polynomial, b: Polynomial, index: int):
    """Flow of ``(da/dz_i + x db/dz_i) d/dy + x^2 d/dz_i`` on ``x^2 y = a(z) + x b(z)``.

    Coordinates are ``(x, y, z_0, ..., z_n)``. The y-increment is the exact
    difference quotient of ``a + x b`` in ``z_i`` with step ``x^2 t``, so no
    division by ``x`` ever happens.
    """
    x, y = Z[:, 0], Z[:, 1]
    z = Z[:, 2:]
    h = x * x * t
    dy = t * (a.difference_quotient(z, index, h) + x * b.difference_quotient(z, index, h))
    out = Z.copy()
    out[:, 1] = y + dy
    out[:, 2 + index] = z[:, index] + h
    return out


def flow_kr_v(Z, t, params):
    a, b = kr_polys(params)
    return kr_shift(Z, t, a, b, int(params.get("index", 0)))


def flow_kr_w(Z, t, params):
    a, b = kr_polys(params)
    return kr_shift(Z, t, a, b, int(params.get("index", 1)))


GENERATORS = {
    "V": (flow_V, 4),
    "W": (flow_W, 4),
    "H": (flow_H, 4),
    "A": (flow_A, 4),
    "B": (flow_B, 4),
    "C": (flow_C, 4),
    "ProductX": (flow_product_x, 2),
    "ProductY": (flow_product_y, 2),
    "GizPhi": (flow_giz_phi, 2),
    "GizPsi": (flow_giz_psi, 2),
    "KR_V": (flow_kr_v, None),
    "KR_W": (flow_kr_w, None),
}
