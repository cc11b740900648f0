"""Interpolating automorphisms of C x C* and flows on Koras-Russell type threefolds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autochain import AutoChain, FlowPrimitive, basis, solve_stage
from .errors import OffVariety, OverflowGuard
from .flows import kr_shift
from .interp import identity
from .numerics import as_points
from .poly import Polynomial
from .sl2 import check_injection

PRODUCT_MAX_K = 12
EXP_ARG_CAP = 30
ON_VARIETY_TOL = 1e-8


@dataclass(frozen=True)
class CStarPoint:
    z: complex
    w: complex

    def __post_init__(self):
        if abs(self.w) <= 1e-12:
            raise ValueError("w must be nonzero on C x C*")

    def as_array(self) -> np.ndarray:
        return np.array([self.z, self.w], dtype=complex)


def lattice_points(values) -> np.ndarray:
    """``(v, 1)`` for each ``v``."""
    values = np.asarray(values, dtype=complex)
    return np.stack([values, np.ones_like(values)], axis=1)


def product_chain(ell) -> AutoChain:
    """``(n, 1) -> (ell(n), 1)`` on C x C* from the translation flow on the
    first factor and the scaling flow on the second."""
    ell = check_injection(ell)
    K = len(ell)
    if K > PRODUCT_MAX_K:
        raise OverflowGuard(f"K = {K} exceeds {PRODUCT_MAX_K}; nodes e^n would lose conditioning")
    ex, ey = basis(2, (0, 1)), basis(2, (1, 1))
    cur = lattice_points(np.arange(1, K + 1))
    f1 = FlowPrimitive("ProductY", 2, 0j, identity(), ex)
    cur = f1.apply(cur)
    f = solve_stage(cur[:, 1], np.asarray(ell, dtype=complex) - cur[:, 0], stage=2)
    f2 = FlowPrimitive("ProductX", 2, 0j, f, ey)
    cur = f2.apply(cur)
    g = solve_stage(cur[:, 0], -np.log(cur[:, 1]), stage=3)
    f3 = FlowPrimitive("ProductY", 2, 0j, g, ex)
    return AutoChain(2, (f1, f2, f3), name="product")


def gizatullin_chain(m: int, ell) -> AutoChain:
    """``(n, 1) -> (ell(n), 1)`` with the chart fields ``w^m d/dz`` and
    ``z^m w d/dw``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    ell = check_injection(ell)
    K = len(ell)
    if K ** (m + 1) > EXP_ARG_CAP:
        raise OverflowGuard(f"K^(m+1) = {K ** (m + 1)} exceeds {EXP_ARG_CAP}")
    ez, ew = basis(2, (0, 1)), basis(2, (1, 1))
    params = {"m": m}
    cur = lattice_points(np.arange(1, K + 1))
    f1 = FlowPrimitive("GizPsi", 2, 0j, identity(), ez, params)
    cur = f1.apply(cur)
    z, w = cur[:, 0], cur[:, 1]
    g = solve_stage(w, (np.asarray(ell, dtype=complex) - z) / w**m, stage=2)
    f2 = FlowPrimitive("GizPhi", 2, 0j, g, ew, params)
    cur = f2.apply(cur)
    z, w = cur[:, 0], cur[:, 1]
    h = solve_stage(z, -np.log(w) / z**m, stage=3)
    f3 = FlowPrimitive("GizPsi", 2, 0j, h, ez, params)
    return AutoChain(2, (f1, f2, f3), name=f"gizatullin_m{m}")


@dataclass(frozen=True)
class KRVariety:
    """``x^2 y = a(z) + x b(z)`` in coordinates ``(x, y, z_0, ..., z_n)``."""

    n: int
    a: Polynomial
    b: Polynomial

    @classmethod
    def from_lists(cls, n: int, a_terms, b_terms) -> "KRVariety":
        return cls(n, Polynomial.from_list(n + 1, a_terms), Polynomial.from_list(n + 1, b_terms))

    @classmethod
    def preset(cls, name: str) -> "KRVariety":
        if name == "kr-cubic":
            # x^2 y + x + z0^2 + z1^3 = 0
            return cls.from_lists(1, [(-1, (2, 0)), (-1, (0, 3))], [(-1, (0, 0))])
        raise ValueError(f"unknown variety preset {name!r}")

    @property
    def dim(self) -> int:
        return self.n + 3

    def to_params(self) -> dict:
        return {"n": self.n, "a": self.a.to_list(), "b": self.b.to_list()}


def kr_residual(p, var: KRVariety) -> float:
    """``max |x^2 y - a(z) - x b(z)|`` over the given points."""
    P = as_points(p)
    x, y, z = P[:, 0], P[:, 1], P[:, 2:]
    return float(np.max(np.abs(x * x * y - var.a(z) - x * var.b(z))))


FIELD_INDEX = {"V": 0, "W": 1}


def kr_flow(field: str, t, p, var: KRVariety):
    """Flow of ``x^2 d/dz_i`` (``V``: i = 0, ``W``: i = 1) lifted to the variety."""
    if field not in FIELD_INDEX:
        raise ValueError("field must be 'V' or 'W'")
    index = FIELD_INDEX[field]
    if index > var.n:
        raise ValueError(f"{field} needs z_{index}, but the variety has z_0..z_{var.n}")
    single = np.ndim(p) == 1
    P = as_points(p)
    if kr_residual(P, var) > ON_VARIETY_TOL:
        raise OffVariety("point does not satisfy the defining equation")
    t = np.broadcast_to(np.asarray(t, dtype=complex), (len(P),))
    out = kr_shift(P, t, var.a, var.b, index)
    return out[0] if single else out


def sample_kr_cubic(rng: np.random.Generator, count: int, x_min: float = 1e-8, x_max: float = 2.0) -> np.ndarray:
    """Points of the cubic with ``|x|`` log-uniform in ``[x_min, x_max]``.

    ``x``, ``y`` and ``z_1`` are drawn and ``z_0`` solved from the equation,
    so tiny ``x`` does not force a huge ``y``.
    """
    r = np.exp(rng.uniform(np.log(x_min), np.log(x_max), count))
    x = r * np.exp(2j * np.pi * rng.random(count))
    y = rng.normal(size=count) + 1j * rng.normal(size=count)
    z1 = rng.normal(size=count) + 1j * rng.normal(size=count)
    z0 = np.sqrt(-(x * x * y + x + z1**3))
    return np.stack([x, y, z0, z1], axis=1)
