"""Automorphisms as ordered chains of invertible primitives, plus verifiers.

A chain never stores the composite map. It stores shears, flows with
(possibly function-valued) times, and lifts of lower-dimensional chains, each
with an exact inverse. ``primitives[0]`` is applied first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import mpmath
import numpy as np

from . import interp
from .errors import (InvalidShear, LengthMismatch, NodeCollision, StageCollision,
                     ZeroDirection)
from .flows import FIELDS, GENERATORS
from .interp import Interpolant
from .numerics import DEFAULT, ToleranceConfig, as_points, check_finite, jacobians, sample_polydisc

LAMBDA_V_TOL = 1e-12
KERNEL_TOL = 1e-9


def symplectic_matrix(n: int) -> np.ndarray:
    """``J = [[0, I], [-I, 0]]`` of size ``2n``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]]).astype(complex)


def linear_form(Z, lam) -> np.ndarray:
    """``sum_i lam[i] * Z[:, i]`` in a fixed order (bitwise reproducible for
    any batch size, which stage-wise solving relies on)."""
    out = np.zeros(Z.shape[0], dtype=complex)
    for i in np.flatnonzero(lam):
        out = out + lam[i] * Z[:, i]
    return out


# --- primitives -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ShearPrimitive:
    """``z -> z + fn(lam . z) v`` with ``lam . v = 0``."""

    dim: int
    v: np.ndarray
    lam: np.ndarray
    fn: Interpolant
    forstneric: bool = False

    def __post_init__(self):
        if self.v.shape != (self.dim,) or self.lam.shape != (self.dim,):
            raise ValueError("direction and functional must have length dim")
        if not np.any(self.v):
            raise ZeroDirection("shear direction is zero")
        if abs(np.dot(self.lam, self.v)) > LAMBDA_V_TOL:
            raise InvalidShear(f"lambda . v = {np.dot(self.lam, self.v)} is not zero")

    def apply(self, Z):
        s = self.fn(linear_form(Z, self.lam))
        return Z + s[:, None] * self.v[None, :]

    def jacobian(self, Z, cfg: ToleranceConfig = DEFAULT):
        """Exact Jacobians ``I + fn'(lam . z) v lam^T``."""
        ds = self.fn.derivative(linear_form(Z, self.lam))
        rank1 = np.outer(self.v, self.lam)
        return np.eye(self.dim, dtype=complex)[None] + ds[:, None, None] * rank1[None]

    def inverse(self):
        return ShearPrimitive(self.dim, self.v, self.lam, self.fn.scaled(-1), self.forstneric)


@dataclass(frozen=True, eq=False)
class FlowPrimitive:
    """Flow of a named complete field for time ``const + fn(lam . z)``.

    A function-valued time is only legitimate when ``lam . z`` is constant
    along the field's orbits; that is checked numerically on construction.
    """

    generator: str
    dim: int
    const: complex = 0j
    fn: Interpolant | None = None
    lam: np.ndarray | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}")
        expected = GENERATORS[self.generator][1]
        if expected is not None and expected != self.dim:
            raise ValueError(f"generator {self.generator} acts on dimension {expected}, not {self.dim}")
        if (self.fn is None) != (self.lam is None):
            raise ValueError("fn and lam must be given together")
        if self.fn is not None:
            self._check_kernel()

    def _check_kernel(self):
        rng = np.random.default_rng(0)
        Z = sample_polydisc(rng, 10, self.dim, 1.0) + 0.5
        before = linear_form(Z, self.lam)
        after = linear_form(self._flow(Z, np.full(10, 0.1 + 0j)), self.lam)
        drift = float(np.max(np.abs(after - before)))
        if drift > KERNEL_TOL:
            raise InvalidShear(f"time argument is not invariant under {self.generator} (drift {drift:.2e})")

    def _flow(self, Z, t):
        return GENERATORS[self.generator][0](Z, t, self.params)

    def times(self, Z):
        t = np.full(Z.shape[0], self.const, dtype=complex)
        if self.fn is not None:
            t = t + self.fn(linear_form(Z, self.lam))
        return t

    def apply(self, Z):
        return self._flow(Z, self.times(Z))

    def jacobian(self, Z, cfg: ToleranceConfig = DEFAULT):
        """Chain rule with the time frozen: ``d_z flow + d_t flow * tau'(z)``.

        Only the flow itself is differenced; the slope of the time function
        enters analytically, so steep interpolants cost no accuracy.
        """
        t = self.times(Z)
        if self.generator in FIELDS:
            return self._linear_jacobian(Z, t)
        D = jacobians(lambda P: self._flow(P, np.repeat(t, len(P) // len(t))), Z, cfg)
        if self.fn is None:
            return D
        h = cfg.diff_step
        dt = (self._flow(Z, t + h) - self._flow(Z, t - h)) / (2 * h)
        ds = self.fn.derivative(linear_form(Z, self.lam))
        return D + (dt * ds[:, None])[:, :, None] * self.lam[None, None, :]

    def _linear_jacobian(self, Z, t):
        """Exact for linear fields: the flow is linear in ``z`` for frozen
        time, and its time derivative is the field at the image."""
        N = len(Z)
        D = np.empty((N, self.dim, self.dim), dtype=complex)
        for j in range(self.dim):
            E = np.zeros((N, self.dim), dtype=complex)
            E[:, j] = 1
            D[:, :, j] = self._flow(E, t)
        if self.fn is None:
            return D
        dt = self._flow(Z, t) @ FIELDS[self.generator].T
        ds = self.fn.derivative(linear_form(Z, self.lam))
        return D + (dt * ds[:, None])[:, :, None] * self.lam[None, None, :]

    def inverse(self):
        fn = None if self.fn is None else self.fn.scaled(-1)
        return FlowPrimitive(self.generator, self.dim, -self.const, fn, self.lam, self.params)


@dataclass(frozen=True, eq=False)
class Lift:
    """Act by ``chain`` on the coordinates ``indices``, identity elsewhere."""

    dim: int
    indices: tuple
    chain: "AutoChain"

    def __post_init__(self):
        if len(self.indices) != self.chain.dim:
            raise ValueError("lift indices must match the inner chain's dimension")

    def apply(self, Z):
        out = Z.copy()
        idx = list(self.indices)
        if Z.dtype == object:
            inner = Z[:, idx]
            for p in self.chain.primitives:
                inner = p.apply(inner)
            out[:, idx] = inner
        else:
            out[:, idx] = self.chain.apply(Z[:, idx])
        return out

    def jacobian(self, Z, cfg: ToleranceConfig = DEFAULT):
        idx = list(self.indices)
        D = np.broadcast_to(np.eye(self.dim, dtype=complex), (len(Z), self.dim, self.dim)).copy()
        D[np.ix_(range(len(Z)), idx, idx)] = chain_jacobians(self.chain, Z[:, idx], cfg)
        return D

    def inverse(self):
        return Lift(self.dim, self.indices, inverse(self.chain))


Primitive = Union[ShearPrimitive, FlowPrimitive, Lift]


@dataclass(frozen=True, eq=False)
class AutoChain:
    """Primitives applied left to right.

    ``extended`` carries intermediate images in long double and rounds once
    at the end; builders that solve stages on extended images set it so the
    chain reproduces their stage arguments bit for bit.
    """

    dim: int
    primitives: tuple = ()
    name: str = ""
    extended: bool = False

    def __post_init__(self):
        for p in self.primitives:
            if p.dim != self.dim:
                raise ValueError(f"primitive of dim {p.dim} in a chain of dim {self.dim}")

    def __len__(self):
        return len(self.primitives)

    def apply(self, Z):
        """Apply to a batch ``(N, dim)``; a single point comes back as a point."""
        single = np.ndim(Z) == 1
        out = self._working(Z)
        if out.shape[1] != self.dim:
            raise LengthMismatch(f"point of dim {out.shape[1]} fed to a chain of dim {self.dim}")
        for p in self.primitives:
            out = p.apply(out)
        out = check_finite(out.astype(complex), self.name or "chain")
        return out[0] if single else out

    def _working(self, Z):
        return as_points(Z).astype(np.clongdouble if self.extended else complex)

    def __call__(self, Z):
        return self.apply(Z)

    def then(self, *prims) -> "AutoChain":
        return AutoChain(self.dim, self.primitives + tuple(prims), self.name, self.extended)

    def compose(self, other: "AutoChain") -> "AutoChain":
        """``other`` after ``self``."""
        return AutoChain(self.dim, self.primitives + other.primitives, self.name,
                         self.extended and other.extended)

    def stage_images(self, Z):
        """Images after each primitive, starting with the input."""
        out = [self._working(Z)]
        for p in self.primitives:
            out.append(p.apply(out[-1]))
        return [im.astype(complex) for im in out]


def apply(chain: AutoChain, z):
    return chain.apply(z)


def inverse(chain: AutoChain) -> AutoChain:
    return AutoChain(chain.dim, tuple(p.inverse() for p in reversed(chain.primitives)),
                     (chain.name + "^-1") if chain.name else "", chain.extended)


def identity_chain(dim: int) -> AutoChain:
    return AutoChain(dim, ())


# --- shear builders ---------------------------------------------------------

def make_shear(v, lam, fn: Interpolant) -> ShearPrimitive:
    v = np.asarray(v, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    return ShearPrimitive(len(v), v, lam, fn, forstneric=False)


def make_forstneric_shear(v, f: Interpolant, n: int) -> ShearPrimitive:
    """``z -> z + f(z^T J v) v`` on C^{2n}; symplectic for every ``f``."""
    v = np.asarray(v, dtype=complex)
    if v.shape != (2 * n,):
        raise ValueError(f"direction must have length {2 * n}")
    if not np.any(v):
        raise ZeroDirection("shear direction is zero")
    lam = symplectic_matrix(n) @ v
    return ShearPrimitive(2 * n, v, lam, f, forstneric=True)


def basis(dim: int, *idx_coef) -> np.ndarray:
    """Vector ``sum c e_i`` from ``(i, c)`` pairs (0-based indices)."""
    v = np.zeros(dim, dtype=complex)
    for i, c in idx_coef:
        v[i] += c
    return v


def solve_stage(args, increments, stage=0, tol=1e-12) -> Interpolant:
    """Interpolant taking ``increments[i]`` at ``args[i]``.

    Repeated arguments are allowed only when they ask for the same increment.
    """
    args = np.asarray(args, dtype=complex)
    increments = np.asarray(increments, dtype=complex)
    keep_a, keep_v = [], []
    for a, v in zip(args, increments):
        hit = [j for j, b in enumerate(keep_a) if abs(a - b) < interp.MIN_GAP]
        if hit:
            if abs(keep_v[hit[0]] - v) > tol * max(1.0, abs(v)):
                raise StageCollision(stage, f"argument {a} needs increments {keep_v[hit[0]]} and {v}")
            continue
        keep_a.append(a)
        keep_v.append(v)
    try:
        return interp.fit(keep_a, keep_v)
    except NodeCollision as exc:
        raise StageCollision(stage, str(exc)) from exc


# --- verification -----------------------------------------------------------

@dataclass
class Check:
    name: str
    residual: float
    tol: float
    expected_fail: bool = False

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tol)

    def to_dict(self):
        return {"name": self.name, "residual": float(self.residual), "tol": float(self.tol),
                "pass": self.passed, "expected_fail": self.expected_fail}


@dataclass
class VerificationReport:
    construction_name: str
    checks: list = field(default_factory=list)
    sample_seed: int = 0
    config: ToleranceConfig = DEFAULT

    def add(self, name, residual, tol, expected_fail=False) -> Check:
        c = Check(name, float(residual), float(tol), expected_fail)
        self.checks.append(c)
        return c

    def extend(self, other: "VerificationReport") -> "VerificationReport":
        self.checks.extend(other.checks)
        return self

    def __getitem__(self, name) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def residual(self) -> float:
        return max((c.residual for c in self.checks), default=0.0)

    @property
    def passed(self) -> bool:
        """All checks pass; a check flagged ``expected_fail`` must fail instead."""
        return all(c.passed != c.expected_fail for c in self.checks)

    def to_dict(self):
        return {"construction": self.construction_name, "checks": [c.to_dict() for c in self.checks],
                "seed": self.sample_seed, "config": self.config.as_dict()}


def _samples(dim, points, seed, count, radius):
    if points is not None:
        return as_points(points)
    return sample_polydisc(np.random.default_rng(seed), count, dim, radius)


def chain_jacobians(chain: AutoChain, Z, cfg: ToleranceConfig = DEFAULT, stagewise=True):
    """Jacobians of the chain at each point of ``Z``.

    With ``stagewise`` each primitive's Jacobian is taken at its own input
    (shears exactly, flows with the time slope entering analytically) and the
    factors are multiplied. Without it the whole chain is centrally
    differenced, which is an independent but far less accurate route.
    """
    Z = as_points(Z)
    if not stagewise:
        return jacobians(chain.apply, Z, cfg)
    D = np.broadcast_to(np.eye(chain.dim, dtype=complex), (len(Z), chain.dim, chain.dim)).copy()
    cur = Z.copy()
    for p in chain.primitives:
        D = p.jacobian(cur, cfg) @ D
        cur = p.apply(cur)
    return D


def jacobian_factors(chain: AutoChain, Z, cfg: ToleranceConfig = DEFAULT) -> list:
    """Per-primitive Jacobians, each at its own input, with lifts expanded
    into their inner primitives; the chain's Jacobian is their product."""
    Z = as_points(Z)
    out = []
    cur = chain._working(Z)
    for p in chain.primitives:
        here = cur.astype(complex)
        if isinstance(p, Lift):
            idx = list(p.indices)
            for F in jacobian_factors(p.chain, here[:, idx], cfg):
                E = np.broadcast_to(np.eye(chain.dim, dtype=complex), (len(Z), chain.dim, chain.dim)).copy()
                E[np.ix_(range(len(Z)), idx, idx)] = F
                out.append(E)
        else:
            out.append(p.jacobian(here, cfg))
        cur = p.apply(cur)
    return out


def _worst(values) -> float:
    """Max of a residual array; any NaN/Inf counts as an infinite residual."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        return 0.0
    if not np.all(np.isfinite(values)):
        return float("inf")
    return float(np.max(values))


def _safe_factors(chain, Z, cfg):
    with np.errstate(all="ignore"):
        try:
            return jacobian_factors(chain, Z, cfg)
        except ArithmeticError:
            return None


def _safe_jacobians(chain, Z, cfg, stagewise):
    with np.errstate(all="ignore"):
        try:
            return chain_jacobians(chain, Z, cfg, stagewise)
        except ArithmeticError:
            return np.full((len(Z), chain.dim, chain.dim), np.nan, dtype=complex)


def _digits_needed(mats) -> int:
    """Working digits so that rounding in the product stays far below one."""
    grow = sum(np.log10(max(1.0, float(np.max(np.abs(F))))) for F in mats)
    return int(30 + 2 * grow)


def _exact_products(factors, point):
    """The Jacobian at one point as an mpmath matrix, multiplied at a
    precision that scales with the factor sizes; ``None`` if a factor is not finite."""
    mats = [F[point] for F in factors]
    if not all(np.all(np.isfinite(F)) for F in mats):
        return None, 0
    dps = _digits_needed(mats)
    with mpmath.workdps(dps):
        D = mpmath.eye(mats[0].shape[0]) if mats else None
        for F in mats:
            D = mpmath.matrix([[mpmath.mpc(x.real, x.imag) for x in row] for row in F]) * D
    return D, dps


def symplectic_residual(chain, n, Z, cfg=DEFAULT, stagewise=True, relative=False) -> float:
    """``max |D^T J D - J|`` over the points of ``Z``.

    Stage-wise, the per-primitive factors are multiplied in extended
    precision, so the result is the defect of the chain's own Jacobian and
    not the rounding of a product whose entries may be astronomically large.
    With ``relative`` each point's entry is divided by ``max(1, |D|^2)``.
    Without ``stagewise`` the whole chain is differenced in double precision.
    """
    Z = as_points(Z)
    J = symplectic_matrix(n)
    if not stagewise:
        D = _safe_jacobians(chain, Z, cfg, stagewise)
        with np.errstate(all="ignore"):
            R = np.abs(np.transpose(D, (0, 2, 1)) @ J @ D - J).max(axis=(1, 2))
            if relative:
                R = R / np.maximum(1.0, np.abs(D).max(axis=(1, 2)) ** 2)
        return _worst(R)
    factors = _safe_factors(chain, Z, cfg)
    if factors is None:
        return float("inf")
    if not factors:
        return 0.0
    R = []
    for i in range(len(Z)):
        D, dps = _exact_products(factors, i)
        if D is None:
            return float("inf")
        with mpmath.workdps(dps):
            Jm = mpmath.matrix(J.real.tolist())
            defect = D.T * Jm * D - Jm
            r = max(abs(x) for x in defect)
            if relative:
                r = r / max(1, max(abs(x) for x in D) ** 2)
            R.append(float(r))
    return _worst(R)


def volume_residual(chain, Z, cfg=DEFAULT, stagewise=True, relative=False) -> float:
    """``max |det D - 1|``, optionally divided by ``max(1, |D|^dim)``.

    Stage-wise the determinant is that of the extended-precision product of
    the per-primitive factors.
    """
    Z = as_points(Z)
    if not stagewise:
        D = _safe_jacobians(chain, Z, cfg, stagewise)
        with np.errstate(all="ignore"):
            R = np.abs(np.linalg.det(D) - 1)
            if relative:
                R = R / np.maximum(1.0, np.abs(D).max(axis=(1, 2)) ** chain.dim)
        return _worst(R)
    factors = _safe_factors(chain, Z, cfg)
    if factors is None:
        return float("inf")
    if not factors:
        return 0.0
    R = []
    for i in range(len(Z)):
        D, dps = _exact_products(factors, i)
        if D is None:
            return float("inf")
        with mpmath.workdps(dps):
            r = abs(mpmath.det(D) - 1)
            if relative:
                r = r / max(1, max(abs(x) for x in D) ** chain.dim)
            R.append(float(r))
    return _worst(R)


def check_symplectic(chain: AutoChain, n: int, cfg: ToleranceConfig = DEFAULT, points=None,
                     seed=0, count=50, radius=2.0, stagewise=True, expected_fail=False,
                     name="symplectic", relative=False) -> VerificationReport:
    """Max entry of ``D^T J D - J`` over sample points, against ``jac_tol``."""
    if chain.dim != 2 * n:
        raise LengthMismatch(f"chain of dim {chain.dim} is not on C^{2 * n}")
    Z = _samples(chain.dim, points, seed, count, radius)
    rep = VerificationReport(chain.name, sample_seed=seed, config=cfg)
    rep.add(name, symplectic_residual(chain, n, Z, cfg, stagewise, relative), cfg.jac_tol, expected_fail)
    return rep


def check_volume(chain: AutoChain, cfg: ToleranceConfig = DEFAULT, points=None, seed=0,
                 count=50, radius=2.0, stagewise=True, name="volume", relative=False) -> VerificationReport:
    """Max of ``|det D - 1|`` over sample points, against ``jac_tol``."""
    Z = _samples(chain.dim, points, seed, count, radius)
    rep = VerificationReport(chain.name, sample_seed=seed, config=cfg)
    rep.add(name, volume_residual(chain, Z, cfg, stagewise, relative), cfg.jac_tol)
    return rep


def tame_action_residual(chain: AutoChain, points, images) -> float:
    points = as_points(points)
    images = as_points(images)
    if len(points) != len(images):
        raise LengthMismatch(f"{len(points)} points but {len(images)} images")
    if len(points) == 0:
        return 0.0
    with np.errstate(all="ignore"):
        try:
            got = chain.apply(points)
        except ArithmeticError:
            return float("inf")
        return _worst(np.abs(got - images))


def verify_tame_action(chain: AutoChain, points, images, cfg: ToleranceConfig = DEFAULT,
                       tol=None, expected_fail=False, name="tame_action") -> VerificationReport:
    """Sup-norm distance between the chain's images of ``points`` and ``images``."""
    rep = VerificationReport(chain.name, config=cfg)
    rep.add(name, tame_action_residual(chain, points, images),
            cfg.residual_tol if tol is None else tol, expected_fail)
    return rep


def round_trip_residual(chain: AutoChain, points) -> float:
    """``max |F^-1(F(z)) - z|``; overflow along the way counts as infinite."""
    Z = as_points(points)
    with np.errstate(all="ignore"):
        try:
            back = inverse(chain).apply(chain.apply(Z))
        except ArithmeticError:
            return float("inf")
        return _worst(np.abs(back - Z))


PROBE_DIGITS = 30
MAX_DIGITS = 20000


def _to_mp(Z):
    return np.array([[mpmath.mpc(complex(x)) for x in row] for row in as_points(Z)], dtype=object)


def apply_precise(chain: AutoChain, Z, dps: int = 50, track=None) -> np.ndarray:
    """The chain at ``dps`` significant digits; an object array of mpmath
    numbers. ``track`` collects the largest binary exponent seen per stage."""
    with mpmath.workdps(dps):
        W = np.atleast_2d(np.asarray(Z)).copy() if np.asarray(Z).dtype == object else _to_mp(Z)
        for p in chain.primitives:
            W = p.apply(W)
            if track is not None:
                mags = [mpmath.mag(x) for x in W.ravel() if x != 0]
                track.append(max((int(m) if mpmath.isfinite(m) else 10**9 for m in mags), default=0))
    return W


def _round_trip_at(chain, inv, Z, dps, track=None):
    with mpmath.workdps(dps):
        back = apply_precise(inv, apply_precise(chain, Z, dps, track), dps, track)
        r = max((abs(back[i, j] - Z[i, j]) for i in range(len(Z)) for j in range(Z.shape[1])),
                default=mpmath.mpf(0))
        return float(r)


def digits_for(chain: AutoChain, points) -> int:
    """Digits that keep every intermediate value of a round trip exact to
    well below one unit: twice the largest decimal exponent seen, plus 40."""
    Z = as_points(points)
    track = []
    _round_trip_at(chain, inverse(chain), Z, PROBE_DIGITS, track)
    top = max(track, default=0) * np.log10(2.0)
    return int(40 + 2 * max(0.0, top))


def round_trip_precise(chain: AutoChain, points, target=1e-20):
    """``max |F^-1(F(z)) - z|`` with both maps evaluated in enough precision
    to see the maps rather than their rounding.

    Returns ``(residual, digits, history)``. The digits come from a
    magnitude probe and are then doubled once as a convergence check: a wrong
    inverse leaves a residual that does not shrink as digits are added. When
    the probe asks for more than ``MAX_DIGITS`` the residual is infinite.
    """
    Z = as_points(points)
    inv = inverse(chain)
    history = [(PROBE_DIGITS, _round_trip_at(chain, inv, Z, PROBE_DIGITS))]
    if history[-1][1] < target:
        return history[-1][1], PROBE_DIGITS, history
    need = digits_for(chain, Z)
    if need > MAX_DIGITS:
        history.append((need, float("inf")))
        return float("inf"), need, history
    for dps in (need, 2 * need):
        history.append((dps, _round_trip_at(chain, inv, Z, dps)))
        if history[-1][1] < target:
            break
    return history[-1][1], history[-1][0], history


# --- serialization ----------------------------------------------------------

def _cx(values):
    return [[float(np.real(x)), float(np.imag(x))] for x in np.atleast_1d(values)]


def _uncx(pairs):
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


def primitive_to_dict(p: Primitive) -> dict:
    if isinstance(p, ShearPrimitive):
        return {"kind": "shear", "dim": p.dim, "v": _cx(p.v), "lambda": _cx(p.lam),
                "nodes": _cx(p.fn.input_nodes()), "values": _cx(p.fn.input_values()),
                "forstneric": p.forstneric}
    if isinstance(p, FlowPrimitive):
        d = {"kind": "flow", "dim": p.dim, "generator": p.generator, "time": _cx(p.const)[0],
             "params": p.params}
        if p.fn is not None:
            d.update({"lambda": _cx(p.lam), "nodes": _cx(p.fn.input_nodes()),
                      "values": _cx(p.fn.input_values())})
        return d
    if isinstance(p, Lift):
        return {"kind": "lift", "dim": p.dim, "indices": list(p.indices), "chain": chain_to_dict(p.chain)}
    raise TypeError(type(p))


def primitive_from_dict(d: dict) -> Primitive:
    kind = d["kind"]
    if kind == "shear":
        fn = interp.fit(_uncx(d["nodes"]), _uncx(d["values"]))
        return ShearPrimitive(int(d["dim"]), _uncx(d["v"]), _uncx(d["lambda"]), fn, bool(d.get("forstneric", False)))
    if kind == "flow":
        fn = lam = None
        if "nodes" in d:
            fn = interp.fit(_uncx(d["nodes"]), _uncx(d["values"]))
            lam = _uncx(d["lambda"])
        re, im = d.get("time", [0.0, 0.0])
        return FlowPrimitive(d["generator"], int(d["dim"]), complex(re, im), fn, lam, dict(d.get("params", {})))
    if kind == "lift":
        return Lift(int(d["dim"]), tuple(d["indices"]), chain_from_dict(d["chain"]))
    raise ValueError(f"unknown primitive kind {kind!r}")


def chain_to_dict(chain: AutoChain) -> dict:
    return {"kind": "chain", "dim": chain.dim, "name": chain.name, "extended": chain.extended,
            "primitives": [primitive_to_dict(p) for p in chain.primitives]}


def chain_from_dict(d: dict) -> AutoChain:
    return AutoChain(int(d["dim"]), tuple(primitive_from_dict(p) for p in d["primitives"]), d.get("name", ""),
                     bool(d.get("extended", False)))
