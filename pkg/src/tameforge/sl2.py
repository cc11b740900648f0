"""SL2(C): generator fields, flows, tame-sequence interpolators, Haar and Oka checks.

A matrix ``[[a, b], [c, d]]`` is stored as the point ``(a, b, c, d)`` of C^4.
All six generator fields have coefficients linear in ``(a, b, c, d)``, so each
is a 4x4 matrix ``M`` with ``X(z) = M z`` and brackets are exact matrix
commutators.
"""

from __future__ import annotations

import numpy as np

from . import interp
from .autochain import AutoChain, FlowPrimitive, VerificationReport, basis, linear_form, solve_stage
from .errors import ChartSingularity, InjectivityViolation
from .flows import FIELDS, GENERATORS
from .numerics import DEFAULT, ToleranceConfig, as_points

A_, B_, C_, D_ = 0, 1, 2, 3


# Relations obtained by differentiating the coefficient formulas above.
RELATIONS = {
    ("V", "W"): {"H": 1},
    ("H", "V"): {"V": 2},
    ("H", "W"): {"W": -2},
}
# Relation table with the [H, W] entry sign-flipped (+2W); kept to show the mismatch.
PRINTED_RELATIONS = {
    ("V", "W"): {"H": 1},
    ("H", "V"): {"V": 2},
    ("H", "W"): {"W": 2},
}


def as_sl2(a, b, c, d) -> np.ndarray:
    M = np.array([a, b, c, d], dtype=complex)
    if abs(M[0] * M[3] - M[1] * M[2] - 1) > 1e-9:
        raise ValueError(f"det = {M[0] * M[3] - M[1] * M[2]} is not 1")
    return M


def det_residual(Z) -> float:
    Z = as_points(Z)
    return float(np.max(np.abs(Z[:, 0] * Z[:, 3] - Z[:, 1] * Z[:, 2] - 1)))


def field_value(name: str, Z) -> np.ndarray:
    return as_points(Z) @ FIELDS[name].T


def bracket_matrix(m1, m2) -> np.ndarray:
    """Coefficient matrix of ``[X, Y]`` for linear fields ``X = m1 z``, ``Y = m2 z``.

    ``[X, Y]^i = X^j d_j Y^i - Y^j d_j X^i = (m2 m1 - m1 m2)^i_k z^k``.
    """
    return m2 @ m1 - m1 @ m2


def bracket(g1: str, g2: str, Z) -> np.ndarray:
    return as_points(Z) @ bracket_matrix(FIELDS[g1], FIELDS[g2]).T


def bracket_check(g1: str, g2: str, M, table=RELATIONS) -> float:
    """Sup-norm gap between ``[g1, g2]`` and the combination claimed in ``table``."""
    Z = as_points(M)
    claimed = np.zeros_like(Z)
    for name, coef in table[(g1, g2)].items():
        claimed = claimed + coef * field_value(name, Z)
    return float(np.max(np.abs(bracket(g1, g2, Z) - claimed)))


def tangency_residual(name: str, Z) -> float:
    """Derivative of ``ad - bc`` along the field; zero for fields tangent to SL2."""
    Z = as_points(Z)
    X = field_value(name, Z)
    a, b, c, d = Z.T
    return float(np.max(np.abs(a * X[:, 3] + d * X[:, 0] - b * X[:, 2] - c * X[:, 1])))


def flow(gen: str, t, M) -> np.ndarray:
    Z = as_points(M)
    out = GENERATORS[gen][0](Z, np.full(len(Z), complex(t)), {})
    return out[0] if np.ndim(M) == 1 else out


def sample_sl2(rng: np.random.Generator, count: int, radius: float = 1.0, center=(1, 0, 0),
               min_a: float = 1e-6, retries: int = 100) -> np.ndarray:
    """SL2 points with ``(a, b, c)`` uniform in a polydisc around ``center``
    and ``d = (1 + bc)/a``; samples with ``|a| < min_a`` are redrawn."""
    out = np.empty((count, 4), dtype=complex)
    for i in range(count):
        for _ in range(retries):
            r = radius * np.sqrt(rng.random(3))
            abc = np.asarray(center, dtype=complex) + r * np.exp(2j * np.pi * rng.random(3))
            if abs(abc[0]) >= min_a:
                break
        else:
            raise ChartSingularity(f"no sample with |a| >= {min_a} after {retries} draws")
        a, b, c = abc
        out[i] = (a, b, c, (1 + b * c) / a)
    return out


# --- tame sequences ---------------------------------------------------------

def check_injection(ell):
    ell = [int(x) for x in ell]
    if len(set(ell)) != len(ell):
        raise InjectivityViolation("ell is not injective")
    if min(ell, default=1) < 1:
        raise InjectivityViolation("ell must take values in the positive integers")
    return ell


def unipotent_points(values) -> np.ndarray:
    """``E_k = [[1, k], [0, 1]]`` for each k."""
    v = np.asarray(values, dtype=complex)
    return np.stack([np.ones_like(v), v, np.zeros_like(v), np.ones_like(v)], axis=1)


def diagonal_points(values) -> np.ndarray:
    """``D_k = diag(k, 1/k)`` for each k."""
    v = np.asarray(values, dtype=complex)
    return np.stack([v, np.zeros_like(v), np.zeros_like(v), 1 / v], axis=1)


def seq1_f_values(ell) -> np.ndarray:
    ell = np.asarray(check_injection(ell), dtype=float)
    k = np.arange(1, len(ell) + 1)
    return np.sqrt(ell / k) - 1


def seq1_chain(ell) -> AutoChain:
    """Automorphism of SL2 sending ``E_k`` to ``E_{ell(k)}``, ``k = 1..K``.

    ``ell[k-1]`` is the image index of ``k``. Built as ``W^1``, then the V-flow
    for time ``f(-c)`` with ``f(k) = sqrt(ell(k)/k) - 1``, then the W-flow for
    time ``g(b)`` whose values are solved at the actual ``b`` coordinates.
    """
    ell = check_injection(ell)
    K = len(ell)
    pts = unipotent_points(np.arange(1, K + 1)).astype(np.clongdouble)
    w1 = FlowPrimitive("W", 4, 1.0)
    cur = w1.apply(pts)

    lam_f = basis(4, (C_, -1))
    f = solve_stage(linear_form(cur, lam_f), seq1_f_values(ell), stage=1)
    vf = FlowPrimitive("V", 4, 0j, f, lam_f)
    cur = vf.apply(cur)

    # W moves a by -b t; reaching a = 1 needs t = (a - 1)/b
    lam_g = basis(4, (B_, 1))
    g = solve_stage(linear_form(cur, lam_g), (cur[:, A_] - 1) / cur[:, B_], stage=2)
    wg = FlowPrimitive("W", 4, 0j, g, lam_g)
    return AutoChain(4, (w1, vf, wg), name="seq1", extended=True)


def seq1_images(ell) -> np.ndarray:
    return unipotent_points(check_injection(ell))


def seq2_chain(ell) -> AutoChain:
    """Automorphism of SL2 sending ``D_k`` to ``D_{ell(k)}``, ``k = 1..K``.

    ``B^1`` first, then the time-1 maps of ``fA`` (f of c), ``gB`` (g of a)
    and ``hC`` (h of a), each solved at the current images.
    """
    ell = check_injection(ell)
    K = len(ell)
    target = np.asarray(ell, dtype=complex)
    pts = diagonal_points(np.arange(1, K + 1)).astype(np.clongdouble)
    b1 = FlowPrimitive("B", 4, 1.0)
    cur = b1.apply(pts)

    lam_c = basis(4, (C_, 1))
    f = solve_stage(cur[:, C_], (target - cur[:, A_]) / cur[:, C_], stage=1)
    fa = FlowPrimitive("A", 4, 0j, f, lam_c)
    cur = fa.apply(cur)

    lam_a = basis(4, (A_, 1))
    g = solve_stage(cur[:, A_], -cur[:, C_] / cur[:, A_], stage=2)
    gb = FlowPrimitive("B", 4, 0j, g, lam_a)
    cur = gb.apply(cur)

    h = solve_stage(cur[:, A_], -cur[:, B_] / cur[:, A_], stage=3)
    hc = FlowPrimitive("C", 4, 0j, h, lam_a)
    return AutoChain(4, (b1, fa, gb, hc), name="seq2", extended=True)


def seq2_images(ell) -> np.ndarray:
    return diagonal_points(check_injection(ell))


# --- Haar form --------------------------------------------------------------

def _grad_det(Z):
    """Gradient of ``ad - bc`` in the order ``(a, b, c, d)``."""
    a, b, c, d = Z.T
    return np.stack([d, -c, -b, a], axis=1)


def _chart_index(Z, keep=None) -> np.ndarray:
    """Per point, the coordinate to solve for: the one with the largest
    determinant partial, so the chart is never near-singular. Coordinates in
    ``keep`` stay chart coordinates when any other choice is regular."""
    g = np.abs(_grad_det(Z))
    if keep is not None and np.any(keep):
        masked = np.where(keep[None, :], -np.inf, g)
        best = np.argmax(masked, axis=1)
        ok = masked[np.arange(len(Z)), best] > 1e-3 * np.max(g, axis=1)
        return np.where(ok, best, np.argmax(g, axis=1))
    return np.argmax(g, axis=1)


_OTHERS = [np.array([j for j in range(4) if j != i]) for i in range(4)]


def _leray_density(Z, idx) -> np.ndarray:
    # (-1)^i / (dF/dx_i): the Haar form in the chart that drops x_i
    g = _grad_det(Z)[np.arange(len(Z)), idx]
    return np.where(idx % 2 == 0, 1.0, -1.0) / g


def _embed_jacobian(Z, idx) -> np.ndarray:
    """``(N, 4, 3)``: derivative of the chart-to-C^4 embedding."""
    g = _grad_det(Z)
    E = np.zeros((len(Z), 4, 3), dtype=complex)
    for n, i in enumerate(idx):
        others = _OTHERS[i]
        E[n, others, np.arange(3)] = 1
        E[n, i, :] = -g[n, others] / g[n, i]
    return E


def haar_factors(chain: AutoChain, Z, cfg: ToleranceConfig = DEFAULT) -> np.ndarray:
    """Ratio of the pulled-back Haar form to the Haar form at each point.

    In the chart ``(a, b, c)`` this is ``det(chart Jacobian) * a/a'``. Each
    stage is measured in whichever chart drops the coordinate with the
    largest determinant partial, at input and output separately; the same
    form is meant in every chart. Per-stage factors are multiplied, since the
    chart Jacobian of a chain is the product of its primitives' ones.
    """
    cur = as_points(Z).copy()
    factor = np.ones(len(cur), dtype=complex)
    rows = np.arange(len(cur))
    for p in chain.primitives:
        nxt = p.apply(cur)
        # the time argument is exactly invariant; keeping it a chart
        # coordinate keeps the steep slope of the time function out of the det
        lam = getattr(p, "lam", None)
        keep = None if lam is None else np.asarray(lam) != 0
        i_in, i_out = _chart_index(cur, keep), _chart_index(nxt, keep)
        rho_in, rho_out = _leray_density(cur, i_in), _leray_density(nxt, i_out)
        if not (np.all(np.isfinite(rho_in)) and np.all(np.isfinite(rho_out))):
            raise ChartSingularity("no chart of SL2 is regular at this point")
        full = p.jacobian(cur, cfg) @ _embed_jacobian(cur, i_in)
        Jc = full[rows[:, None], np.stack([_OTHERS[i] for i in i_out]), :]
        factor = factor * np.linalg.det(Jc) * rho_out / rho_in
        cur = nxt
    return factor


def haar_residual(chain: AutoChain, cfg: ToleranceConfig = DEFAULT, points=None, seed=0,
                  count=20, radius=0.5) -> float:
    """Max of ``|det(chart Jacobian) * a/a' - 1|`` over SL2 sample points.

    Without ``points``, seeded samples near the identity are drawn. Chains
    built from many-node interpolants overflow there, so tame constructions
    pass their own set points instead.
    """
    if points is None:
        points = sample_sl2(np.random.default_rng(seed), count, radius)
    return float(np.max(np.abs(haar_factors(chain, points, cfg) - 1)))


def verify_sl2_chain(chain: AutoChain, points, images, cfg: ToleranceConfig = DEFAULT, seed=0,
                     haar_points=None) -> VerificationReport:
    from .autochain import tame_action_residual

    rep = VerificationReport(chain.name, sample_seed=seed, config=cfg)
    rep.add("tame_action", tame_action_residual(chain, points, images), cfg.residual_tol)
    rep.add("det", det_residual(chain.apply(points)), 1e-12)
    if haar_points is None:
        haar_points = points
    rep.add("haar", haar_residual(chain, cfg, points=haar_points, seed=seed), cfg.jac_tol)
    return rep


# --- Oka example ------------------------------------------------------------

def primes_upto(n: int) -> list:
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(n**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.flatnonzero(sieve)]


class PrimeMask:
    """Coefficient functions for the six Oka fields, cut off at primes ``<= N``.

    Each is the polynomial vanishing exactly at its mask nodes and equal to 1
    at ``0.5``, which is not a node of any of them.
    """

    ANCHOR = 0.5

    def __init__(self, N: int = 30):
        self.N = N
        self.primes = primes_upto(N)
        k = np.asarray(self.primes, dtype=complex)
        self.zero_sets = {
            "alpha": 1 - k,
            "beta": k,
            "gamma": -k,
            "delta": 1 + k,
            "epsilon": k * k,
            "zeta": k * (1 + k),
        }
        self.coefficients = {name: interp.fit_damped([self.ANCHOR], [1.0], nodes)
                             for name, nodes in self.zero_sets.items()}

    @property
    def nodes(self):
        return np.asarray(self.primes, dtype=complex)


def oka_field_values(M, mask: PrimeMask) -> np.ndarray:
    """The six field vectors ``gamma(c)A, delta(d)A, alpha(a)B, beta(b)B,
    epsilon(-bc)[A,B], zeta(bd)[A,B]`` at ``M``; shape ``(6, 4)``."""
    z = np.asarray(M, dtype=complex)
    a, b, c, d = z
    A = field_value("A", z)[0]
    B = field_value("B", z)[0]
    AB = bracket("A", "B", z)[0]
    q = mask.coefficients
    return np.array([
        q["gamma"](c) * A,
        q["delta"](d) * A,
        q["alpha"](a) * B,
        q["beta"](b) * B,
        q["epsilon"](-b * c) * AB,
        q["zeta"](b * d) * AB,
    ])


def oka_rank(M, mask: PrimeMask, rel_tol: float = 1e-8) -> int:
    """Rank of the span of the six Oka fields at ``M``.

    Each coefficient is normalised by the size of its Newton terms at the
    argument, so a value that is only rounding noise counts as zero.
    """
    vecs = oka_field_values(M, mask)
    s = np.linalg.svd(vecs, compute_uv=False)
    scale = max(1.0, _oka_scale(M, mask))
    return int(np.sum(s > rel_tol * scale))


def _oka_scale(M, mask):
    z = np.asarray(M, dtype=complex)
    a, b, c, d = z
    args = {"gamma": c, "delta": d, "alpha": a, "beta": b, "epsilon": -b * c, "zeta": b * d}
    worst = 0.0
    for name, x in args.items():
        p = mask.coefficients[name]
        # magnitude of the largest Newton term, the natural size of rounding noise
        term = 1.0
        big = abs(p.coefficients[0])
        for c_i, node in zip(p.coefficients[1:], p.nodes[:-1]):
            term *= abs(x - node)
            big = max(big, abs(c_i) * term)
        worst = max(worst, big)
    return worst * np.max(np.abs(z))
