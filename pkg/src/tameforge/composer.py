"""Map one finite point list of C^2 onto another by stages, each close to the
identity on a growing polydisc and exactly fixing what earlier stages matched."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .autochain import (AutoChain, VerificationReport, basis, check_volume, identity_chain, make_shear,
                        round_trip_residual, tame_action_residual)
from .errors import DampingExhausted, DuplicatePoints, GenericityFailure, ScheduleInfeasible
from .interp import fit_damped
from .numerics import DEFAULT, ToleranceConfig, as_points, max_deviation, sample_polydisc

DAMPING_ROUNDS = 6
KEY_GAP = 1e-6


@dataclass(frozen=True)
class CompactBox:
    """Polydisc ``{|z_1| <= radius, |z_2| <= radius}``."""

    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("box radius must be positive")

    def contains(self, z) -> bool:
        return bool(np.max(np.abs(np.asarray(z))) <= self.radius)


@dataclass
class StageLog:
    stage: int
    epsilon_target: float
    measured_deviation: float
    box_radius: float
    matched_pairs: int
    damping_nodes_used: int
    pair_index: int = -1
    shears: int = 0
    # both measured on the first box, the only one every stage controls
    drift_on_first_box: float = 0.0
    step_from_previous: float = 0.0

    def to_dict(self):
        return asdict(self)


def _shear_fn(key, value, zeros, damping):
    """Interpolant equal to ``value`` at ``key`` and zero at ``zeros`` and ``damping``."""
    zeros = np.unique(np.asarray(zeros, dtype=complex))
    if np.any(np.abs(zeros - key) < KEY_GAP):
        raise GenericityFailure(f"moving key {key} coincides with a fixed point's coordinate")
    return fit_damped([key], [value], np.concatenate([zeros, damping]))


def _steps(a, moves):
    """``(moved_index, key, new_value)`` for a sequence of single-coordinate moves."""
    steps, cur = [], list(a)
    for idx, value in moves:
        if steps and steps[-1][0] == idx:
            steps[-1] = (idx, steps[-1][1], value)
        else:
            steps.append((idx, cur[1 - idx], value))
        cur[idx] = value
    return steps


def _routes(a, b, R, rng):
    """Candidate move sequences from ``a`` to ``b`` whose keys all lie outside
    the box: direct two-shear routes, three-shear routes through one moderate
    intermediate value, and out-and-back routes through a far waypoint."""
    out = []
    for first in (0, 1):
        second = 1 - first
        out.append([(first, b[first]), (second, b[second])])
        mid = 0.5 * (a[second] + b[second])
        phase = mid / abs(mid) if abs(mid) > 0 else np.exp(2j * np.pi * rng.random())
        for scale in (1.5, 2.5, 4.0):
            w = scale * max(R, abs(mid)) * phase
            out.append([(second, w), (first, b[first]), (second, b[second])])
    size = max(R, np.max(np.abs(a)), np.max(np.abs(b)))
    for scale in (1.5, 3.0, 6.0):
        X, Y = scale * size * np.exp(2j * np.pi * rng.random(2))
        lead = [(1, Y), (0, X)] if abs(a[0]) >= abs(a[1]) else [(0, X), (1, Y)]
        tail = [(0, b[0]), (1, b[1])] if abs(b[0]) >= abs(b[1]) else [(1, b[1]), (0, b[0])]
        out.append(lead + tail)
    routes = []
    for moves in out:
        steps = _steps(a, moves)
        if all(abs(key) > R for _, key, _ in steps):
            routes.append(steps)
    return routes


def _route_chain(a, steps, fixed, damping):
    prims, cur = [], a.copy()
    for idx, key, value in steps:
        inc = value - cur[idx]
        if inc == 0:
            continue
        other = 1 - idx
        fn = _shear_fn(key, inc, fixed[:, other], damping)
        prims.append(make_shear(basis(2, (idx, 1)), basis(2, (other, 1)), fn))
        cur = prims[-1].apply(cur[None, :])[0]
    return AutoChain(2, tuple(prims), name="move_point")


def move_point_fixing(a, b, fixed, box: CompactBox, eps: float, cfg: ToleranceConfig = DEFAULT,
                      seed: int = 0, return_nodes: bool = False):
    """Volume shears with ``a -> b`` that fix every point of ``fixed`` exactly
    and move the box by at most ``eps`` (measured on a grid).

    Each shear changes one coordinate of the moving point, keyed on the other
    coordinate, which must lie outside the box. Its function interpolates the
    increment at the key, vanishes at the fixed points' keys, and vanishes on
    ``m`` damping nodes on the box's boundary circle. Several routes (two to
    four shears) are tried; ``m`` doubles from 1 to 32 until the best route's
    measured deviation is below ``eps``.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    fixed = as_points(fixed) if len(fixed) else np.zeros((0, 2), dtype=complex)
    if np.max(np.abs(a - b)) == 0:
        chain = identity_chain(2)
        return (chain, 0.0, 0) if return_nodes else chain
    rng = np.random.default_rng(seed)
    R = box.radius
    routes = _routes(a, b, R, rng)
    phase = rng.random()
    best = np.inf
    for rnd in range(DAMPING_ROUNDS):
        m = 2**rnd
        damping = R * np.exp(2j * np.pi * (phase + np.arange(m)) / m)
        found = None
        for steps in routes:
            try:
                chain = _route_chain(a, steps, fixed, damping)
                measured = max_deviation(chain.apply, lambda z: z, R, 2, cfg)
            except (GenericityFailure, ArithmeticError):
                continue
            if measured < best:
                best = measured
                if measured <= eps:
                    found = (chain, measured)
        if found is not None:
            chain, measured = found
            return (chain, measured, m) if return_nodes else chain
    if not np.isfinite(best):
        raise GenericityFailure("every route put a key on a fixed point's coordinate")
    raise DampingExhausted(best, eps)


def _check_distinct(P, name):
    for i in range(len(P)):
        for j in range(i):
            if np.max(np.abs(P[i] - P[j])) < 1e-12:
                raise DuplicatePoints(f"{name}[{i}] repeats {name}[{j}]")


def schedule(eps0: float, growth: float, count: int):
    return [eps0 * growth ** (-k) for k in range(1, count + 1)]


def equivalence_chain(A, B, eps0: float = 0.5, growth: float = 2.0, cfg: ToleranceConfig = DEFAULT,
                      seed: int = 0, base_radius: float = 2.0):
    """Stages ``phi_k`` with ``F = phi_N o ... o phi_1`` sending ``A[i] -> B[i]``.

    Pairs are matched in order of their distance from the origin. Stage ``k``
    fixes every pair matched before it and every source not yet matched, and
    moves the box ``C_{k-1}`` by at most ``eps_k = eps0 * growth**-k``. The box
    radii grow by at least ``eps_k`` and each box holds every target matched
    so far. Returns the chain and the per-stage logs.
    """
    if growth <= 1:
        raise ValueError("growth must exceed 1")
    A, B = as_points(A), as_points(B)
    if A.shape != B.shape or A.shape[1] != 2:
        raise ValueError("A and B must be equal-length lists of points of C^2")
    _check_distinct(A, "A")
    _check_distinct(B, "B")
    sup = lambda P: np.max(np.abs(P), axis=1)
    moving = [i for i in range(len(A)) if np.max(np.abs(A[i] - B[i])) > 0]
    order = sorted(moving, key=lambda i: min(sup(A)[i], sup(B)[i]))
    eps = schedule(eps0, growth, len(order))

    prims, logs = [], []
    radius = base_radius
    matched = [i for i in range(len(A)) if i not in moving]
    prev_chain = identity_chain(2)
    for k, i in enumerate(order, start=1):
        if k > 1:
            lo = max([radius + eps[k - 2]] + [sup(B)[j] for j in matched])
            hi = min(sup(A)[i], sup(B)[i])
            if not lo < hi:
                raise ScheduleInfeasible(f"stage {k}: no box radius between {lo:.4g} and {hi:.4g}")
            radius = lo + 0.1 * (hi - lo)
        box = CompactBox(radius)
        if box.contains(A[i]) or box.contains(B[i]):
            raise ScheduleInfeasible(f"stage {k}: the pair is not outside the box of radius {radius:.4g}")
        # matched points are pinned where the chain actually put them
        placed = AutoChain(2, tuple(prims)).apply(B[matched].reshape(-1, 2) * 0 + A[matched]) if matched \
            else np.zeros((0, 2), dtype=complex)
        fixed = list(placed) + [A[j] for j in order[k:]]
        phi, measured, m = move_point_fixing(A[i], B[i], np.array(fixed).reshape(-1, 2), box, eps[k - 1],
                                             cfg, seed=seed * 1000 + k, return_nodes=True)
        prims.extend(phi.primitives)
        matched.append(i)
        chain = AutoChain(2, tuple(prims), name="equivalence")
        logs.append(StageLog(stage=k, epsilon_target=eps[k - 1], measured_deviation=measured,
                             box_radius=radius, matched_pairs=len(matched), damping_nodes_used=m,
                             pair_index=int(i), shears=len(phi.primitives),
                             drift_on_first_box=max_deviation(chain.apply, lambda z: z, base_radius, 2, cfg),
                             step_from_previous=max_deviation(chain.apply, prev_chain.apply, base_radius, 2, cfg)))
        prev_chain = chain
    return AutoChain(2, tuple(prims), name="equivalence"), logs


def random_instance(rng: np.random.Generator, count: int, inner: float = 2.0, ratio: float = 2.0):
    """Source and target lists in C^2 with pair ``k`` in the sup-norm shell
    ``inner * ratio**(k-1) * [1.25, 1.5]``.

    The shells grow geometrically, so every pair keeps a fixed proportion of
    room from the box that must hold the previous targets; all points lie
    outside the polydisc of radius ``inner``.
    """
    if ratio < 1.25:
        raise ValueError("ratio below 1.25 lets neighbouring shells overlap")

    def shell_point(k):
        lo = inner * ratio ** (k - 1)
        r = lo * (1.25 + 0.25 * rng.random())
        z = r * np.sqrt(rng.random(2)) * np.exp(2j * np.pi * rng.random(2))
        j = rng.integers(2)
        z[j] = r * np.exp(2j * np.pi * rng.random())
        return z
    A = np.array([shell_point(k) for k in range(1, count + 1)])
    B = np.array([shell_point(k) for k in range(1, count + 1)])
    return A, B


FIXED_TOL = 1e-9


def stage_prefixes(chain: AutoChain, logs):
    """``F_k = phi_k o ... o phi_1`` for every logged stage."""
    out, used = [], 0
    for log in logs:
        used += log.shears
        out.append(AutoChain(2, chain.primitives[:used], name=f"F_{log.stage}"))
    return out


def matched_drift(chain: AutoChain, logs, A) -> float:
    """How far later stages move a pair after the stage that matched it."""
    A = as_points(A)
    prefixes = stage_prefixes(chain, logs)
    worst = 0.0
    for k, log in enumerate(logs):
        at_match = prefixes[k].apply(A[log.pair_index])
        for later in prefixes[k + 1:]:
            worst = max(worst, float(np.max(np.abs(later.apply(A[log.pair_index]) - at_match))))
    return worst


def verify_equivalence(chain: AutoChain, logs, A, B, cfg: ToleranceConfig = DEFAULT,
                       seed: int = 0, base_radius: float = 2.0) -> VerificationReport:
    """Mapping, per-stage closeness, pinning of matched pairs, and volume.

    Volume and round trip are sampled on the first box, where every stage is
    close to the identity; further out the composed interpolants overflow.
    """
    rep = VerificationReport(chain.name, sample_seed=seed, config=cfg)
    rep.add("tame_action", tame_action_residual(chain, A, B), cfg.residual_tol)
    for log in logs:
        rep.add(f"stage_{log.stage}_deviation", log.measured_deviation, log.epsilon_target)
    rep.add("matched_fixed", matched_drift(chain, logs, A), FIXED_TOL)
    rep.extend(check_volume(chain, cfg, seed=seed, radius=base_radius))
    pts = sample_polydisc(np.random.default_rng(seed), 20, 2, base_radius)
    rep.add("round_trip", round_trip_residual(chain, pts), 1e-9)
    return rep
