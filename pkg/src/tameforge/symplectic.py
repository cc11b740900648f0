"""Symplectic shear constructions on C^{2n} with ``J = [[0, I], [-I, 0]]``."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .autochain import (AutoChain, Lift, VerificationReport, basis, check_symplectic, check_volume,
                        linear_form, make_forstneric_shear, make_shear, solve_stage,
                        tame_action_residual)
from .errors import FirstCoordinateMismatch, LengthMismatch, NodeCollision, NotVolumePreserving
from .euclid import _distinct, very_tame_normalize
from .interp import MIN_GAP, fit, identity
from .numerics import DEFAULT, ToleranceConfig, as_points

LATTICE_GAP = 1e-9


def _e(dim, i):
    return basis(dim, (i, 1))


def axis_relabel(alpha, beta, n: int) -> AutoChain:
    """Three Forstneric shears of C^{2n} with ``alpha_j e_1 -> beta_j e_1``.

    ``z_{n+1} += z_1``, then ``z_1 += f(z_{n+1})``, then ``z_{n+1} += g(z_1)``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    beta = np.atleast_1d(np.asarray(beta, dtype=complex))
    if len(alpha) != len(beta):
        raise LengthMismatch(f"{len(alpha)} sources but {len(beta)} targets")
    dim = 2 * n
    cur = np.zeros((len(alpha), dim), dtype=complex)
    cur[:, 0] = alpha
    s1 = make_forstneric_shear(_e(dim, n), identity(), n)
    cur = s1.apply(cur)
    # J e_1 = -e_{n+1}: the argument is -z_{n+1}
    v2 = _e(dim, 0)
    f = solve_stage(linear_form(cur, np.zeros(dim) - _e(dim, n)), beta - cur[:, 0], stage=2)
    s2 = make_forstneric_shear(v2, f, n)
    cur = s2.apply(cur)
    g = solve_stage(cur[:, 0], -cur[:, n], stage=3)
    s3 = make_forstneric_shear(_e(dim, n), g, n)
    return AutoChain(dim, (s1, s2, s3), name="axis_relabel")


def axis_points(values, n: int) -> np.ndarray:
    values = np.atleast_1d(np.asarray(values, dtype=complex))
    out = np.zeros((len(values), 2 * n), dtype=complex)
    out[:, 0] = values
    return out


def fiber_lift_chain(b, targets, n: int) -> AutoChain:
    """Forstneric shears sending ``b_i e_1`` to ``targets[i]`` in C^{2n}.

    Directions ``e_j + e_{n+1}`` for ``j = 2..n``, then ``e_{n+j} + e_{n+1}``
    for ``j = 2..n``, then ``e_{n+1}``; every value is solved at the current
    images (1-based coordinate names).
    """
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    targets = as_points(targets)
    dim = 2 * n
    if targets.shape != (len(b), dim):
        raise LengthMismatch(f"expected {len(b)} targets in C^{dim}")
    if not _distinct(b, MIN_GAP):
        raise NodeCollision("axis coordinates must be pairwise distinct")
    if np.any(np.abs(targets[:, 0] - b) > MIN_GAP):
        raise FirstCoordinateMismatch("each target must share its axis point's first coordinate")
    cur = axis_points(b, n)
    prims = []
    stage = 0
    directions = [(_e(dim, j) + _e(dim, n), j) for j in range(1, n)]
    directions += [(_e(dim, n + j) + _e(dim, n), n + j) for j in range(1, n)]
    for v, coord in directions:
        stage += 1
        lam = np.asarray(make_forstneric_shear(v, identity(), n).lam)
        fn = solve_stage(linear_form(cur, lam), targets[:, coord] - cur[:, coord], stage=stage)
        prims.append(make_forstneric_shear(v, fn, n))
        cur = prims[-1].apply(cur)
    stage += 1
    last = solve_stage(cur[:, 0], targets[:, n] - cur[:, n], stage=stage)
    prims.append(make_forstneric_shear(_e(dim, n), last, n))
    return AutoChain(dim, tuple(prims), name="fiber_lift")


def cantor(n: int, m: int) -> int:
    """Diagonal enumeration of N x N starting at ``cantor(1, 1) = 1``."""
    return (n + m - 1) * (n + m - 2) // 2 + m


@dataclass(frozen=True)
class PairLattice:
    """The grid ``(n, m, 0, 0)``, ``1 <= n, m <= K``, with labels ``x[n, m]``."""

    K: int
    alpha: float = sqrt(2.0)
    labels: dict = field(default=None)

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be at least 1")
        if self.labels is None:
            object.__setattr__(self, "labels", {(n, m): complex(cantor(n, m)) for n, m in self.pairs()})
        missing = set(self.pairs()) - set(self.labels)
        if missing:
            raise ValueError(f"labels missing for {sorted(missing)[:3]}")
        if not _distinct([self.labels[p] for p in self.pairs()], LATTICE_GAP):
            raise NodeCollision("lattice labels must be pairwise distinct")
        if not _distinct(self.sums(), LATTICE_GAP):
            raise NodeCollision("n + alpha m values collide")

    def pairs(self):
        return [(n, m) for n in range(1, self.K + 1) for m in range(1, self.K + 1)]

    def sums(self) -> np.ndarray:
        return np.array([n + self.alpha * m for n, m in self.pairs()], dtype=complex)

    def x(self) -> np.ndarray:
        return np.array([self.labels[p] for p in self.pairs()], dtype=complex)

    def points(self) -> np.ndarray:
        nm = np.array(self.pairs(), dtype=complex)
        return np.concatenate([nm, np.zeros_like(nm)], axis=1)

    def images(self) -> np.ndarray:
        out = np.zeros((len(self.pairs()), 4), dtype=complex)
        out[:, 0] = self.x()
        return out


def flatten_pairs_c4(lattice: PairLattice, mode: str = "corrected") -> AutoChain:
    """Shears of C^4 sending ``(n, m, 0, 0)`` to ``(x[n, m], 0, 0, 0)``.

    ``corrected`` is a chain of four Forstneric shears; ``paper`` transcribes
    the printed three-map chain literally, with its non-symplectic first map
    and its mis-keyed arguments kept as they are.
    """
    if mode == "corrected":
        return _flatten_corrected(lattice)
    if mode == "paper":
        return _flatten_printed(lattice)
    raise ValueError(f"unknown mode {mode!r}")


def _flatten_corrected(lat: PairLattice) -> AutoChain:
    a = lat.alpha
    v34 = basis(4, (2, 1), (3, a))
    cur = lat.points()
    s1 = make_forstneric_shear(v34, identity(), 2)
    cur = s1.apply(cur)
    # J e_1 = -e_3, J e_2 = -e_4
    g = solve_stage(-cur[:, 2], lat.x() - cur[:, 0], stage=2)
    s2 = make_forstneric_shear(_e(4, 0), g, 2)
    cur = s2.apply(cur)
    h = solve_stage(-cur[:, 3], -cur[:, 1], stage=3)
    s3 = make_forstneric_shear(_e(4, 1), h, 2)
    cur = s3.apply(cur)
    f4 = solve_stage(linear_form(cur, s1.lam), -cur[:, 2], stage=4)
    s4 = make_forstneric_shear(v34, f4, 2)
    return AutoChain(4, (s1, s2, s3, s4), name="flatten_c4")


def _flatten_printed(lat: PairLattice) -> AutoChain:
    a = lat.alpha
    nm = np.array(lat.pairs(), dtype=float)
    x = lat.x()
    f = fit(lat.sums(), x)
    s1 = make_shear(basis(4, (1, 1), (3, a)), basis(4, (0, 1), (2, a)), f)
    # g and h keyed on x and alpha*x; repeated keys would need equal values
    g = fit(x, x - nm[:, 0])
    h = fit(a * x, -nm[:, 1])
    s2a = make_shear(_e(4, 0), _e(4, 2), g)
    s2b = make_shear(_e(4, 1), _e(4, 3), h)
    bfn = fit(x, -x)
    s3 = make_shear(basis(4, (2, 1), (3, a)), basis(4, (0, 1), (1, a)), bfn)
    return AutoChain(4, (s1, s2a, s2b, s3), name="flatten_c4_printed")


def verify_flatten(chain: AutoChain, lattice: PairLattice, mode: str = "corrected",
                   cfg: ToleranceConfig = DEFAULT, seed: int = 0) -> VerificationReport:
    diag = mode == "paper"
    rep = VerificationReport(chain.name, sample_seed=seed, config=cfg)
    mapping = tame_action_residual(chain, lattice.points(), lattice.images())
    rep.add("tame_action", mapping, cfg.residual_tol, expected_fail=diag)
    rep.extend(check_symplectic(chain, 2, cfg, seed=seed, expected_fail=diag))
    return rep


PAIRS = {(1, 3): (0, 2), (2, 4): (1, 3)}


def symplectic_lift(F: AutoChain, pair=(1, 3), cfg: ToleranceConfig = DEFAULT) -> AutoChain:
    """Let a volume-preserving map of C^2 act on the coordinate ``pair`` of C^4."""
    pair = tuple(pair)
    if pair not in PAIRS:
        raise ValueError(f"pair must be one of {sorted(PAIRS)}")
    if F.dim != 2:
        raise LengthMismatch("only maps of C^2 can be lifted")
    if not check_volume(F, cfg, radius=1.0).passed:
        raise NotVolumePreserving("the map does not preserve volume")
    return AutoChain(4, (Lift(4, PAIRS[pair], F),), name=f"lift{pair[0]}{pair[1]}")


def _unique_rows(P, gap=1e-9):
    keep = []
    for p in P:
        if not any(np.max(np.abs(p - q)) < gap for q in keep):
            keep.append(p)
    return np.array(keep, dtype=complex)


def tame_c4_projection(A, seed: int = 0) -> AutoChain:
    """Two lifted normalizations sending a finite ``A`` into ``{(i, j, 0, 0)}``.

    Points of ``A`` that share a projection travel together, so each
    normalization sees the distinct projected points only.
    """
    A = as_points(A)
    if A.shape[1] != 4:
        raise LengthMismatch("tame_c4_projection works in C^4")
    F1 = very_tame_normalize(_unique_rows(A[:, [0, 2]]), seed=seed)
    L1 = symplectic_lift(F1, (1, 3))
    mid = L1.apply(A)
    F2 = very_tame_normalize(_unique_rows(mid[:, [1, 3]]), seed=seed + 1)
    L2 = symplectic_lift(F2, (2, 4))
    return AutoChain(4, L1.primitives + L2.primitives, name="tame_c4")
