"""Shear constructions on C^n: graph maps over the first axis, three-shear
relabelings in C^2 and a finite very-tame normalization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .autochain import AutoChain, basis, make_shear, solve_stage
from .errors import FirstCoordinateMismatch, GenericityFailure, LengthMismatch, NodeCollision
from .interp import MIN_GAP, fit, linear
from .numerics import as_points

SEPARATION = 1e-9
PRELIM_RETRIES = 8


def _distinct(values, gap=SEPARATION) -> bool:
    values = np.asarray(values, dtype=complex)
    if len(values) < 2:
        return True
    d = np.abs(values[:, None] - values[None, :])
    np.fill_diagonal(d, np.inf)
    return bool(d.min() > gap)


@dataclass(frozen=True)
class AxisSet:
    """The points ``first_coords[i] * e_1`` of C^n."""

    n: int
    first_coords: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not _distinct(self.first_coords, MIN_GAP):
            raise NodeCollision("axis coordinates must be pairwise distinct")

    def points(self) -> np.ndarray:
        out = np.zeros((len(self.first_coords), self.n), dtype=complex)
        out[:, 0] = self.first_coords
        return out


def line_to_targets(b: AxisSet, targets) -> AutoChain:
    """``(z_1, z_2 + f_2(z_1), ..., z_n + f_n(z_1))`` sending ``b_i e_1`` to
    ``targets[i]``; one shear per coordinate after the first."""
    targets = as_points(targets)
    pts = b.points()
    if len(targets) != len(pts):
        raise LengthMismatch(f"{len(pts)} axis points but {len(targets)} targets")
    if targets.shape[1] != b.n:
        raise LengthMismatch(f"targets live in C^{targets.shape[1]}, not C^{b.n}")
    if np.any(np.abs(targets[:, 0] - pts[:, 0]) > MIN_GAP):
        raise FirstCoordinateMismatch("each target must share its axis point's first coordinate")
    lam = basis(b.n, (0, 1))
    prims = []
    for j in range(1, b.n):
        fj = fit(pts[:, 0], targets[:, j])
        prims.append(make_shear(basis(b.n, (j, 1)), lam, fj))
    return AutoChain(b.n, tuple(prims), name="line_to_targets")


def _three_shears(cur: np.ndarray, xs_target, first_stage=1):
    """y += p(x) to y = k, then x += q(y) to x = xs_target, then y += r(x) to y = 0."""
    k = np.arange(1, len(cur) + 1, dtype=complex)
    ex, ey = basis(2, (0, 1)), basis(2, (1, 1))
    prims = []
    p = solve_stage(cur[:, 0], k - cur[:, 1], stage=first_stage)
    prims.append(make_shear(ey, ex, p))
    cur = prims[-1].apply(cur)
    q = solve_stage(cur[:, 1], xs_target - cur[:, 0], stage=first_stage + 1)
    prims.append(make_shear(ex, ey, q))
    cur = prims[-1].apply(cur)
    r = solve_stage(cur[:, 0], -cur[:, 1], stage=first_stage + 2)
    prims.append(make_shear(ey, ex, r))
    return prims


def c2_relabel(alpha, beta) -> AutoChain:
    """Three volume shears of C^2 with ``(alpha_j, 0) -> (beta_j, 0)``."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    beta = np.atleast_1d(np.asarray(beta, dtype=complex))
    if len(alpha) != len(beta):
        raise LengthMismatch(f"{len(alpha)} sources but {len(beta)} targets")
    for name, vals in (("alpha", alpha), ("beta", beta)):
        if not _distinct(vals, MIN_GAP):
            raise NodeCollision(f"{name} values must be pairwise distinct")
    start = np.stack([alpha, np.zeros_like(alpha)], axis=1)
    return AutoChain(2, tuple(_three_shears(start, beta)), name="c2_relabel")


def very_tame_normalize(S, seed: int = 0) -> AutoChain:
    """Volume shears of C^2 sending ``S[i]`` to ``(i + 1, 0)``.

    If two points share an x-coordinate, a shear ``x += c y`` with a small
    random ``c`` goes first; it stays in the chain as its first primitive.
    """
    S = as_points(S)
    if S.shape[1] != 2:
        raise LengthMismatch("very_tame_normalize works in C^2")
    prims = []
    cur = S.copy()
    if not _distinct(cur[:, 0]):
        rng = np.random.default_rng(seed)
        for _ in range(PRELIM_RETRIES):
            c = (0.1 + 0.4 * rng.random()) * np.exp(2j * np.pi * rng.random())
            pre = make_shear(basis(2, (0, 1)), basis(2, (1, 1)), linear(c))
            moved = pre.apply(cur)
            if _distinct(moved[:, 0]):
                prims.append(pre)
                cur = moved
                break
        else:
            raise GenericityFailure(f"no preliminary shear separated the x-coordinates in {PRELIM_RETRIES} tries")
    targets = np.arange(1, len(S) + 1, dtype=complex)
    prims += _three_shears(cur, targets, first_stage=len(prims) + 1)
    return AutoChain(2, tuple(prims), name="very_tame_normalize")


def normalized_images(count: int) -> np.ndarray:
    """``(i, 0)`` for ``i = 1..count``, the target of ``very_tame_normalize``."""
    return np.stack([np.arange(1, count + 1, dtype=complex), np.zeros(count, dtype=complex)], axis=1)


__all__ = ["AxisSet", "line_to_targets", "c2_relabel", "very_tame_normalize", "normalized_images"]
