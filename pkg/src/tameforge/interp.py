"""Finite-node polynomial interpolation in Newton form.

Every entire function that the constructions need is only ever pinned down at
finitely many points, so a polynomial through those points stands in for it.
Nodes are put in Leja order before the divided differences are formed, which
keeps the Newton coefficients well scaled for clustered node sets.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ConditioningWarning, LengthMismatch, NodeCollision, TooManyNodes

MAX_NODES = 64
WARN_NODES = 30
MIN_GAP = 1e-12


def leja_order(nodes: np.ndarray) -> np.ndarray:
    """Greedy Leja permutation: start at the largest modulus, then maximise
    the product of distances to the nodes already chosen."""
    nodes = np.asarray(nodes, dtype=complex)
    n = len(nodes)
    if n == 0:
        return np.zeros(0, dtype=int)
    order = [int(np.argmax(np.abs(nodes)))]
    # log-distance accumulator avoids overflow of the products
    logprod = np.zeros(n)
    remaining = np.ones(n, dtype=bool)
    remaining[order[0]] = False
    for _ in range(n - 1):
        d = np.abs(nodes - nodes[order[-1]])
        with np.errstate(divide="ignore"):
            logprod += np.log(d)
        cand = np.where(remaining, logprod, -np.inf)
        nxt = int(np.argmax(cand))
        order.append(nxt)
        remaining[nxt] = False
    return np.asarray(order, dtype=int)


def divided_differences(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    coef = np.array(y, dtype=complex)
    n = len(x)
    for j in range(1, n):
        coef[j:] = (coef[j:] - coef[j - 1 : -1]) / (x[j:] - x[: n - j])
    return coef


@dataclass(frozen=True, eq=False)
class Interpolant:
    """Newton-form polynomial.

    ``nodes`` are stored in the evaluation (Leja) order and ``coefficients``
    are the matching divided differences; ``ordering[i]`` is the input index
    of the i-th stored node.
    """

    nodes: np.ndarray
    coefficients: np.ndarray
    ordering: np.ndarray
    values: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.nodes) - 1

    def __call__(self, z):
        return evaluate(self, z)

    def derivative(self, z):
        """First derivative, by differentiating the Horner recurrence."""
        z = _as_argument(z)
        p = np.full(z.shape, self.coefficients[-1], dtype=z.dtype)
        dp = np.zeros(z.shape, dtype=z.dtype)
        for c, x in zip(self.coefficients[-2::-1], self.nodes[-2::-1]):
            dp = p + (z - x) * dp
            p = c + (z - x) * p
        return dp

    def scaled(self, factor) -> "Interpolant":
        """The interpolant of ``factor * values`` on the same nodes."""
        return Interpolant(self.nodes, self.coefficients * factor, self.ordering, self.values * factor)

    def input_nodes(self) -> np.ndarray:
        """Nodes in the order they were supplied to ``fit``."""
        out = np.empty_like(self.nodes)
        out[self.ordering] = self.nodes
        return out

    def input_values(self) -> np.ndarray:
        return np.asarray(self.values)

    def is_zero(self) -> bool:
        return bool(np.all(self.values == 0))


def _check_nodes(nodes: np.ndarray):
    n = len(nodes)
    if n > MAX_NODES:
        raise TooManyNodes(f"{n} nodes exceeds the cap of {MAX_NODES}")
    if n > 1:
        gaps = np.abs(nodes[:, None] - nodes[None, :])
        np.fill_diagonal(gaps, np.inf)
        i, j = np.unravel_index(np.argmin(gaps), gaps.shape)
        if gaps[i, j] < MIN_GAP:
            raise NodeCollision(f"nodes {nodes[i]} and {nodes[j]} are closer than {MIN_GAP}")
    if n > WARN_NODES:
        warnings.warn(f"interpolating through {n} nodes; divided differences may lose digits",
                      ConditioningWarning, stacklevel=3)


def fit(nodes, values) -> Interpolant:
    """Polynomial of degree ``len(nodes) - 1`` through ``(nodes[i], values[i])``."""
    nodes = np.atleast_1d(np.asarray(nodes, dtype=complex))
    values = np.atleast_1d(np.asarray(values, dtype=complex))
    if len(nodes) != len(values):
        raise LengthMismatch(f"{len(nodes)} nodes but {len(values)} values")
    if len(nodes) == 0:
        raise LengthMismatch("at least one node is required")
    _check_nodes(nodes)
    order = leja_order(nodes)
    x = nodes[order]
    coef = divided_differences(x, values[order])
    return Interpolant(x, coef, order, values.copy())


def fit_damped(nodes, values, zero_nodes) -> Interpolant:
    """Fit through ``(nodes, values)`` and additionally vanish on ``zero_nodes``.

    Zero nodes placed inside a compact pull the interpolant towards zero there.
    They lead the Newton order, so their divided differences are exactly zero
    and nested evaluation returns exactly ``0`` at each of them.
    """
    zero_nodes = np.atleast_1d(np.asarray(zero_nodes, dtype=complex))
    nodes = np.atleast_1d(np.asarray(nodes, dtype=complex))
    values = np.atleast_1d(np.asarray(values, dtype=complex))
    if len(nodes) != len(values):
        raise LengthMismatch(f"{len(nodes)} nodes but {len(values)} values")
    allnodes = np.concatenate([zero_nodes, nodes])
    if len(allnodes) == 0:
        raise LengthMismatch("at least one node is required")
    _check_nodes(allnodes)
    nz = len(zero_nodes)
    order = np.concatenate([leja_order(zero_nodes), nz + leja_order(nodes)]).astype(int)
    allvalues = np.concatenate([np.zeros(nz, dtype=complex), values])
    x = allnodes[order]
    coef = divided_differences(x, allvalues[order])
    return Interpolant(x, coef, order, allvalues)


def _as_argument(z):
    # object arrays hold mpmath numbers and stay in their precision
    z = np.asarray(z)
    return z if z.dtype == object else z.astype(complex)


def evaluate(p: Interpolant, z):
    """Nested (Horner) evaluation of the Newton form; works on arrays."""
    z = _as_argument(z)
    out = np.full(z.shape, p.coefficients[-1], dtype=z.dtype)
    for c, x in zip(p.coefficients[-2::-1], p.nodes[-2::-1]):
        out = c + (z - x) * out
    if out.ndim:
        return out
    return out[()] if out.dtype == object else complex(out)


def constant(value) -> Interpolant:
    return fit([0.0], [value])


def identity() -> Interpolant:
    return fit([0.0, 1.0], [0.0, 1.0])


def linear(slope, intercept=0.0) -> Interpolant:
    return fit([0.0, 1.0], [intercept, intercept + slope])
