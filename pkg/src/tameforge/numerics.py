"""Complex sample points, finite-difference Jacobians and deviation metrics.

Points are plain complex numpy arrays: a point of C^n has shape ``(n,)`` and a
batch of points has shape ``(N, n)``. Every point map used here must accept a
batch and return a batch of the same shape.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace

import numpy as np

from .errors import NonFiniteEvaluation


@dataclass(frozen=True)
class ToleranceConfig:
    diff_step: float = 1e-6
    residual_tol: float = 1e-8
    jac_tol: float = 1e-6
    grid_n: int = 7

    def __post_init__(self):
        for name in ("diff_step", "residual_tol", "jac_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.grid_n < 2:
            raise ValueError("grid_n must be at least 2")

    @classmethod
    def from_env(cls, **overrides) -> "ToleranceConfig":
        """Default config, with ``TAMEFORGE_TOL`` overriding ``residual_tol``."""
        cfg = cls(**overrides)
        env = os.environ.get("TAMEFORGE_TOL")
        if env:
            cfg = replace(cfg, residual_tol=float(env))
        return cfg

    def as_dict(self) -> dict:
        return {
            "diff_step": self.diff_step,
            "residual_tol": self.residual_tol,
            "jac_tol": self.jac_tol,
            "grid_n": self.grid_n,
        }


DEFAULT = ToleranceConfig()


def as_points(z) -> np.ndarray:
    """Coerce to a 2-D complex batch ``(N, dim)``."""
    arr = np.asarray(z, dtype=complex)
    if arr.ndim == 1:
        arr = arr[None, :]
    return arr


def check_finite(values, what="map") -> np.ndarray:
    values = np.asarray(values)
    if not np.all(np.isfinite(values)):
        raise NonFiniteEvaluation(f"{what} produced NaN/Inf")
    return values


def sup_norm(z) -> float:
    z = np.asarray(z)
    return float(np.max(np.abs(z))) if z.size else 0.0


def jacobians(fmap, z, cfg: ToleranceConfig = DEFAULT) -> np.ndarray:
    """Central-difference Jacobians of ``fmap`` at each point of the batch ``z``.

    Only real-axis steps are taken; for a holomorphic map the real partial
    derivative is the complex derivative. Returns shape ``(N, dim_out, dim)``.
    """
    pts = as_points(z)
    n, dim = pts.shape
    h = cfg.diff_step
    steps = np.eye(dim, dtype=complex) * h
    # probes[i, j, s]: point i, direction j, sign s
    probes = pts[:, None, None, :] + np.stack([steps, -steps], axis=1)[None, :, :, :]
    out = check_finite(fmap(probes.reshape(-1, dim)), "jacobian probe")
    out = out.reshape(n, dim, 2, -1)
    diff = (out[:, :, 0, :] - out[:, :, 1, :]) / (2 * h)
    return np.transpose(diff, (0, 2, 1))


def jacobian(fmap, z, cfg: ToleranceConfig = DEFAULT) -> np.ndarray:
    """Central-difference Jacobian at a single point."""
    z = np.asarray(z, dtype=complex)
    if z.ndim != 1:
        raise ValueError("jacobian expects a single point; use jacobians for batches")
    return jacobians(fmap, z, cfg)[0]


def disc_grid(radius: float, grid_n: int) -> np.ndarray:
    """Square re/im grid of ``grid_n**2`` points, clipped to the closed disc."""
    ticks = np.linspace(-radius, radius, grid_n)
    zz = (ticks[:, None] + 1j * ticks[None, :]).ravel()
    return zz[np.abs(zz) <= radius * (1 + 1e-12)]


def polydisc_grid(radius: float, dim: int, grid_n: int) -> np.ndarray:
    """Product of per-coordinate disc grids; shape ``(M, dim)``."""
    base = disc_grid(radius, grid_n)
    mesh = np.meshgrid(*([base] * dim), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def max_deviation(f, g, box_radius: float, dim: int, cfg: ToleranceConfig = DEFAULT) -> float:
    """Max over the polydisc grid of the sup-norm distance between two maps."""
    if box_radius <= 0:
        return 0.0
    pts = polydisc_grid(box_radius, dim, cfg.grid_n)
    fv = check_finite(f(pts), "f")
    gv = check_finite(g(pts), "g")
    return sup_norm(fv - gv)


def sample_polydisc(rng: np.random.Generator, count: int, dim: int, radius: float = 2.0) -> np.ndarray:
    """Uniform samples from the polydisc: each coordinate uniform in its disc."""
    r = radius * np.sqrt(rng.random((count, dim)))
    theta = 2 * np.pi * rng.random((count, dim))
    return r * np.exp(1j * theta)


def sample_disc(rng: np.random.Generator, count: int, radius: float = 1.0) -> np.ndarray:
    return sample_polydisc(rng, count, 1, radius)[:, 0]
