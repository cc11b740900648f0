"""Sparse multivariate polynomials with exact one-variable difference quotients."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np


def _points(z):
    # object arrays carry mpmath numbers and must keep their precision
    z = np.asarray(z)
    return z if z.dtype == object else z.astype(complex)


@dataclass(frozen=True)
class Polynomial:
    """``terms`` is a tuple of ``(coefficient, exponents)`` pairs."""

    nvars: int
    terms: tuple

    @classmethod
    def from_list(cls, nvars: int, terms) -> "Polynomial":
        clean = []
        for coef, exps in terms:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or min(exps, default=0) < 0:
                raise ValueError(f"bad exponent vector {exps} for {nvars} variables")
            clean.append((complex(coef), exps))
        return cls(nvars, tuple(clean))

    def to_list(self):
        return [[[c.real, c.imag], list(e)] for c, e in self.terms]

    def __call__(self, z):
        z = _points(z)
        out = np.zeros(z.shape[:-1], dtype=z.dtype)
        for coef, exps in self.terms:
            term = np.full(z.shape[:-1], coef, dtype=z.dtype)
            for i, e in enumerate(exps):
                if e:
                    term = term * z[..., i] ** e
            out = out + term
        return out

    def partial(self, z, var: int):
        z = _points(z)
        out = np.zeros(z.shape[:-1], dtype=z.dtype)
        for coef, exps in self.terms:
            e = exps[var]
            if e == 0:
                continue
            term = np.full(z.shape[:-1], coef * e, dtype=z.dtype)
            for i, ei in enumerate(exps):
                p = ei - 1 if i == var else ei
                if p:
                    term = term * z[..., i] ** p
            out = out + term
        return out

    def difference_quotient(self, z, var: int, h):
        """``(P(z + h e_var) - P(z)) / h`` expanded binomially, so it is exact
        in exact arithmetic and stable as ``h -> 0`` (where it equals the
        partial derivative)."""
        z = _points(z)
        h = np.asarray(h)
        h = h if h.dtype == object else h.astype(complex)
        kind = object if object in (z.dtype, h.dtype) else complex
        out = np.zeros(np.broadcast_shapes(z.shape[:-1], h.shape), dtype=kind)
        for coef, exps in self.terms:
            e = exps[var]
            if e == 0:
                continue
            rest = np.full(z.shape[:-1], coef, dtype=kind)
            for i, ei in enumerate(exps):
                if i != var and ei:
                    rest = rest * z[..., i] ** ei
            x = z[..., var]
            s = np.zeros_like(out)
            for r in range(1, e + 1):
                s = s + comb(e, r) * x ** (e - r) * h ** (r - 1)
            out = out + rest * s
        return out
