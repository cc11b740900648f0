"""Numerical tame-set constructions: interpolating shear and flow chains that
realise prescribed permutations of discrete sets, with residual verifiers."""

__version__ = "0.1.0"

from .autochain import AutoChain, VerificationReport, inverse
from .errors import TameforgeError
from .numerics import ToleranceConfig

__all__ = ["AutoChain", "VerificationReport", "ToleranceConfig", "TameforgeError", "inverse", "__version__"]
