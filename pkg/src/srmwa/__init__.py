"""Attention competition with advertisement.

Stochastic recommendation simulator plus the exact birth-death chain
analysis of the advertised item's owner count.
"""

from ._backend import BACKEND
from .model import (
    ADVERTISED,
    APPROXIMATION,
    EXACT_M1,
    GammaPolicy,
    MarketState,
    ModelParams,
    Regular,
    TransitionKind,
    rho,
    validate,
)

__all__ = [
    "ADVERTISED",
    "APPROXIMATION",
    "BACKEND",
    "EXACT_M1",
    "GammaPolicy",
    "MarketState",
    "ModelParams",
    "Regular",
    "TransitionKind",
    "rho",
    "validate",
]
