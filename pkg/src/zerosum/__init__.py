"""zerosum: population-based equilibrium solvers for two-player zero-sum
games with exact exploitability measurement."""

from . import games, harness, lp, meta, qlearn, regret, solvers
from .errors import (
    CertificationError,
    ConfigError,
    EnumerationCapError,
    PolicyDomainError,
    ZeroSumError,
)

__version__ = "0.1.0"

__all__ = [
    "CertificationError",
    "ConfigError",
    "EnumerationCapError",
    "PolicyDomainError",
    "ZeroSumError",
    "games",
    "harness",
    "lp",
    "meta",
    "qlearn",
    "regret",
    "solvers",
]
