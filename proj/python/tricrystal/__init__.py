"""Python bindings for the tricrystal simulation core."""

from ._core import (
    Chain,
    Configuration,
    PotentialSpec,
    __version__,
    best_rotation,
    detailed_balance_audit,
    dist_so2,
    scan,
    simulate,
    verify,
)

__all__ = [
    "Chain",
    "Configuration",
    "PotentialSpec",
    "__version__",
    "best_rotation",
    "detailed_balance_audit",
    "dist_so2",
    "scan",
    "simulate",
    "verify",
]
