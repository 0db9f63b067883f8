"""Exception types shared across the package.

The CLI maps these onto its exit-code contract (configuration errors exit 2,
capacity errors exit 3); library callers catch them like ordinary ValueErrors.
"""

from __future__ import annotations


class ConfigurationError(ValueError):
    """Invalid or inconsistent run configuration (bad mode/band/tape pairing)."""


class CapacityError(RuntimeError):
    """Request exceeds a documented size cap (qubit count, table size)."""


class SamplingExhaustedError(RuntimeError):
    """Rejection sampling hit its retry cap without finding a satisfying value."""


class FactorFound(Exception):
    """gcd(x, N) > 1 revealed a factor before any quantum work.

    This is a success signal for the factoring pipeline, not a failure; it is
    an exception only so that instance construction has a single happy path.
    """

    def __init__(self, factor: int, modulus: int):
        self.factor = factor
        self.modulus = modulus
        super().__init__(f"gcd already reveals factor {factor} of {modulus}")
