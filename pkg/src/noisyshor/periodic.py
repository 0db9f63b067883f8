"""Periodic superpositions fed to the transform stage, and the useful outcomes.

A PeriodicFamily is the support {u* + k*omega} inside [0, 2^n): the state left
in the work register after the modular-exponentiation register is measured.
The useful set collects the measurement outcomes v lying within a chosen
radius of the rational peaks round(2^n * j / omega).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FactorFound
from .numtheory import multiplicative_order, is_prime


@dataclass(frozen=True)
class PeriodicFamily:
    """Arithmetic progression u* + k*omega truncated to [0, 2^n)."""

    n: int
    omega: int
    u_star: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one qubit, got n={self.n}")
        if self.omega < 1:
            raise ValueError(f"omega must be >= 1, got {self.omega}")
        if not 0 <= self.u_star < self.omega:
            raise ValueError(f"u_star must lie in [0, omega), got {self.u_star}")
        if self.u_star >= 1 << self.n:
            raise ValueError("u_star must fit in n bits")

    @property
    def K(self) -> int:
        """Term count ceil((2^n - u*) / omega)."""
        return ((1 << self.n) - self.u_star + self.omega - 1) // self.omega

    def u(self, k: int) -> int:
        if not 0 <= k < self.K:
            raise IndexError(f"k must lie in [0, {self.K}), got {k}")
        return self.u_star + k * self.omega

    def u_bit(self, k: int, s: int) -> int:
        """Bit s of the k-th member."""
        return (self.u(k) >> s) & 1

    def members(self) -> np.ndarray:
        """All K members, ascending, as an int64 array."""
        return self.u_star + self.omega * np.arange(self.K, dtype=np.int64)

    def bit_matrix(self) -> np.ndarray:
        """(K, n) uint8 matrix; row k holds the bits of u^(k), column s = bit s."""
        u = self.members()
        return ((u[:, None] >> np.arange(self.n)[None, :]) & 1).astype(np.uint8)


@dataclass(frozen=True)
class ShorInstance:
    """A factoring instance: modulus N, base x, qubit count n, period omega."""

    N: int
    x: int
    n: int
    omega: int

    def __post_init__(self):
        if not (1 << (self.n - 1)) < self.N * self.N <= (1 << self.n):
            raise ValueError("qubit count must satisfy 2^(n-1) < N^2 <= 2^n")
        if math.gcd(self.x, self.N) != 1:
            raise ValueError("x must be invertible mod N")
        if pow(self.x, self.omega, self.N) != 1:
            raise ValueError("omega is not a period of x mod N")

    def family(self, u_star: int) -> PeriodicFamily:
        return PeriodicFamily(self.n, self.omega, u_star)


def make_instance(N: int, x: int) -> ShorInstance:
    """Build the instance for factoring N with base x.

    Picks the least n with N^2 <= 2^n and computes the multiplicative order
    of x. If gcd(x, N) > 1 the instance is pointless and FactorFound is
    raised carrying the revealed factor.
    """
    if N < 3 or N % 2 == 0:
        raise ValueError(f"N must be odd and >= 3, got {N}")
    if is_prime(N):
        raise ValueError(f"N={N} is prime; nothing to factor")
    g = math.gcd(x, N)
    if g != 1:
        raise FactorFound(g, N)
    n = (N * N - 1).bit_length()
    omega = multiplicative_order(x % N, N)
    return ShorInstance(N, x, n, omega)


def useful_set(family: PeriodicFamily, radius: int) -> set[int]:
    """Outcomes within `radius` of some rounded peak round(2^n * j / omega).

    Peaks are rounded half-up; indices wrap mod 2^n.
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    big = 1 << family.n
    if family.n <= 30:  # 2 * 2^n * omega stays well inside int64
        j = np.arange(family.omega, dtype=np.int64)
        centers = (2 * big * j + family.omega) // (2 * family.omega)
        centers = centers.tolist()
    else:
        centers = [
            (2 * big * j + family.omega) // (2 * family.omega)
            for j in range(family.omega)
        ]
    out: set[int] = set()
    for off in range(-radius, radius + 1):
        out.update((c + off) % big for c in centers)
    return out


def default_radius(n: int) -> int:
    """Default useful-set radius: n^2, a concrete polynomial-sized vicinity."""
    return n * n
