"""Integer arithmetic backbone: factorization, primality, orders, continued fractions.

Everything here is deterministic and exact. Factorization targets are capped
at 64 bits (desk-scale moduli), so trial division plus Brent-cycle rho covers
every input, and Miller-Rabin with the fixed 12-witness base set is a proof,
not a probabilistic test, in that range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import SamplingExhaustedError

MAX_FACTOR_TARGET = 1 << 64

# Deterministic witness set for n < 3.3e24, which covers the 64-bit cap.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

SAMPLE_PRIME_MAX_ATTEMPTS = 10**6


def _sieve_bools(limit: int) -> np.ndarray:
    """Boolean primality table for 0..limit inclusive."""
    table = np.ones(limit + 1, dtype=bool)
    table[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if table[p]:
            table[p * p :: p] = False
    return table


def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit, ascending, as an int64 array."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    return np.nonzero(_sieve_bools(limit))[0].astype(np.int64)


_SMALL_PRIMES = [int(p) for p in primes_up_to(1000)]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for 1 <= n <= 2^64."""
    if not 1 <= n <= MAX_FACTOR_TARGET:
        raise ValueError(f"is_prime expects 1 <= n <= 2^64, got {n}")
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent_rho(n: int) -> int:
    """A nontrivial factor of an odd composite n (Floyd cycle, deterministic)."""
    for c in range(1, 200):
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise ArithmeticError(f"rho failed to split {n}")  # unreachable at 64-bit scale


@dataclass(frozen=True)
class Factorization:
    """A positive integer with its prime factorization, sorted by prime."""

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if e < 1:
                raise ValueError(f"exponent {e} < 1 for prime {p}")
            if p <= last:
                raise ValueError("factors must be sorted by strictly increasing prime")
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            last = p
            prod *= p**e
        if prod != self.value:
            raise ValueError(f"factors multiply to {prod}, not {self.value}")

    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def largest_prime(self) -> int:
        if not self.factors:
            raise ValueError("1 has no prime factors")
        return self.factors[-1][0]

    def totient(self) -> int:
        """Euler phi of the value."""
        out = 1
        for p, e in self.factors:
            out *= p ** (e - 1) * (p - 1)
        return out


def factorize(n: int) -> Factorization:
    """Full prime factorization of 1 <= n <= 2^64; deterministic."""
    if not 1 <= n <= MAX_FACTOR_TARGET:
        raise ValueError(f"factorize expects 1 <= n <= 2^64, got {n}")
    counts: dict[int, int] = {}
    m = n
    for p in _SMALL_PRIMES:
        if p * p > m:
            break
        while m % p == 0:
            counts[p] = counts.get(p, 0) + 1
            m //= p
    stack = [m] if m > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            counts[m] = counts.get(m, 0) + 1
            continue
        d = _brent_rho(m)
        stack.append(d)
        stack.append(m // d)
    return Factorization(n, tuple(sorted(counts.items())))


def largest_prime_factor(m: int) -> int:
    """P+(m): the largest prime dividing m, for m >= 2."""
    if m < 2:
        raise ValueError(f"largest_prime_factor needs m >= 2, got {m}")
    return factorize(m).largest_prime()


def has_fouvry_property(p: int) -> bool:
    """Whether the largest prime factor of p-1 exceeds p^(2/3).

    Compared exactly as q^3 > p^2 in integer arithmetic; no floating point.
    """
    if p < 3 or not is_prime(p):
        raise ValueError(f"has_fouvry_property needs an odd prime >= 3, got {p}")
    q = largest_prime_factor(p - 1)
    return q**3 > p * p


def fouvry_density(x_max: int) -> float:
    """Fraction of primes below x_max whose p-1 has a prime factor > p^(2/3).

    The prime 2 counts in the denominator but can never qualify (1 has no
    prime factor).
    """
    if x_max < 10:
        raise ValueError(f"fouvry_density needs x_max >= 10, got {x_max}")
    primes = primes_up_to(x_max - 1)
    hits = sum(1 for p in primes if p >= 3 and has_fouvry_property(int(p)))
    return hits / len(primes)


def fouvry_count(x_max: int) -> tuple[int, int]:
    """(qualifying primes, all primes) below x_max; the exact census behind
    fouvry_density."""
    if x_max < 10:
        raise ValueError(f"fouvry_count needs x_max >= 10, got {x_max}")
    primes = primes_up_to(x_max - 1)
    hits = sum(1 for p in primes if p >= 3 and has_fouvry_property(int(p)))
    return hits, len(primes)


def multiplicative_order(
    x: int, modulus: int, phi_factorization: Optional[Factorization] = None
) -> int:
    """Least w >= 1 with x^w = 1 mod modulus, by divisor descent.

    phi_factorization must factor a multiple of the group exponent; when
    omitted it is derived by factoring the modulus and taking Euler phi.
    """
    if modulus < 2:
        raise ValueError(f"modulus must be >= 2, got {modulus}")
    x %= modulus
    if math.gcd(x, modulus) != 1:
        raise ValueError(f"{x} is not invertible mod {modulus}")
    if phi_factorization is None:
        phi_factorization = factorize(factorize(modulus).totient())
    exponent = phi_factorization.value
    if pow(x, exponent, modulus) != 1:
        raise ValueError(
            f"{phi_factorization.value} is not a multiple of the order of {x} mod {modulus}"
        )
    order = exponent
    for p, _ in phi_factorization.factors:
        while order % p == 0 and pow(x, order // p, modulus) == 1:
            order //= p
    return order


def ord_r(m: int, r: int) -> int:
    """Largest e with r^e dividing m (r prime, m >= 1)."""
    if m < 1:
        raise ValueError(f"ord_r needs m >= 1, got {m}")
    if not is_prime(r):
        raise ValueError(f"ord_r needs a prime r, got {r}")
    e = 0
    while m % r == 0:
        m //= r
        e += 1
    return e


@dataclass(frozen=True)
class Convergent:
    numerator: int
    denominator: int

    def __post_init__(self):
        if self.denominator <= 0:
            raise ValueError("denominator must be positive")
        if math.gcd(self.numerator, self.denominator) != 1:
            raise ValueError("convergent must be in lowest terms")


def convergents(numerator: int, denominator: int) -> list[Convergent]:
    """All continued-fraction convergents of numerator/denominator, in order.

    Requires 0 <= numerator <= denominator; the last entry is the fraction
    itself in lowest terms.
    """
    if denominator == 0:
        raise ValueError("denominator must be nonzero")
    if not 0 <= numerator <= denominator:
        raise ValueError("convergents expects 0 <= numerator <= denominator")
    out: list[Convergent] = []
    h_prevprev, h_prev = 0, 1
    k_prevprev, k_prev = 1, 0
    a, b = numerator, denominator
    while b:
        q = a // b
        h = q * h_prev + h_prevprev
        k = q * k_prev + k_prevprev
        out.append(Convergent(h, k))
        h_prevprev, h_prev = h_prev, h
        k_prevprev, k_prev = k_prev, k
        a, b = b, a - q * b
    return out


def recover_period(v: int, n: int, modulus: int) -> Optional[int]:
    """Candidate period from a measured value v on n qubits.

    Scans convergents of v/2^n in order and returns the first denominator
    d with 2 <= d <= modulus satisfying |v/2^n - c/d| <= 2^-(n/2+1), or None.
    Denominator 1 is skipped: a value indistinguishable from an integer
    carries no period information. The distance test is exact:
    4*(v*d - c*2^n)^2 <= d^2 * 2^n.
    """
    big = 1 << n
    if not 0 <= v < big:
        raise ValueError(f"v must lie in [0, 2^{n})")
    for conv in convergents(v, big):
        d = conv.denominator
        if d > modulus:
            break
        if d < 2:
            continue
        if 4 * (v * d - conv.numerator * big) ** 2 <= d * d * big:
            return d
    return None


def sample_prime(
    bits: int,
    predicate: Optional[Callable[[int], bool]],
    rng: np.random.Generator,
) -> int:
    """Uniform prime of the given binary length satisfying predicate.

    Rejection sampling from [2^(bits-1), 2^bits); raises
    SamplingExhaustedError after a bounded number of attempts.
    """
    if bits < 3:
        raise ValueError(f"sample_prime needs bits >= 3, got {bits}")
    lo, hi = 1 << (bits - 1), 1 << bits
    for _ in range(SAMPLE_PRIME_MAX_ATTEMPTS):
        cand = int(rng.integers(lo, hi))
        if is_prime(cand) and (predicate is None or predicate(cand)):
            return cand
    raise SamplingExhaustedError(
        f"no {bits}-bit prime satisfying the predicate after "
        f"{SAMPLE_PRIME_MAX_ATTEMPTS} attempts"
    )
