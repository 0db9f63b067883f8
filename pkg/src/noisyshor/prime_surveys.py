"""Empirical surveys of order statistics over random prime pairs, plus exact
checks of the two classical inequalities they lean on (Brun-Titchmarsh and the
Rosser-Schoenfeld totient bound).

Surveys share one sample set across their whole threshold grid, so the
reported probabilities are monotone in the threshold by construction whenever
the underlying events are nested. Natural log throughout.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .numtheory import (
    Factorization,
    factorize,
    multiplicative_order,
    ord_r,
    primes_up_to,
    sample_prime,
)

EULER_GAMMA = float(np.euler_gamma)

# The one modulus where the 2.5 constant fails and 2.50637 is needed:
# the product of the primes up to 23.
RS_EXCEPTIONAL_D = 2 * 3 * 5 * 7 * 11 * 13 * 17 * 19 * 23
RS_EXCEPTIONAL_CONSTANT = 2.50637


@dataclass(frozen=True)
class PrimePairSample:
    """Distinct primes p != q of one binary length with the derived quantities
    the surveys need."""

    p: int
    q: int

    def __post_init__(self):
        if self.p == self.q:
            raise ValueError("p and q must be distinct")
        if self.p.bit_length() != self.q.bit_length():
            raise ValueError("p and q must have the same binary length")

    @property
    def N(self) -> int:
        return self.p * self.q

    @property
    def phi(self) -> int:
        return (self.p - 1) * (self.q - 1)

    @property
    def gcd_pm1(self) -> int:
        return math.gcd(self.p - 1, self.q - 1)

    @property
    def group_exponent(self) -> int:
        """lcm(p-1, q-1), the exponent of the unit group mod N."""
        return self.phi // self.gcd_pm1

    def phi_factorization(self) -> Factorization:
        return factorize(self.phi)


def draw_prime_pair(m_bits: int, rng: np.random.Generator) -> PrimePairSample:
    p = sample_prime(m_bits, None, rng)
    q = p
    while q == p:
        q = sample_prime(m_bits, None, rng)
    return PrimePairSample(p, q)


def check_sample_identities(sample: PrimePairSample, g: int) -> dict:
    """Exact per-sample identities relating orders mod p, q and N.

    Verifies omega_N = lcm(omega_p, omega_q), group exponent = phi/gcd(p-1,q-1),
    and the prime-by-prime lower bound omega_N >= lcm(p-1,q-1)/(a*b) with
    a = (p-1)/omega_p, b = (q-1)/omega_q. Raises AssertionError on any failure
    and returns the computed orders.
    """
    p, q, N = sample.p, sample.q, sample.N
    omega_p = multiplicative_order(g % p, p, factorize(p - 1))
    omega_q = multiplicative_order(g % q, q, factorize(q - 1))
    omega_n = multiplicative_order(g, N, sample.phi_factorization())
    lcm_pq = omega_p * omega_q // math.gcd(omega_p, omega_q)
    assert omega_n == lcm_pq, f"omega_N != lcm of component orders for g={g}"
    assert sample.group_exponent == sample.phi // sample.gcd_pm1
    a = (p - 1) // omega_p
    b = (q - 1) // omega_q
    assert sample.group_exponent % omega_n == 0
    assert omega_n * a * b >= sample.group_exponent, "order lower bound violated"
    for r in factorize(sample.group_exponent).primes():
        lhs = ord_r(omega_n, r)
        rhs = ord_r(sample.group_exponent, r) - ord_r(a * b, r)
        assert lhs >= rhs, f"ord_{r} inequality violated"
    return {"omega_p": omega_p, "omega_q": omega_q, "omega_N": omega_n}


@dataclass(frozen=True)
class SurveyRow:
    threshold: float
    probability: float
    hits: int
    samples: int

    @property
    def stderr(self) -> float:
        p, n = self.probability, self.samples
        return math.sqrt(p * (1 - p) / n) if n > 0 else 0.0


@dataclass(frozen=True)
class SurveyTable:
    name: str
    rows: tuple[SurveyRow, ...]

    def probabilities(self) -> list[float]:
        return [r.probability for r in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["threshold", "probability", "hits", "samples", "stderr"])
        for r in self.rows:
            writer.writerow([repr(r.threshold), repr(r.probability), r.hits,
                             r.samples, repr(r.stderr)])
        return buf.getvalue()


def _table(name: str, thresholds: Sequence[float], indicator, samples: int) -> SurveyTable:
    rows = []
    for thr in thresholds:
        hits = indicator(thr)
        rows.append(SurveyRow(float(thr), hits / samples, hits, samples))
    return SurveyTable(name, tuple(rows))


def order_ratio_survey(
    m_bits: int, samples: int, A_values: Sequence[float], rng: np.random.Generator
) -> SurveyTable:
    """Empirical Pr(omega_N(g) < phi(N)/A) over random (p, q, g)."""
    _check_survey_args(m_bits, samples)
    ratios = []  # phi(N) / omega_N(g), one per sample
    for _ in range(samples):
        pair = draw_prime_pair(m_bits, rng)
        g = _random_unit(pair.N, rng)
        orders = check_sample_identities(pair, g)
        ratios.append(pair.phi / orders["omega_N"])
    arr = np.array(ratios)
    return _table(
        "order_ratio",
        A_values,
        lambda A: int((arr > A).sum()),  # omega < phi/A  <=>  phi/omega > A
        samples,
    )


def gcd_survey(
    m_bits: int, samples: int, A1_values: Sequence[float], rng: np.random.Generator
) -> SurveyTable:
    """Empirical Pr(gcd(p-1, q-1) > A1); asserts the equivalence with
    group_exponent < phi/A1 on every sample."""
    _check_survey_args(m_bits, samples)
    gcds = []
    for _ in range(samples):
        pair = draw_prime_pair(m_bits, rng)
        for a1 in A1_values:
            assert (pair.group_exponent * a1 < pair.phi) == (pair.gcd_pm1 > a1)
        gcds.append(pair.gcd_pm1)
    arr = np.array(gcds)
    return _table("gcd_pm1", A1_values, lambda a1: int((arr > a1).sum()), samples)


def per_prime_order_survey(
    m_bits: int, samples: int, B_values: Sequence[float], rng: np.random.Generator
) -> SurveyTable:
    """Empirical Pr(omega_p(g) < (p-1)/B) over random prime p and unit g."""
    _check_survey_args(m_bits, samples)
    ratios = []
    for _ in range(samples):
        p = sample_prime(m_bits, None, rng)
        g = _random_unit(p, rng)
        omega = multiplicative_order(g, p, factorize(p - 1))
        ratios.append((p - 1) / omega)
    arr = np.array(ratios)
    return _table("per_prime_order", B_values, lambda B: int((arr > B).sum()), samples)


def ord2_tail_survey(m_bits: int, e_values: Sequence[int]) -> SurveyTable:
    """Exact Pr over all m-bit primes of ord2(p-1) >= e.

    The unit group mod p is cyclic, so some g has ord2(order) >= e exactly
    when 2^e divides p-1; the survey is an exhaustive sieve, not sampling.
    """
    if not 3 <= m_bits <= 24:
        raise ValueError("exhaustive ord2 survey supports 3 <= m_bits <= 24")
    lo, hi = 1 << (m_bits - 1), 1 << m_bits
    primes = primes_up_to(hi - 1)
    primes = primes[primes >= lo]
    pm1 = primes - 1
    rows = []
    for e in e_values:
        hits = int((pm1 % (1 << e) == 0).sum())
        rows.append(SurveyRow(float(e), hits / len(primes), hits, len(primes)))
    return SurveyTable("ord2_tail", tuple(rows))


def _check_survey_args(m_bits: int, samples: int) -> None:
    if not 8 <= m_bits <= 24:
        raise ValueError(f"surveys support 8 <= m_bits <= 24, got {m_bits}")
    if samples < 100:
        raise ValueError(f"need at least 100 samples, got {samples}")


def _random_unit(modulus: int, rng: np.random.Generator) -> int:
    while True:
        g = int(rng.integers(2, modulus))
        if math.gcd(g, modulus) == 1:
            return g


@lru_cache(maxsize=4)
def _primes_cached(limit: int) -> np.ndarray:
    return primes_up_to(limit)


def prime_count_ap(x: int, d: int, a: int) -> int:
    """pi(x; d, a): primes <= x congruent to a mod d, by sieve."""
    if math.gcd(a, d) != 1:
        raise ValueError(f"need gcd(a, d) = 1, got a={a}, d={d}")
    if d >= x:
        raise ValueError("Brun-Titchmarsh regime needs d < x")
    primes = _primes_cached(x)
    return int((primes % d == a % d).sum())


def brun_titchmarsh_bound(x: int, d: int) -> float:
    """2x / (phi(d) * ln(x/d)), valid for d < x."""
    if d >= x:
        raise ValueError("bound needs d < x")
    phi_d = factorize(d).totient() if d > 1 else 1
    return 2.0 * x / (phi_d * math.log(x / d))


def brun_titchmarsh_check(
    x: int, d_values: Sequence[int], a: int = 1
) -> list[dict]:
    """Exact counts against the bound for each modulus; one dict per d."""
    out = []
    for d in d_values:
        count = prime_count_ap(x, d, a)
        bound = brun_titchmarsh_bound(x, d)
        out.append({"d": d, "count": count, "bound": bound, "holds": count <= bound})
    return out


def totient_sieve(limit: int) -> np.ndarray:
    """phi(d) for d = 0..limit."""
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if phi[p] == p:  # p untouched so far => prime
            phi[p::p] -= phi[p::p] // p
    return phi


def _rs_denominator(d: float | int, constant: float = 2.5) -> float:
    ll = math.log(math.log(d))
    return math.exp(EULER_GAMMA) * ll + constant / ll


@dataclass(frozen=True)
class RosserSchoenfeldResult:
    d_max: int
    max_ratio: float
    argmax_d: int
    all_hold: bool


def rosser_schoenfeld_check(d_max: int) -> RosserSchoenfeldResult:
    """max over 3 <= d <= d_max of (d/phi(d)) / (e^gamma*loglog d + 2.5/loglog d).

    The ratio stays <= 1 for every d except the single documented modulus
    RS_EXCEPTIONAL_D (above any desk-scale d_max), where the constant must be
    RS_EXCEPTIONAL_CONSTANT; see rosser_schoenfeld_exceptional_ratio.
    """
    if d_max < 3:
        raise ValueError(f"need d_max >= 3, got {d_max}")
    phi = totient_sieve(d_max)
    d = np.arange(3, d_max + 1, dtype=np.float64)
    ll = np.log(np.log(d))
    denom = math.exp(EULER_GAMMA) * ll + 2.5 / ll
    ratios = (d / phi[3:].astype(np.float64)) / denom
    worst = int(np.argmax(ratios))
    ok = (ratios <= 1.0) | (np.arange(3, d_max + 1) == RS_EXCEPTIONAL_D)
    return RosserSchoenfeldResult(
        d_max=d_max,
        max_ratio=float(ratios[worst]),
        argmax_d=worst + 3,
        all_hold=bool(ok.all()),
    )


def rosser_schoenfeld_exceptional_ratio(constant: float = RS_EXCEPTIONAL_CONSTANT) -> float:
    """The ratio at the exceptional modulus, with an adjustable constant."""
    d = RS_EXCEPTIONAL_D
    phi_d = factorize(d).totient()
    return (d / phi_d) / _rs_denominator(d, constant)
