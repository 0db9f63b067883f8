"""Numerical verification of the probabilistic and combinatorial lemmas.

Four families of checks, all at desk scale:

* sums of randomly rotated unit vectors: Monte Carlo second moments against
  the closed-form bound K + 2*delta*C(K,2) + 2*(1-delta)*C(K,2)*exp(-2*pi^2*t),
  and the Gaussian cosine moment E[cos Y] = exp(-sigma^2/2);
* the segment identity: bit n-i of floor(2^n * j / omega) equals the parity of
  the segment of length omega/2^i containing j, checked exhaustively;
* closeness of the segment-uniform distribution on [0, omega) to uniform,
  computed exactly in rationals;
* bit statistics of the peak outcomes and of family-member pairs, which feed
  the separation premise of the unit-vector bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .noise import NoiseTape
from .numtheory import ord_r
from .periodic import PeriodicFamily


def expected_sq_norm_bound(K: int, delta: float, t: float) -> float:
    """Upper bound for E|sum of K rotated unit vectors|^2 when all but a
    delta fraction of pairs meet the separation premise."""
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    pairs = K * (K - 1) / 2
    return K + 2 * delta * pairs + 2 * (1 - delta) * pairs * math.exp(-2 * math.pi**2 * t)


@dataclass(frozen=True)
class SumSpec:
    """Instance of the random-unit-vector sum: root order m, scale sigma,
    index sets S_k over [n_items], fixed offsets phi_k, separation t.

    The exceptional fraction delta is computed from the supplied sets, not
    declared: a pair (j, k) is exceptional when |S_j symdiff S_k| falls below
    (m/sigma)^2 * t.
    """

    m: int
    sigma: float
    sets: tuple[frozenset[int], ...]
    phis: tuple[float, ...]
    t: float

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("root order m must be >= 1")
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")
        if len(self.sets) != len(self.phis):
            raise ValueError("need one phase offset per set")
        if len(self.sets) < 1:
            raise ValueError("need at least one set")

    @property
    def K(self) -> int:
        return len(self.sets)

    @property
    def n_items(self) -> int:
        return max((max(s) + 1 for s in self.sets if s), default=0)

    @property
    def separation_threshold(self) -> float:
        return (self.m / self.sigma) ** 2 * self.t

    @property
    def delta(self) -> float:
        """Realized fraction of pairs below the separation threshold."""
        K = self.K
        if K < 2:
            return 0.0
        bad = 0
        for j in range(K):
            for k in range(j + 1, K):
                if len(self.sets[j] ^ self.sets[k]) < self.separation_threshold:
                    bad += 1
        return bad / (K * (K - 1) / 2)

    def bound(self) -> float:
        return expected_sq_norm_bound(self.K, self.delta, self.t)


@dataclass(frozen=True)
class MonteCarloMoment:
    mean: float
    stderr: float
    trials: int
    max_value: float


def expected_sq_norm_mc(
    spec: SumSpec, trials: int, rng: np.random.Generator
) -> MonteCarloMoment:
    """Monte Carlo E|sum_k exp(2*pi*i*Sigma_k/m)|^2 with fresh draws per trial,
    Sigma_k = phi_k + sigma * sum_{i in S_k} X_i."""
    if trials < 100:
        raise ValueError(f"need at least 100 trials, got {trials}")
    n = spec.n_items
    member = np.zeros((n, spec.K), dtype=np.float64)
    for k, s in enumerate(spec.sets):
        for i in s:
            member[i, k] = 1.0
    X = rng.standard_normal((trials, n))
    sigma_sums = spec.phis + spec.sigma * (X @ member)
    z = np.exp(2j * np.pi * sigma_sums / spec.m).sum(axis=1)
    sq = (z * z.conj()).real
    return MonteCarloMoment(
        mean=float(sq.mean()),
        stderr=float(sq.std(ddof=1) / np.sqrt(trials)),
        trials=trials,
        max_value=float(sq.max()),
    )


@dataclass(frozen=True)
class CosMomentResult:
    mc_mean: float
    mc_stderr: float
    analytic: float


def cos_moment_check(
    sigma: float, trials: int, rng: np.random.Generator
) -> CosMomentResult:
    """Monte Carlo E[cos Y] for Y ~ N(0, sigma^2) next to the closed form
    exp(-sigma^2/2)."""
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    y = sigma * rng.standard_normal(trials)
    c = np.cos(y)
    return CosMomentResult(
        mc_mean=float(c.mean()),
        mc_stderr=float(c.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0,
        analytic=math.exp(-(sigma**2) / 2.0),
    )


def i0_cutoff(omega: int) -> int:
    """floor((3/4) * log2(omega)), evaluated exactly: the largest i with
    2^(4i) <= omega^3."""
    if omega < 1:
        raise ValueError(f"omega must be >= 1, got {omega}")
    cube = omega**3
    i = 0
    while (1 << (4 * (i + 1))) <= cube:
        i += 1
    return i


def bit_from_segment(j: int, omega: int, n: int, i: int) -> bool:
    """Whether j falls in an odd-indexed segment of length omega/2^i.

    Equals bit n-i of floor(2^n * j / omega); the segment index is
    floor(j * 2^i / omega), exactly in integers.
    """
    if not 0 <= j < omega:
        raise ValueError(f"j must lie in [0, omega), got {j}")
    if not 1 <= i <= n:
        raise ValueError(f"i must lie in [1, n], got {i}")
    return ((j << i) // omega) & 1 == 1


def peak_value(j: int, omega: int, n: int) -> int:
    """floor(2^n * j / omega): the j-th peak outcome."""
    return (j << n) // omega


@dataclass(frozen=True)
class CountStat:
    """Histogram of a per-draw count plus the tail fraction the lemmas track."""

    histogram: dict[int, int]
    samples: int
    window_size: int
    frac_ge_quarter: float
    frac_below_quarter: float
    mean: float


def _count_stat(counts: np.ndarray, window_size: int) -> CountStat:
    values, freq = np.unique(counts, return_counts=True)
    quarter = window_size / 4.0
    ge = float((counts >= quarter).mean())
    return CountStat(
        histogram={int(v): int(f) for v, f in zip(values, freq)},
        samples=len(counts),
        window_size=window_size,
        frac_ge_quarter=ge,
        frac_below_quarter=1.0 - ge,
        mean=float(counts.mean()),
    )


def ones_count_stat(
    omega: int,
    n: int,
    window: Sequence[int],
    samples: int,
    rng: np.random.Generator,
) -> CountStat:
    """Distribution of |{i in window : bit n-i of floor(2^n j / omega) = 1}|
    over uniform j in [0, omega)."""
    window = sorted(set(window))
    i0 = i0_cutoff(omega)
    if not window or window[0] < 1 or window[-1] > i0:
        raise ValueError(f"window must lie inside [1, i0={i0}]")
    if omega << n >= (1 << 62):
        raise ValueError("omega << n must stay inside int64")
    j = rng.integers(0, omega, size=samples)
    v = (j << n) // omega
    counts = np.zeros(samples, dtype=np.int64)
    for i in window:
        counts += (v >> (n - i)) & 1
    return _count_stat(counts, len(window))


def distribution_closeness(omega: int, i0: int) -> Fraction:
    """Max over j of |Pr_segment(j)/Pr_uniform(j) - 1|, exactly.

    Pr_segment picks one of the 2^i0 equal real segments of [0, omega)
    uniformly, then a uniform integer inside it. Requires 2^i0 <= omega.
    """
    segments = 1 << i0
    if segments > omega:
        raise ValueError(f"need 2^i0 <= omega, got 2^{i0} > {omega}")
    worst = Fraction(0)
    for a in range(segments):
        lo = -((-omega * a) // segments)  # ceil(omega*a / 2^i0)
        hi = -((-omega * (a + 1)) // segments)
        count = hi - lo
        if count == 0:
            continue
        ratio = Fraction(omega, segments * count)
        worst = max(worst, abs(ratio - 1))
    return worst


def pair_bit_diff_stat(
    family: PeriodicFamily,
    b: int,
    window: Sequence[int],
    pair_samples: int,
    rng: np.random.Generator,
) -> CountStat:
    """Distribution of |{i in window : u^(k) and u^(k') differ at bit i-b}|
    over uniform unordered pairs k != k'."""
    window = sorted(set(window))
    i0 = i0_cutoff(family.omega)
    d = ord_r(family.omega, 2)
    if not window or window[0] < b + d or window[-1] > i0:
        raise ValueError(f"window must lie inside [b+ord2(omega), i0] = [{b + d}, {i0}]")
    if family.K < 2:
        raise ValueError("need at least two family members")
    ks = rng.integers(0, family.K, size=(pair_samples, 2))
    resample = ks[:, 0] == ks[:, 1]
    while resample.any():
        ks[resample, 1] = rng.integers(0, family.K, size=int(resample.sum()))
        resample = ks[:, 0] == ks[:, 1]
    u = family.u_star + family.omega * ks.astype(np.int64)
    counts = np.zeros(pair_samples, dtype=np.int64)
    for i in window:
        counts += ((u[:, 0] >> (i - b)) & 1) != ((u[:, 1] >> (i - b)) & 1)
    return _count_stat(counts, len(window))


def retained_window(family: PeriodicFamily, v: int, b: int) -> list[int]:
    """T_j = {i in [ord2(omega)+b, i0] : bit n-i of v is 1}."""
    d = ord_r(family.omega, 2)
    i0 = i0_cutoff(family.omega)
    n = family.n
    return [i for i in range(d + b, i0 + 1) if (v >> (n - i)) & 1]


def retained_noise_sum(
    family: PeriodicFamily, v: int, b: int, tape: NoiseTape, k: int
) -> float:
    """The level-b noise subsum (2*pi*eps/2^b) * sum_{i in T_j} u^(k)_{i-b} * r(n-i, 0),
    in radians.

    These are the terms the destruction argument keeps: sweep n-i applies its
    level-b gate with draw r(n-i, 0), and the term survives when both the
    outcome bit v_{n-i} and the member bit u^(k)_{i-b} are 1.
    """
    eps = tape.config.epsilon
    u = family.u(k)
    acc = 0.0
    for i in retained_window(family, v, b):
        if (u >> (i - b)) & 1:
            acc += tape.r(family.n - i, 0)
    return 2.0 * math.pi * eps * acc / 2.0**b
