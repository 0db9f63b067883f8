"""Brute-force gate-by-gate simulator of the (noisy) transform on <= 20 qubits.

Ground truth for the analytic module, plus an end-to-end factoring pipeline
for tiny moduli. Basis index convention: index = sum_s u_s * 2^s, i.e. qubit s
holds bit s. The circuit sweeps qubits from most significant down; sweep s
targets qubit n-1-s with a Hadamard followed by controlled rotations at levels
k = 2..n-s (control qubit n-s-k). The final bit-reversal permutation is
included, so the exact mode reproduces the DFT matrix on the labeled indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from . import kernels
from .errors import CapacityError, ConfigurationError
from .noise import Mode, NoiseConfig, NoiseTape, draw_tape
from .numtheory import recover_period
from .periodic import PeriodicFamily, make_instance

SIMULATOR_MAX_QUBITS = 20

_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(eq=False)
class QuantumState:
    """2^n complex amplitudes; norm stays within 1e-12 of 1 through the circuit."""

    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n < 1 or self.n > SIMULATOR_MAX_QUBITS:
            raise CapacityError(
                f"simulator handles 1..{SIMULATOR_MAX_QUBITS} qubits, got {self.n}"
            )
        if self.amplitudes.shape != (1 << self.n,):
            raise ValueError("amplitude vector length must be 2^n")
        if self.amplitudes.dtype != np.complex128:
            raise ValueError("amplitudes must be complex128")

    def norm(self) -> float:
        return float(np.sqrt((np.abs(self.amplitudes) ** 2).sum()))

    def copy(self) -> "QuantumState":
        return QuantumState(self.n, self.amplitudes.copy())


def basis_state(n: int, index: int) -> QuantumState:
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index] = 1.0
    return QuantumState(n, amps)


def prepare_periodic(family: PeriodicFamily) -> QuantumState:
    """Amplitude 1/sqrt(K) on each family member, 0 elsewhere."""
    if family.n > SIMULATOR_MAX_QUBITS:
        raise CapacityError(f"family needs {family.n} qubits, cap is {SIMULATOR_MAX_QUBITS}")
    amps = np.zeros(1 << family.n, dtype=np.complex128)
    amps[family.u_star :: family.omega] = 1.0 / math.sqrt(family.K)
    return QuantumState(family.n, amps)


@dataclass(frozen=True)
class GateCounts:
    hadamards: int
    rotations: int


def _rotation_schedule(
    n: int, config: NoiseConfig
) -> Iterator[tuple[int, int, str]]:
    """(sweep, level, kind) for every controlled rotation the mode applies.

    kind is "plain" (angle 1/2^k), "noisy" ((1 + eps*r)/2^k) or "noise_only"
    (eps*r/2^k). Deleted gates are not yielded.
    """
    b = config.band
    for s in range(n):
        for k in range(2, n - s + 1):
            if config.mode is Mode.EXACT:
                yield s, k, "plain"
            elif config.mode is Mode.COPPERSMITH:
                if k < b:
                    yield s, k, "plain"
            elif config.mode is Mode.FULL_NOISE:
                yield s, k, "plain" if k < b else "noisy"
            elif config.mode is Mode.SINGLE_LEVEL:
                yield s, k, "noisy" if k == b else "plain"
            else:  # BANDED_NOISY
                if k < b:
                    yield s, k, "plain"
                elif k == b:
                    yield s, k, "noise_only"

    # levels k > b in banded_noisy and k >= b in coppersmith are deleted


def gate_counts(n: int, config: NoiseConfig) -> GateCounts:
    """Gates the configured circuit applies: n Hadamards plus the surviving
    controlled rotations."""
    return GateCounts(n, sum(1 for _ in _rotation_schedule(n, config)))


def _apply_hadamard(amps: np.ndarray, n: int, qubit: int) -> None:
    view = amps.reshape(1 << (n - 1 - qubit), 2, 1 << qubit)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = (a0 + a1) * _SQRT_HALF
    view[:, 1, :] = (a0 - a1) * _SQRT_HALF


def _bit_reversal_permutation(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    rev = np.zeros_like(idx)
    for bit in range(n):
        rev |= ((idx >> bit) & 1) << (n - 1 - bit)
    return rev


def apply_qft_noisy(
    state: QuantumState, config: NoiseConfig, tape: Optional[NoiseTape] = None
) -> QuantumState:
    """Run the transform circuit under the configured gate treatment.

    Every gate is a diagonal (controlled phase) or Hadamard applied to a copy
    of the state; one tape draw feeds each perturbed gate, identically across
    all amplitudes. Ends with the qubit-order reversal.
    """
    n = state.n
    if config.mode.is_noisy:
        if tape is None or not tape.matches(n, config):
            raise ConfigurationError("tape does not match (n, config)")
    amps = state.amplitudes.copy()
    by_sweep: dict[int, list[tuple[int, str]]] = {}
    for s, k, kind in _rotation_schedule(n, config):
        by_sweep.setdefault(s, []).append((k, kind))
    for s in range(n):
        target = n - 1 - s
        _apply_hadamard(amps, n, target)
        for k, kind in by_sweep.get(s, []):
            control = n - s - k
            if kind == "plain":
                turns = 1.0 / 2.0**k
            elif kind == "noisy":
                turns = (1.0 + config.epsilon * tape.r(s, k - config.band)) / 2.0**k
            else:  # noise_only
                turns = config.epsilon * tape.r(s, 0) / 2.0**k
            kernels.controlled_phase(amps, n, control, target, turns)
    amps = amps[_bit_reversal_permutation(n)]
    return QuantumState(n, amps)


def measure_distribution(state: QuantumState) -> np.ndarray:
    """P(v) = |amplitude_v|^2; validates normalization to 1e-12."""
    probs = (state.amplitudes * state.amplitudes.conj()).real
    total = float(probs.sum())
    if abs(total - 1.0) > 1e-12 * (1 << state.n):
        raise ValueError(f"state is not normalized: total probability {total}")
    return probs


def distribution_report(
    family: PeriodicFamily, config: NoiseConfig, tape: Optional[NoiseTape] = None
):
    """Measured distribution in the analytic report schema, for diffing."""
    from .analytic import table_report

    state = apply_qft_noisy(prepare_periodic(family), config, tape)
    return table_report(family, config, tape, source="statevec",
                        probs=measure_distribution(state))


@dataclass(frozen=True)
class TrialOutcome:
    v: int
    candidate: Optional[int]
    factors: Optional[tuple[int, int]]

    @property
    def success(self) -> bool:
        return self.factors is not None


@dataclass
class PipelineStats:
    """Aggregated factoring outcomes over repeated noisy runs."""

    N: int
    x: int
    n: int
    omega: int
    trials: int
    successes: int = 0
    gcd_shortcut: bool = False
    outcomes: list[TrialOutcome] = field(default_factory=list)

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    def v_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for o in self.outcomes:
            counts[o.v] = counts.get(o.v, 0) + 1
        return counts


def _try_factor(N: int, x: int, candidate: Optional[int]) -> Optional[tuple[int, int]]:
    """Factor pair from a verified even period candidate, if any."""
    if candidate is None or candidate % 2 != 0:
        return None
    if pow(x, candidate, N) != 1:
        return None
    y = pow(x, candidate // 2, N)
    for g in (math.gcd(y - 1, N), math.gcd(y + 1, N)):
        if 1 < g < N:
            return (g, N // g) if g <= N // g else (N // g, g)
    return None


def full_pipeline(
    N: int, x: int, config: NoiseConfig, rng: np.random.Generator, trials: int
) -> PipelineStats:
    """Repeated end-to-end factoring attempts on N with base x.

    Per trial: sample the offset u* as the post-measurement residue class
    (a uniform over [0, 2^n) reduced mod omega gives the same distribution as
    measuring the modular-exponentiation register), push the periodic state
    through the noisy transform, sample an outcome, run the continued-fraction
    recovery, and try gcd extraction from a verified even period.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    g = math.gcd(x, N)
    if g != 1:
        stats = PipelineStats(N, x, 0, 0, trials, successes=trials, gcd_shortcut=True)
        pair = (g, N // g) if g <= N // g else (N // g, g)
        stats.outcomes = [TrialOutcome(0, None, pair)] * trials
        return stats
    inst = make_instance(N, x)
    if inst.n > SIMULATOR_MAX_QUBITS:
        raise CapacityError(
            f"N={N} needs {inst.n} qubits, simulator cap is {SIMULATOR_MAX_QUBITS}"
        )
    stats = PipelineStats(N, x, inst.n, inst.omega, trials)
    big = 1 << inst.n
    for trial in range(trials):
        a = int(rng.integers(0, big))
        family = inst.family(a % inst.omega)
        tape = draw_tape(inst.n, config, trial=trial)
        state = apply_qft_noisy(prepare_periodic(family), config, tape)
        dist = measure_distribution(state)
        v = int(np.searchsorted(np.cumsum(dist), rng.random(), side="right"))
        v = min(v, big - 1)
        candidate = recover_period(v, inst.n, N)
        factors = _try_factor(N, x, candidate)
        stats.outcomes.append(TrialOutcome(v, candidate, factors))
        if factors is not None:
            stats.successes += 1
    return stats
