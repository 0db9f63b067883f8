"""Observation probabilities straight from the phase sums, with no statevector.

For a family member u and outcome v on n qubits the accumulated circuit phase
(in turns) is

    sum_{t=1..T} ( sum_{s=0..n-t} u_{n-t-s} * v_s ) / 2^t,

with T = n for the full gate set and T = band-1 when levels >= band are
deleted. The perturbations contribute, for the full-noise mode,

    (eps/2^b) * sum_s v_s * ( u_{n-b-s} r(s,0) + u_{n-b-s-1} r(s,1)/2 + ... ),

and only the r(s, 0) terms when just level b is perturbed. Both pieces are
linear in the bits of u, so a whole family evaluates as one bit-matrix product
followed by the kernel column sums; probability of v is the squared magnitude
over 2^n * K.

Scalar entry points (circuit_phase, noise_phase, prob_observe) share their
definitions with the batched paths and stay exact at any n; full per-outcome
tables are capped at n <= 16.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import CapacityError, ConfigurationError
from .noise import Mode, NoiseConfig, NoiseTape, draw_tape
from .periodic import PeriodicFamily, useful_set

FULL_TABLE_MAX_QUBITS = 16


def _t_cutoff(n: int, config: NoiseConfig) -> int:
    return min(n, config.band - 1) if config.mode.truncates_band else n


def _check_value(v: int, n: int) -> None:
    if not 0 <= v < (1 << n):
        raise ValueError(f"value {v} does not fit in {n} bits")


def _require_tape(n: int, config: NoiseConfig, tape: Optional[NoiseTape]) -> NoiseTape:
    if tape is None:
        raise ConfigurationError(f"mode {config.mode.value} needs a noise tape")
    if not tape.matches(n, config):
        raise ConfigurationError("tape does not match (n, config)")
    return tape


def circuit_phase(u: int, v: int, n: int, config: NoiseConfig) -> float:
    """Deterministic accumulated phase in turns, reduced mod 1."""
    _check_value(u, n)
    _check_value(v, n)
    cutoff = _t_cutoff(n, config)
    total = 0.0
    for t in range(1, cutoff + 1):
        inner = 0
        for s in range(0, n - t + 1):
            inner += ((u >> (n - t - s)) & 1) * ((v >> s) & 1)
        total += inner / 2.0**t
    return total % 1.0


def noise_phase(
    u: int, v: int, n: int, config: NoiseConfig, tape: Optional[NoiseTape]
) -> float:
    """Noise contribution to the phase in turns (not reduced mod 1)."""
    if not config.mode.is_noisy:
        raise ConfigurationError(f"mode {config.mode.value} has no noise phase")
    tape = _require_tape(n, config, tape)
    _check_value(u, n)
    _check_value(v, n)
    b = config.band
    acc = 0.0
    if config.mode is Mode.FULL_NOISE:
        for s in range(0, n - b + 1):
            if not (v >> s) & 1:
                continue
            for t in range(0, n - b - s + 1):
                bit = (u >> (n - b - s - t)) & 1
                if bit:
                    acc += tape.r(s, t) / 2.0**t
    else:  # single_level, banded_noisy: only the level-b gate of each sweep
        for s in range(0, n - b + 1):
            if (v >> s) & 1 and (u >> (n - b - s)) & 1:
                acc += tape.r(s, 0)
    return config.epsilon * acc / 2.0**b


def _bit_columns(values: Sequence[int], n: int) -> np.ndarray:
    """(len(values), n) float64 matrix of bits, column s = bit s."""
    arr = np.asarray(list(values), dtype=np.int64)
    return ((arr[:, None] >> np.arange(n)[None, :]) & 1).astype(np.float64)


def _circuit_weights(vbits: np.ndarray, n: int, config: NoiseConfig) -> np.ndarray:
    """(n, V) weights C with phase(u, v) = sum_j u_j * C[j, v]."""
    cutoff = _t_cutoff(n, config)
    V = vbits.shape[0]
    C = np.zeros((n, V), dtype=np.float64)
    for j in range(n):
        for t in range(1, min(cutoff, n - j) + 1):
            C[j] += vbits[:, n - t - j] / 2.0**t
    return C


def _noise_weights_unit(
    vbits: np.ndarray, n: int, config: NoiseConfig, tape: NoiseTape
) -> np.ndarray:
    """(n, V) noise weights at epsilon = 1; scale by epsilon to get the phase."""
    b = config.band
    V = vbits.shape[0]
    D = np.zeros((n, V), dtype=np.float64)
    grid = tape.as_grid()
    if config.mode is Mode.FULL_NOISE:
        for j in range(0, n - b + 1):
            for s in range(0, n - b - j + 1):
                t = n - b - s - j
                D[j] += vbits[:, s] * (grid[s, t] / 2.0**t)
    else:
        for j in range(0, n - b + 1):
            D[j] = vbits[:, n - b - j] * grid[n - b - j, 0]
    return D / 2.0**b


def _phase_matrix(
    family: PeriodicFamily,
    values: Sequence[int],
    config: NoiseConfig,
    tape: Optional[NoiseTape],
) -> np.ndarray:
    """(K, V) total phases in turns for every family member and outcome."""
    n = family.n
    ubits = family.bit_matrix().astype(np.float64)
    vbits = _bit_columns(values, n)
    weights = _circuit_weights(vbits, n, config)
    if config.mode.is_noisy and config.epsilon != 0.0:
        tape = _require_tape(n, config, tape)
        weights = weights + config.epsilon * _noise_weights_unit(vbits, n, config, tape)
    elif config.mode.is_noisy:
        _require_tape(n, config, tape)
    return np.ascontiguousarray(ubits @ weights)


def _chunk_size(K: int) -> int:
    """Outcome-axis chunk keeping the K x chunk intermediates near 64 MB."""
    return max(256, 4_000_000 // max(K, 1))


def batch_probs(
    family: PeriodicFamily,
    values: Sequence[int],
    config: NoiseConfig,
    tape: Optional[NoiseTape] = None,
) -> np.ndarray:
    """P(v) for each v in values; evaluated in outcome chunks."""
    values = list(values)
    step = _chunk_size(family.K)
    out = np.empty(len(values), dtype=np.float64)
    for start in range(0, len(values), step):
        chunk = values[start : start + step]
        phases = _phase_matrix(family, chunk, config, tape)
        kernels.colsum_sq_phases(phases, out[start : start + len(chunk)])
    return out / ((1 << family.n) * family.K)


def prob_observe(
    family: PeriodicFamily,
    v: int,
    config: NoiseConfig,
    tape: Optional[NoiseTape] = None,
) -> float:
    """Probability of observing outcome v."""
    _check_value(v, family.n)
    return float(batch_probs(family, [v], config, tape)[0])


def prob_table(
    family: PeriodicFamily,
    config: NoiseConfig,
    tape: Optional[NoiseTape] = None,
) -> np.ndarray:
    """Full table over all 2^n outcomes (n <= 16)."""
    if family.n > FULL_TABLE_MAX_QUBITS:
        raise CapacityError(
            f"full tables are capped at n <= {FULL_TABLE_MAX_QUBITS}, got n={family.n}"
        )
    return batch_probs(family, range(1 << family.n), config, tape)


def closed_form_exact(family: PeriodicFamily, v: int) -> float:
    """Exact-mode probability from the geometric-sum closed form.

    With theta = frac(omega * v / 2^n): sin^2(pi*K*theta) / (2^n K sin^2(pi*theta)),
    and the removable singularity at theta = 0 evaluates to K / 2^n.
    """
    _check_value(v, family.n)
    big = 1 << family.n
    K = family.K
    rem = (family.omega * v) % big
    if rem == 0:
        return K / big
    theta = rem / big
    s = np.sin(np.pi * theta)
    sK = np.sin(np.pi * K * theta)
    return float(sK * sK / (big * K * s * s))


def useful_mass(
    family: PeriodicFamily,
    config: NoiseConfig,
    tape: Optional[NoiseTape],
    radius: int,
) -> float:
    """Total probability over the useful set at the given radius."""
    values = sorted(useful_set(family, radius))
    return float(batch_probs(family, values, config, tape).sum())


@dataclass(frozen=True)
class MassEstimate:
    """Monte Carlo estimate of expected useful mass at one epsilon."""

    epsilon: float
    mean: float
    stderr: float
    trials: int
    deterministic: bool = False


def _is_doubling_chain(eps: Sequence[float]) -> bool:
    return len(eps) >= 2 and all(b == 2.0 * a for a, b in zip(eps, eps[1:]))


def useful_mass_sweep(
    family: PeriodicFamily,
    config: NoiseConfig,
    epsilons: Sequence[float],
    radius: int,
    trials: int,
    threads: int = 1,
) -> list[MassEstimate]:
    """Expected useful mass at each epsilon, sharing per-trial tapes across
    the sweep (common random numbers).

    epsilon = 0 (or a deterministic mode) is evaluated once with stderr 0.
    Tapes derive from (config.seed, trial), so results do not depend on the
    thread schedule.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if any(e < 0 for e in epsilons):
        raise ValueError("epsilons must be >= 0")
    n = family.n
    values = sorted(useful_set(family, radius))
    ubits = family.bit_matrix().astype(np.float64)
    norm = 1.0 / ((1 << n) * family.K)
    noisy = config.mode.is_noisy
    nonzero = sorted({float(e) for e in epsilons if e != 0.0}) if noisy else []
    doubling = _is_doubling_chain(nonzero)
    tapes = [draw_tape(n, config, trial=t) for t in range(trials)] if nonzero else []

    det_mass = 0.0
    masses = np.zeros((trials, len(nonzero)), dtype=np.float64)
    step = _chunk_size(family.K)
    for start in range(0, len(values), step):
        chunk = values[start : start + step]
        vbits = _bit_columns(chunk, n)
        base = np.ascontiguousarray(ubits @ _circuit_weights(vbits, n, config))
        det_out = np.empty(len(chunk), dtype=np.float64)
        kernels.colsum_sq_phases(base, det_out)
        det_mass += float(det_out.sum()) * norm
        if not nonzero:
            continue
        zbase = np.ascontiguousarray(np.exp(2j * np.pi * base))

        def run_trial(trial: int) -> None:
            noise_u = np.ascontiguousarray(
                ubits @ _noise_weights_unit(vbits, n, config, tapes[trial])
            )
            if doubling:
                out = np.empty((len(nonzero), len(chunk)), dtype=np.float64)
                kernels.colsum_sq_doubling(
                    zbase, noise_u, nonzero[0], len(nonzero) - 1, out
                )
                masses[trial] += out.sum(axis=1) * norm
            else:
                out = np.empty(len(chunk), dtype=np.float64)
                for i, eps in enumerate(nonzero):
                    kernels.colsum_sq_scaled(zbase, noise_u, eps, out)
                    masses[trial, i] += out.sum() * norm

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                list(pool.map(run_trial, range(trials)))
        else:
            for trial in range(trials):
                run_trial(trial)

    if not noisy:
        return [MassEstimate(e, det_mass, 0.0, 1, True) for e in epsilons]

    results: dict[float, MassEstimate] = {}
    if any(e == 0.0 for e in epsilons):
        results[0.0] = MassEstimate(0.0, det_mass, 0.0, 1, True)
    if nonzero:
        means = masses.mean(axis=0)
        if trials > 1:
            stderrs = masses.std(axis=0, ddof=1) / np.sqrt(trials)
        else:
            stderrs = np.zeros(len(nonzero))
        for i, eps in enumerate(nonzero):
            results[eps] = MassEstimate(eps, float(means[i]), float(stderrs[i]), trials)
    return [results[float(e)] for e in epsilons]


def expected_useful_mass(
    family: PeriodicFamily,
    config: NoiseConfig,
    radius: int,
    trials: int,
    threads: int = 1,
) -> MassEstimate:
    """Monte Carlo mean and standard error of the useful mass over fresh tapes."""
    return useful_mass_sweep(
        family, config, [config.epsilon], radius, trials, threads
    )[0]


@dataclass
class ProbabilityReport:
    """Serializable record of one probability computation.

    kind is "table" (per-outcome probabilities), "useful" (single-tape
    useful-set summary) or "mc" (Monte Carlo estimates over tapes); unused
    sections stay None. Payloads carry no timestamps so identical runs are
    byte-identical; the manifest name ties a report to its run metadata.
    """

    family: dict
    config: dict
    kind: str
    source: str
    backend: str = field(default_factory=kernels.get_backend)
    manifest: Optional[str] = None
    probabilities: Optional[list[list]] = None
    total_mass: Optional[float] = None
    useful: Optional[dict] = None
    mc: Optional[dict] = None
    pipeline: Optional[dict] = None

    def validate(self) -> None:
        if self.kind not in ("table", "useful", "mc"):
            raise ValueError(f"unknown report kind {self.kind!r}")
        if self.probabilities is not None:
            probs = np.array([p for _, p in self.probabilities], dtype=np.float64)
            if probs.size and (probs.min() < -1e-12 or probs.max() > 1 + 1e-12):
                raise ValueError("probabilities must lie in [0, 1]")
            if self.kind == "table":
                total = float(probs.sum())
                if abs(total - 1.0) > 1e-9:
                    raise ValueError(f"full table mass {total} deviates from 1")

    def to_json_dict(self) -> dict:
        self.validate()
        return {
            "family": self.family,
            "config": self.config,
            "kind": self.kind,
            "source": self.source,
            "backend": self.backend,
            "manifest": self.manifest,
            "probabilities": self.probabilities,
            "total_mass": self.total_mass,
            "useful": self.useful,
            "mc": self.mc,
            "pipeline": self.pipeline,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        """One row per outcome for tables, one row per epsilon for MC runs."""
        self.validate()
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if self.kind == "mc" and self.mc is not None:
            writer.writerow(["epsilon", "mean", "stderr", "trials"])
            for row in zip(
                self.mc["epsilons"], self.mc["means"], self.mc["stderrs"],
                self.mc["trials"],
            ):
                writer.writerow([repr(row[0]), repr(row[1]), repr(row[2]), row[3]])
        else:
            writer.writerow(["v", "probability"])
            for v, p in self.probabilities or []:
                writer.writerow([v, repr(p)])
        return buf.getvalue()


def table_report(
    family: PeriodicFamily,
    config: NoiseConfig,
    tape: Optional[NoiseTape] = None,
    source: str = "analytic",
    probs: Optional[np.ndarray] = None,
) -> ProbabilityReport:
    """Full-table report; computes the table unless one is supplied."""
    if probs is None:
        probs = prob_table(family, config, tape)
    return ProbabilityReport(
        family=_family_dict(family),
        config=config.as_dict(),
        kind="table",
        source=source,
        probabilities=[[int(v), float(p)] for v, p in enumerate(probs)],
        total_mass=float(probs.sum()),
    )


def mc_report(
    family: PeriodicFamily,
    config: NoiseConfig,
    estimates: Sequence[MassEstimate],
    radius: int,
    source: str = "analytic",
) -> ProbabilityReport:
    return ProbabilityReport(
        family=_family_dict(family),
        config=config.as_dict(),
        kind="mc",
        source=source,
        useful={"radius": radius, "size": len(useful_set(family, radius))},
        mc={
            "epsilons": [e.epsilon for e in estimates],
            "means": [e.mean for e in estimates],
            "stderrs": [e.stderr for e in estimates],
            "trials": [e.trials for e in estimates],
        },
    )


def _family_dict(family: PeriodicFamily) -> dict:
    return {
        "n": family.n,
        "omega": family.omega,
        "u_star": family.u_star,
        "K": family.K,
    }
