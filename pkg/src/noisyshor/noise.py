"""Gate-noise model: which controlled rotations are perturbed or deleted,
and the indexed tape of i.i.d. draws shared across superposition terms.

Tape indexing convention: draw r(s, t) belongs to the rotation applied during
sweep s (the sweep whose target qubit initially holds bit n-1-s) at gate level
k = band + t. One draw exists per physical gate application and is applied
identically to every amplitude.

Mode semantics (band b, level k of a controlled rotation by 1/2^k turns):

  exact         all gates perfect
  coppersmith   k < b perfect, k >= b deleted
  full_noise    k < b perfect, k >= b rotate by (1 + eps*r)/2^k
  single_level  k == b rotates by (1 + eps*r)/2^b, all other k perfect
  banded_noisy  k < b perfect, k == b rotates by eps*r/2^b only, k > b deleted

In banded_noisy the deterministic 1/2^b part of the level-b gate is dropped
together with the deleted levels, so eps = 0 collapses banded_noisy to
coppersmith exactly (and full_noise/single_level to exact).

Draw values are produced by a counter-based generator (Philox) keyed by the
seed with the trial index in the counter block, then transformed by inverse
CDF, so tapes are reproducible bit-for-bit on any platform, independent of
generation order, and independent across trials.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from enum import Enum
from statistics import NormalDist
from typing import Iterator

import numpy as np

from .errors import ConfigurationError

_STANDARD_NORMAL = NormalDist()

# Counter lanes keep independent uses of the same master seed disjoint.
_LANE_TAPE = 0


class Mode(str, Enum):
    EXACT = "exact"
    COPPERSMITH = "coppersmith"
    FULL_NOISE = "full_noise"
    SINGLE_LEVEL = "single_level"
    BANDED_NOISY = "banded_noisy"

    @property
    def is_noisy(self) -> bool:
        return self in (Mode.FULL_NOISE, Mode.SINGLE_LEVEL, Mode.BANDED_NOISY)

    @property
    def truncates_band(self) -> bool:
        """Whether deterministic rotations at level >= band are dropped."""
        return self in (Mode.COPPERSMITH, Mode.BANDED_NOISY)


class Distribution(str, Enum):
    GAUSSIAN_UNIT = "gaussian_unit"
    UNIFORM_PM1 = "uniform_pm1"
    TRIT = "trit"


@dataclass(frozen=True)
class NoiseConfig:
    """Global noise parameters: magnitude, band, mode, draw distribution, seed."""

    epsilon: float
    band: int
    mode: Mode
    distribution: Distribution = Distribution.GAUSSIAN_UNIT
    seed: int = 0

    def __post_init__(self):
        if self.epsilon < 0:
            raise ConfigurationError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.band < 2:
            raise ConfigurationError(f"band must be >= 2, got {self.band}")
        if not 0 <= self.seed < (1 << 64):
            raise ConfigurationError("seed must fit in 64 bits")
        # Accept plain strings for convenience (CLI, JSON round-trips).
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "distribution", Distribution(self.distribution))

    def with_epsilon(self, epsilon: float) -> "NoiseConfig":
        return NoiseConfig(epsilon, self.band, self.mode, self.distribution, self.seed)

    def as_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "band": self.band,
            "mode": self.mode.value,
            "distribution": self.distribution.value,
            "seed": self.seed,
        }


def full_index_grid(n: int, band: int) -> list[tuple[int, int]]:
    """Canonical (s, t) enumeration of every perturbable gate: lexicographic,
    s = 0..n-band, t = 0..n-band-s."""
    return [(s, t) for s in range(n - band + 1) for t in range(n - band - s + 1)]


def mode_index_set(n: int, config: NoiseConfig) -> list[tuple[int, int]]:
    """The (s, t) draws a tape carries in the configured mode."""
    if not config.mode.is_noisy:
        return []
    grid = full_index_grid(n, config.band)
    if config.mode is Mode.FULL_NOISE:
        return grid
    return [(s, t) for s, t in grid if t == 0]


def _raw_uniforms(seed: int, trial: int, count: int) -> np.ndarray:
    """count doubles in (0, 1), from the Philox block keyed (seed; trial)."""
    bg = np.random.Philox(key=seed, counter=[0, 0, trial, _LANE_TAPE])
    raw = bg.random_raw(count)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def _transform(uniforms: np.ndarray, distribution: Distribution) -> np.ndarray:
    if distribution is Distribution.GAUSSIAN_UNIT:
        return np.array([_STANDARD_NORMAL.inv_cdf(u) for u in uniforms], dtype=np.float64)
    if distribution is Distribution.UNIFORM_PM1:
        return 2.0 * uniforms - 1.0
    return np.floor(3.0 * uniforms) - 1.0  # trit: {-1, 0, 1} with equal mass


@dataclass(frozen=True, eq=False)
class NoiseTape:
    """Immutable indexed draws r(s, t) for one circuit run."""

    n: int
    config: NoiseConfig
    trial: int
    index: tuple[tuple[int, int], ...]
    values: np.ndarray

    def __post_init__(self):
        if len(self.index) != len(self.values):
            raise ConfigurationError("index and values length mismatch")
        self.values.setflags(write=False)

    def __len__(self) -> int:
        return len(self.index)

    def __iter__(self) -> Iterator[tuple[int, int, float]]:
        for (s, t), r in zip(self.index, self.values):
            yield s, t, float(r)

    def r(self, s: int, t: int) -> float:
        """The draw for sweep s, level band + t."""
        try:
            return float(self.values[self._lookup()[(s, t)]])
        except KeyError:
            raise KeyError(f"tape has no draw at (s={s}, t={t})") from None

    def _lookup(self) -> dict[tuple[int, int], int]:
        cache = getattr(self, "_lookup_cache", None)
        if cache is None:
            cache = {st: i for i, st in enumerate(self.index)}
            object.__setattr__(self, "_lookup_cache", cache)
        return cache

    def as_grid(self) -> np.ndarray:
        """Dense (n-band+1, n-band+1) array, zero where no draw exists."""
        size = self.n - self.config.band + 1
        grid = np.zeros((max(size, 0), max(size, 0)), dtype=np.float64)
        for (s, t), r in zip(self.index, self.values):
            grid[s, t] = r
        return grid

    def matches(self, n: int, config: NoiseConfig) -> bool:
        return self.n == n and self.config == config

    def to_json(self) -> str:
        payload = {
            "n": self.n,
            "config": self.config.as_dict(),
            "trial": self.trial,
            "draws": [
                {"s": s, "t": t, "r": float(r)}
                for (s, t), r in zip(self.index, self.values)
            ],
        }
        return json.dumps(payload, sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "NoiseTape":
        payload = json.loads(text)
        config = NoiseConfig(**payload["config"])
        index = tuple((d["s"], d["t"]) for d in payload["draws"])
        values = np.array([d["r"] for d in payload["draws"]], dtype=np.float64)
        tape = NoiseTape(payload["n"], config, payload["trial"], index, values)
        _check_index(tape)
        return tape

    def to_bytes(self) -> bytes:
        """Flat little-endian float64 draws in canonical (s, t) order, with a
        minimal header for the shape."""
        header = json.dumps(
            {"n": self.n, "config": self.config.as_dict(), "trial": self.trial},
            sort_keys=True,
        ).encode()
        return struct.pack("<I", len(header)) + header + self.values.astype("<f8").tobytes()

    @staticmethod
    def from_bytes(blob: bytes) -> "NoiseTape":
        (hlen,) = struct.unpack_from("<I", blob)
        meta = json.loads(blob[4 : 4 + hlen])
        config = NoiseConfig(**meta["config"])
        values = np.frombuffer(blob[4 + hlen :], dtype="<f8").astype(np.float64)
        index = tuple(mode_index_set(meta["n"], config))
        tape = NoiseTape(meta["n"], config, meta["trial"], index, values)
        _check_index(tape)
        return tape


def _check_index(tape: NoiseTape) -> None:
    expected = tuple(mode_index_set(tape.n, tape.config))
    if tape.index != expected:
        raise ConfigurationError("tape index set does not match (n, config)")


def draw_tape(n: int, config: NoiseConfig, trial: int = 0) -> NoiseTape:
    """Populate the tape for an n-qubit run of the configured circuit.

    Draws for every (s, t) of the full grid are generated in canonical order
    and then restricted to the mode's index set, so the single-level and
    banded tapes are literal restrictions of the full-noise tape at the same
    (seed, trial). Noisy modes require n > band.
    """
    if config.mode.is_noisy and n <= config.band:
        raise ConfigurationError(
            f"mode {config.mode.value} needs n > band, got n={n}, band={config.band}"
        )
    index = mode_index_set(n, config)
    if not index:
        return NoiseTape(n, config, trial, (), np.empty(0, dtype=np.float64))
    grid = full_index_grid(n, config.band)
    uniforms = _raw_uniforms(config.seed, trial, len(grid))
    draws = _transform(uniforms, config.distribution)
    position = {st: i for i, st in enumerate(grid)}
    values = np.array([draws[position[st]] for st in index], dtype=np.float64)
    return NoiseTape(n, config, trial, tuple(index), values)


def perturbed_angle(k: int, r: float, epsilon: float) -> float:
    """Rotation angle (1 + epsilon*r)/2^k in turns, for gate level k >= 2."""
    if k < 2:
        raise ValueError(f"controlled rotations start at level 2, got k={k}")
    return (1.0 + epsilon * r) / 2.0**k
