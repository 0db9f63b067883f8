"""Noise configuration, tape generation, reproducibility, export round-trips."""

from __future__ import annotations

import numpy as np
import pytest

from noisyshor.errors import ConfigurationError
from noisyshor.noise import (
    Distribution,
    Mode,
    NoiseConfig,
    NoiseTape,
    draw_tape,
    full_index_grid,
    mode_index_set,
    perturbed_angle,
)


def cfg(mode=Mode.FULL_NOISE, eps=1.0, band=3, dist=Distribution.GAUSSIAN_UNIT, seed=0):
    return NoiseConfig(eps, band, mode, dist, seed)


def test_config_validation():
    with pytest.raises(ConfigurationError):
        NoiseConfig(-0.1, 3, Mode.EXACT)
    with pytest.raises(ConfigurationError):
        NoiseConfig(0.0, 1, Mode.EXACT)
    c = NoiseConfig(0.5, 2, "full_noise", "trit", 7)
    assert c.mode is Mode.FULL_NOISE and c.distribution is Distribution.TRIT


def test_index_grid_count():
    # n=6, b=3: s = 0..3, t = 0..3-s gives 4+3+2+1 draws
    grid = full_index_grid(6, 3)
    assert len(grid) == 10
    assert grid[0] == (0, 0) and grid[-1] == (3, 0)
    tape = draw_tape(6, cfg())
    assert len(tape) == 10


def test_mode_index_sets():
    c_single = cfg(Mode.SINGLE_LEVEL)
    c_banded = cfg(Mode.BANDED_NOISY)
    assert mode_index_set(6, c_single) == [(s, 0) for s in range(4)]
    assert mode_index_set(6, c_banded) == [(s, 0) for s in range(4)]
    assert mode_index_set(6, cfg(Mode.EXACT)) == []
    assert len(draw_tape(6, cfg(Mode.COPPERSMITH))) == 0


def test_tape_reproducible_and_seed_sensitive():
    a = draw_tape(8, cfg(seed=42), trial=5)
    b = draw_tape(8, cfg(seed=42), trial=5)
    assert a.values.tobytes() == b.values.tobytes()
    c = draw_tape(8, cfg(seed=43), trial=5)
    d = draw_tape(8, cfg(seed=42), trial=6)
    assert a.values.tobytes() != c.values.tobytes()
    assert a.values.tobytes() != d.values.tobytes()


def test_single_level_tape_is_restriction_of_full_noise():
    full = draw_tape(10, cfg(Mode.FULL_NOISE, seed=9), trial=3)
    single = draw_tape(10, cfg(Mode.SINGLE_LEVEL, seed=9), trial=3)
    banded = draw_tape(10, cfg(Mode.BANDED_NOISY, seed=9), trial=3)
    for s, t, r in single:
        assert t == 0
        assert r == full.r(s, 0)
    assert single.values.tobytes() == banded.values.tobytes()


def test_tape_requires_enough_qubits():
    with pytest.raises(ConfigurationError):
        draw_tape(3, cfg(band=3))
    with pytest.raises(ConfigurationError):
        draw_tape(2, cfg(Mode.SINGLE_LEVEL, band=4))
    draw_tape(3, cfg(Mode.COPPERSMITH, band=5))  # deletion-only modes have no draws


def test_trit_support_and_uniform_range():
    t = draw_tape(20, cfg(dist=Distribution.TRIT, band=2), trial=0)
    assert set(np.unique(t.values)).issubset({-1.0, 0.0, 1.0})
    u = draw_tape(20, cfg(dist=Distribution.UNIFORM_PM1, band=2), trial=1)
    assert u.values.min() >= -1.0 and u.values.max() <= 1.0


def test_gaussian_moments_over_many_tapes():
    c = cfg(band=2, seed=11)
    chunks = [draw_tape(20, c, trial=i).values for i in range(600)]
    draws = np.concatenate(chunks)
    assert draws.size >= 100_000
    stderr_mean = 1.0 / np.sqrt(draws.size)
    assert abs(draws.mean()) < 3 * stderr_mean
    var_stderr = np.sqrt(2.0 / draws.size)  # Var of sample variance ~ 2 sigma^4 / n
    assert abs(draws.var() - 1.0) < 3 * var_stderr


def test_trit_and_uniform_are_balanced():
    c = cfg(dist=Distribution.TRIT, band=2, seed=3)
    draws = np.concatenate([draw_tape(20, c, trial=i).values for i in range(300)])
    for value in (-1.0, 0.0, 1.0):
        frac = (draws == value).mean()
        assert abs(frac - 1 / 3) < 3 * np.sqrt(2 / 9 / draws.size) + 0.01


def test_lookup_and_grid():
    tape = draw_tape(6, cfg(seed=1))
    grid = tape.as_grid()
    assert grid.shape == (4, 4)
    assert grid[1, 2] == tape.r(1, 2)
    assert grid[3, 1] == 0.0  # outside the triangular index set
    with pytest.raises(KeyError):
        tape.r(3, 1)


def test_json_roundtrip_bit_exact():
    tape = draw_tape(9, cfg(Mode.FULL_NOISE, seed=123), trial=2)
    clone = NoiseTape.from_json(tape.to_json())
    assert clone.n == tape.n and clone.config == tape.config
    assert clone.values.tobytes() == tape.values.tobytes()
    assert clone.index == tape.index


def test_bytes_roundtrip_bit_exact():
    tape = draw_tape(7, cfg(Mode.SINGLE_LEVEL, seed=5), trial=4)
    clone = NoiseTape.from_bytes(tape.to_bytes())
    assert clone.values.tobytes() == tape.values.tobytes()
    assert clone.index == tape.index


def test_tape_matches():
    c = cfg(seed=2)
    tape = draw_tape(8, c)
    assert tape.matches(8, c)
    assert not tape.matches(9, c)
    assert not tape.matches(8, cfg(seed=3))


def test_perturbed_angle_examples():
    assert perturbed_angle(3, 123.0, 0.0) == 1 / 8
    assert perturbed_angle(2, 1.0, 0.5) == 0.375
    assert perturbed_angle(4, -2.0, 0.25) == 0.03125
    with pytest.raises(ValueError):
        perturbed_angle(1, 0.0, 0.0)
