"""Pure-numpy implementations of the hot kernels.

Same contracts as the compiled extension in _kernels.pyx; selected at import
time by kernels.py when the extension is unavailable (or forced off).
All phases are in turns.
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi


def colsum_sq_phases(phases: np.ndarray, out: np.ndarray) -> None:
    """out[v] = |sum_k exp(2*pi*i*phases[k, v])|^2 for a (K, V) phase matrix."""
    z = np.exp(1j * TWO_PI * phases).sum(axis=0)
    np.copyto(out, (z * z.conj()).real)


def colsum_sq_scaled(
    zbase: np.ndarray, noise: np.ndarray, eps: float, out: np.ndarray
) -> None:
    """out[v] = |sum_k zbase[k, v] * exp(2*pi*i*eps*noise[k, v])|^2."""
    if eps == 0.0:
        z = zbase.sum(axis=0)
    else:
        z = (zbase * np.exp(1j * TWO_PI * eps * noise)).sum(axis=0)
    np.copyto(out, (z * z.conj()).real)


def colsum_sq_doubling(
    zbase: np.ndarray, noise: np.ndarray, eps0: float, levels: int, out: np.ndarray
) -> None:
    """Row l of out gets |sum_k zbase * exp(2*pi*i*(eps0*2^l)*noise)|^2.

    One sincos pass builds exp at eps0; the remaining levels reuse it by
    elementwise squaring.
    """
    rot = np.exp(1j * TWO_PI * eps0 * noise)
    for level in range(levels + 1):
        z = (zbase * rot).sum(axis=0)
        out[level] = (z * z.conj()).real
        if level < levels:
            rot *= rot


def controlled_phase(amps: np.ndarray, n: int, control: int, target: int, turns: float) -> None:
    """In-place controlled phase on a 2^n statevector: amplitudes whose control
    and target bits are both 1 gain exp(2*pi*i*turns)."""
    hi, lo = (control, target) if control > target else (target, control)
    view = amps.reshape(1 << (n - 1 - hi), 2, 1 << (hi - lo - 1), 2, 1 << lo)
    view[:, 1, :, 1, :] *= np.exp(1j * TWO_PI * turns)
