"""Backend selection for the hot kernels.

The compiled Cython extension is preferred when present; the pure-numpy
fallback is used otherwise. Set NOISYSHOR_FORCE_PY=1 to force the fallback
(used by the benchmark and the parity tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("NOISYSHOR_FORCE_PY"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

colsum_sq_phases = _impl.colsum_sq_phases
colsum_sq_scaled = _impl.colsum_sq_scaled
colsum_sq_doubling = _impl.colsum_sq_doubling
controlled_phase = _impl.controlled_phase


def get_backend() -> str:
    return BACKEND


def available_backends() -> dict[str, object]:
    """Importable kernel modules by name; used by the benchmark."""
    out: dict[str, object] = {"python": _kernels_py}
    try:
        from . import _kernels

        out["compiled"] = _kernels
    except ImportError:
        pass
    return out
