"""Kernel backend selection.

The compiled extension is preferred when importable; set PARABEXT_FORCE_PY=1
to force the pure numpy fallback.  Both expose the same two functions:

    pair_energy(rows, p)                    -> int
    char_transform(trace_rows, w, evals, p, sign) -> complex ndarray
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("PARABEXT_FORCE_PY"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_py

pair_energy = _impl.pair_energy
char_transform = _impl.char_transform


def backend_name() -> str:
    return _impl.BACKEND_NAME
