"""Kernel backend selection.

The compiled extension is preferred when present; ``EVOSYM_PURE=1`` in the
environment forces the pure-Python kernels (used by the benchmark and by the
backend-parity tests).  Both backends expose the same functions.
"""

from __future__ import annotations

import os

if os.environ.get("EVOSYM_PURE"):
    from . import _kernel_py as kernel
else:
    try:
        from . import _kernel as kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernel_py as kernel

BACKEND = kernel.BACKEND_NAME
