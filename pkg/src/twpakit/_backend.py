"""Kernel backend selection.

The compiled extension is preferred when importable; the numpy/pure-Python
fallback is numerically equivalent but slower.  Set TWPAKIT_PURE=1 to force
the fallback (used by the benchmark and the backend-parity tests).
"""

import os

if os.environ.get("TWPAKIT_PURE"):
    from . import _kernels_py as kernels
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as kernels

USING_COMPILED_KERNELS: bool = bool(kernels.COMPILED)


def backend_name() -> str:
    return "compiled" if USING_COMPILED_KERNELS else "pure-python"
