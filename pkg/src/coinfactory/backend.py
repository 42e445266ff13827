"""Selects the randomness kernel: compiled extension if built, else pure Python.

Set COINFACTORY_PURE_PYTHON=1 to force the fallback (used by the benchmark
and the backend-equivalence tests).
"""
import os

if os.environ.get("COINFACTORY_PURE_PYTHON"):
    from . import _kernel_py as kernel
else:
    try:
        from . import _kernel as kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernel_py as kernel

BitStream = kernel.BitStream
derive_seed = kernel.derive_seed
mix64 = kernel.mix64
BACKEND = kernel.BACKEND
