"""Right-hand-side kernels with a compiled fast path.

The compiled extension (_core, built from _core.pyx) is preferred when it
imports; the pure-Python module _ref is the fallback and the behavioural
reference.  Set PULSRODON_PURE_PYTHON=1 to force the fallback, e.g. to
time one against the other (see benchmarks/bench_kernels.py).
"""

import os

if os.environ.get("PULSRODON_PURE_PYTHON", "") == "1":
    from . import _ref as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _ref as _impl

rhs_full = _impl.rhs_full
rhs_modulated = _impl.rhs_modulated
rhs_exact_scalar = _impl.rhs_exact_scalar


def backend_name() -> str:
    """Which kernel implementation is active: "cython" or "python"."""
    return _impl.BACKEND


__all__ = ["rhs_full", "rhs_modulated", "rhs_exact_scalar", "backend_name"]
