"""Time the compiled right-hand-side kernels against the pure-Python twins.

Run from the repository root after installing the package:

    python3 benchmarks/bench_kernels.py

The compiled backend is what `pulsrodon.kernels` exposes when the extension
built; setting PULSRODON_PURE_PYTHON=1 at import time forces the fallback
instead, which is what this script times as the reference. Both backends are
imported directly here, so the env var is not needed.
"""

import timeit

import numpy as np

from pulsrodon.kernels import _ref

try:
    from pulsrodon.kernels import _core
except ImportError:
    _core = None


def _sample_inputs():
    rng = np.random.default_rng(7)
    y_full = rng.uniform(0.2, 1.0, 10)
    z_mod = rng.uniform(0.2, 1.0, 7)
    w_scalar = rng.uniform(0.5, 1.5, 4)
    return y_full, z_mod, w_scalar


def main():
    y_full, z_mod, w_scalar = _sample_inputs()
    out10 = np.empty(10)
    out7 = np.empty(7)
    out4 = np.empty(4)

    cases = [
        ("rhs_full", lambda mod: mod.rhs_full(y_full, 4.0, 1.0, 1.0, out10)),
        ("rhs_modulated",
         lambda mod: mod.rhs_modulated(z_mod, 4.0, 1.0, 1.0, 0.0, out7)),
        ("rhs_exact_scalar",
         lambda mod: mod.rhs_exact_scalar(w_scalar, 1.0, 1.0, 0.0, -0.2, 4.2,
                                          0.8, -4.0, out4)),
    ]

    n = 200_000
    print(f"{'kernel':<18} {'python':>12} {'cython':>12} {'speedup':>9}")
    for name, call in cases:
        t_ref = timeit.timeit(lambda: call(_ref), number=n) / n
        if _core is None:
            print(f"{name:<18} {t_ref * 1e6:>10.3f}us {'-':>12} {'-':>9}")
            continue
        t_core = timeit.timeit(lambda: call(_core), number=n) / n
        print(f"{name:<18} {t_ref * 1e6:>10.3f}us {t_core * 1e6:>10.3f}us"
              f" {t_ref / t_core:>8.1f}x")

    if _core is not None:
        for name, call in cases:
            a = np.array(call(_ref))
            b = np.array(call(_core))
            err = float(np.max(np.abs(a - b)))
            print(f"agreement {name}: max|diff| = {err:.3g}")


if __name__ == "__main__":
    main()
