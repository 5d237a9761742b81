"""Timing comparison of the compiled and pure-python Bessel backends.

Run from the repository root after an editable install:

    python benchmarks/bench_kernels.py

Times the hot array kernels on the argument ranges the intensity code
actually hits (small gain arguments through the asymptotic branch) and a
full kernel-residual evaluation on a production-size grid.
"""

from __future__ import annotations

import time

import numpy as np

from ersraman import specfun
from ersraman.kernels import kernel_residual


def _time(fn, *args, repeat: int = 5) -> float:
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_backend(name: str, impl, x_small: np.ndarray, x_large: np.ndarray) -> dict:
    return {
        "backend": name,
        "i0 small": _time(impl.i0, x_small),
        "i0e large": _time(impl.i0e, x_large),
        "phi1 small": _time(impl.phi1, x_small),
        "fdiff mixed": _time(impl.i0sq_minus_i1sq, np.concatenate([x_small, x_large])),
    }


def main() -> None:
    rng = np.random.default_rng(7)
    x_small = rng.uniform(0.0, 7.75, 200_000)
    x_large = rng.uniform(7.75, 1.0e5, 200_000)

    backends = specfun.available_backends()
    print(f"active backend: {specfun.backend_name()}")
    results = [bench_backend(n, impl, x_small, x_large) for n, impl in sorted(backends.items())]
    keys = [k for k in results[0] if k != "backend"]
    for res in results:
        cells = "  ".join(f"{k}: {res[k] * 1e3:8.2f} ms" for k in keys)
        print(f"{res['backend']:>9}  {cells}")
    if len(results) == 2:
        by_name = {r["backend"]: r for r in results}
        for k in keys:
            ratio = by_name["python"][k] / by_name["compiled"][k]
            print(f"speedup {k}: {ratio:.1f}x")

    t = np.linspace(0.0, 1.0, 161)
    z = np.linspace(0.0, 1.0, 161)
    dt = _time(kernel_residual, t, z, repeat=2)
    print(f"kernel_residual 161x161 [{specfun.backend_name()}]: {dt:.2f} s")


if __name__ == "__main__":
    main()
