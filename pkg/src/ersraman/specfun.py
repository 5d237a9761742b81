"""Public modified-Bessel surface with backend selection.

Two interchangeable backends implement the same eight functions: a pure
numpy module and a compiled Cython module built at install time. The
compiled one is preferred when present; set ERSRAMAN_PURE_PYTHON=1 to force
the numpy fallback (useful for benchmarking and for debugging the build).
Both are importable side by side, so tests can compare them directly.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from . import _specfun_py

_FORCE_PURE = os.environ.get("ERSRAMAN_PURE_PYTHON", "") not in ("", "0")

if _FORCE_PURE:
    _specfun_cy = None
else:
    try:
        from . import _specfun_cy
    except ImportError:
        _specfun_cy = None

_impl = _specfun_cy if _specfun_cy is not None else _specfun_py

X_CUT = _specfun_py.X_CUT


def backend_name() -> str:
    """Name of the backend in use, "compiled" or "python"."""
    return _impl.BACKEND


def available_backends() -> dict:
    """All importable backends keyed by name."""
    out = {"python": _specfun_py}
    if _specfun_cy is not None:
        out["compiled"] = _specfun_cy
    return out


def _call(fn, x):
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0) or not np.all(np.isfinite(x)):
        raise ValueError("modified Bessel argument must be finite and >= 0")
    out = fn(x)
    return float(out) if scalar else out


def bessel_i(order: int, x, scaled: bool = False):
    """I_order(x) for order 0 or 1, optionally scaled by exp(-x).

    The scaled form stays finite for arguments up to 1e6 and beyond; the
    unscaled form overflows to inf past x ~ 709 like exp itself does.
    """
    if order not in (0, 1):
        raise ValueError(f"order must be 0 or 1, got {order!r}")
    table = {
        (0, False): _impl.i0,
        (1, False): _impl.i1,
        (0, True): _impl.i0e,
        (1, True): _impl.i1e,
    }
    return _call(table[(order, bool(scaled))], x)


@dataclass(frozen=True)
class BesselResult:
    """Value of I_order(x) together with the scaling convention it used."""

    value: float
    scaled: bool

    def __post_init__(self):
        if not np.isfinite(self.value) and self.scaled:
            raise ValueError("scaled Bessel value must be finite")
        if self.value < 0.0:
            raise ValueError("I0 and I1 are nonnegative on x >= 0")


def bessel_i_result(order: int, x: float, scaled: bool = False) -> BesselResult:
    """Like bessel_i for scalar x, wrapping the answer with its convention."""
    return BesselResult(value=float(bessel_i(order, x, scaled)), scaled=bool(scaled))


def i0(x):
    return _call(_impl.i0, x)


def i1(x):
    return _call(_impl.i1, x)


def i0e(x):
    return _call(_impl.i0e, x)


def i1e(x):
    return _call(_impl.i1e, x)


def i0_2sqrt(q):
    """I0(2 sqrt(q)), q >= 0."""
    return _call(_impl.i0_2sqrt, q)


def phi1(q):
    """I1(2 sqrt(q)) / sqrt(q), q >= 0, entire with phi1(0) = 1."""
    return _call(_impl.phi1, q)


def i0sq_minus_i1sq(x):
    """I0(x)^2 - I1(x)^2, x >= 0, evaluated without overflow at large x."""
    return _call(_impl.i0sq_minus_i1sq, x)


def i0sq_minus_i1sq_2sqrt(q):
    """I0(2 sqrt(q))^2 - I1(2 sqrt(q))^2, q >= 0."""
    return _call(_impl.i0sq_minus_i1sq_2sqrt, q)
