"""Spin-wave correlation state left behind by the first write pulse.

The first write both seeds the cell with flipped atoms and amplifies its own
seed, so what the second write sees is a spatially growing correlation
profile rather than a uniform one. Everything the downstream intensity needs
is the equal-time diagonal of that correlation, expressed as a density per
unit cell length relative to the vacuum commutator line (so the vacuum is
exactly 1 in anti-normal ordering and 0 in normal ordering).

Two preparation routes are provided: the step-pulse closed form
(flipped_density) and the general-envelope six-term kernel expression
(prepared_correlation), which reduces to anti-normal vacuum when the pump is
off. Ordering and geometry are carried as explicit tags so that mixing them
up is an error instead of a silent factor.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable

import numpy as np

from ._quad import adaptive_quad
from .errors import ConfigError, OrderingError
from .params import ChannelHistory, ModelParams, PulseKind, channel_history
from .specfun import i0_2sqrt
from .kernels import branch_phi1


class Ordering(Enum):
    NORMAL = "normal"
    ANTI_NORMAL = "anti-normal"


class Geometry(Enum):
    CO = "co"
    COUNTER = "counter"


class _MemoProfile:
    """Memoize an expensive scalar profile; accepts scalars or arrays."""

    def __init__(self, fn: Callable[[float], float]):
        self._fn = fn
        self._cache: dict = {}

    def _one(self, z: float) -> float:
        try:
            return self._cache[z]
        except KeyError:
            val = self._fn(z)
            self._cache[z] = val
            return val

    def __call__(self, z):
        if np.ndim(z) == 0:
            return self._one(float(z))
        z = np.asarray(z, dtype=float)
        return np.array([self._one(float(v)) for v in z.ravel()]).reshape(z.shape)


@dataclass(frozen=True)
class SpinCorrelation:
    """Equal-time diagonal correlation density along the cell.

    density maps z in [0, 1] (units of the cell length, measured along the
    propagation direction tagged by ``geometry``) to a weight per unit
    length. ``ordering`` says whether the commutator line is included
    (anti-normal) or stripped (normal); ``vacuum_weight`` records the
    nominal weight of that line, 1 in cell-length units for anti-normal
    densities and 0 for normal ones.
    """

    density: Callable
    ordering: Ordering
    geometry: Geometry
    vacuum_weight: float = 0.0

    def __post_init__(self):
        expected = 1.0 if self.ordering is Ordering.ANTI_NORMAL else 0.0
        if self.vacuum_weight != expected:
            raise OrderingError(
                f"{self.ordering.value} ordering carries vacuum_weight {expected}, "
                f"got {self.vacuum_weight}"
            )

    def at(self, z):
        return self.density(z)


def vacuum_correlation(geometry: Geometry = Geometry.CO) -> SpinCorrelation:
    """The untouched cell: anti-normal weight exactly 1 everywhere."""
    return SpinCorrelation(
        density=lambda z: np.ones_like(np.asarray(z, dtype=float)) if np.ndim(z) else 1.0,
        ordering=Ordering.ANTI_NORMAL,
        geometry=geometry,
        vacuum_weight=1.0,
    )


def flipped_density(z_norm: float, zeta1: float, a: float, *, tol: float = 1e-10) -> float:
    """Step-pulse flipped-atom density at z, in vacuum-line units.

    zeta1 is the gain accumulated by the first write over its full duration
    and a the spin-wave decay per unit gain; the profile is

        n(z) = integral_0^zeta1 exp(-a u) I0(2 sqrt(u z))^2 du.

    It grows monotonically toward the exit face because spin waves seeded
    early keep being amplified along the way.
    """
    if not 0.0 <= z_norm <= 1.0:
        raise ConfigError(f"z_norm must lie in [0, 1], got {z_norm}")
    if zeta1 < 0.0:
        raise ConfigError(f"zeta1 must be >= 0, got {zeta1}")
    if a < 0.0:
        raise ConfigError(f"a must be >= 0, got {a}")
    if zeta1 == 0.0:
        return 0.0
    z = float(z_norm)

    def integrand(u):
        return np.exp(-a * u) * i0_2sqrt(u * z) ** 2

    return adaptive_quad(integrand, 0.0, zeta1, abs_tol=tol, rel_tol=tol)


def constant_pulse_correlation(zeta1: float, a: float) -> SpinCorrelation:
    """Normally ordered seed correlation for a step first write."""
    profile = _MemoProfile(lambda z: flipped_density(z, zeta1, a))
    return SpinCorrelation(profile, Ordering.NORMAL, Geometry.CO)


def _langevin_weight(history: ChannelHistory, v):
    # diffusion prefactor at full pump, decay with the full time-dependent
    # exponent accumulated since the source time
    g_end = np.real(history.gamma(1.0))
    g_v = np.real(history.gamma(v))
    return history.gamma_s_peak * np.exp(-2.0 * (g_end - g_v))


def prepared_correlation(
    z_norm: float,
    history: ChannelHistory,
    *,
    inner_tol: float = 1e-8,
    outer_tol: float = 1e-7,
) -> float:
    """Anti-normal diagonal correlation after a general first write pulse.

    Six contributions: the decayed vacuum line, its single and double
    gain-spread images, and the Langevin counterparts that restore the
    commutator eaten by decay (a bare term plus single and double spread
    images of the noise injected at every intermediate time). With the pump
    off this is the vacuum line exactly.
    """
    if not 0.0 <= z_norm <= 1.0:
        raise ConfigError(f"z_norm must lie in [0, 1], got {z_norm}")
    if history.kappa == 0.0:
        return 1.0
    z = float(z_norm)

    q_full = float(history.gain(1.0))
    decayed = float(np.exp(-2.0 * np.real(history.gamma(1.0))))

    def spread_once(u):
        return q_full * branch_phi1(q_full * (z - u))

    def spread_twice_at(q):
        if z == 0.0 or q == 0.0:
            return 0.0
        return adaptive_quad(
            lambda u: (q * branch_phi1(q * (z - u))) ** 2,
            0.0,
            z,
            abs_tol=inner_tol,
            rel_tol=inner_tol,
        )

    once = 0.0 if z == 0.0 else adaptive_quad(spread_once, 0.0, z, abs_tol=inner_tol, rel_tol=inner_tol)
    twice = spread_twice_at(q_full)
    noise_bare = adaptive_quad(
        lambda v: _langevin_weight(history, v), 0.0, 1.0, abs_tol=outer_tol, rel_tol=outer_tol
    )

    def noise_spread_integrand(v):
        v = np.asarray(v, dtype=float)
        flat = v.ravel()
        out = np.empty_like(flat)
        for i, vi in enumerate(flat):
            q_v = q_full - float(history.gain(vi))
            out[i] = spread_twice_at(q_v)
        return _langevin_weight(history, v) * out.reshape(v.shape)

    noise_spread = adaptive_quad(noise_spread_integrand, 0.0, 1.0, abs_tol=outer_tol, rel_tol=outer_tol)

    return (
        decayed
        + 2.0 * decayed * once
        + decayed * twice
        + 4.0 * once * noise_bare
        + 2.0 * noise_bare
        + 2.0 * noise_spread
    )


def prepared_correlation_gaussian(z_norm: float, params: ModelParams) -> float:
    """Six-term prepared correlation for the configured Gaussian first write."""
    if params.pulse_kind is not PulseKind.TRUNCATED_GAUSSIAN:
        raise ConfigError("prepared_correlation_gaussian needs pulse_shape = gaussian")
    return prepared_correlation(z_norm, channel_history(params, 1))


def gaussian_correlation(params: ModelParams) -> SpinCorrelation:
    """Anti-normally ordered seed correlation for the configured first write."""
    hist = channel_history(params, 1)
    profile = _MemoProfile(lambda z: prepared_correlation(z, hist))
    return SpinCorrelation(profile, Ordering.ANTI_NORMAL, Geometry.CO, vacuum_weight=1.0)


def map_geometry(corr: SpinCorrelation, geometry: Geometry) -> SpinCorrelation:
    """Apply a readout geometry to a correlation in the first write's frame.

    Co leaves the density alone. Counter mirrors it through the cell center
    and toggles the frame tag, so applying Counter twice restores the
    original exactly (the mirror is an involution).
    """
    if geometry is Geometry.CO:
        return corr
    inner = corr.density
    flipped = Geometry.CO if corr.geometry is Geometry.COUNTER else Geometry.COUNTER
    return replace(
        corr,
        density=lambda z: inner(1.0 - np.asarray(z, dtype=float)),
        geometry=flipped,
    )


def split_vacuum(corr: SpinCorrelation):
    """Separate the vacuum line from an anti-normally ordered correlation.

    Returns (vacuum_weight, normal_corr). The numerical guard trips if the
    normal part comes out below -1e-9, which would mean the anti-normal
    profile dipped under the commutator line; tiny negative round-off is
    clamped to zero.
    """
    if corr.ordering is not Ordering.ANTI_NORMAL:
        raise OrderingError("split_vacuum needs an anti-normally ordered correlation")
    inner = corr.density

    def normal(z):
        d = np.asarray(inner(z), dtype=float) - 1.0
        if np.any(d < -1e-9):
            raise OrderingError(
                f"anti-normal correlation fell below the vacuum line (min excess {d.min():.3e})"
            )
        out = np.where(d < 0.0, 0.0, d)
        return float(out) if np.ndim(z) == 0 else out

    stripped = replace(corr, density=normal, ordering=Ordering.NORMAL, vacuum_weight=0.0)
    return corr.vacuum_weight, stripped


def to_normal(corr: SpinCorrelation) -> SpinCorrelation:
    """Normally ordered view of a correlation (identity if already normal)."""
    if corr.ordering is Ordering.NORMAL:
        return corr
    _, normal = split_vacuum(corr)
    return normal
