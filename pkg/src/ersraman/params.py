"""Model parameters, pulse envelopes, and per-channel pump histories.

Everything downstream works in dimensionless groups: lengths in units of the
cell length, times in units of the driving pulse duration, and the coupling
strength through kappa = chi^2 L T / c. The config file carries laboratory
numbers (Hz, seconds); they are folded into those groups here and nowhere
else. Frequencies given in Hz are treated as ordinary frequencies and pick
up a factor 2*pi on ingest.

One bridge constant lives here: the config fixes only frequency ratios, not
the absolute pump Rabi frequency, so the first write beam is anchored at
|Omega_1| = PUMP_FRACTION * delta_big. That one number sets the pump-induced
decay and shift scales for both channels (the second channel follows from
the configured ratios). All figure-level trends are insensitive to the
anchor; it is exposed as a module constant so it can be audited.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np

from ._quad import _NODES, _WEIGHTS, adaptive_quad, cumulative_panels
from .errors import ConfigError

TWO_PI = 2.0 * math.pi

# |Omega_1| / delta_big for the first write beam (adiabatic regime anchor).
PUMP_FRACTION = 0.1

# Gaussian envelope: exp(-GAUSS_SHARPNESS * (t/T - 1/2)^2) - GAUSS_FLOOR,
# zero at both pulse edges by construction.
GAUSS_SHARPNESS = 30.0
GAUSS_FLOOR = math.exp(-0.25 * GAUSS_SHARPNESS)


class PulseKind(Enum):
    """Temporal profile of a write pulse."""

    CONSTANT_STEP = "constant"
    TRUNCATED_GAUSSIAN = "gaussian"

    @classmethod
    def parse(cls, text: str) -> "PulseKind":
        for kind in cls:
            if kind.value == text:
                return kind
        raise ConfigError(f"pulse_shape must be 'constant' or 'gaussian', got {text!r}")


@dataclass(frozen=True)
class PulseEnvelope:
    """A pulse profile together with its duration (seconds)."""

    kind: PulseKind
    duration: float

    def __post_init__(self):
        if not (self.duration > 0.0 and math.isfinite(self.duration)):
            raise ConfigError(f"pulse duration must be positive, got {self.duration}")


def _gauss_env(t_norm: np.ndarray) -> np.ndarray:
    inside = (t_norm >= 0.0) & (t_norm <= 1.0)
    out = np.zeros_like(t_norm)
    tt = t_norm[inside]
    out[inside] = np.exp(-GAUSS_SHARPNESS * (tt - 0.5) ** 2) - GAUSS_FLOOR
    return out


def envelope_value(pulse: PulseEnvelope, t: float):
    """Envelope amplitude at time t (same units as the pulse duration).

    The constant profile is a unit step that switches on at t = 0 and stays
    on; the Gaussian profile vanishes outside [0, duration].
    """
    scalar = np.ndim(t) == 0
    tn = np.asarray(t, dtype=float) / pulse.duration
    if pulse.kind is PulseKind.CONSTANT_STEP:
        out = np.where(tn >= 0.0, 1.0, 0.0)
    else:
        out = _gauss_env(tn)
    return float(out) if scalar else out


class _CumTable:
    """Cumulative integral of a smooth vectorized f over [0, 1].

    One 15-point Gauss-Legendre panel per 1/n cell, plus a partial panel for
    off-grid query points. For the entire envelopes used here the per-cell
    error sits at machine level, so lookups are effectively exact.
    """

    def __init__(self, f: Callable, n: int = 1024):
        self.f = f
        self.grid = np.linspace(0.0, 1.0, n + 1)
        self.base = cumulative_panels(f, self.grid)
        self.total = float(self.base[-1])

    def at(self, t):
        t = np.asarray(t, dtype=float)
        tc = np.clip(t, 0.0, 1.0)
        n = self.grid.size - 1
        j = np.minimum((tc * n).astype(int), n - 1)
        lo = self.grid[j]
        h = 0.5 * (tc - lo)
        x = lo[..., None] + h[..., None] * (_NODES + 1.0)
        part = np.sum(self.f(x.ravel()).reshape(x.shape) * _WEIGHTS, axis=-1) * h
        return self.base[j] + part


class ChannelHistory:
    """Time histories of one write channel in dimensionless form.

    Times are fractions of the pulse duration. The stored groups are
    kappa = chi^2 L T / c, gamma_s_t = gamma_s T, and the complex pump group
    gamma_bar_t = (gamma_prime - i shift) T evaluated at full pump power.

    With ``deplete`` the ground population difference W follows the pump:
    exponentially in the accumulated pump fluence for the Gaussian profile,
    and through the standard small-depletion linearization for the constant
    step (which is what makes the closed-form step-pulse intensity exact).
    Without it W stays pinned at 1, the usual assumption for the first
    write pulse acting on a fully prepared ensemble.
    """

    def __init__(
        self,
        kind: PulseKind,
        kappa: float,
        gamma_s_t: float,
        gamma_bar_t: complex,
        w0: float = 1.0,
        deplete: bool = True,
    ):
        if kappa < 0.0:
            raise ConfigError(f"kappa must be >= 0, got {kappa}")
        if gamma_s_t < 0.0:
            raise ConfigError(f"gamma_s_t must be >= 0, got {gamma_s_t}")
        gamma_bar_t = complex(gamma_bar_t)
        if gamma_bar_t.real < 0.0:
            raise ConfigError(f"Re(gamma_bar_t) must be >= 0, got {gamma_bar_t}")
        if not -1.0 <= w0 <= 1.0:
            raise ConfigError(f"w0 must lie in [-1, 1], got {w0}")
        self.kind = kind
        self.kappa = float(kappa)
        self.gamma_s_t = float(gamma_s_t)
        self.gamma_bar_t = gamma_bar_t
        self.w0 = float(w0)
        self.deplete = bool(deplete)
        if kind is PulseKind.TRUNCATED_GAUSSIAN:
            self._esq = _CumTable(lambda u: _gauss_env(u) ** 2)
            if self.deplete:
                self._wesq = _CumTable(lambda u: self.population(u) * _gauss_env(u) ** 2)
        elif self.deplete and self._lin_population(1.0) < -1.0:
            raise ConfigError(
                "linearized population difference leaves [-1, 1] within the pulse; "
                "the step-pulse depletion model does not apply this deep"
            )

    # -- raw profile -------------------------------------------------------

    def envelope(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind is PulseKind.CONSTANT_STEP:
            return np.where(t >= 0.0, 1.0, 0.0)
        return _gauss_env(t)

    def envelope_sq_integral(self, t):
        """Integral of envelope^2 from 0 to t."""
        t = np.asarray(t, dtype=float)
        if self.kind is PulseKind.CONSTANT_STEP:
            return np.maximum(t, 0.0)
        return self._esq.at(t)

    # -- population difference --------------------------------------------

    def _lin_population(self, t):
        return self.w0 - (1.0 + self.w0) * self.gamma_bar_t.real * np.asarray(t, dtype=float)

    def population(self, t):
        """Ground-state population difference W(t)."""
        if not self.deplete:
            return np.ones_like(np.asarray(t, dtype=float))
        if self.kind is PulseKind.CONSTANT_STEP:
            return self._lin_population(t)
        g = self.gamma_bar_t.real * self._esq.at(t)
        return (1.0 + self.w0) * np.exp(-g) - 1.0

    def eta(self, t):
        """Effective step-pulse gain coefficient: gain(t) = eta(t) * kappa * t.

        Only defined for the constant profile, where the linear depletion
        gives eta(t) = w0 (1 - gamma' t / 2) - gamma' t / 2; without
        depletion it is identically w0.
        """
        if self.kind is not PulseKind.CONSTANT_STEP:
            raise ConfigError("eta is defined for the constant pulse only")
        t = np.asarray(t, dtype=float)
        if not self.deplete:
            return np.full_like(t, self.w0)
        half = 0.5 * self.gamma_bar_t.real * t
        return self.w0 * (1.0 - half) - half

    # -- accumulated groups -------------------------------------------------

    def gain(self, t):
        """Accumulated gain argument: kappa * integral of W * envelope^2."""
        t = np.asarray(t, dtype=float)
        if self.kappa == 0.0:
            return np.zeros_like(t)
        if self.kind is PulseKind.CONSTANT_STEP:
            if not self.deplete:
                return self.kappa * t
            gp = self.gamma_bar_t.real
            return self.kappa * (self.w0 * t - 0.5 * (1.0 + self.w0) * gp * t * t)
        if not self.deplete:
            return self.kappa * self._esq.at(t)
        return self.kappa * self._wesq.at(t)

    def gain_rate(self, t):
        """d(gain)/dt = kappa * W(t) * envelope(t)^2."""
        return self.kappa * self.population(t) * self.envelope(t) ** 2

    def gamma(self, t):
        """Accumulated complex decay exponent from 0 to t."""
        t = np.asarray(t, dtype=float)
        return self.gamma_s_t * t + self.gamma_bar_t * self.envelope_sq_integral(t)

    def decay_rate(self, t):
        """Instantaneous real spin-wave decay rate (per unit scaled time)."""
        return self.gamma_s_t + self.gamma_bar_t.real * self.envelope(t) ** 2

    @property
    def gamma_s_peak(self) -> float:
        """Real decay rate at full pump, the Langevin diffusion prefactor."""
        return self.gamma_s_t + self.gamma_bar_t.real


@dataclass(frozen=True)
class ModelParams:
    """Validated physical inputs. Frequencies are angular (rad/s).

    delta_big is the (large) detuning of the first write beam, delta_small
    the one of the second; gamma_1 / gamma_2 are the optical coherence decay
    rates on the two transitions, gamma_s the bare spin-wave decay rate.
    optical_depth_1 equals chi_1^2 L t1 / c and fixes the coupling scale.
    """

    w0: float
    optical_depth_1: float
    pump_ratio: float
    delta_big: float
    delta_small: float
    gamma_s: float
    gamma_1: float
    gamma_2: float
    t1: float
    t2: float
    pulse_kind: PulseKind
    g_ratio: float = 1.0
    cell_length_norm: float = 1.0

    def __post_init__(self):
        def need(cond, key, why):
            if not cond:
                raise ConfigError(f"{key}: {why} (got {getattr(self, key)})")

        for key in (
            "w0", "optical_depth_1", "pump_ratio", "delta_big", "delta_small",
            "gamma_s", "gamma_1", "gamma_2", "t1", "t2", "g_ratio", "cell_length_norm",
        ):
            v = getattr(self, key)
            if not (isinstance(v, (int, float)) and math.isfinite(v)):
                raise ConfigError(f"{key}: must be a finite number (got {v!r})")
        need(-1.0 <= self.w0 <= 1.0, "w0", "must lie in [-1, 1]")
        need(self.optical_depth_1 > 0.0, "optical_depth_1", "must be > 0")
        need(self.pump_ratio > 0.0, "pump_ratio", "must be > 0")
        need(self.delta_big > 0.0, "delta_big", "must be > 0")
        need(self.delta_small > 0.0, "delta_small", "must be > 0")
        need(self.gamma_s >= 0.0, "gamma_s", "must be >= 0")
        need(self.gamma_1 >= 0.0, "gamma_1", "must be >= 0")
        need(self.gamma_2 >= 0.0, "gamma_2", "must be >= 0")
        need(self.t1 > 0.0, "t1", "must be > 0")
        need(self.t2 > 0.0, "t2", "must be > 0")
        need(self.g_ratio > 0.0, "g_ratio", "must be > 0")
        need(self.cell_length_norm == 1.0, "cell_length_norm", "is fixed at 1.0")
        if not isinstance(self.pulse_kind, PulseKind):
            raise ConfigError(f"pulse_kind: expected PulseKind, got {self.pulse_kind!r}")

    # -- derived pump groups -------------------------------------------------

    @property
    def rabi_fraction_1(self) -> float:
        """|Omega_1| / delta_big."""
        return PUMP_FRACTION

    @property
    def rabi_fraction_2(self) -> float:
        """|Omega_2| / delta_small, following the configured ratios."""
        return PUMP_FRACTION * self.pump_ratio * (self.delta_big / self.delta_small)

    @property
    def gamma_1_prime(self) -> float:
        return self.gamma_1 * self.rabi_fraction_1**2

    @property
    def gamma_2_prime(self) -> float:
        return self.gamma_2 * self.rabi_fraction_2**2

    @property
    def stark_shift_1(self) -> float:
        """|Omega_1|^2 / delta_big."""
        return self.rabi_fraction_1**2 * self.delta_big

    @property
    def stark_shift_2(self) -> float:
        return self.rabi_fraction_2**2 * self.delta_small

    @property
    def gamma_bar_1(self) -> complex:
        """Pump-induced part of the spin-wave decay exponent, channel 1."""
        return complex(self.gamma_1_prime, -self.stark_shift_1)

    @property
    def gamma_bar_2(self) -> complex:
        return complex(self.gamma_2_prime, -self.stark_shift_2)

    @property
    def kappa_1(self) -> float:
        """chi_1^2 L t1 / c; equal to the configured optical depth."""
        return self.optical_depth_1

    @property
    def kappa_2(self) -> float:
        """chi_2^2 L t2 / c, scaled from channel 1 by the configured ratios."""
        ratio = self.pump_ratio * (self.delta_big / self.delta_small) * self.g_ratio
        return self.optical_depth_1 * ratio**2 * (self.t2 / self.t1)

    def pulse(self, channel: int) -> PulseEnvelope:
        _check_channel(channel)
        return PulseEnvelope(self.pulse_kind, self.t1 if channel == 1 else self.t2)


def _check_channel(channel: int):
    if channel not in (1, 2):
        raise ConfigError(f"channel must be 1 or 2, got {channel!r}")


@lru_cache(maxsize=128)
def channel_history(params: ModelParams, channel: int) -> ChannelHistory:
    """Pump history for one write channel of a parameter set.

    Channel 1 acts on the fully prepared ensemble (W pinned at 1); channel 2
    starts from the configured w0 and depletes as it pumps.
    """
    _check_channel(channel)
    if channel == 1:
        return ChannelHistory(
            params.pulse_kind,
            params.kappa_1,
            params.gamma_s * params.t1,
            params.gamma_bar_1 * params.t1,
            w0=1.0,
            deplete=False,
        )
    return ChannelHistory(
        params.pulse_kind,
        params.kappa_2,
        params.gamma_s * params.t2,
        params.gamma_bar_2 * params.t2,
        w0=params.w0,
        deplete=True,
    )


def gamma_integral(params: ModelParams, channel: int, t_norm: float) -> complex:
    """Accumulated complex decay exponent of a channel up to t_norm = t / T."""
    out = channel_history(params, channel).gamma(t_norm)
    return complex(out) if np.ndim(out) == 0 else out


def p_integral(params: ModelParams, channel: int, t_norm: float) -> float:
    """Accumulated dimensionless gain argument of a channel up to t_norm."""
    out = channel_history(params, channel).gain(t_norm)
    return float(out) if np.ndim(out) == 0 else out


def population_difference(w0: float, gamma2_prime, t: float) -> float:
    """Exponential-depletion population difference at time t.

    gamma2_prime is either a constant rate or a vectorized callable rate of
    time; w0 is the initial value. Rates and t share units.
    """
    if not -1.0 <= w0 <= 1.0:
        raise ConfigError(f"w0 must lie in [-1, 1], got {w0}")
    if t < 0.0:
        raise ConfigError(f"t must be >= 0, got {t}")
    if callable(gamma2_prime):
        g = adaptive_quad(gamma2_prime, 0.0, t, abs_tol=1e-13, rel_tol=1e-13)
    else:
        g = float(gamma2_prime) * t
    return (1.0 + w0) * math.exp(-g) - 1.0


# -- configuration ingest ----------------------------------------------------

CONFIG_KEYS = (
    "w0",
    "optical_depth_1",
    "pump_ratio",
    "delta_big_hz",
    "delta_small_hz",
    "gamma_s_hz",
    "gamma_1_hz",
    "gamma_2_hz",
    "t1_s",
    "t2_s",
    "pulse_shape",
    "g_ratio",
)

FIG4_CONFIG: Mapping[str, object] = {
    "w0": 0.99,
    "optical_depth_1": 8.5,
    "pump_ratio": 1.56,
    "delta_big_hz": 1.2e9,
    "delta_small_hz": 1.0e9,
    "gamma_s_hz": 1.0e4,
    "gamma_1_hz": 5.746e6,
    "gamma_2_hz": 6.605e6,
    "t1_s": 1.0e-7,
    "t2_s": 1.0e-7,
    "pulse_shape": "gaussian",
    "g_ratio": 1.0,
}


def parse_config(text: str) -> dict:
    """Parse flat ``key = value`` lines; '#' starts a comment."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate config key {key!r}")
        out[key] = value
    return out


def load_config(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def build_params(config: Mapping) -> ModelParams:
    """Turn a raw config mapping into validated ModelParams.

    Accepts strings or numbers for the numeric keys; *_hz entries are plain
    frequencies and are converted to angular ones here.
    """
    missing = [k for k in CONFIG_KEYS if k not in config]
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")
    extra = [k for k in config if k not in CONFIG_KEYS]
    if extra:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(extra))}")

    def num(key):
        v = config[key]
        try:
            return float(v)
        except (TypeError, ValueError):
            raise ConfigError(f"{key}: expected a number, got {v!r}") from None

    kind = config["pulse_shape"]
    if isinstance(kind, PulseKind):
        pulse_kind = kind
    else:
        pulse_kind = PulseKind.parse(str(kind).strip())
    return ModelParams(
        w0=num("w0"),
        optical_depth_1=num("optical_depth_1"),
        pump_ratio=num("pump_ratio"),
        delta_big=TWO_PI * num("delta_big_hz"),
        delta_small=TWO_PI * num("delta_small_hz"),
        gamma_s=TWO_PI * num("gamma_s_hz"),
        gamma_1=TWO_PI * num("gamma_1_hz"),
        gamma_2=TWO_PI * num("gamma_2_hz"),
        t1=num("t1_s"),
        t2=num("t2_s"),
        pulse_kind=pulse_kind,
        g_ratio=num("g_ratio"),
    )


def fig4_params() -> ModelParams:
    return build_params(FIG4_CONFIG)
