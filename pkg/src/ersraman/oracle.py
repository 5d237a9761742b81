"""Direct covariance propagation of the discretized model.

This is the independent route against which the closed-form intensity is
checked. Nothing from the kernel solution enters here: the cell is cut into
M slices, the equal-time second moments of the spin wave are propagated step
by step, and the output intensity is read off the slice sums. Agreement with
the analytic route is then a statement about both.

State per run (all M x M, real, symmetric; delta lines discretize to I/dz):

* seed block: normally ordered seed correlation, initialized to the seed
  density on the diagonal, no source;
* vacuum block: the anti-normal vacuum correlation, initialized to the
  commutator line and replenished by the Langevin diffusion 2*gamma_S(t);
* normal vacuum block: normally ordered noise content, initialized to zero
  and fed by the input-field term W^2 kappa env^2 (an all-ones matrix,
  because every slice sees the same input field). It never enters the
  intensity; it exists so the normally ordered correlation and the
  commutator can be reported and their invariants checked.

The output intensity couples to the anti-normal blocks only; in the shared
pump units (see the intensity module) it is

    I(t) = env(t)^2 dz^2 sum_ij (seed + vacuum)_ij.

Stepping is trapezoidal in congruence form, X -> Phi X Phi^T plus a
transformed source, which is unconditionally stable and keeps positive
blocks positive. The drift matrix is lower triangular (gain only flows
downstream), so the implicit half-step is two triangular solves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .errors import ConfigError, NumericalError
from .intensity import DEFAULT_QUAD, IntensityTrace, QuadConfig, _seed_point, _urs_point
from .params import ChannelHistory, ModelParams, PulseEnvelope, channel_history
from .spinwave import Ordering, SpinCorrelation, to_normal

MAX_STEP_FRACTION = 0.2


@dataclass(frozen=True)
class GridState:
    """Final discretized state of a propagation run.

    corr is the normally ordered correlation matrix, comm the commutator
    block that started as the vacuum line, both in per-unit-length units.
    source_totals accumulates the scalar weights injected by the two noise
    channels over the whole run (diagnostics only).
    """

    z_cells: np.ndarray
    corr: np.ndarray
    comm: np.ndarray
    t: float
    source_totals: dict

    def __post_init__(self):
        if self.z_cells.size < 32:
            raise ConfigError(f"grid state needs at least 32 cells, got {self.z_cells.size}")

    @property
    def m_cells(self) -> int:
        return self.z_cells.size

    @property
    def dz(self) -> float:
        return 1.0 / self.z_cells.size


def _resolve_history(source, pulse: Optional[PulseEnvelope]) -> ChannelHistory:
    if isinstance(source, ChannelHistory):
        if pulse is not None:
            raise ConfigError("pass either a ChannelHistory or (params, pulse), not both")
        return source
    if isinstance(source, ModelParams):
        if pulse is None:
            return channel_history(source, 2)
        return ChannelHistory(
            pulse.kind,
            source.kappa_2,
            source.gamma_s * source.t2,
            source.gamma_bar_2 * source.t2,
            w0=source.w0,
            deplete=True,
        )
    raise ConfigError(f"expected ModelParams or ChannelHistory, got {type(source).__name__}")


def _seed_density(initial: Optional[SpinCorrelation], centers: np.ndarray) -> np.ndarray:
    if initial is None:
        return np.zeros_like(centers)
    # the correlation must already be expressed in this run's readout frame
    vals = np.asarray(to_normal(initial).at(centers), dtype=float)
    if np.any(vals < 0.0) or not np.all(np.isfinite(vals)):
        raise NumericalError("seed density must be finite and nonnegative")
    return vals


def _check_block(name: str, block: np.ndarray, bound: float):
    if not np.all(np.isfinite(block)):
        raise NumericalError(f"{name} block went non-finite; reduce the time step")
    if np.max(np.abs(block)) > bound:
        raise NumericalError(f"{name} block exceeded the stability bound; reduce the time step")


def simulate_full(
    source,
    pulse: Optional[PulseEnvelope],
    initial: Optional[SpinCorrelation],
    m_cells: int,
    dt: float,
):
    """Propagate the second write and return (IntensityTrace, GridState).

    source is a ModelParams (channel 2 is simulated; a non-None pulse
    overrides its envelope kind) or a ready ChannelHistory in dimensionless
    form. dt is in units of the pulse duration and must divide 1 evenly.
    The grid needs at least 32 cells to resolve the kernels it is checked
    against.
    """
    history = _resolve_history(source, pulse)
    if not isinstance(m_cells, (int, np.integer)) or m_cells < 32:
        raise ConfigError(f"m_cells must be an integer >= 32, got {m_cells!r}")
    if not 0.0 < dt <= 0.5:
        raise ConfigError(f"dt must lie in (0, 0.5], got {dt}")
    n_steps = int(round(1.0 / dt))
    if abs(n_steps * dt - 1.0) > 1e-9:
        raise ConfigError(f"dt must divide the pulse duration evenly, got {dt}")
    rate_scale = history.gamma_s_peak + history.kappa
    if dt * rate_scale > MAX_STEP_FRACTION:
        raise NumericalError(
            f"dt * (gamma_S + kappa) = {dt * rate_scale:.3g} exceeds "
            f"{MAX_STEP_FRACTION}; the trapezoidal step would be badly resolved"
        )

    m = int(m_cells)
    dz = 1.0 / m
    centers = (np.arange(m) + 0.5) * dz
    eye = np.eye(m)
    ones = np.ones((m, m))
    # gain reaches a slice from everything strictly upstream plus half of
    # itself (midpoint rule for the integral through the slice)
    spread = dz * (np.tril(ones, -1) + 0.5 * eye)

    seed_diag = _seed_density(initial, centers)
    seeded = initial is not None and np.any(seed_diag > 0.0)
    blk_seed = np.diag(seed_diag) / dz
    blk_vac = eye / dz
    blk_norm = np.zeros((m, m))

    kappa = history.kappa
    bound = (1.0 + np.max(seed_diag, initial=0.0)) / dz * np.exp(2.0 * kappa + 4.0) * 1e3

    times = np.linspace(0.0, 1.0, n_steps + 1)
    env2 = np.asarray(history.envelope(times)) ** 2
    vac_out = np.empty(n_steps + 1)
    seed_out = np.empty(n_steps + 1)

    # with the pump off the output unit itself vanishes; report zero
    unit = 0.0 if kappa == 0.0 else 1.0

    def record(i):
        pref = unit * env2[i] * dz * dz
        vac_out[i] = pref * float(np.sum(blk_vac))
        seed_out[i] = pref * float(np.sum(blk_seed)) if seeded else 0.0

    record(0)
    injected = {"langevin": 0.0, "field_input": 0.0}
    check_every = max(1, n_steps // 16)
    h = 0.5 * dt
    for n in range(n_steps):
        t_mid = (n + 0.5) * dt
        gain_rate = float(history.gain_rate(t_mid))
        decay = float(history.decay_rate(t_mid))
        pop = float(history.population(t_mid))
        e2 = float(history.envelope(t_mid)) ** 2
        drift = gain_rate * spread - decay * eye
        b_minus = eye - h * drift
        b_plus = eye + h * drift

        src_vac = (2.0 * decay / dz) * eye
        src_norm = (pop * pop * kappa * e2) * ones
        injected["langevin"] += dt * 2.0 * decay
        injected["field_input"] += dt * pop * pop * kappa * e2

        def step(block, src):
            y = b_plus @ block @ b_plus.T + dt * src
            y = solve_triangular(b_minus, y, lower=True)
            y = solve_triangular(b_minus, y.T, lower=True).T
            return 0.5 * (y + y.T)

        blk_vac = step(blk_vac, src_vac)
        blk_norm = step(blk_norm, src_norm)
        if seeded:
            blk_seed = step(blk_seed, 0.0)
        record(n + 1)
        if (n + 1) % check_every == 0 or n == n_steps - 1:
            _check_block("vacuum", blk_vac, bound)
            _check_block("normal", blk_norm, bound)
            if seeded:
                _check_block("seed", blk_seed, bound)
            if np.any(np.diag(blk_norm) < -1e-9 / dz) or (
                seeded and np.any(np.diag(blk_seed) < -1e-9 / dz)
            ):
                raise NumericalError("normally ordered diagonal went negative")

    corr = blk_norm + (blk_seed if seeded else 0.0)
    comm = blk_vac - blk_norm
    state = GridState(
        z_cells=centers,
        corr=corr,
        comm=comm,
        t=1.0,
        source_totals=injected,
    )
    geometry = initial.geometry if initial is not None else None
    trace = IntensityTrace.from_parts(times, vac_out, seed_out, geometry=geometry)
    return trace, state


def simulate(
    source,
    pulse: Optional[PulseEnvelope],
    initial: Optional[SpinCorrelation],
    m_cells: int,
    dt: float,
) -> IntensityTrace:
    """Covariance-propagation intensity trace (see simulate_full)."""
    trace, _ = simulate_full(source, pulse, initial, m_cells, dt)
    return trace


def _analytic_reference(history, initial, sample_times, quad: QuadConfig):
    mapped = None
    if initial is not None:
        mapped = to_normal(initial)
        if mapped.ordering is not Ordering.NORMAL:
            raise NumericalError("seed correlation did not normalize")
    out = np.empty(len(sample_times))
    for i, t in enumerate(sample_times):
        val = _urs_point(history, float(t), quad)
        if mapped is not None:
            val += _seed_point(history, mapped, float(t), quad)
        out[i] = val
    return out


def compare_with_analytic(
    source,
    pulse: Optional[PulseEnvelope],
    initial: Optional[SpinCorrelation],
    m_cells: int,
    dt: float,
    *,
    n_samples: int = 20,
    quad: QuadConfig = DEFAULT_QUAD,
) -> dict:
    """Run the oracle and measure its deviation from the closed form.

    Deviation is the sup over sample times of |oracle - analytic| divided by
    the sup of the analytic trace (so a vanishing envelope cannot blow up
    the measure). Sample times are the n_samples points k/n_samples, which
    must land on oracle steps.
    """
    history = _resolve_history(source, pulse)
    trace, _ = simulate_full(history, None, initial, m_cells, dt)
    n_steps = trace.times.size - 1
    if n_steps % n_samples != 0:
        raise ConfigError(f"n_samples={n_samples} must divide the {n_steps} oracle steps")
    stride = n_steps // n_samples
    idx = np.arange(1, n_samples + 1) * stride
    sample_times = trace.times[idx]
    analytic = _analytic_reference(history, initial, sample_times, quad)
    scale = float(np.max(np.abs(analytic)))
    if scale <= 0.0:
        # decoupled pump: both routes must report exactly nothing
        dev = 0.0 if float(np.max(np.abs(trace.total[idx]))) == 0.0 else np.inf
    else:
        dev = float(np.max(np.abs(trace.total[idx] - analytic)) / scale)
    return {
        "m_cells": int(m_cells),
        "dt": float(dt),
        "max_rel_dev": dev,
        "sample_times": sample_times,
        "oracle": trace.total[idx],
        "analytic": analytic,
    }


def convergence_study(
    source,
    pulse: Optional[PulseEnvelope],
    initial: Optional[SpinCorrelation],
    m_list: Sequence[int],
    dt_list: Sequence[float],
    *,
    n_samples: int = 20,
    quad: QuadConfig = DEFAULT_QUAD,
) -> dict:
    """Deviation from the closed form under simultaneous grid refinement.

    m_list and dt_list are zipped into runs, at least three of them; each
    halving of both spacings should divide the deviation by at least two
    (first order) and in practice by about four. Returns the per-run
    deviations, the pairwise observed orders, and their minimum.
    """
    if len(m_list) != len(dt_list) or len(m_list) < 3:
        raise ConfigError("m_list and dt_list must zip into at least three runs")
    history = _resolve_history(source, pulse)
    runs = [
        compare_with_analytic(
            history, None, initial, m, dt, n_samples=n_samples, quad=quad
        )
        for m, dt in zip(m_list, dt_list)
    ]
    devs = [r["max_rel_dev"] for r in runs]
    orders = [
        float(np.log2(devs[i] / devs[i + 1])) if devs[i + 1] > 0.0 else np.inf
        for i in range(len(devs) - 1)
    ]
    return {
        "m_cells": [r["m_cells"] for r in runs],
        "dt": [r["dt"] for r in runs],
        "max_rel_dev": devs,
        "orders": orders,
        "order": min(orders) if orders else np.nan,
        "monotone": all(devs[i + 1] < devs[i] for i in range(len(devs) - 1)),
    }
