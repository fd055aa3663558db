"""Time integration of the pumped rate equations over a drive waveform.

The integrator is a classical fixed-step 4th-order scheme: deterministic,
reproducible to the bit, and fast enough in plain Python because the system
has only two state variables.  Steady states are found algebraically (nested
root bracketing) with long time integration as the fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, SimulationError
from .model import (
    ELEMENTARY_CHARGE,
    DriveWaveform,
    LaserParams,
    LaserState,
    PumpScenario,
    derivatives,
    gain,
    photon_to_power,
    pump_rate,
)

__all__ = [
    "SimConfig",
    "SimTrace",
    "drive_current",
    "steady_state",
    "simulate",
    "default_warmup",
    "standard_config",
]

_BRENTQ_RTOL = 4.0 * np.finfo(float).eps


@dataclass(frozen=True)
class SimConfig:
    """Everything a simulation run needs: physics, drive, pump, numerics."""

    params: LaserParams
    drive: DriveWaveform
    pump: PumpScenario
    t_total: float  # s
    dt: float  # s, integration step
    warmup: float = 0.0  # s discarded from the output
    sample_stride: int = 1  # output decimation factor

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.dt > self.params.tau_ph / 10.0:
            raise ValueError(
                f"dt={self.dt} does not resolve the photon lifetime; "
                f"need dt <= tau_ph/10 = {self.params.tau_ph / 10.0}"
            )
        if self.warmup < 0.0:
            raise ValueError(f"warmup must be nonnegative, got {self.warmup}")
        if self.t_total <= self.warmup:
            raise ValueError(
                f"t_total={self.t_total} must exceed warmup={self.warmup}"
            )
        if not isinstance(self.sample_stride, int) or self.sample_stride < 1:
            raise ValueError(
                f"sample_stride must be a positive integer, got {self.sample_stride}"
            )


@dataclass(frozen=True)
class SimTrace:
    """Uniformly sampled carrier number, photon number and output power.

    ``clamp_count`` reports how many tiny negative excursions the integrator
    zeroed; it should be 0 at sane step sizes.
    """

    t: np.ndarray
    n: np.ndarray
    q: np.ndarray
    p: np.ndarray
    clamp_count: int = 0

    def __post_init__(self):
        if not (len(self.t) == len(self.n) == len(self.q) == len(self.p)):
            raise ValueError("trace arrays must have equal length")
        if len(self.t) >= 2:
            steps = np.diff(self.t)
            if steps.min() <= 0.0:
                raise ValueError("trace times must be strictly increasing")
            if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
                raise ValueError("trace times must be uniformly spaced")
        for name in ("n", "q", "p"):
            if getattr(self, name).min(initial=0.0) < 0.0:
                raise ValueError(f"trace {name} must be nonnegative")

    @property
    def sample_spacing(self) -> float:
        if len(self.t) < 2:
            raise ValueError("need at least two samples for a spacing")
        return float(self.t[1] - self.t[0])

    def to_csv(self, path) -> None:
        """Write the trace as CSV with 12 significant digits per value."""
        data = np.column_stack([self.t, self.n, self.q, self.p])
        with open(path, "w", newline="") as fh:
            np.savetxt(
                fh, data, fmt="%.12g", delimiter=",",
                header="t_s,n,q,p_w", comments="",
            )


def drive_current(t: float, drive: DriveWaveform) -> float:
    """Instantaneous drive current at time t >= 0; pulse-on starts each period."""
    if math.fmod(t, drive.period) < drive.pulse_width:
        return drive.i_bias + drive.i_pulse
    return drive.i_bias


def _photon_equilibrium(n: float, params: LaserParams) -> float:
    """Photon number where the field equation balances at fixed carrier number.

    Solves q*(1 - G(n, q)) = c_sp*n*tau_ph/tau_e, whose left side is strictly
    increasing wherever it is positive, so the root is unique.
    """
    src = params.c_sp * n / params.tau_e * params.tau_ph
    x = (n - params.n_0) / (params.n_th - params.n_0)
    if src == 0.0:
        if x <= 1.0:
            return 0.0
        if params.gamma_q == 0.0:
            # No spontaneous seed and no compression: no finite equilibrium
            # above threshold.  Callers fall back to time integration.
            raise ConvergenceError(
                "no algebraic photon equilibrium for c_sp=0, gamma_q=0 above "
                "threshold"
            )
        return (x * x - 1.0) / (2.0 * params.gamma_q)

    def excess(q: float) -> float:
        return q * (1.0 - gain(LaserState(n=n, q=q), params)) - src

    q_hi = src + 1.0
    for _ in range(400):
        if excess(q_hi) > 0.0:
            break
        q_hi *= 10.0
    else:
        raise ConvergenceError("failed to bracket the photon equilibrium")
    return brentq(excess, 0.0, q_hi, xtol=1e-30, rtol=_BRENTQ_RTOL, maxiter=200)


def _derivatives_ok(state: LaserState, i_dc: float, r_opt: float,
                    params: LaserParams) -> tuple[bool, float]:
    dn, dq = derivatives(state, i_dc, r_opt, params)
    bound = 1e-6 * max(state.n, 1.0) / params.tau_e
    residual = max(abs(dn), abs(dq))
    return residual <= bound, residual


def _settle(params: LaserParams, i_dc: float, r_opt: float,
            n: float, q: float) -> LaserState:
    """Fallback: integrate the system until the derivatives vanish."""
    dt = params.tau_ph / 10.0
    budget = int(2000.0 * params.tau_e / dt)
    chunk = 10000
    done = 0
    residual = math.inf
    while done < budget:
        for _ in range(min(chunk, budget - done)):
            state = LaserState(n=max(n, 0.0), q=max(q, 0.0))
            k1n, k1q = derivatives(state, i_dc, r_opt, params)
            n += dt * k1n
            q += dt * k1q
        done += chunk
        state = LaserState(n=max(n, 0.0), q=max(q, 0.0))
        ok, residual = _derivatives_ok(state, i_dc, r_opt, params)
        if ok:
            return state
    raise ConvergenceError(
        f"steady state did not converge after {budget} fallback steps "
        f"(residual {residual:.3e} 1/s)",
        residual=residual,
    )


def steady_state(params: LaserParams, i_dc: float, r_opt: float = 0.0) -> LaserState:
    """Equilibrium of the rate equations under dc current and cw pumping.

    Solves the two coupled balance equations by bisection-style bracketing:
    an inner solve gives the photon number at fixed carrier number, and the
    carrier balance residual is then driven to zero.  Falls back to time
    integration if the algebraic route fails, and raises ``ConvergenceError``
    carrying the residual if neither converges.
    """
    if i_dc < 0.0:
        raise ValueError(f"i_dc must be nonnegative, got {i_dc}")
    if r_opt < 0.0:
        raise ValueError(f"r_opt must be nonnegative, got {r_opt}")
    inj = i_dc / ELEMENTARY_CHARGE + r_opt
    if inj == 0.0:
        return LaserState(n=0.0, q=0.0)

    def carrier_residual(n: float) -> float:
        q = _photon_equilibrium(n, params)
        g = gain(LaserState(n=n, q=q), params)
        return inj - n / params.tau_e - q * g / (params.gamma_conf * params.tau_ph)

    try:
        n_hi = inj * params.tau_e + params.n_th
        for _ in range(200):
            if carrier_residual(n_hi) < 0.0:
                break
            n_hi *= 2.0
        else:
            raise ConvergenceError("failed to bracket the carrier equilibrium")
        n_star = brentq(
            carrier_residual, 0.0, n_hi,
            xtol=1e-24, rtol=_BRENTQ_RTOL, maxiter=300,
        )
        state = LaserState(n=n_star, q=_photon_equilibrium(n_star, params))
    except ConvergenceError:
        state = None

    if state is not None:
        ok, _ = _derivatives_ok(state, i_dc, r_opt, params)
        if ok:
            return state
        n0, q0 = state.n, state.q
    else:
        n0, q0 = min(inj * params.tau_e, params.n_th), 1.0
    return _settle(params, i_dc, r_opt, n0, q0)


def simulate(config: SimConfig) -> SimTrace:
    """Integrate the rate equations over the configured window.

    The initial state is the steady state at the bias current with pumping
    already on.  Output samples run from the end of the warmup interval to
    ``t_total`` at a spacing of ``dt * sample_stride``.  Identical configs
    produce bit-identical traces.
    """
    params = config.params
    drive = config.drive
    r_opt = pump_rate(config.pump, params)
    init = steady_state(params, drive.i_bias, r_opt)

    dt = config.dt
    n_steps = int(round(config.t_total / dt))
    warm_steps = min(int(math.ceil(config.warmup / dt - 1e-9)), n_steps)
    stride = config.sample_stride
    n_out = (n_steps - warm_steps) // stride + 1
    out_t = np.empty(n_out)
    out_n = np.empty(n_out)
    out_q = np.empty(n_out)

    # Hoist everything the inner loop touches; the stage arithmetic mirrors
    # model.derivatives exactly so both paths round identically.
    inv_rate = drive.period
    width = drive.pulse_width
    i_bias = drive.i_bias
    i_on = drive.i_bias + drive.i_pulse
    e = ELEMENTARY_CHARGE
    tau_e = params.tau_e
    tau_ph = params.tau_ph
    gtp = params.gamma_conf * params.tau_ph
    n_0 = params.n_0
    denom = params.n_th - params.n_0
    c_sp = params.c_sp
    two_gq = 2.0 * params.gamma_q
    fmod = math.fmod
    sqrt = math.sqrt
    isfinite = math.isfinite

    n = init.n
    q = init.q
    clamps = 0
    j = 0
    for k in range(n_steps + 1):
        if k >= warm_steps and (k - warm_steps) % stride == 0:
            out_t[j] = k * dt
            out_n[j] = n
            out_q[j] = q
            j += 1
        if k == n_steps:
            break
        t = k * dt
        i0 = i_on if fmod(t, inv_rate) < width else i_bias
        im = i_on if fmod(t + 0.5 * dt, inv_rate) < width else i_bias
        i1 = i_on if fmod(t + dt, inv_rate) < width else i_bias

        g = (n - n_0) / denom / sqrt(1.0 + two_gq * q)
        k1n = i0 / e + r_opt - n / tau_e - q * g / gtp
        k1q = (g - 1.0) * q / tau_ph + c_sp * n / tau_e
        na = n + 0.5 * dt * k1n
        qa = q + 0.5 * dt * k1q
        g = (na - n_0) / denom / sqrt(1.0 + two_gq * qa)
        k2n = im / e + r_opt - na / tau_e - qa * g / gtp
        k2q = (g - 1.0) * qa / tau_ph + c_sp * na / tau_e
        nb = n + 0.5 * dt * k2n
        qb = q + 0.5 * dt * k2q
        g = (nb - n_0) / denom / sqrt(1.0 + two_gq * qb)
        k3n = im / e + r_opt - nb / tau_e - qb * g / gtp
        k3q = (g - 1.0) * qb / tau_ph + c_sp * nb / tau_e
        nc = n + dt * k3n
        qc = q + dt * k3q
        g = (nc - n_0) / denom / sqrt(1.0 + two_gq * qc)
        k4n = i1 / e + r_opt - nc / tau_e - qc * g / gtp
        k4q = (g - 1.0) * qc / tau_ph + c_sp * nc / tau_e

        n += dt * (k1n + 2.0 * k2n + 2.0 * k3n + k4n) / 6.0
        q += dt * (k1q + 2.0 * k2q + 2.0 * k3q + k4q) / 6.0
        if not (isfinite(n) and isfinite(q)):
            raise SimulationError(
                f"state became non-finite at t={(k + 1) * dt:.6e} s",
                t_failure=(k + 1) * dt,
            )
        if n < 0.0:
            n = 0.0
            clamps += 1
        if q < 0.0:
            q = 0.0
            clamps += 1

    return SimTrace(
        t=out_t,
        n=out_n,
        q=out_q,
        p=photon_to_power(out_q, params),
        clamp_count=clamps,
    )


def default_warmup(params: LaserParams, drive: DriveWaveform) -> float:
    """Warmup long enough to forget the initial condition: 20 drive periods
    or 10 carrier lifetimes, whichever is larger."""
    return max(20.0 * drive.period, 10.0 * params.tau_e)


def standard_config(
    params: LaserParams,
    drive: DriveWaveform,
    pump: PumpScenario,
    *,
    measure_periods: int = 10,
    dt: float = 1e-13,
    sample_stride: int = 1,
    warmup: float | None = None,
) -> SimConfig:
    """A SimConfig that warms up by the default rule and then measures
    an integer number of drive periods."""
    if measure_periods < 1:
        raise ValueError(f"measure_periods must be >= 1, got {measure_periods}")
    if warmup is None:
        warmup = default_warmup(params, drive)
    return SimConfig(
        params=params,
        drive=drive,
        pump=pump,
        t_total=warmup + measure_periods * drive.period,
        dt=dt,
        warmup=warmup,
        sample_stride=sample_stride,
    )
