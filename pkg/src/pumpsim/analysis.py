"""Observables extracted from simulations: light-current curves, differential
quantum efficiency, per-pulse energy metrics, pump-power sweeps, and the
calibration of the unknown pumping efficiency against a measured target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import SimConfig, SimTrace, simulate, steady_state
from .errors import FitError, NoPulseError
from .model import (
    ELEMENTARY_CHARGE,
    DriveWaveform,
    LaserParams,
    PumpScenario,
    photon_to_power,
)

__all__ = [
    "LightCurrentCurve",
    "PulseMetrics",
    "SweepRow",
    "FitResult",
    "light_current_curve",
    "compute_dqe",
    "knee_current",
    "pulse_metrics",
    "pump_sweep",
    "fit_eps_opt",
    "write_sweep_csv",
    "write_fit_csv",
]


@dataclass(frozen=True)
class LightCurrentCurve:
    """Steady-state output power versus dc drive current."""

    currents: np.ndarray  # A, strictly increasing
    powers: np.ndarray  # W

    def __post_init__(self):
        if len(self.currents) != len(self.powers):
            raise ValueError("currents and powers must have equal length")
        if len(self.currents) >= 2 and np.diff(self.currents).min() <= 0.0:
            raise ValueError("currents must be strictly increasing")
        if len(self.powers) and self.powers.min() < 0.0:
            raise ValueError("powers must be nonnegative")

    def to_csv(self, path) -> None:
        data = np.column_stack([self.currents, self.powers])
        with open(path, "w", newline="") as fh:
            np.savetxt(fh, data, fmt="%.12g", delimiter=",",
                       header="i_a,p_w", comments="")


@dataclass(frozen=True)
class PulseMetrics:
    """Per-period pulse figures, averaged over all complete periods."""

    pulse_energy: float  # J per period, within the detected pulse window
    avg_power: float  # W over whole periods
    peak_power: float  # W
    peak_time: float  # s from period start


@dataclass(frozen=True)
class SweepRow:
    p_pump_w: float
    norm_pulse_energy: float
    norm_avg_power: float


@dataclass(frozen=True)
class FitResult:
    eps_opt: float
    residual: float  # |achieved ratio - target ratio|
    bracket_lo: float
    bracket_hi: float
    evaluations: int


def light_current_curve(
    params: LaserParams, r_opt: float, i_grid
) -> LightCurrentCurve:
    """Steady-state output power at each grid current, with cw pumping r_opt."""
    i_grid = np.asarray(i_grid, dtype=float)
    if i_grid.ndim != 1 or len(i_grid) == 0:
        raise ValueError("i_grid must be a nonempty 1-D sequence of currents")
    if i_grid.min() < 0.0:
        raise ValueError("i_grid currents must be nonnegative")
    if len(i_grid) >= 2 and np.diff(i_grid).min() <= 0.0:
        raise ValueError("i_grid must be strictly increasing")
    powers = np.array(
        [photon_to_power(steady_state(params, i, r_opt).q, params) for i in i_grid]
    )
    return LightCurrentCurve(currents=i_grid, powers=powers)


def _window_points(curve: LightCurrentCurve, fit_lo: float, fit_hi: float):
    mask = (curve.currents >= fit_lo) & (curve.currents <= fit_hi)
    if mask.sum() < 3:
        raise ValueError(
            f"window [{fit_lo}, {fit_hi}] A contains only {int(mask.sum())} "
            "curve points; need at least 3 for a slope fit"
        )
    return curve.currents[mask], curve.powers[mask]


def compute_dqe(
    curve: LightCurrentCurve, params: LaserParams, fit_lo: float, fit_hi: float
) -> float:
    """Differential quantum efficiency from the power-current slope.

    The slope is the ordinary least-squares fit over curve points inside
    [fit_lo, fit_hi]; the efficiency is 2e/(photon energy) times that slope.
    """
    i_win, p_win = _window_points(curve, fit_lo, fit_hi)
    slope = np.polyfit(i_win, p_win, 1)[0]
    return 2.0 * ELEMENTARY_CHARGE * slope / params.e_photon_out


def knee_current(
    curve: LightCurrentCurve, fit_lo: float, fit_hi: float
) -> float:
    """Threshold knee: zero crossing of the line fitted above threshold."""
    i_win, p_win = _window_points(curve, fit_lo, fit_hi)
    slope, intercept = np.polyfit(i_win, p_win, 1)
    if slope <= 0.0:
        raise ValueError("window slope is not positive; fit above threshold")
    return -intercept / slope


_trapezoid = getattr(np, "trapezoid", None) or np.trapz


def _complete_period_bounds(
    t: np.ndarray, period: float
) -> list[tuple[int, int, int]]:
    """(period index, first sample, boundary sample) for each complete period."""
    t0 = float(t[0])
    h = float(t[1] - t[0])

    def at_or_after(x: float) -> int:
        return int(math.ceil((x - t0) / h - 1e-9))

    bounds = []
    j = int(math.ceil(t0 / period - 1e-9))
    while True:
        a = at_or_after(j * period)
        b = at_or_after((j + 1) * period)
        if b > len(t) - 1:
            break
        bounds.append((j, a, b))
        j += 1
    return bounds


def _window_energy(seg: np.ndarray, h: float, threshold: float) -> float:
    """Trapezoidal energy over every run of samples at or above threshold."""
    mask = seg >= threshold
    edges = np.flatnonzero(np.diff(mask.astype(np.int8)))
    starts = [0] if mask[0] else []
    starts += list(edges[~mask[edges]] + 1)
    ends = list(edges[mask[edges]])
    ends += [len(seg) - 1] if mask[-1] else []
    total = 0.0
    for lo, hi in zip(starts, ends):
        if hi > lo:
            total += float(_trapezoid(seg[lo:hi + 1], dx=h))
    return total


def pulse_metrics(trace: SimTrace, drive: DriveWaveform) -> PulseMetrics:
    """Measure the pulse train: energy, average power, peak height and timing.

    The pulse window of a period is the set of samples at or above 10% of
    that period's peak power, which separates pulse energy from the
    inter-pulse spontaneous floor.  The trace must span at least 5 complete
    drive periods.
    """
    if len(trace.t) < 2:
        raise ValueError("trace too short for pulse metrics")
    period = drive.period
    h = trace.sample_spacing
    bounds = _complete_period_bounds(trace.t, period)
    if len(bounds) < 5:
        raise ValueError(
            f"trace spans only {len(bounds)} complete drive periods; need >= 5"
        )

    energies = []
    peaks = []
    peak_times = []
    for j, a, b in bounds:
        seg = trace.p[a:b + 1]
        peak = float(seg.max())
        if peak <= 0.0:
            raise NoPulseError("no pulse detected: period contains no power")
        m = int(seg.argmax())
        energies.append(_window_energy(seg, h, 0.1 * peak))
        peaks.append(peak)
        peak_times.append(trace.t[a + m] - j * period)

    avg_power = float(trace.p[bounds[0][1]:bounds[-1][2]].mean())
    metrics = PulseMetrics(
        pulse_energy=float(np.mean(energies)),
        avg_power=avg_power,
        peak_power=float(np.mean(peaks)),
        peak_time=float(np.mean(peak_times)),
    )
    if metrics.pulse_energy > metrics.avg_power * period * (1.0 + 1e-9):
        raise NoPulseError(
            "pulse window energy exceeds the per-period total; "
            "trace and drive are inconsistent"
        )
    return metrics


def _metrics_at_power(args: tuple[SimConfig, float]) -> tuple[float, float]:
    """Worker: per-period pulse energy and average power at one pump power."""
    base, p_pump = args
    config = replace(base, pump=PumpScenario(p_pump=p_pump, eps_opt=base.pump.eps_opt))
    metrics = pulse_metrics(simulate(config), base.drive)
    return metrics.pulse_energy, metrics.avg_power


def pump_sweep(base: SimConfig, powers, jobs: int = 1) -> list[SweepRow]:
    """Simulate each pump power and normalize against the unpumped run.

    Rows are independent simulations sharing every numeric control with the
    baseline, so discretization bias cancels in the ratios.  ``jobs`` > 1
    distributes rows over a process pool; ordering follows the input.
    """
    powers = [float(p) for p in powers]
    if any(p < 0.0 for p in powers):
        raise ValueError("pump powers must be nonnegative")
    if any(b < a for a, b in zip(powers, powers[1:])):
        raise ValueError("pump powers must be sorted ascending")

    e_base, p_base = _metrics_at_power((base, 0.0))
    todo = [(base, p) for p in powers if p != 0.0]
    if jobs > 1 and len(todo) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_metrics_at_power, todo))
    else:
        results = [_metrics_at_power(item) for item in todo]

    rows = []
    it = iter(results)
    for p in powers:
        if p == 0.0:
            rows.append(SweepRow(p_pump_w=0.0, norm_pulse_energy=1.0,
                                 norm_avg_power=1.0))
        else:
            e, pw = next(it)
            rows.append(SweepRow(p_pump_w=p, norm_pulse_energy=e / e_base,
                                 norm_avg_power=pw / p_base))
    return rows


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def fit_eps_opt(
    base: SimConfig,
    target_p_pump: float,
    target_ratio: float,
    *,
    eps_lo: float = 1e-6,
    eps_hi: float = 1.0,
    ratio_tol: float = 1e-3,
    log_bracket_tol: float = 1e-4,
) -> FitResult:
    """Calibrate the pumping efficiency to a measured pulse-energy ratio.

    Golden-section search over log10(eps_opt) minimizes the distance between
    the simulated normalized pulse energy at ``target_p_pump`` and
    ``target_ratio``.  The search space is log spaced because plausible
    efficiencies span decades.  Raises ``FitError`` when the target cannot be
    reached inside [eps_lo, eps_hi].
    """
    if target_ratio <= 1.0:
        raise ValueError(f"target_ratio must exceed 1, got {target_ratio}")
    if target_p_pump <= 0.0:
        raise ValueError(f"target_p_pump must be positive, got {target_p_pump}")
    if not 0.0 < eps_lo < eps_hi <= 1.0:
        raise ValueError(f"need 0 < eps_lo < eps_hi <= 1, got [{eps_lo}, {eps_hi}]")

    e_base, _ = _metrics_at_power((base, 0.0))
    cache: dict[float, float] = {}

    def ratio(eps: float) -> float:
        if eps not in cache:
            config = replace(
                base, pump=PumpScenario(p_pump=target_p_pump, eps_opt=eps)
            )
            cache[eps] = pulse_metrics(simulate(config), base.drive).pulse_energy / e_base
        return cache[eps]

    r_hi = ratio(eps_hi)
    if r_hi < target_ratio:
        raise FitError(
            f"target ratio {target_ratio} unreachable: maximum achieved "
            f"{r_hi:.6f} at eps_opt={eps_hi}",
            achieved=r_hi,
        )
    r_lo = ratio(eps_lo)
    if r_lo > target_ratio:
        raise FitError(
            f"target ratio {target_ratio} below the ratio {r_lo:.6f} already "
            f"reached at eps_opt={eps_lo}",
            achieved=r_lo,
        )

    def objective(x: float) -> float:
        return abs(ratio(10.0 ** x) - target_ratio)

    a, b = math.log10(eps_lo), math.log10(eps_hi)
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = objective(c), objective(d)
    while b - a > log_bracket_tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = objective(d)

    eps_best = min(cache, key=lambda eps: abs(cache[eps] - target_ratio))
    residual = abs(cache[eps_best] - target_ratio)
    if residual >= ratio_tol:
        raise FitError(
            f"fit stalled: best residual {residual:.3e} at eps_opt="
            f"{eps_best:.6g} exceeds tolerance {ratio_tol}",
            achieved=cache[eps_best],
        )
    return FitResult(
        eps_opt=eps_best,
        residual=residual,
        bracket_lo=10.0 ** a,
        bracket_hi=10.0 ** b,
        evaluations=len(cache),
    )


def write_sweep_csv(rows: list[SweepRow], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("p_pump_w,norm_pulse_energy,norm_avg_power\n")
        for row in rows:
            fh.write(
                f"{row.p_pump_w:.12g},{row.norm_pulse_energy:.12g},"
                f"{row.norm_avg_power:.12g}\n"
            )


def write_fit_csv(result: FitResult, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("eps_opt,residual,bracket_lo,bracket_hi\n")
        fh.write(
            f"{result.eps_opt:.12g},{result.residual:.12g},"
            f"{result.bracket_lo:.12g},{result.bracket_hi:.12g}\n"
        )
