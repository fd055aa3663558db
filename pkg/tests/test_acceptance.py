"""Acceptance suite: one test per exit criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines alongside the pytest verdicts.
"""

import numpy as np
import pytest

import pumpsim as ps
from pumpsim.model import ELEMENTARY_CHARGE

from test_model import make_params

FULL_PUMP_RATE = 1.0551508e15  # eps 0.1 at 1.6 mW, frozen in test_model


def report(criterion, detail):
    print(f"ACCEPTANCE {criterion}: PASS  [{detail}]")


def test_criterion_1_isolation_arithmetic():
    total = ps.chain_isolation(ps.builtin_chain())
    assert total == pytest.approx(97.6, abs=0.05)

    fiber = ps.required_isolation(
        ps.AttackBudget(attack_power_w=4.0, safe_power_w=1.40e-4)
    )
    assert 44.5 <= fiber <= 44.6

    raman = ps.required_isolation(
        ps.AttackBudget(attack_power_w=250.0, safe_power_w=1.40e-4)
    )
    assert raman == pytest.approx(62.5, abs=0.1)

    outcome = ps.verdict(
        ps.builtin_chain(),
        ps.AttackBudget(attack_power_w=250.0, safe_power_w=1.40e-4),
    )
    assert outcome.resilient and outcome.margin_db > 0.0
    report(1, f"total {total:.1f} dB, required {fiber:.2f}/{raman:.2f} dB, "
              f"margin {outcome.margin_db:.1f} dB")


@pytest.mark.parametrize("eta", [0.3, 0.5, 0.8])
def test_criterion_2_dqe_round_trip(eta):
    params = make_params(eta=eta)
    grid = np.arange(7e-3, 25.01e-3, 0.5e-3)
    curve = ps.light_current_curve(params, 0.0, grid)
    measured = ps.compute_dqe(curve, params, 12e-3, 25e-3)
    assert measured == pytest.approx(eta, rel=0.02)
    report(2, f"eta {eta} -> measured {measured:.4f} over the "
              "above-threshold window")


def test_criterion_3_threshold_current(params):
    i_th = ELEMENTARY_CHARGE * params.n_th / params.tau_e
    grid = np.arange(12e-3, 25.01e-3, 0.5e-3)
    knee = ps.knee_current(ps.light_current_curve(params, 0.0, grid),
                           12e-3, 25e-3)
    assert knee == pytest.approx(i_th, rel=0.05)
    assert i_th == pytest.approx(10.41e-3, rel=0.001)

    r_opt = FULL_PUMP_RATE
    knee_pumped = ps.knee_current(
        ps.light_current_curve(params, r_opt, grid), 12e-3, 25e-3
    )
    shift = knee - knee_pumped
    assert shift == pytest.approx(ELEMENTARY_CHARGE * r_opt, rel=0.05)
    report(3, f"knee {knee * 1e3:.3f} mA vs analytic {i_th * 1e3:.3f} mA, "
              f"pump shift {shift * 1e6:.1f} uA")


def test_criterion_4_equivalent_current_identity(default_scenario):
    # the exact rate the pumped run will use internally
    r_opt = ps.pump_rate(ps.PumpScenario(p_pump=1.6e-3, eps_opt=0.1),
                         default_scenario.params)
    pumped = default_scenario.sim_config(
        pump=ps.PumpScenario(p_pump=1.6e-3, eps_opt=0.1)
    )
    drive = default_scenario.drive
    shifted_drive = ps.DriveWaveform(
        i_bias=drive.i_bias + ELEMENTARY_CHARGE * r_opt,
        i_pulse=drive.i_pulse,
        pulse_width=drive.pulse_width,
        rep_rate=drive.rep_rate,
    )
    from dataclasses import replace

    shifted = replace(
        default_scenario.sim_config(), drive=shifted_drive,
        pump=ps.PumpScenario(p_pump=0.0, eps_opt=0.1),
    )
    a = ps.simulate(pumped)
    b = ps.simulate(shifted)
    rel_n = (np.abs(a.n - b.n) / np.abs(b.n)).max()
    rel_q = (np.abs(a.q - b.q) / np.abs(b.q)).max()
    assert rel_n <= 1e-9
    assert rel_q <= 1e-9
    report(4, f"max relative deviation n {rel_n:.2e}, q {rel_q:.2e}")


def test_criterion_5_step_halving(default_scenario, base_trace):
    drive = default_scenario.drive
    coarse = ps.pulse_metrics(base_trace, drive).pulse_energy
    from dataclasses import replace

    halved = replace(default_scenario.sim_config(), dt=0.05e-12)
    fine = ps.pulse_metrics(ps.simulate(halved), drive).pulse_energy
    change = abs(fine / coarse - 1.0)
    assert change < 1e-3
    report(5, f"pulse energy change {change * 100:.4f}% at dt 0.1 -> 0.05 ps")


def test_criterion_6_monotone_pump_response(base_config):
    powers = [k * 1.6e-3 / 7.0 for k in range(8)]
    rows = ps.pump_sweep(base_config, powers)
    energies = [row.norm_pulse_energy for row in rows]
    assert all(b >= a for a, b in zip(energies, energies[1:]))
    assert energies[0] == 1.0
    report(6, "normalized pulse energy "
              + " -> ".join(f"{e:.4f}" for e in energies))


def test_criterion_7_calibration_reproduction(base_config):
    target_power = 1.6e-3
    target_ratio = 1.10
    result = ps.fit_eps_opt(base_config, target_power, target_ratio)
    assert result.residual < 1e-3

    from dataclasses import replace

    baseline = ps.pulse_metrics(
        ps.simulate(replace(base_config,
                            pump=ps.PumpScenario(0.0, result.eps_opt))),
        base_config.drive,
    ).pulse_energy
    refit = ps.pulse_metrics(
        ps.simulate(replace(base_config,
                            pump=ps.PumpScenario(target_power, result.eps_opt))),
        base_config.drive,
    ).pulse_energy
    ratio = refit / baseline
    assert ratio == pytest.approx(target_ratio, abs=1e-3)
    report(7, f"fitted eps_opt {result.eps_opt:.6f} (free parameter, "
              f"reported not asserted), residual {result.residual:.2e}, "
              f"re-simulated ratio {ratio:.4f}")


def test_criterion_8_pumped_pulse_shape(base_trace, pumped_trace, drive):
    plain = ps.pulse_metrics(base_trace, drive)
    pumped = ps.pulse_metrics(pumped_trace, drive)
    assert pumped.peak_power > plain.peak_power
    assert pumped.peak_time < plain.peak_time
    report(8, f"peak {plain.peak_power * 1e3:.3f} -> "
              f"{pumped.peak_power * 1e3:.3f} mW, peak time "
              f"{plain.peak_time * 1e12:.1f} -> {pumped.peak_time * 1e12:.1f} ps")
