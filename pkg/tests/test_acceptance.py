"""Acceptance gate: one test per release criterion, one printed verdict line each.

Every test prints "criterion NN <name>: PASS/FAIL (<detail>)" on the real
stdout (bypassing capture) and then asserts, so a plain pytest run shows the
full scoreboard. Heavy integrations come from the shared session fixture;
everything else is recomputed here at the stated tolerances.
"""

import math

import numpy as np
import pytest

from polarpark import (ClassKFunction, ControlLaw, ErrorNorm, GainShape,
                       LawConstraintError, LawVariant, PlotKind, PolarState,
                       Verdict, check_trajectory, comparison_envelope_check,
                       csv_text, error_norm, gain_margin, integrate,
                       integrate_log_timescale, load_preset,
                       lyapunov_slope_stats, run_scenario, run_sweep,
                       svg_text, timelike_decrease_check,
                       velocity_for_omega_limit)
from polarpark.scenario import parse_scenario


def _verdict(capsys, num: int, name: str, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"criterion {num:02d} {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num:02d} {name}: {detail}"


def _check(report, name):
    for c in report.checks:
        if c.name == name:
            return c
    raise AssertionError(f"no check named {name!r} in {[c.name for c in report.checks]}")


def test_criterion_01_exact_envelopes(preset_runs, capsys):
    # line bound on rho, squared-error envelope, steering-rate envelope:
    # sample-wise with slack <= 1e-6 abs + 1e-4 rel on every fig1 run
    worst = -math.inf
    ok = True
    for _, traj in preset_runs["fig1"]:
        report = check_trajectory(traj)
        for name in ("rho_line_bound", "error_sq_envelope", "steering_envelope"):
            c = _check(report, name)
            ok = ok and c.passed
            worst = max(worst, c.worst_slack)
        ok = ok and report.overall
    _verdict(capsys, 1, "exact_envelopes", ok,
             f"3 runs, worst signed slack {worst:.3e}")


def test_criterion_02_lyapunov_slope(preset_runs, capsys):
    # decay inequality at >= 99.9% of interior samples; any violation must
    # shrink at least 4x when the step is halved (discretization, not model)
    min_frac = 1.0
    worst_pair = (0.0, 0.0)
    ok = True
    for sc, traj in preset_runs["fig1"]:
        stats = lyapunov_slope_stats(traj)
        half = lyapunov_slope_stats(run_scenario(sc, step=5e-4))
        ok = ok and stats.fraction_ok >= 0.999
        ok = ok and (stats.max_raw_violation == 0.0
                     or half.max_raw_violation <= stats.max_raw_violation / 4.0)
        min_frac = min(min_frac, stats.fraction_ok)
        if stats.max_raw_violation > worst_pair[0]:
            worst_pair = (stats.max_raw_violation, half.max_raw_violation)
    _verdict(capsys, 2, "lyapunov_slope", ok,
             f"min fraction_ok {min_frac:.6f}, worst violation "
             f"{worst_pair[0]:.3e} -> {worst_pair[1]:.3e} at half step")


def test_criterion_03_lemma_harnesses(preset_runs, capsys):
    # 200 hypothesis-satisfying and 200 hypothesis-violating synthetic traces
    # through the comparison harness, then the timelike bound with the
    # envelope-derived class-K gate on the fig1 runs
    rng = np.random.default_rng(20260816)
    false_flag = false_pass = 0
    worst_excess = math.inf
    for shape in (GainShape.LINEAR_GAIN, GainShape.QUADRATIC_GAIN):
        for _ in range(100):
            a = rng.uniform(0.5, 3.0)
            v0 = rng.uniform(0.5, 4.0)
            q, r = rng.uniform(0.0, 2.0, size=2)
            npts = int(rng.integers(400, 601))
            rho = np.linspace(1.0, 0.2 if shape is GainShape.LINEAR_GAIN else 0.3, npts)
            s = rho / rho[0]
            u = q * s + r * s * s
            if shape is GainShape.LINEAR_GAIN:
                vals = s ** a * np.exp(u - u[0])
            else:
                vals = np.exp(-a / rho + a / rho[0]) * np.exp(u - u[0])
            out = comparison_envelope_check(np.column_stack([rho, v0 * vals]), a, shape)
            if out.verdict is not Verdict.PASS:
                false_flag += 1
            eta = rng.uniform(0.3, 0.8)
            if shape is GainShape.LINEAR_GAIN:
                bad = v0 * s ** (eta * a)
            else:
                bad = v0 * np.exp(-eta * a / rho + eta * a / rho[0])
            out2 = comparison_envelope_check(np.column_stack([rho, bad]), a, shape)
            if out2.verdict is not Verdict.HYPOTHESIS_NOT_MET:
                false_pass += 1
            else:
                worst_excess = min(worst_excess, out2.worst_slack)

    timelike_ok = True
    for sc, traj in preset_runs["fig1"]:
        law = traj.law
        m = gain_margin(law.c1)
        b0 = error_norm(sc.initial.delta, sc.initial.gamma, ErrorNorm.EUCLID)
        alpha = ClassKFunction.power(m * m * b0 * b0, 2.0 * min(law.c1, law.c2))
        timelike_ok = timelike_ok and bool(timelike_decrease_check(traj, alpha))

    ok = false_flag == 0 and false_pass == 0 and timelike_ok
    _verdict(capsys, 3, "lemma_harnesses", ok,
             f"0+{false_flag} false flags, 0+{false_pass} false passes over 400 "
             f"traces, smallest flagged excess {worst_excess:.3f}, "
             f"timelike bound {'holds' if timelike_ok else 'broken'} on 3 runs")


def test_criterion_04_smooth_law_fades(preset_runs, capsys):
    # steering rate must die out before arrival and both angles must be
    # nearly parked at the cutoff shell
    worst_ratio = 0.0
    worst_angle = 0.0
    ok = True
    for _, traj in preset_runs["fig2"]:
        report = check_trajectory(traj)
        ok = ok and _check(report, "steering_fades").passed
        ok = ok and _check(report, "angles_small_at_cutoff").passed
        arr = traj.arrays()
        omega = arr["omega"]
        ratio = abs(omega[-2]) / np.max(np.abs(omega))   # [-1] is the parked sample
        end = traj.samples[-1].state
        worst_ratio = max(worst_ratio, float(ratio))
        worst_angle = max(worst_angle, abs(end.delta), abs(end.gamma))
        ok = ok and ratio < 0.01 and abs(end.delta) < 0.05 and abs(end.gamma) < 0.05
    _verdict(capsys, 4, "smooth_law_fades", ok,
             f"last/peak steering {worst_ratio:.4f} < 0.01, "
             f"worst cutoff angle {worst_angle:.4f} < 0.05 rad")


def _front_crossings(traj):
    arr = traj.arrays()
    x = -arr["rho"] * np.cos(arr["delta"])
    y = -arr["rho"] * np.sin(arr["delta"])
    flips = y[:-1] * y[1:] < 0.0
    w = np.where(flips, y[:-1] / np.where(flips, y[:-1] - y[1:], 1.0), 0.0)
    x_cross = x[:-1] + w * (x[1:] - x[:-1])
    return int(np.count_nonzero(flips & (x_cross > 0.0)))


def test_criterion_05_front_halfline_contrast(preset_runs, capsys):
    # the barrier-shaped law must never touch the half-line {y=0, x>0};
    # the plain smooth law from the same start must cross it
    runs = {traj.law.variant: traj for _, traj in preset_runs["fig3"]}
    guarded = runs[LawVariant.NOFRONT]
    baseline = runs[LawVariant.SMOOTH]

    report = check_trajectory(guarded)
    delta = guarded.arrays()["delta"]
    margin = math.pi - float(np.max(np.abs(delta)))
    guarded_ok = (_check(report, "front_halfline_clear").passed
                  and _check(report, "delta_in_range").passed
                  and margin > 0.0 and _front_crossings(guarded) == 0)
    crossings = _front_crossings(baseline)
    ok = guarded_ok and crossings >= 1
    _verdict(capsys, 5, "front_halfline_contrast", ok,
             f"guarded run clears the half-line by {margin:.3f} rad, "
             f"baseline crosses it {crossings}x")


def test_criterion_06_decel_speed_envelopes(preset_runs, capsys):
    # commanded speed and range under their power-of-(1 - t/t1) envelopes,
    # speed monotone and < 1e-3 at the cutoff shell
    worst_v = 0.0
    ok = True
    for _, traj in preset_runs["fig4"]:
        report = check_trajectory(traj)
        for name in ("rho_power_bound", "speed_envelope", "speed_monotone"):
            ok = ok and _check(report, name).passed
        v_end = float(traj.arrays()["v"][-2])   # last driven sample
        worst_v = max(worst_v, v_end)
        ok = ok and v_end < 1e-3
    _verdict(capsys, 6, "decel_speed_envelopes", ok,
             f"3 runs, final commanded speed {worst_v:.2e} < 1e-3")


def test_criterion_07_curb_respecting_runs(preset_runs, capsys):
    # bearing never leaves the curb side (delta >= 0 up to guard dust), both
    # in the preset and across a bearing sweep; undersized c1 must be
    # rejected before any integration happens
    min_delta = math.inf
    ok = True
    for _, traj in preset_runs["fig5"]:
        report = check_trajectory(traj)
        ok = ok and _check(report, "delta_nonnegative").passed
        ok = ok and _check(report, "lower_halfplane").passed
        min_delta = min(min_delta, float(np.min(traj.arrays()["delta"])))
    ok = ok and min_delta >= -1e-6

    base = [sc for sc, _ in preset_runs["fig5"]][0]
    sweep = run_sweep(base, {"delta0": [math.pi / 6, math.pi / 2, 5 * math.pi / 6]})
    sweep_ok = (all(r.status == "ok" for r in sweep.rows)
                and all(r.min_delta >= -1e-6 for r in sweep.rows))
    ok = ok and sweep_ok

    undersized = parse_scenario("""
schema = 1
[law]
variant = "curbsafe"
c1 = 1.0
c2 = 1.0
v = 0.5
[initial]
rho = 1.0
delta = 1.5707963267948966
gamma = -1.2566370614359172
[run]
cutoff = 0.001
""")
    try:
        run_scenario(undersized)
        floor_enforced = False
    except LawConstraintError:
        floor_enforced = True
    ok = ok and floor_enforced
    _verdict(capsys, 7, "curb_respecting_runs", ok,
             f"min bearing {min_delta:.2e} over preset, sweep "
             f"{'clean' if sweep_ok else 'dirty'}, undersized gain "
             f"{'rejected' if floor_enforced else 'accepted'}")


def test_criterion_08_cross_timescale_match(preset_runs, capsys):
    # physical-time and log-distance integrations must tell the same story
    # at matched range, and the arrival clocks stay under the deadline
    worst_gap = 0.0
    ok = True
    for sc, traj_t in preset_runs["fig2"]:
        law = traj_t.law
        sigma_max = math.log(sc.initial.rho / sc.cutoff)
        traj_s = integrate_log_timescale(sc.initial, law, step_sigma=1e-3,
                                         sigma_max=sigma_max)
        at, as_ = traj_t.arrays(), traj_s.arrays()
        rho_lo = max(at["rho"].min(), as_["rho"].min())
        rho_hi = min(at["rho"][0], as_["rho"][0])
        grid = np.linspace(rho_hi * 0.999, rho_lo * 1.001, 2000)

        def on_grid(a, key):
            return np.interp(grid[::-1], a["rho"][::-1], a[key][::-1])[::-1]

        gap = max(float(np.max(np.abs(on_grid(at, "delta") - on_grid(as_, "delta")))),
                  float(np.max(np.abs(on_grid(at, "gamma") - on_grid(as_, "gamma")))))
        worst_gap = max(worst_gap, gap)
        t1 = law.deadline(sc.initial)
        ok = (ok and gap < 1e-5
              and traj_t.cutoff_time < t1 and traj_s.cutoff_time < t1)
    _verdict(capsys, 8, "cross_timescale_match", ok,
             f"worst (delta, gamma) gap {worst_gap:.2e} < 1e-5, clocks under deadline")


def test_criterion_09_steering_rate_budget(preset_runs, capsys):
    # the speed sizing rule must keep the sampled steering rate inside the
    # actuator budget for three different budgets
    start = preset_runs["fig1"][0][0].initial
    peaks = []
    ok = True
    for omega_max in (0.5, 1.0, 2.0):
        v = velocity_for_omega_limit(omega_max, start, 1.01, 5.0)
        law = ControlLaw(LawVariant.BACKSTEP, c1=1.01, c2=5.0, v=v)
        traj = integrate(start, law, step=1e-3 * 0.5 / v, cutoff_rho=0.01)
        peak = float(np.max(np.abs(traj.arrays()["omega"])))
        peaks.append(peak)
        ok = ok and peak <= omega_max and traj.cutoff_time is not None
    _verdict(capsys, 9, "steering_rate_budget", ok,
             "peak |omega| " + ", ".join(f"{p:.4f}" for p in peaks)
             + " vs budgets 0.5, 1, 2")


def test_criterion_10_convergence_and_reproducibility(preset_runs, capsys):
    # RK4 should gain roughly 16x accuracy per step halving (accept 8..32),
    # and rerunning any preset must reproduce its outputs byte for byte
    ratios = []
    for name in ("fig1", "fig2"):
        sc = preset_runs[name][0][0]
        law = sc.resolve_law()
        final = {}
        for h in (4e-3, 2e-3, 1e-3):
            tr = integrate(sc.initial, law, step=h, cutoff_rho=1e-6, horizon=1.5)
            s = tr.samples[-1]
            final[h] = np.array([s.state.rho, s.state.delta, s.state.gamma])
        coarse = float(np.linalg.norm(final[4e-3] - final[2e-3]))
        fine = float(np.linalg.norm(final[2e-3] - final[1e-3]))
        ratios.append(coarse / fine)
    order_ok = all(8.0 <= r <= 32.0 for r in ratios)

    stable = True
    for name, runs in preset_runs.items():
        scenarios = [sc for sc, _ in runs]
        trajs = [traj for _, traj in runs]
        reruns = [run_scenario(sc) for sc in scenarios]
        for a, b in zip(trajs, reruns):
            stable = stable and csv_text(a) == csv_text(b)
        labels = [sc.label or f"run{i}" for i, sc in enumerate(scenarios)]
        kinds = [PlotKind.XY_TRACK, PlotKind.OMEGA_VS_T, PlotKind.ANGLES_VS_T]
        if any(t.law.variant is LawVariant.DECEL for t in trajs):
            kinds.append(PlotKind.V_VS_T)
        for kind in kinds:
            stable = stable and (svg_text(trajs, kind, labels=labels, title=name)
                                 == svg_text(reruns, kind, labels=labels, title=name))

    ok = order_ok and stable
    _verdict(capsys, 10, "convergence_and_reproducibility", ok,
             f"halving ratios {ratios[0]:.1f}, {ratios[1]:.1f} in [8, 32]; "
             f"preset reruns {'byte-identical' if stable else 'diverged'}")
