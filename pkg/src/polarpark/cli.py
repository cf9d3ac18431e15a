"""Command-line front end.

Four subcommands:

    run SCENARIO.toml     integrate one scenario, write CSV and SVG plots,
                          print the certificate report
    sweep SWEEP.toml      grid-sweep start state and gains, write a summary
                          CSV (see [sweep] table in the file format)
    preset NAME           run a bundled named preset (scenarios overlaid in
                          the plots, one CSV per run)
    check TRACE.csv --law "variant:c1=..,c2=..,v=.."
                          re-certify an externally produced trace against a
                          law's envelopes, no integration involved

Shared flags: --step and --cutoff override the file's values, --out-dir
places outputs, --workers parallelizes sweeps. Exit codes: 0 every check
passed, 1 a certificate or sweep run failed, 2 bad usage or malformed input,
3 a guard tripped during integration.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .certificates import check_trajectory, render_report
from .controllers import LawVariant
from .errors import GuardTripped, ScenarioError
from .output import PlotKind, emit_csv, emit_svg, read_csv_trajectory
from .scenario import (law_from_table, load_preset, load_scenario,
                       preset_names, run_scenario)
from .sweep import load_sweep, run_sweep, sweep_csv


def parse_law_spec(text: str) -> dict:
    """Parse "variant:key=value,..." into a [law] table."""
    head, sep, rest = text.partition(":")
    table: dict = {"variant": head.strip()}
    if sep and rest.strip():
        for item in rest.split(","):
            key, eq, val = item.partition("=")
            key = key.strip()
            if not eq or not key:
                raise ScenarioError(f"bad law spec item {item!r}; expected key=value")
            val = val.strip()
            if key == "n":
                table[key] = int(val)
            elif key == "c1" and val == "auto":
                table[key] = "auto"
            else:
                table[key] = float(val)
    return table


def _plot_kinds(laws) -> list[PlotKind]:
    kinds = [PlotKind.XY_TRACK, PlotKind.OMEGA_VS_T, PlotKind.ANGLES_VS_T]
    if any(law.variant is LawVariant.DECEL for law in laws):
        kinds.append(PlotKind.V_VS_T)
    return kinds


def _run_and_report(scenarios, labels, args, out_name=None):
    trajs = []
    reports = []
    for sc in scenarios:
        traj = run_scenario(sc, step=args.step, cutoff=args.cutoff)
        trajs.append(traj)
        reports.append(check_trajectory(traj))
    if out_name is not None:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for traj, label in zip(trajs, labels):
            suffix = f"_{label}" if len(trajs) > 1 else ""
            written.append(emit_csv(traj, out_dir / f"{out_name}{suffix}.csv"))
        for kind in _plot_kinds([t.law for t in trajs]):
            written.append(emit_svg(trajs, kind, out_dir / f"{out_name}_{kind.value}.svg",
                                    labels=labels, title=out_name))
        for p in written:
            print(f"wrote {p}")
    for label, report in zip(labels, reports):
        if len(reports) > 1:
            print(f"--- {label}")
        print(render_report(report), end="")
    return 0 if all(r.overall for r in reports) else 1


def _cmd_run(args) -> int:
    sc = load_scenario(args.scenario)
    name = sc.label or Path(args.scenario).stem
    return _run_and_report([sc], [name], args, out_name=name)


def _cmd_preset(args) -> int:
    preset = load_preset(args.name)
    labels = [sc.label or f"run{i}" for i, sc in enumerate(preset.scenarios)]
    return _run_and_report(list(preset.scenarios), labels, args, out_name=preset.name)


def _cmd_sweep(args) -> int:
    base, axes = load_sweep(args.sweep)
    result = run_sweep(base, axes, workers=args.workers, step=args.step,
                       cutoff=args.cutoff)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / f"{Path(args.sweep).stem}_sweep.csv"
    out.write_text(sweep_csv(result), encoding="utf-8")
    print(f"wrote {out}")
    n_ok = sum(r.status == "ok" for r in result.rows)
    n_skip = sum(r.status == "skipped" for r in result.rows)
    n_err = sum(r.status == "error" for r in result.rows)
    print(f"{len(result.rows)} cells: {n_ok} ok, {n_skip} skipped, {n_err} error")
    return 1 if n_err else 0


def _cmd_check(args) -> int:
    traj = read_csv_trajectory(args.trace)
    law = law_from_table(parse_law_spec(args.law),
                         initial=traj.samples[0].state, where="--law")
    report = check_trajectory(traj, law)
    print(render_report(report), end="")
    return 0 if report.overall else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarpark",
        description="finite-time parking laws for a steering-rate-actuated "
                    "vehicle, with certificate checks on every run")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate a scenario file and write outputs")
    p_run.add_argument("scenario", help="scenario TOML file")
    p_run.add_argument("--step", type=float, default=None, help="integration step override")
    p_run.add_argument("--cutoff", type=float, default=None, help="cutoff radius override")
    p_run.add_argument("--out-dir", default=".", help="directory for CSV/SVG output")
    p_run.set_defaults(func=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="run the grid described by a sweep file")
    p_sweep.add_argument("sweep", help="sweep TOML file (scenario plus [sweep] table)")
    p_sweep.add_argument("--step", type=float, default=None)
    p_sweep.add_argument("--cutoff", type=float, default=None)
    p_sweep.add_argument("--out-dir", default=".")
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_preset = sub.add_parser("preset", help="run a bundled preset")
    p_preset.add_argument("name", help=f"one of: {', '.join(preset_names())}")
    p_preset.add_argument("--step", type=float, default=None)
    p_preset.add_argument("--cutoff", type=float, default=None)
    p_preset.add_argument("--out-dir", default=".")
    p_preset.set_defaults(func=_cmd_preset)

    p_check = sub.add_parser("check", help="re-certify a CSV trace against a law")
    p_check.add_argument("trace", help="trace CSV (emit_csv column layout)")
    p_check.add_argument("--law", required=True,
                         help='law spec "variant:c1=..,c2=..,v=.."')
    p_check.set_defaults(func=_cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except GuardTripped as e:
        s = e.sample
        where = (f" at t={s.t:.17g} (rho={s.state.rho:.17g}, delta={s.state.delta:.17g}, "
                 f"gamma={s.state.gamma:.17g})") if s is not None else ""
        print(f"guard tripped: {e}{where}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
