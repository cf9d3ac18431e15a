"""Grid sweeps over start states and gains.

A sweep takes a base scenario and a set of axes (start bearing, start
heading error, the two gains, the speed) and runs the closed loop at every
grid point. Combinations outside a law's admissible set are reported as
skipped rows, runs that trip a guard or hit the horizon as error rows; the
grid order is deterministic regardless of worker count, so the emitted CSV
is diffable across runs.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import StopReason
from .errors import DomainError, GuardTripped, LawConstraintError, ScenarioError
from .geometry import PolarState
from .scenario import SCHEMA_VERSION, Scenario, run_scenario, scenario_from_tables
from .controllers import LawVariant

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

# fixed axis order: grid index is the row-major position in this ordering
CANONICAL_AXES = ("delta0", "gamma0", "c1", "c2", "v")

_METRIC_COLUMNS = ("cutoff_time", "rho_final", "min_delta", "max_abs_omega")


@dataclass(frozen=True)
class SweepRow:
    index: int
    params: dict
    status: str          # ok | skipped | error
    reason: str
    cutoff_time: float
    rho_final: float
    min_delta: float
    max_abs_omega: float


@dataclass(frozen=True)
class SweepResult:
    axes: tuple[tuple[str, tuple[float, ...]], ...]
    rows: tuple[SweepRow, ...]

    def ok_rows(self) -> list[SweepRow]:
        return [r for r in self.rows if r.status == "ok"]


def _apply_assignment(base: Scenario, assignment: dict) -> Scenario:
    init = base.initial
    init = PolarState(rho=init.rho,
                      delta=assignment.get("delta0", init.delta),
                      gamma=assignment.get("gamma0", init.gamma))
    law_over = {k: assignment[k] for k in ("c1", "c2", "v") if k in assignment}
    return replace(base, initial=init, **law_over)


def _run_cell(task):
    index, sc, step, cutoff, assignment = task
    nan = math.nan
    try:
        law = sc.resolve_law()
        law.require_valid_start(sc.initial)
    except (LawConstraintError, DomainError) as e:
        return SweepRow(index, assignment, "skipped", str(e), nan, nan, nan, nan)
    try:
        traj = run_scenario(sc, step=step, cutoff=cutoff)
    except GuardTripped as e:
        return SweepRow(index, assignment, "error", str(e), nan, nan, nan, nan)
    arr = traj.arrays()
    row = SweepRow(
        index, assignment,
        "ok" if traj.terminated_reason is StopReason.CUTOFF_REACHED else "error",
        traj.terminated_reason.value,
        traj.cutoff_time if traj.cutoff_time is not None else nan,
        float(arr["rho"][-1]),
        float(np.min(arr["delta"])),
        float(np.max(np.abs(arr["omega"]))),
    )
    return row


def parse_sweep(text: str, where: str = "sweep") -> tuple[Scenario, dict]:
    """Parse a sweep file: a scenario plus a [sweep] table mapping axis
    names to value arrays. Returns the base scenario and the axes."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ScenarioError(f"{where}: invalid TOML: {e}")
    if doc.get("schema") != SCHEMA_VERSION:
        raise ScenarioError(f"{where} must declare schema = {SCHEMA_VERSION}")
    sweep_tbl = doc.get("sweep")
    if not isinstance(sweep_tbl, dict) or not sweep_tbl:
        raise ScenarioError(f"{where} needs a nonempty [sweep] table")
    base = scenario_from_tables(
        {k: v for k, v in doc.items() if k not in ("schema", "sweep")}, where)
    axes = {}
    for name, values in sweep_tbl.items():
        if name not in CANONICAL_AXES:
            raise ScenarioError(f"{where}.sweep.{name}: unknown axis; "
                                f"valid: {', '.join(CANONICAL_AXES)}")
        if (not isinstance(values, list) or not values
                or not all(type(x) in (int, float) for x in values)):
            raise ScenarioError(f"{where}.sweep.{name} must be a nonempty number array")
        axes[name] = [float(x) for x in values]
    return base, axes


def load_sweep(path) -> tuple[Scenario, dict]:
    with open(path, encoding="utf-8") as f:
        return parse_sweep(f.read(), where=str(path))


def run_sweep(base: Scenario, axes: dict, workers: int = 1,
              step: float | None = None, cutoff: float | None = None) -> SweepResult:
    """Run the closed loop over the cartesian grid of axis values.

    axes maps axis names (a subset of CANONICAL_AXES) to value lists. Rows
    come back in row-major grid order independent of workers.
    """
    unknown = set(axes) - set(CANONICAL_AXES)
    if unknown:
        raise ScenarioError(f"unknown sweep axes: {', '.join(sorted(unknown))}; "
                            f"valid: {', '.join(CANONICAL_AXES)}")
    if base.variant is LawVariant.DECEL and "v" in axes:
        raise ScenarioError("the decel law commands its own speed; v is not sweepable")
    ordered = []
    for name in CANONICAL_AXES:
        if name not in axes:
            continue
        vals = tuple(float(x) for x in axes[name])
        if not vals:
            raise ScenarioError(f"sweep axis {name!r} has no values")
        ordered.append((name, vals))
    if not ordered:
        raise ScenarioError("sweep needs at least one axis")

    tasks = []
    for index, combo in enumerate(itertools.product(*(vals for _, vals in ordered))):
        assignment = {name: val for (name, _), val in zip(ordered, combo)}
        tasks.append((index, _apply_assignment(base, assignment), step, cutoff, assignment))

    if workers <= 1:
        rows = [_run_cell(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_cell, tasks))
    return SweepResult(axes=tuple(ordered), rows=tuple(rows))


def sweep_csv(result: SweepResult) -> str:
    axis_names = [name for name, _ in result.axes]
    header = ["index", *axis_names, "status", "reason", *_METRIC_COLUMNS]
    lines = [",".join(header)]
    for r in result.rows:
        cells = [str(r.index)]
        cells += [f"{r.params[name]:.17g}" for name in axis_names]
        cells.append(r.status)
        cells.append(r.reason.replace(",", ";"))
        cells += [f"{getattr(r, m):.17g}" for m in _METRIC_COLUMNS]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
