"""Scenario files: one parking run described in TOML.

A scenario is three tables. [law] names the variant and its gains, [initial]
the start state in target-relative polar coordinates, [run] the integration
settings. Example:

    schema = 1

    [law]
    variant = "backstep"
    c1 = 1.01
    c2 = 5.0
    v = 0.5

    [initial]
    rho = 1.0
    delta = 0.0
    gamma = -1.2566370614359172

    [run]
    cutoff = 0.01
    label = "red"

Preset files bundle several scenarios as [[scenario]] arrays under a shared
name; the bundled ones ship inside the package and are addressed by name.
Unknown keys anywhere are rejected rather than ignored: a typo that silently
falls back to a default is worse than an error.

For the curb-respecting law c1 may be the string "auto", which resolves to
the start-dependent admissible floor plus one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .controllers import ControlLaw, LawVariant, curbsafe_c1_floor
from .dynamics import Trajectory, integrate
from .errors import ScenarioError
from .geometry import PolarState

SCHEMA_VERSION = 1

_LAW_KEYS = {"variant", "c1", "c2", "v", "c0", "n", "rho_floor"}
_INITIAL_KEYS = {"rho", "delta", "gamma"}
_RUN_KEYS = {"step", "cutoff", "horizon", "label"}


@dataclass(frozen=True)
class Scenario:
    """One parking run: law variant, gains, start state, run settings.

    c1 is None when the file said "auto" (curb-respecting law only); it then
    resolves against the start state when the law is built.
    """

    variant: LawVariant
    c2: float
    initial: PolarState
    cutoff: float
    c1: float | None = None
    v: float | None = None
    c0: float | None = None
    n: int | None = None
    rho_floor: float | None = None
    step: float | None = None
    horizon: float | None = None
    label: str = ""

    def resolve_law(self) -> ControlLaw:
        c1 = self.c1
        if c1 is None:
            c1 = curbsafe_c1_floor(self.initial) + 1.0
        if self.variant is LawVariant.DECEL:
            return ControlLaw(variant=self.variant, c1=c1, c2=self.c2,
                              c0=self.c0, n=self.n, rho_floor=self.rho_floor)
        return ControlLaw(variant=self.variant, c1=c1, c2=self.c2, v=self.v,
                          rho_floor=self.rho_floor)


@dataclass(frozen=True)
class Preset:
    name: str
    scenarios: tuple[Scenario, ...]


def _number(table, key, where, required=True, positive=False):
    if key not in table:
        if required:
            raise ScenarioError(f"{where} is missing required key {key!r}")
        return None
    val = table[key]
    if type(val) not in (int, float):
        raise ScenarioError(f"{where}.{key} must be a number, got {val!r}")
    val = float(val)
    if not math.isfinite(val):
        raise ScenarioError(f"{where}.{key} must be finite")
    if positive and val <= 0.0:
        raise ScenarioError(f"{where}.{key} must be positive, got {val!r}")
    return val


def _reject_unknown(table, allowed, where):
    extra = set(table) - allowed
    if extra:
        raise ScenarioError(f"{where} has unknown keys: {', '.join(sorted(extra))}")


def _parse_law_table(law: dict, where: str) -> dict:
    """Validate a [law] table into Scenario law fields (c1 None means auto)."""
    _reject_unknown(law, _LAW_KEYS, where)
    try:
        variant = LawVariant(law.get("variant"))
    except ValueError:
        names = ", ".join(v.value for v in LawVariant)
        raise ScenarioError(
            f"{where}.variant must be one of {names}, got {law.get('variant')!r}")

    if law.get("c1") == "auto":
        if variant is not LawVariant.CURBSAFE:
            raise ScenarioError(f"{where}.c1 = 'auto' only applies to the curbsafe law")
        c1 = None
    else:
        c1 = _number(law, "c1", where)
    c2 = _number(law, "c2", where)

    if variant is LawVariant.DECEL:
        if "v" in law:
            raise ScenarioError(f"{where}: the decel law commands its own speed; drop v")
        c0 = _number(law, "c0", where, positive=True)
        n_val = law.get("n")
        if type(n_val) is not int or n_val < 1:
            raise ScenarioError(f"{where}.n must be a positive integer")
        v = None
        n = n_val
    else:
        for key in ("c0", "n"):
            if key in law:
                raise ScenarioError(f"{where}.{key} only applies to the decel law")
        v = _number(law, "v", where, positive=True)
        c0 = None
        n = None
    rho_floor = _number(law, "rho_floor", where, required=False)
    if rho_floor is not None and rho_floor < 0.0:
        raise ScenarioError(f"{where}.rho_floor must be nonnegative")
    return {"variant": variant, "c1": c1, "c2": c2, "v": v, "c0": c0, "n": n,
            "rho_floor": rho_floor}


def law_from_table(table: dict, initial: PolarState | None = None,
                   where: str = "law") -> ControlLaw:
    """Build a ControlLaw from a [law] table. c1 = "auto" needs the start
    state to resolve the admissible floor."""
    f = _parse_law_table(table, where)
    if f["c1"] is None:
        if initial is None:
            raise ScenarioError(f"{where}: c1 = 'auto' needs a start state to resolve")
        f["c1"] = curbsafe_c1_floor(initial) + 1.0
    variant = f.pop("variant")
    return ControlLaw(variant=variant, **f)


def scenario_from_tables(doc: dict, where: str = "scenario") -> Scenario:
    """Build a Scenario from parsed [law]/[initial]/[run] tables."""
    for name in ("law", "initial", "run"):
        if name not in doc or not isinstance(doc[name], dict):
            raise ScenarioError(f"{where} is missing the [{name}] table")
    _reject_unknown(doc, {"law", "initial", "run"}, where)
    law_fields = _parse_law_table(doc["law"], f"{where}.law")

    init = doc["initial"]
    _reject_unknown(init, _INITIAL_KEYS, f"{where}.initial")
    initial = PolarState(rho=_number(init, "rho", f"{where}.initial", positive=True),
                         delta=_number(init, "delta", f"{where}.initial"),
                         gamma=_number(init, "gamma", f"{where}.initial"))

    run = doc["run"]
    _reject_unknown(run, _RUN_KEYS, f"{where}.run")
    label = run.get("label", "")
    if not isinstance(label, str):
        raise ScenarioError(f"{where}.run.label must be a string")
    return Scenario(
        initial=initial, **law_fields,
        cutoff=_number(run, "cutoff", f"{where}.run", required=False, positive=True) or 0.01,
        step=_number(run, "step", f"{where}.run", required=False, positive=True),
        horizon=_number(run, "horizon", f"{where}.run", required=False, positive=True),
        label=label,
    )


def _check_schema(doc, where):
    if doc.get("schema") != SCHEMA_VERSION:
        raise ScenarioError(f"{where} must declare schema = {SCHEMA_VERSION}")


def parse_scenario(text: str, where: str = "scenario") -> Scenario:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ScenarioError(f"{where}: invalid TOML: {e}")
    _check_schema(doc, where)
    doc = {k: v for k, v in doc.items() if k != "schema"}
    return scenario_from_tables(doc, where)


def load_scenario(path) -> Scenario:
    with open(path, encoding="utf-8") as f:
        return parse_scenario(f.read(), where=str(path))


def parse_preset(text: str, where: str = "preset") -> Preset:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        raise ScenarioError(f"{where}: invalid TOML: {e}")
    _check_schema(doc, where)
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise ScenarioError(f"{where} must declare a nonempty name")
    entries = doc.get("scenario")
    if not isinstance(entries, list) or not entries:
        raise ScenarioError(f"{where} needs at least one [[scenario]] entry")
    _reject_unknown(doc, {"schema", "name", "scenario"}, where)
    scenarios = tuple(scenario_from_tables(entry, f"{where}.scenario[{i}]")
                      for i, entry in enumerate(entries))
    return Preset(name=name, scenarios=scenarios)


def preset_names() -> list[str]:
    root = resources.files("polarpark").joinpath("presets")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def load_preset(name: str) -> Preset:
    path = resources.files("polarpark").joinpath("presets", f"{name}.toml")
    if not path.is_file():
        raise ScenarioError(
            f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return parse_preset(path.read_text(encoding="utf-8"), where=f"preset {name!r}")


def run_scenario(sc: Scenario, step: float | None = None, cutoff: float | None = None,
                 horizon: float | None = None) -> Trajectory:
    """Integrate a scenario. Explicit arguments override the file's values."""
    return integrate(
        sc.initial, sc.resolve_law(),
        step=step if step is not None else sc.step,
        cutoff_rho=cutoff if cutoff is not None else sc.cutoff,
        horizon=horizon if horizon is not None else sc.horizon,
    )
