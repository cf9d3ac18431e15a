"""Scenario and preset files: schema, strict key checking, the "auto" gain,
and run overrides."""

import math

import pytest

from polarpark import (LawVariant, PolarState, ScenarioError, curbsafe_c1_floor,
                       law_from_table, load_preset, parse_scenario,
                       preset_names, run_scenario)
from polarpark.scenario import parse_preset

GOOD = """
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
"""


def test_parse_scenario_happy_path():
    sc = parse_scenario(GOOD)
    assert sc.variant is LawVariant.BACKSTEP
    assert (sc.c1, sc.c2, sc.v) == (1.01, 5.0, 0.5)
    assert sc.initial == PolarState(1.0, 0.0, -1.2566370614359172)
    assert sc.cutoff == 0.01
    assert sc.label == "red"
    assert sc.step is None and sc.horizon is None and sc.rho_floor is None
    law = sc.resolve_law()
    assert law.variant is LawVariant.BACKSTEP and law.v == 0.5


def test_cutoff_defaults_when_omitted():
    text = GOOD.replace("cutoff = 0.01\n", "")
    assert parse_scenario(text).cutoff == 0.01


@pytest.mark.parametrize("mangle, match", [
    (lambda s: s.replace("schema = 1", "schema = 2"), "schema"),
    (lambda s: s.replace("schema = 1", ""), "schema"),
    (lambda s: s.replace('variant = "backstep"', 'variant = "warp"'), "variant"),
    (lambda s: s.replace("[initial]", "[start]"), "initial"),
    (lambda s: s.replace("c2 = 5.0", "c2 = 5.0\nc3 = 1.0"), "unknown"),
    (lambda s: s.replace("cutoff = 0.01", "cutoff = -0.01"), "positive"),
    (lambda s: s.replace("rho = 1.0", "rho = 'one'"), "number"),
    (lambda s: s.replace("rho = 1.0", "rho = true"), "number"),
    (lambda s: s.replace("rho = 1.0", "rho = nan"), "finite"),
    (lambda s: s.replace('label = "red"', "label = 3"), "label"),
    (lambda s: s.replace("c1 = 1.01", 'c1 = "auto"'), "auto"),
    (lambda s: s.replace("v = 0.5", "v = 0.5\nn = 2"), "decel"),
    (lambda s: s + "\n[law.extra]\nx = 1\n", "unknown"),
])
def test_parse_scenario_rejects_malformed(mangle, match):
    with pytest.raises(ScenarioError, match=match):
        parse_scenario(mangle(GOOD))


def test_parse_scenario_rejects_bad_toml():
    with pytest.raises(ScenarioError, match="TOML"):
        parse_scenario("schema = = 1")


def test_decel_law_table():
    text = GOOD.replace('variant = "backstep"', 'variant = "decel"') \
               .replace("v = 0.5", "c0 = 0.5\nn = 2") \
               .replace("c1 = 1.01", "c1 = 1.2")
    sc = parse_scenario(text)
    assert sc.variant is LawVariant.DECEL
    assert sc.v is None and sc.c0 == 0.5 and sc.n == 2
    law = sc.resolve_law()
    assert law.shell_speed(0.01) == pytest.approx(0.5 * 0.01 ** (2.0 / 3.0))
    # n must be an integer, not a float that happens to be integral
    with pytest.raises(ScenarioError, match="integer"):
        parse_scenario(text.replace("n = 2", "n = 2.0"))
    with pytest.raises(ScenarioError, match="speed"):
        parse_scenario(text.replace("c0 = 0.5", "c0 = 0.5\nv = 0.5"))


def test_curbsafe_auto_gain():
    text = """
schema = 1

[law]
variant = "curbsafe"
c1 = "auto"
c2 = 1.0
v = 0.5
rho_floor = 0.01

[initial]
rho = 1.0
delta = 0.5235987755982988
gamma = -0.7853981633974483

[run]
cutoff = 0.001
"""
    sc = parse_scenario(text)
    assert sc.c1 is None
    law = sc.resolve_law()
    # floor + 1, with floor = 2 at this start
    assert law.c1 == pytest.approx(curbsafe_c1_floor(sc.initial) + 1.0)
    assert law.c1 == pytest.approx(3.0)
    assert law.rho_floor == 0.01


def test_law_from_table():
    law = law_from_table({"variant": "smooth", "c1": 1.2, "c2": 1.2, "v": 0.5})
    assert law.variant is LawVariant.SMOOTH
    auto = {"variant": "curbsafe", "c1": "auto", "c2": 1.0, "v": 0.5}
    with pytest.raises(ScenarioError, match="start state"):
        law_from_table(auto)
    resolved = law_from_table(auto, initial=PolarState(1.0, math.pi / 6,
                                                       -math.pi / 4))
    assert resolved.c1 == pytest.approx(3.0)


def test_parse_preset():
    text = """
schema = 1
name = "pair"

[[scenario]]
[scenario.law]
variant = "backstep"
c1 = 1.1
c2 = 2.0
v = 0.5
[scenario.initial]
rho = 1.0
delta = 0.2
gamma = -0.2
[scenario.run]
cutoff = 0.05
label = "a"

[[scenario]]
[scenario.law]
variant = "smooth"
c1 = 1.2
c2 = 1.2
v = 0.5
[scenario.initial]
rho = 1.0
delta = 0.2
gamma = -0.2
[scenario.run]
cutoff = 0.05
label = "b"
"""
    preset = parse_preset(text)
    assert preset.name == "pair"
    assert [sc.label for sc in preset.scenarios] == ["a", "b"]
    assert preset.scenarios[1].variant is LawVariant.SMOOTH
    with pytest.raises(ScenarioError, match="name"):
        parse_preset(text.replace('name = "pair"\n', ""))
    with pytest.raises(ScenarioError, match="scenario"):
        parse_preset('schema = 1\nname = "empty"\n')


def test_bundled_presets_parse_and_resolve():
    assert preset_names() == ["fig1", "fig2", "fig3", "fig4", "fig5"]
    for name in preset_names():
        preset = load_preset(name)
        assert preset.name == name
        assert preset.scenarios
        for sc in preset.scenarios:
            law = sc.resolve_law()
            law.require_valid_start(sc.initial)


def test_load_preset_unknown_name():
    with pytest.raises(ScenarioError, match="fig1"):
        load_preset("fig9")


def test_run_scenario_overrides():
    sc = parse_scenario(GOOD.replace("cutoff = 0.01", "cutoff = 0.2"))
    traj = run_scenario(sc)
    assert traj.cutoff_rho == 0.2
    over = run_scenario(sc, step=2e-3, cutoff=0.3)
    assert over.step == 2e-3
    assert over.cutoff_rho == 0.3
    assert over.samples[-1].state.rho <= 0.3
