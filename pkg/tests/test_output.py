"""CSV round trips and the deterministic SVG writer."""

import pytest

from polarpark import (ControlLaw, LawVariant, PlotKind, PolarState,
                       ScenarioError, StopReason, csv_text, emit_csv,
                       integrate, read_csv_trajectory, svg_text)
from polarpark.output import CSV_HEADER

LAW = ControlLaw(LawVariant.BACKSTEP, c1=1.01, c2=5.0, v=0.5)


@pytest.fixture(scope="module")
def short_run():
    return integrate(PolarState(1.0, 0.5, -0.4), LAW, step=1e-3, cutoff_rho=0.2)


def test_csv_header_and_shape(short_run):
    text = csv_text(short_run)
    lines = text.strip().split("\n")
    assert lines[0] == CSV_HEADER == "t,rho,delta,gamma,v,omega,x,y,theta"
    assert len(lines) == 1 + len(short_run.samples)
    assert all(len(line.split(",")) == 9 for line in lines)
    assert text.endswith("\n")


def test_csv_round_trip_is_lossless(short_run, tmp_path):
    # %.17g serialization reproduces every float bit-for-bit
    path = emit_csv(short_run, tmp_path / "run.csv")
    back = read_csv_trajectory(path)
    assert len(back.samples) == len(short_run.samples)
    for a, b in zip(back.samples, short_run.samples):
        assert a.t == b.t
        assert a.state == b.state
        assert a.inputs == b.inputs
    assert back.terminated_reason is StopReason.CUTOFF_REACHED
    assert back.cutoff_time == short_run.cutoff_time
    assert back.cutoff_rho == short_run.samples[-1].state.rho
    assert back.step == pytest.approx(short_run.step)
    assert back.law is None


def test_read_csv_horizon_trace(tmp_path):
    traj = integrate(PolarState(1.0, 0.5, -0.4), LAW, step=1e-3,
                     cutoff_rho=0.01, horizon=0.1)
    path = emit_csv(traj, tmp_path / "partial.csv")
    back = read_csv_trajectory(path)
    assert back.terminated_reason is StopReason.HORIZON
    assert back.cutoff_time is None


def test_read_csv_rejects_malformed(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("time,rho\n0,1\n")
    with pytest.raises(ScenarioError, match="header"):
        read_csv_trajectory(p)
    p.write_text(CSV_HEADER + "\n1,2,3\n")
    with pytest.raises(ScenarioError, match="columns"):
        read_csv_trajectory(p)
    p.write_text(CSV_HEADER + "\n0,1,0,0,0.5,x,0,0,0\n" * 2)
    with pytest.raises(ScenarioError, match="numeric"):
        read_csv_trajectory(p)
    p.write_text(CSV_HEADER + "\n0,1,0,0,0.5,0,  -1,0,0\n")
    with pytest.raises(ScenarioError, match="2 samples"):
        read_csv_trajectory(p)


def test_svg_same_input_same_bytes(short_run):
    a = svg_text([short_run], PlotKind.XY_TRACK, labels=["red"])
    b = svg_text([short_run], PlotKind.XY_TRACK, labels=["red"])
    assert a == b


def test_svg_structure(short_run):
    text = svg_text([short_run], PlotKind.XY_TRACK, labels=["red"], title="demo")
    assert text.startswith('<svg xmlns="http://www.w3.org/2000/svg"')
    assert text.rstrip().endswith("</svg>")
    assert ">demo</text>" in text
    # css-named labels color their own series
    assert 'stroke="red"' in text
    # cutoff shell and target marker on the track plot
    assert "<ellipse" in text and "<circle" in text
    assert text.count("<polyline") == 1


def test_svg_time_plots_mark_cutoff(short_run):
    text = svg_text([short_run], PlotKind.OMEGA_VS_T, labels=["blue"])
    assert 'stroke-dasharray="4 3"' in text  # the cutoff-time vertical
    assert 'stroke="blue"' in text
    # the angle plot draws two series per run, the heading one dashed
    angles = svg_text([short_run], PlotKind.ANGLES_VS_T, labels=["blue"])
    assert angles.count("<polyline") == 2
    assert 'stroke-dasharray="6 3"' in angles


def test_svg_speed_plot_and_fallback_palette(short_run):
    text = svg_text([short_run, short_run], PlotKind.V_VS_T)
    # default labels are not css colors, so the palette applies in order
    assert 'stroke="#d62728"' in text and 'stroke="#1f77b4"' in text
    assert ">run0</text>" in text and ">run1</text>" in text


def test_svg_input_validation(short_run):
    with pytest.raises(ValueError):
        svg_text([], PlotKind.XY_TRACK)
    with pytest.raises(ValueError):
        svg_text([short_run], PlotKind.XY_TRACK, labels=["a", "b"])
