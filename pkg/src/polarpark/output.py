"""Trajectory output: CSV tables and self-contained SVG plots.

Both emitters are deterministic: the same trajectory produces byte-identical
output, so reruns can be diffed. The SVG writer is deliberately small (no
plotting dependency): fixed canvas, nice-number ticks, one polyline per
series. Four plot kinds cover the usual views of a parking run.
"""

from __future__ import annotations

import enum
import math
from pathlib import Path

from .dynamics import Inputs, StopReason, Trajectory, TrajectorySample
from .errors import ScenarioError
from .geometry import PolarState, polar_to_cart

CSV_HEADER = "t,rho,delta,gamma,v,omega,x,y,theta"


def csv_text(traj: Trajectory) -> str:
    lines = [CSV_HEADER]
    for s in traj.samples:
        pose = polar_to_cart(s.state)
        vals = (s.t, s.state.rho, s.state.delta, s.state.gamma,
                s.inputs.v, s.inputs.omega, pose.x, pose.y, pose.theta)
        lines.append(",".join(f"{x:.17g}" for x in vals))
    return "\n".join(lines) + "\n"


def emit_csv(traj: Trajectory, path) -> Path:
    path = Path(path)
    path.write_text(csv_text(traj), encoding="utf-8")
    return path


def read_csv_trajectory(path, law=None) -> Trajectory:
    """Load a trace written by emit_csv (or an external tool honoring the
    same header) back into a Trajectory so it can be re-certified.

    A final sample with zero inputs marks the shutdown: its time becomes
    cutoff_time and its range the cutoff shell. Traces without one are
    treated as horizon-terminated. The redundant x, y, theta columns are
    ignored in favor of the polar ones.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ScenarioError(f"{path}: expected header {CSV_HEADER!r}")
    samples = []
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != 9:
            raise ScenarioError(f"{path}:{ln}: expected 9 columns, got {len(cells)}")
        try:
            t, rho, delta, gamma, v, omega = (float(c) for c in cells[:6])
        except ValueError:
            raise ScenarioError(f"{path}:{ln}: non-numeric value")
        samples.append(TrajectorySample(t, PolarState(rho, delta, gamma), Inputs(v, omega)))
    if len(samples) < 2:
        raise ScenarioError(f"{path}: need at least 2 samples")
    last = samples[-1]
    arrived = last.inputs.v == 0.0 and last.inputs.omega == 0.0
    return Trajectory(
        samples=samples,
        cutoff_time=last.t if arrived else None,
        cutoff_rho=last.state.rho if arrived else min(s.state.rho for s in samples),
        step=samples[1].t - samples[0].t,
        terminated_reason=StopReason.CUTOFF_REACHED if arrived else StopReason.HORIZON,
        law=law,
    )


class PlotKind(enum.Enum):
    XY_TRACK = "xy"
    OMEGA_VS_T = "omega"
    ANGLES_VS_T = "angles"
    V_VS_T = "v"


_AXIS_TITLES = {
    PlotKind.XY_TRACK: ("x", "y"),
    PlotKind.OMEGA_VS_T: ("t", "omega"),
    PlotKind.ANGLES_VS_T: ("t", "angle"),
    PlotKind.V_VS_T: ("t", "v"),
}

_PALETTE = ("#d62728", "#1f77b4", "#17becf", "#2ca02c", "#9467bd", "#8c564b")

# scenario labels that double as SVG color keywords keep their color
_CSS_COLORS = {"red", "blue", "cyan", "green", "magenta", "orange",
               "purple", "brown", "black", "gray", "teal", "olive"}

_W, _H = 640.0, 480.0
_ML, _MR, _MT, _MB = 62.0, 16.0, 34.0, 48.0


def _series_color(label: str, index: int) -> str:
    if label in _CSS_COLORS:
        return label
    return _PALETTE[index % len(_PALETTE)]


def _nice_step(span: float, n: int = 5) -> float:
    raw = span / n
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if mult * mag >= raw:
            return mult * mag
    return 10.0 * mag


def _ticks(lo: float, hi: float) -> list[float]:
    step = _nice_step(hi - lo)
    first = math.ceil(lo / step - 1e-9) * step
    out = []
    x = first
    while x <= hi + 1e-9 * step:
        out.append(0.0 if abs(x) < 1e-12 * step else x)
        x += step
    return out


def _pad_range(lo: float, hi: float) -> tuple[float, float]:
    if hi - lo < 1e-12 * max(1.0, abs(lo), abs(hi)):
        pad = 0.1 * max(1.0, abs(lo))
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _series_for(traj: Trajectory, kind: PlotKind) -> list[tuple[str, list, list]]:
    """(style, xs, ys) triples for one trajectory; style is solid or dashed."""
    arr = traj.arrays()
    if kind is PlotKind.XY_TRACK:
        xs = [-r * math.cos(d) for r, d in zip(arr["rho"], arr["delta"])]
        ys = [-r * math.sin(d) for r, d in zip(arr["rho"], arr["delta"])]
        return [("solid", xs, ys)]
    t = list(arr["t"])
    if kind is PlotKind.OMEGA_VS_T:
        return [("solid", t, list(arr["omega"]))]
    if kind is PlotKind.V_VS_T:
        return [("solid", t, list(arr["v"]))]
    return [("solid", t, list(arr["delta"])), ("dashed", t, list(arr["gamma"]))]


def svg_text(trajs, kind: PlotKind, labels=None, title: str | None = None) -> str:
    """Render one or more trajectories as a fixed-size SVG plot.

    XY_TRACK marks the target with a dot and the cutoff shell with a dashed
    circle; the time plots mark each run's cutoff time with a dashed vertical
    line.
    """
    trajs = list(trajs)
    if not trajs:
        raise ValueError("need at least one trajectory")
    if labels is None:
        labels = [f"run{i}" for i in range(len(trajs))]
    if len(labels) != len(trajs):
        raise ValueError("labels must match trajectories")

    per_traj = [_series_for(tr, kind) for tr in trajs]
    all_x = [x for series in per_traj for _, xs, _ in series for x in xs]
    all_y = [y for series in per_traj for _, _, ys in series for y in ys]
    if kind is PlotKind.XY_TRACK:
        all_x.append(0.0)
        all_y.append(0.0)
    xlo, xhi = _pad_range(min(all_x), max(all_x))
    ylo, yhi = _pad_range(min(all_y), max(all_y))

    def px(x):
        return _ML + (x - xlo) / (xhi - xlo) * (_W - _ML - _MR)

    def py(y):
        return _H - _MB - (y - ylo) / (yhi - ylo) * (_H - _MT - _MB)

    xt, yt = _AXIS_TITLES[kind]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W:g}" height="{_H:g}" '
           f'viewBox="0 0 {_W:g} {_H:g}">',
           f'<rect width="{_W:g}" height="{_H:g}" fill="white"/>']
    if title is None:
        title = kind.value
    out.append(f'<text x="{_W / 2:.4f}" y="20" font-family="sans-serif" font-size="14" '
               f'text-anchor="middle">{title}</text>')

    # frame and ticks
    out.append(f'<rect x="{_ML:.4f}" y="{_MT:.4f}" width="{_W - _ML - _MR:.4f}" '
               f'height="{_H - _MT - _MB:.4f}" fill="none" stroke="#444" stroke-width="1"/>')
    for x in _ticks(xlo, xhi):
        out.append(f'<line x1="{px(x):.4f}" y1="{_H - _MB:.4f}" x2="{px(x):.4f}" '
                   f'y2="{_H - _MB + 5:.4f}" stroke="#444" stroke-width="1"/>')
        out.append(f'<text x="{px(x):.4f}" y="{_H - _MB + 18:.4f}" font-family="sans-serif" '
                   f'font-size="11" text-anchor="middle">{x:.6g}</text>')
    for y in _ticks(ylo, yhi):
        out.append(f'<line x1="{_ML - 5:.4f}" y1="{py(y):.4f}" x2="{_ML:.4f}" '
                   f'y2="{py(y):.4f}" stroke="#444" stroke-width="1"/>')
        out.append(f'<text x="{_ML - 8:.4f}" y="{py(y) + 4:.4f}" font-family="sans-serif" '
                   f'font-size="11" text-anchor="end">{y:.6g}</text>')
    out.append(f'<text x="{(_ML + _W - _MR) / 2:.4f}" y="{_H - 10:.4f}" '
               f'font-family="sans-serif" font-size="12" text-anchor="middle">{xt}</text>')
    out.append(f'<text x="16" y="{(_MT + _H - _MB) / 2:.4f}" font-family="sans-serif" '
               f'font-size="12" text-anchor="middle" '
               f'transform="rotate(-90 16 {(_MT + _H - _MB) / 2:.4f})">{yt}</text>')

    # cutoff markers
    if kind is PlotKind.XY_TRACK:
        shell = max(tr.cutoff_rho for tr in trajs)
        rx = shell / (xhi - xlo) * (_W - _ML - _MR)
        ry = shell / (yhi - ylo) * (_H - _MT - _MB)
        out.append(f'<ellipse cx="{px(0.0):.4f}" cy="{py(0.0):.4f}" rx="{rx:.4f}" '
                   f'ry="{ry:.4f}" fill="none" stroke="#888" stroke-width="1" '
                   f'stroke-dasharray="4 3"/>')
        out.append(f'<circle cx="{px(0.0):.4f}" cy="{py(0.0):.4f}" r="4" fill="#222"/>')
    else:
        for i, tr in enumerate(trajs):
            if tr.cutoff_time is None:
                continue
            color = _series_color(labels[i], i)
            out.append(f'<line x1="{px(tr.cutoff_time):.4f}" y1="{_MT:.4f}" '
                       f'x2="{px(tr.cutoff_time):.4f}" y2="{_H - _MB:.4f}" '
                       f'stroke="{color}" stroke-width="1" stroke-dasharray="4 3" '
                       f'opacity="0.5"/>')

    # data
    for i, series in enumerate(per_traj):
        color = _series_color(labels[i], i)
        for style, xs, ys in series:
            dash = ' stroke-dasharray="6 3"' if style == "dashed" else ""
            if len(xs) == 1:
                out.append(f'<circle cx="{px(xs[0]):.4f}" cy="{py(ys[0]):.4f}" r="3" '
                           f'fill="{color}"/>')
                continue
            pts = " ".join(f"{px(x):.4f},{py(y):.4f}" for x, y in zip(xs, ys))
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                       f'stroke-width="1.5"{dash}/>')

    # legend
    if any(labels):
        for i, lab in enumerate(labels):
            color = _series_color(lab, i)
            yy = _MT + 14 + 16 * i
            out.append(f'<line x1="{_W - _MR - 120:.4f}" y1="{yy:.4f}" '
                       f'x2="{_W - _MR - 96:.4f}" y2="{yy:.4f}" stroke="{color}" '
                       f'stroke-width="2"/>')
            out.append(f'<text x="{_W - _MR - 90:.4f}" y="{yy + 4:.4f}" '
                       f'font-family="sans-serif" font-size="11">{lab}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(trajs, kind: PlotKind, path, labels=None, title=None) -> Path:
    path = Path(path)
    path.write_text(svg_text(trajs, kind, labels=labels, title=title), encoding="utf-8")
    return path
