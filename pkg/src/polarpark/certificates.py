"""Numerical certificates for closed-loop runs.

check_trajectory() verifies, sample by sample, the decay envelopes a law
promises. The backstepping and decelerating laws have closed-form envelopes
(range line or power bound, error envelope, peak-steering envelope, Lyapunov
slope). The smooth, no-front-crossing, and curb-respecting laws have
exponential-shape envelopes with constants that are not closed form; for
those the checker fits amplitude and rate by log-linear regression and
verifies the qualitative conclusions (monotone range decay, arrival before
the fitted deadline, safety invariants).

Every sampled inequality lhs <= rhs passes with slack 1e-6 absolute plus
1e-4 relative; worst_slack reports sup(lhs - rhs), so worst_slack <= 0 means
the bound held with margin before any slack.

Two standalone harnesses mirror the comparison-principle arguments behind
the envelopes: comparison_envelope_check (a differential inequality in rho
implies a power or exponential envelope) and timelike_decrease_check (a
class-K bound on tan(gamma)^2 implies the range decays under a straight
line in time). Both return a verdict object; when the premise itself fails
beyond finite-difference tolerance the verdict is HYPOTHESIS_NOT_MET and the
conclusion is not asserted either way.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .controllers import (ControlLaw, LawVariant, arrival_deadline,
                          arrival_deadline_decel, steering_envelope_gain)
from .dynamics import StopReason, Trajectory
from .errors import DomainError, MismatchedLaw
from .geometry import ErrorNorm, gain_margin

SLACK_ABS = 1e-6
SLACK_REL = 1e-4

# Finite-difference slack: centered differences are trusted up to
# 10 * local spacing * empirical curvature of the difference quotient.
FD_SLACK_FACTOR = 10.0


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst_slack: float
    worst_time: float


@dataclass(frozen=True)
class FittedDecay:
    """Log-linear fit of the exponential-shape envelopes: amplitude and rate
    for the squared error norm (state) and the steering magnitude (steer),
    with the largest absolute fit residuals. Both fits run on the running
    suffix maximum of the signal, which is the quantity the envelopes bound."""

    state_amp: float
    state_rate: float
    steer_amp: float
    steer_rate: float
    state_resid: float
    steer_resid: float


@dataclass(frozen=True)
class CertificateReport:
    law: str
    checks: tuple[CheckResult, ...]
    fitted: FittedDecay | None
    overall: bool


class Verdict(enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    HYPOTHESIS_NOT_MET = "hypothesis_not_met"


@dataclass(frozen=True)
class LemmaOutcome:
    """Result of a comparison-principle harness. offending lists the sample
    indexes where the premise (or, for a FAIL, the conclusion) breaks."""

    verdict: Verdict
    offending: tuple[int, ...]
    worst_slack: float

    def __bool__(self):
        return self.verdict is Verdict.PASS


class GainShape(enum.Enum):
    """Gain profile of the differential inequality dV/drho >= g(rho) V."""

    LINEAR_GAIN = "a/rho"
    QUADRATIC_GAIN = "a/rho^2"


@dataclass(frozen=True)
class ClassKFunction:
    """A class-K comparison function from a fixed catalog: linear k*s,
    power k*s^p, or a scaled copy of another member."""

    kind: str
    scale: float
    exponent: float = 1.0
    base: "ClassKFunction | None" = None

    @classmethod
    def linear(cls, k: float) -> "ClassKFunction":
        if k <= 0.0:
            raise DomainError("class-K slope must be positive")
        return cls(kind="linear", scale=k)

    @classmethod
    def power(cls, k: float, p: float) -> "ClassKFunction":
        if k <= 0.0 or p <= 0.0:
            raise DomainError("class-K scale and exponent must be positive")
        return cls(kind="power", scale=k, exponent=p)

    @classmethod
    def scaled(cls, base: "ClassKFunction", k: float) -> "ClassKFunction":
        if k <= 0.0:
            raise DomainError("class-K scale must be positive")
        return cls(kind="scaled", scale=k, base=base)

    def __call__(self, s):
        if self.kind == "linear":
            return self.scale * s
        if self.kind == "power":
            return self.scale * np.power(s, self.exponent)
        return self.scale * self.base(s)


def check_class_k(alpha: ClassKFunction, hi: float = 1.0, n: int = 1000) -> bool:
    """Grid test that alpha(0) = 0 and alpha is strictly increasing on
    [0, hi]."""
    xs = np.linspace(0.0, hi, n)
    ys = np.asarray(alpha(xs), dtype=float)
    return bool(ys[0] == 0.0 and np.all(np.diff(ys) > 0.0))


def _error_array(delta, gamma, variant: ErrorNorm):
    tg = np.tan(gamma)
    if variant is ErrorNorm.EUCLID:
        return np.hypot(delta, tg)
    th = np.tan(0.5 * delta)
    if variant is ErrorNorm.HALF4:
        return np.sqrt(4.0 * th * th + tg * tg)
    return np.hypot(th, tg)


def _bound_check(name, t, lhs, rhs) -> CheckResult:
    viol = np.asarray(lhs) - np.asarray(rhs)
    excess = viol - (SLACK_ABS + SLACK_REL * np.abs(rhs))
    i = int(np.argmax(excess))
    return CheckResult(name=name, passed=bool(excess[i] <= 0.0),
                       worst_slack=float(np.max(viol)), worst_time=float(t[i]))


def _monotone_check(name, t, values) -> CheckResult:
    diffs = np.diff(values)
    if len(diffs) == 0:
        return CheckResult(name, True, -math.inf, float(t[0]))
    i = int(np.argmax(diffs))
    return CheckResult(name=name, passed=bool(diffs[i] < 0.0),
                       worst_slack=float(diffs[i]), worst_time=float(t[i + 1]))


def _centered_slope(x, y):
    return (y[2:] - y[:-2]) / (x[2:] - x[:-2])


def _fd_tolerance(x, slope):
    """Slack budget for a centered difference quotient: FD_SLACK_FACTOR times
    local spacing times the empirical curvature of the quotient itself."""
    xi = x[1:-1]
    h_local = 0.5 * np.abs(x[2:] - x[:-2])
    curvature = np.abs(np.gradient(slope, xi))
    return FD_SLACK_FACTOR * h_local * curvature


@dataclass(frozen=True)
class SlopeStats:
    """Interior-sample statistics of the Lyapunov slope inequality
    fd dV/drho >= 2 min(c1,c2) V / rho."""

    n_interior: int
    fraction_ok: float
    max_raw_violation: float
    max_excess: float


def lyapunov_slope_stats(traj: Trajectory, law: ControlLaw | None = None) -> SlopeStats:
    """Finite-difference test of the decay inequality behind the backstepping
    envelopes, evaluated at every interior sample."""
    law = _resolve_law(traj, law)
    arr = traj.arrays()
    rho, delta, gamma = arr["rho"], arr["delta"], arr["gamma"]
    if len(rho) < 3:
        return SlopeStats(0, 1.0, 0.0, -math.inf)
    zeta = np.tan(gamma) + law.c1 * delta
    v_lyap = delta * delta + zeta * zeta
    slope = _centered_slope(rho, v_lyap)
    required = 2.0 * min(law.c1, law.c2) * v_lyap[1:-1] / rho[1:-1]
    tol = _fd_tolerance(rho, slope)
    deficit = required - slope
    ok = deficit <= tol
    return SlopeStats(
        n_interior=len(slope),
        fraction_ok=float(np.mean(ok)),
        max_raw_violation=float(np.max(np.maximum(deficit, 0.0))),
        max_excess=float(np.max(deficit - tol)),
    )


def _suffix_max(y):
    """Running maximum over the tail: env[i] = max(y[i:])."""
    return np.maximum.accumulate(np.asarray(y)[::-1])[::-1]


def _fit_exp_decay(t, y, t1, scale):
    """Least-squares fit of ln(y/scale) = ln(amp) - rate/(1 - t/t1) over the
    samples with y > 0 and t < t1. Returns (amp, rate, resid_max) or None."""
    y = np.asarray(y)
    mask = (t < t1) & (y > 0.0) & np.isfinite(y)
    if int(mask.sum()) < 8:
        return None
    x = -1.0 / (1.0 - t[mask] / t1)
    z = np.log(y[mask] / scale)
    rate, logamp = np.polyfit(x, z, 1)
    resid = z - (logamp + rate * x)
    amp = math.exp(logamp) if logamp < 709.0 else math.inf
    return amp, float(rate), float(np.max(np.abs(resid)))


def _resolve_law(traj: Trajectory, law: ControlLaw | None) -> ControlLaw:
    if law is None:
        if traj.law is None:
            raise MismatchedLaw("trajectory carries no law; pass one explicitly")
        return traj.law
    if traj.law is not None and traj.law != law:
        raise MismatchedLaw("trajectory was produced by a different law")
    return law


def _xy(rho, delta):
    return -rho * np.cos(delta), -rho * np.sin(delta)


def _front_crossing_check(t, rho, delta) -> CheckResult:
    """Detect crossings of the half-line {y = 0, x > 0} between consecutive
    samples. worst_slack is the largest crossing x (crossings behind the
    target, x <= 0, are allowed)."""
    x, y = _xy(rho, delta)
    worst = -math.inf
    worst_t = float(t[0])
    crossed = False
    for i in range(len(y) - 1):
        y0, y1 = y[i], y[i + 1]
        if y0 == 0.0:
            xc, tc = x[i], t[i]
        elif y0 * y1 < 0.0:
            f = y0 / (y0 - y1)
            xc = x[i] + f * (x[i + 1] - x[i])
            tc = t[i] + f * (t[i + 1] - t[i])
        else:
            continue
        if xc > worst:
            worst, worst_t = float(xc), float(tc)
        if xc > SLACK_ABS:
            crossed = True
    if y[-1] == 0.0 and x[-1] > worst:
        worst, worst_t = float(x[-1]), float(t[-1])
        crossed = crossed or x[-1] > SLACK_ABS
    return CheckResult("front_halfline_clear", not crossed, worst, worst_t)


def _arrival_check(name, traj, deadline) -> CheckResult:
    arrived = traj.terminated_reason is StopReason.CUTOFF_REACHED
    if not arrived:
        return CheckResult(name, False, math.inf, float(traj.samples[-1].t))
    slack = traj.cutoff_time - deadline
    budget = SLACK_ABS + SLACK_REL * abs(deadline)
    return CheckResult(name, bool(slack <= budget), float(slack), float(traj.cutoff_time))


def check_trajectory(traj: Trajectory, law: ControlLaw | None = None) -> CertificateReport:
    """Verify every envelope and invariant the trajectory's law promises.

    Raises MismatchedLaw when the trajectory metadata disagrees with the law
    argument. Never mutates the trajectory; re-running is bit-identical.
    """
    law = _resolve_law(traj, law)
    arr = traj.arrays()
    t, rho, delta, gamma = arr["t"], arr["rho"], arr["delta"], arr["gamma"]
    v_in, omega = arr["v"], arr["omega"]
    rho0 = float(rho[0])
    b = _error_array(delta, gamma, law.error_variant)
    b0 = float(b[0])
    cmin = min(law.c1, law.c2)
    m = gain_margin(law.c1)

    checks = [_monotone_check("rho_monotone", t, rho)]
    fitted = None

    if law.variant in (LawVariant.BACKSTEP, LawVariant.DECEL):
        if law.variant is LawVariant.BACKSTEP:
            t1 = arrival_deadline(rho0, law.v, law.c1, b0)
            base = np.clip(1.0 - t / t1, 0.0, None)
            checks.append(_bound_check("rho_line_bound", t, rho, rho0 * base))
            checks.append(_bound_check(
                "error_sq_envelope", t, b * b,
                m * m * b0 * b0 * base ** (2.0 * cmin)))
            checks.append(_bound_check(
                "steering_envelope", t, np.abs(omega),
                (law.v / rho0) * steering_envelope_gain(law.c1, law.c2)
                * base ** (cmin - 1.0) * b0))
        else:
            n = law.n
            t1 = arrival_deadline_decel(rho0, law.c0, n, law.c1, b0)
            base = np.clip(1.0 - t / t1, 0.0, None)
            checks.append(_bound_check("rho_power_bound", t, rho, rho0 * base ** (n + 1.0)))
            checks.append(_bound_check(
                "error_envelope", t, b, m * b0 * base ** ((n + 1.0) * cmin)))
            checks.append(_bound_check(
                "speed_envelope", t, v_in,
                law.c0 * rho0 ** (n / (n + 1.0)) * base ** float(n)))
            checks.append(_bound_check(
                "steering_envelope", t, np.abs(omega),
                (law.c0 * steering_envelope_gain(law.c1, law.c2) * m * b0
                 / rho0 ** (1.0 / (n + 1.0))) * base ** ((n + 1.0) * cmin - 1.0)))
            checks.append(_monotone_check("speed_monotone", t, v_in))
        stats = lyapunov_slope_stats(traj, law)
        checks.append(CheckResult("lyapunov_slope", stats.fraction_ok >= 0.999,
                                  stats.max_excess, float(t[0])))
        checks.append(_arrival_check("arrival_before_deadline", traj, t1))
    else:
        # fit axis: the run's own arrival estimate when it arrived (cutoff
        # time plus the straight-line remainder); the conservative deadline
        # formula otherwise. The conservative value can sit far beyond the
        # actual arrival, which would crush the fit onto a sliver of the
        # -1/(1 - t/t1) axis and blow up the extrapolated amplitude.
        if traj.terminated_reason is StopReason.CUTOFF_REACHED:
            t1_sub = traj.cutoff_time + traj.cutoff_rho / law.v
        else:
            t1_sub = law.deadline(traj.samples[0].state)
        # both fits run on the suffix-max envelope: the raw signals cross
        # zero mid-run, and the promised shape bounds the running peak.
        # Samples below the gain floor are excluded: there the clipped law
        # decays on its own (faster) shape and would wreck the regression.
        floor_used = law.rho_floor if law.rho_floor is not None else traj.cutoff_rho
        win = rho >= floor_used
        state_env = _suffix_max(b * b)
        state_fit = (_fit_exp_decay(t[win], state_env[win], t1_sub, b0 * b0)
                     if b0 > 0.0 else None)
        if law.variant is LawVariant.SMOOTH:
            steer_scale = law.v * b0
        elif law.variant is LawVariant.NOFRONT:
            steer_scale = law.v * (1.0 + b0 * b0) * b0
        else:
            steer_scale = law.v * (1.0 + b0 ** 4) * b0
        omega_peak = float(np.max(np.abs(omega)))
        # drop the zeroed shutdown sample so it cannot flatten the envelope
        pre = win.copy()
        if traj.terminated_reason is StopReason.CUTOFF_REACHED:
            pre[-1] = False
        if b0 > 0.0 and omega_peak > 0.0:
            w_env = _suffix_max(np.abs(np.where(pre, omega, 0.0)))
            steer_fit = _fit_exp_decay(t[pre], w_env[pre], t1_sub, steer_scale)
        else:
            steer_fit = None
        if state_fit is not None or steer_fit is not None:
            samp, srate, sres = state_fit if state_fit else (0.0, 0.0, 0.0)
            wamp, wrate, wres = steer_fit if steer_fit else (0.0, 0.0, 0.0)
            fitted = FittedDecay(samp, srate, wamp, wrate, sres, wres)
        if state_fit is not None:
            amp, rate, _ = state_fit
            t1_fit = (rho0 / law.v) * math.sqrt(1.0 + amp * math.exp(-rate) * b0 * b0)
            checks.append(CheckResult("error_decay_fit",
                                      rate >= 0.0 and math.isfinite(amp), -rate, float(t[0])))
        else:
            t1_fit = rho0 / law.v
            checks.append(CheckResult("error_decay_fit", True, 0.0, float(t[0])))
        if steer_fit is not None:
            wamp, wrate, _ = steer_fit
            checks.append(CheckResult("steering_decay_fit",
                                      wrate >= 0.0 and math.isfinite(wamp), -wrate, float(t[0])))
        else:
            checks.append(CheckResult("steering_decay_fit", True, 0.0, float(t[0])))
        # smooth shutdown: the steering should have faded before the cutoff
        if len(t) >= 2 and traj.terminated_reason is StopReason.CUTOFF_REACHED:
            w_last = float(abs(omega[-2]))
            t_last = float(t[-2])
        else:
            w_last = float(abs(omega[-1]))
            t_last = float(t[-1])
        checks.append(CheckResult("steering_fades", w_last <= 0.01 * omega_peak + SLACK_ABS,
                                  w_last - 0.01 * omega_peak, t_last))
        checks.append(_bound_check("angles_small_at_cutoff", t[-1:],
                                   np.array([max(abs(delta[-1]), abs(gamma[-1]))]),
                                   np.array([0.05])))
        if law.variant is LawVariant.NOFRONT:
            checks.append(_bound_check("delta_in_range", t, np.abs(delta),
                                       np.full_like(t, math.pi)))
            checks.append(_front_crossing_check(t, rho, delta))
        elif law.variant is LawVariant.CURBSAFE:
            checks.append(_bound_check("delta_nonnegative", t, -delta, np.zeros_like(t)))
            _, y = _xy(rho, delta)
            checks.append(_bound_check("lower_halfplane", t, y, np.zeros_like(t)))
        checks.append(_arrival_check("arrival_reached", traj, t1_fit))

    overall = all(c.passed for c in checks)
    return CertificateReport(law=law.variant.value, checks=tuple(checks),
                             fitted=fitted, overall=overall)


def comparison_envelope_check(samples, a: float,
                              gain: GainShape = GainShape.LINEAR_GAIN) -> LemmaOutcome:
    """Verify the comparison-principle envelope implied by a differential
    inequality on V(rho) along a rho-decreasing trace.

    samples is a sequence of (rho, V) pairs ordered by decreasing rho. With
    gain LINEAR_GAIN the premise fd dV/drho >= (a/rho) V implies
    V <= V0 (rho/rho0)^a; with QUADRATIC_GAIN the premise uses a/rho^2 and
    implies V <= V0 exp(a (1/rho0 - 1/rho)). Premise violations beyond the
    finite-difference tolerance yield HYPOTHESIS_NOT_MET with the offending
    sample indexes.
    """
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 3:
        raise DomainError("need at least 3 (rho, V) samples")
    rho, v_vals = arr[:, 0], arr[:, 1]
    if not np.all(rho > 0.0) or not np.all(np.diff(rho) < 0.0):
        raise DomainError("rho must be positive and strictly decreasing")
    if not np.all(v_vals >= 0.0):
        raise DomainError("V must be nonnegative")
    if a <= 0.0:
        raise DomainError("decay coefficient a must be positive")

    slope = _centered_slope(rho, v_vals)
    rho_i = rho[1:-1]
    g = a / rho_i if gain is GainShape.LINEAR_GAIN else a / (rho_i * rho_i)
    deficit = g * v_vals[1:-1] - slope
    tol = _fd_tolerance(rho, slope)
    bad = deficit > tol
    if np.any(bad):
        idx = tuple(int(i) + 1 for i in np.nonzero(bad)[0])
        return LemmaOutcome(Verdict.HYPOTHESIS_NOT_MET, idx, float(np.max(deficit - tol)))

    rho0, v0 = rho[0], v_vals[0]
    if gain is GainShape.LINEAR_GAIN:
        envelope = v0 * (rho / rho0) ** a
    else:
        envelope = v0 * np.exp(a * (1.0 / rho0 - 1.0 / rho))
    viol = v_vals - envelope
    excess = viol - (SLACK_ABS + SLACK_REL * np.abs(envelope))
    failing = np.nonzero(excess > 0.0)[0]
    verdict = Verdict.PASS if len(failing) == 0 else Verdict.FAIL
    return LemmaOutcome(verdict, tuple(int(i) for i in failing), float(np.max(viol)))


def timelike_decrease_check(traj: Trajectory, alpha: ClassKFunction) -> LemmaOutcome:
    """Verify that a class-K bound tan(gamma)^2 <= alpha(rho/rho0) along a
    constant-speed run forces the range under the straight line
    rho0 (1 - t/t1) with t1 = (rho0/v) sqrt(1 + alpha(1)).

    Premise failures (including cos(gamma) <= 0) yield HYPOTHESIS_NOT_MET.
    """
    if not check_class_k(alpha):
        raise DomainError("alpha is not class-K on the test grid")
    arr = traj.arrays()
    t, rho, gamma = arr["t"], arr["rho"], arr["gamma"]
    active = arr["v"][arr["v"] > 0.0]
    if len(active) == 0:
        raise DomainError("trajectory has no driven samples")
    v = float(active[0])
    if np.any(active != v):
        raise DomainError("timelike decrease needs a constant forward speed")

    rho0 = float(rho[0])
    hyp_lhs = np.tan(gamma) ** 2
    hyp_rhs = np.asarray(alpha(rho / rho0), dtype=float)
    hyp_excess = hyp_lhs - hyp_rhs - (SLACK_ABS + SLACK_REL * np.abs(hyp_rhs))
    bad = (hyp_excess > 0.0) | (np.cos(gamma) <= 0.0)
    if np.any(bad):
        idx = tuple(int(i) for i in np.nonzero(bad)[0])
        return LemmaOutcome(Verdict.HYPOTHESIS_NOT_MET, idx, float(np.max(hyp_excess)))

    t1 = (rho0 / v) * math.sqrt(1.0 + float(alpha(1.0)))
    envelope = rho0 * (1.0 - t / t1)
    viol = rho - envelope
    excess = viol - (SLACK_ABS + SLACK_REL * np.abs(envelope))
    failing = np.nonzero(excess > 0.0)[0]
    verdict = Verdict.PASS if len(failing) == 0 else Verdict.FAIL
    return LemmaOutcome(verdict, tuple(int(i) for i in failing), float(np.max(viol)))


def render_report(report: CertificateReport) -> str:
    """One line per check: name, PASS/FAIL, worst slack, worst time. Stable
    formatting so re-rendering is byte-identical."""
    lines = [f"law: {report.law}",
             f"overall: {'PASS' if report.overall else 'FAIL'}"]
    for c in report.checks:
        lines.append(f"{c.name} {'PASS' if c.passed else 'FAIL'} "
                     f"worst_slack={c.worst_slack:.17g} worst_time={c.worst_time:.17g}")
    if report.fitted is not None:
        f = report.fitted
        lines.append(
            f"fitted state_amp={f.state_amp:.17g} state_rate={f.state_rate:.17g} "
            f"steer_amp={f.steer_amp:.17g} steer_rate={f.steer_rate:.17g} "
            f"state_resid={f.state_resid:.17g} steer_resid={f.steer_resid:.17g}")
    return "\n".join(lines) + "\n"
