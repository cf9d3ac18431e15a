"""Closed-loop integration of the target-relative kinematics.

The plant is

    rho'   = -v cos(gamma)
    delta' = (v / rho) sin(gamma)
    gamma' = (v / rho) sin(gamma) - omega

integrated with fixed-step RK4, feedback re-evaluated at every stage. A run
stops at the first sample with rho <= cutoff_rho (the controllers switch off
there, so that sample reports zero inputs), at the horizon (a runaway stop,
reported as HORIZON and treated as a failure by the certificates), or when a
guard trips (|gamma| reaching pi/2, delta leaving a law's interval, rho
collapsing), which raises GuardTripped rather than continuing.

The same closed loop can be integrated against log-distance ln(rho0/rho) as
the advancing variable, where the angle pair obeys d(delta)/ds = tan(gamma),
d(tan gamma)/ds = -omega_bar and physical time rides along as a scaled clock
state with d(t/rho0)/ds = e^(-s) sqrt(1 + tan(gamma)^2) / v. The two routes
must agree, which the test suite uses as a cross-check on both.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .controllers import ControlLaw
from .errors import DomainError, GuardTripped
from .geometry import ANGLE_GUARD, PolarState

MAX_STEP = 1e-3
GAMMA_LIMIT = 0.5 * math.pi - ANGLE_GUARD


class StopReason(enum.Enum):
    CUTOFF_REACHED = "CUTOFF_REACHED"
    HORIZON = "HORIZON"
    GUARD_TRIPPED = "GUARD_TRIPPED"


@dataclass(frozen=True)
class Inputs:
    """Applied controls over one sample interval. v >= 0; both zero at and
    after cutoff."""

    v: float
    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.v) and math.isfinite(self.omega)):
            raise DomainError("inputs must be finite")
        if self.v < 0.0:
            raise DomainError("v must be nonnegative")


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    state: PolarState
    inputs: Inputs


@dataclass
class Trajectory:
    """Uniformly sampled closed-loop run. samples are strictly increasing in
    t; nothing is appended after cutoff_time."""

    samples: list[TrajectorySample]
    cutoff_time: float | None
    cutoff_rho: float
    step: float
    terminated_reason: StopReason
    law: ControlLaw | None = None

    @property
    def rho0(self) -> float:
        return self.samples[0].state.rho

    def arrays(self) -> dict[str, np.ndarray]:
        """Column views of the samples (t, rho, delta, gamma, v, omega)."""
        n = len(self.samples)
        cols = {k: np.empty(n) for k in ("t", "rho", "delta", "gamma", "v", "omega")}
        for i, s in enumerate(self.samples):
            cols["t"][i] = s.t
            cols["rho"][i] = s.state.rho
            cols["delta"][i] = s.state.delta
            cols["gamma"][i] = s.state.gamma
            cols["v"][i] = s.inputs.v
            cols["omega"][i] = s.inputs.omega
        return cols


@dataclass(frozen=True)
class ZeroDynamicsClock:
    """Scaled time t/rho0 viewed as a state driven by log-distance
    ln(rho0/rho). Both coordinates are nonnegative and nondecreasing."""

    scaled_time: float
    log_distance: float


def polar_derivatives(state: PolarState, inputs: Inputs) -> tuple[float, float, float]:
    """Time derivatives (rho', delta', gamma') of the plant at one state."""
    if state.rho <= 0.0:
        raise DomainError("rho must be positive")
    angular = inputs.v / state.rho * math.sin(state.gamma)
    return (-inputs.v * math.cos(state.gamma), angular, angular - inputs.omega)


def rho_parameterized_derivatives(state: PolarState, inputs: Inputs) -> tuple[float, float]:
    """Derivatives (d delta/d rho, d gamma/d rho) of the same motion with rho
    as the independent variable. Needs cos(gamma) > 0 and v != 0."""
    if state.rho <= 0.0:
        raise DomainError("rho must be positive")
    cg = math.cos(state.gamma)
    if cg <= 0.0:
        raise DomainError("rho-parameterized form needs cos(gamma) > 0")
    if inputs.v == 0.0:
        raise DomainError("rho-parameterized form needs v != 0")
    common = -math.tan(state.gamma) / state.rho
    return (common, common + inputs.omega / (inputs.v * cg))


def default_step(cutoff_rho: float, shell_speed: float) -> float:
    """Step rule min(1e-3, cutoff_rho / (10 shell_speed)): the vehicle cannot
    jump past the cutoff shell within one step."""
    if cutoff_rho <= 0.0 or shell_speed <= 0.0:
        raise DomainError("cutoff_rho and shell_speed must be positive")
    return min(MAX_STEP, cutoff_rho / (10.0 * shell_speed))


def _guard_message(law: ControlLaw, rho, delta, gamma):
    if rho <= 0.0:
        return "range collapsed to zero"
    if abs(gamma) >= GAMMA_LIMIT:
        return "gamma reached the pi/2 guard"
    lo, hi = law.delta_guard()
    if not (lo < delta < hi):
        return "delta left the law's admissible interval"
    return None


def _rk4_step(fb, rho, delta, gamma, h, dlo, dhi, t):
    """One RK4 step of the closed loop. Stage states outside the guards abort
    the step by raising GuardTripped with the stage state attached."""

    def rhs(r, d, g, dt):
        if r <= 0.0 or abs(g) >= GAMMA_LIMIT or not (dlo < d < dhi):
            raise GuardTripped(
                "closed-loop stage state left the controller's domain",
                sample=TrajectorySample(t + dt, PolarState(r, d, g), Inputs(0.0, 0.0)),
            )
        v, om = fb(r, d, g)
        ang = v / r * math.sin(g)
        return (-v * math.cos(g), ang, ang - om)

    h2 = 0.5 * h
    a1, a2, a3 = rhs(rho, delta, gamma, 0.0)
    b1, b2, b3 = rhs(rho + h2 * a1, delta + h2 * a2, gamma + h2 * a3, h2)
    c1, c2, c3 = rhs(rho + h2 * b1, delta + h2 * b2, gamma + h2 * b3, h2)
    d1, d2, d3 = rhs(rho + h * c1, delta + h * c2, gamma + h * c3, h)
    s = h / 6.0
    return (rho + s * (a1 + 2.0 * (b1 + c1) + d1),
            delta + s * (a2 + 2.0 * (b2 + c2) + d2),
            gamma + s * (a3 + 2.0 * (b3 + c3) + d3))


def integrate(state0: PolarState, law: ControlLaw, step: float | None = None,
              cutoff_rho: float = 0.01, horizon: float | None = None) -> Trajectory:
    """Run the closed loop from state0 until cutoff, horizon, or a guard trip.

    step defaults to the shell rule; horizon defaults to 10x the law's
    arrival deadline. Sample times are exact multiples of the step.
    """
    if cutoff_rho <= 0.0:
        raise DomainError("cutoff_rho must be positive")
    law.require_valid_start(state0)
    if step is None:
        step = default_step(cutoff_rho, law.shell_speed(cutoff_rho))
    if step <= 0.0:
        raise DomainError("step must be positive")
    if horizon is None:
        horizon = 10.0 * law.deadline(state0)
    floor = law.rho_floor if law.rho_floor is not None else cutoff_rho
    fb = law.scalar_feedback(floor)
    dlo, dhi = law.delta_guard()

    samples: list[TrajectorySample] = []
    rho, delta, gamma = state0.rho, state0.delta, state0.gamma
    n_max = int(math.floor(horizon / step + 1e-9))
    cutoff_time = None
    reason = None
    k = 0
    while True:
        t = k * step
        if rho <= cutoff_rho:
            samples.append(TrajectorySample(t, PolarState(rho, delta, gamma), Inputs(0.0, 0.0)))
            cutoff_time = t
            reason = StopReason.CUTOFF_REACHED
            break
        bad = _guard_message(law, rho, delta, gamma)
        if bad is not None:
            offender = TrajectorySample(t, PolarState(rho, delta, gamma), Inputs(0.0, 0.0))
            partial = Trajectory(samples, None, cutoff_rho, step, StopReason.GUARD_TRIPPED, law)
            raise GuardTripped(bad, sample=offender, trajectory=partial)
        v, om = fb(rho, delta, gamma)
        samples.append(TrajectorySample(t, PolarState(rho, delta, gamma), Inputs(v, om)))
        if k >= n_max:
            reason = StopReason.HORIZON
            break
        try:
            rho, delta, gamma = _rk4_step(fb, rho, delta, gamma, step, dlo, dhi, t)
        except GuardTripped as g:
            g.trajectory = Trajectory(samples, None, cutoff_rho, step,
                                      StopReason.GUARD_TRIPPED, law)
            raise
        k += 1
    return Trajectory(samples, cutoff_time, cutoff_rho, step, reason, law)


def integrate_log_timescale(state0: PolarState, law: ControlLaw, step_sigma: float = 1e-3,
                            sigma_max: float = 4.0) -> Trajectory:
    """Integrate the closed loop against log-distance s = ln(rho0/rho) up to
    sigma_max, then resample onto a uniform physical-time grid via the clock
    state. sigma_max plays the cutoff role: the returned trajectory's
    cutoff shell is rho0 e^(-sigma_max).
    """
    if step_sigma <= 0.0 or sigma_max <= 0.0:
        raise DomainError("step_sigma and sigma_max must be positive")
    law.require_valid_start(state0)
    rho0 = state0.rho
    cutoff_rho = rho0 * math.exp(-sigma_max)
    floor = law.rho_floor if law.rho_floor is not None else cutoff_rho
    fb = law.scalar_feedback(floor)
    dlo, dhi = law.delta_guard()
    tan_limit = math.tan(GAMMA_LIMIT)

    def rhs(sigma, delta, tau, _clock):
        if not (dlo < delta < dhi) or abs(tau) >= tan_limit:
            raise GuardTripped(
                "log-timescale state left the controller's domain",
                sample=TrajectorySample(sigma, PolarState(rho0 * math.exp(-sigma), delta,
                                                          math.atan(tau)), Inputs(0.0, 0.0)))
        rho = rho0 * math.exp(-sigma)
        gamma = math.atan(tau)
        v, om = fb(rho, delta, gamma)
        cg = math.cos(gamma)
        sec2 = 1.0 + tau * tau
        return (tau,
                sec2 * (tau - om * rho / (v * cg)),
                rho / (rho0 * v * cg))

    n_full = int(math.floor(sigma_max / step_sigma + 1e-12))
    sig_grid = [i * step_sigma for i in range(n_full + 1)]
    if sig_grid[-1] < sigma_max - 1e-15 * max(1.0, sigma_max):
        sig_grid.append(sigma_max)
    sig_grid[-1] = sigma_max

    deltas = [state0.delta]
    taus = [math.tan(state0.gamma)]
    clocks = [0.0]
    for i in range(len(sig_grid) - 1):
        s = sig_grid[i]
        h = sig_grid[i + 1] - s
        y = (deltas[-1], taus[-1], clocks[-1])
        a = rhs(s, *y)
        b = rhs(s + 0.5 * h, y[0] + 0.5 * h * a[0], y[1] + 0.5 * h * a[1], y[2] + 0.5 * h * a[2])
        c = rhs(s + 0.5 * h, y[0] + 0.5 * h * b[0], y[1] + 0.5 * h * b[1], y[2] + 0.5 * h * b[2])
        d = rhs(s + h, y[0] + h * c[0], y[1] + h * c[1], y[2] + h * c[2])
        w = h / 6.0
        deltas.append(y[0] + w * (a[0] + 2.0 * (b[0] + c[0]) + d[0]))
        taus.append(y[1] + w * (a[1] + 2.0 * (b[1] + c[1]) + d[1]))
        clocks.append(y[2] + w * (a[2] + 2.0 * (b[2] + c[2]) + d[2]))

    t_raw = np.asarray(clocks) * rho0
    rho_raw = rho0 * np.exp(-np.asarray(sig_grid))
    delta_raw = np.asarray(deltas)
    tau_raw = np.asarray(taus)

    # resample onto a uniform clock grid; the raw sigma grid is dense enough
    # that linear interpolation stays well inside the cross-check tolerance
    n_out = len(t_raw)
    t_end = float(t_raw[-1])
    step_t = t_end / (n_out - 1)
    t_grid = np.arange(n_out) * step_t
    t_grid[-1] = t_end
    delta_g = np.interp(t_grid, t_raw, delta_raw)
    tau_g = np.interp(t_grid, t_raw, tau_raw)
    rho_g = np.interp(t_grid, t_raw, rho_raw)
    rho_g[-1] = cutoff_rho

    samples = []
    last = n_out - 1
    for i in range(n_out):
        st = PolarState(float(rho_g[i]), float(delta_g[i]), math.atan(float(tau_g[i])))
        if i == last:
            u = Inputs(0.0, 0.0)
        else:
            v, om = fb(st.rho, st.delta, st.gamma)
            u = Inputs(v, om)
        samples.append(TrajectorySample(float(t_grid[i]), st, u))
    return Trajectory(samples, t_end, cutoff_rho, step_t, StopReason.CUTOFF_REACHED, law)


def log_clock(traj: Trajectory) -> list[ZeroDynamicsClock]:
    """Clock view of a trajectory: (t/rho0, ln(rho0/rho)) per sample."""
    rho0 = traj.rho0
    return [ZeroDynamicsClock(scaled_time=s.t / rho0,
                              log_distance=math.log(rho0 / s.state.rho))
            for s in traj.samples]
