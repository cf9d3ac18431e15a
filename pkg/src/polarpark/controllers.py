"""Feedback laws that park the vehicle at the origin in finite time.

Every law produces a steering rate of the form

    omega = (v / rho) * (sin(gamma) + cos(gamma)^3 * omega_bar)

and differs only in omega_bar, the correction term expressed in the
backstepping pair (zeta, omega_bar). Five variants:

    BACKSTEP   plain inverse-distance gains, steering jumps at shutoff
    SMOOTH     inverse-square-distance gains, steering fades before arrival
    NOFRONT    never crosses the half-line in front of the target
    DECEL      also commands forward speed, slowing into the target
    CURBSAFE   keeps the vehicle on one side of the line through the target

The range fed to the gain terms is clipped below by a floor (measurement
hygiene near the target); the integrated state itself is never clipped.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError, LawConstraintError
from .geometry import ANGLE_GUARD, ErrorNorm, PolarState, error_norm, gain_margin


class LawVariant(enum.Enum):
    BACKSTEP = "backstep"
    SMOOTH = "smooth"
    NOFRONT = "nofront"
    DECEL = "decel"
    CURBSAFE = "curbsafe"


@dataclass(frozen=True)
class ZetaView:
    """Backstepping internals of a law at one state: the transformed error
    zeta and the correction omega_bar it produces."""

    zeta: float
    omega_bar: float


def clip_rho(rho: float, floor: float) -> float:
    """Range value fed into the feedback gains, kept at or above floor."""
    return rho if rho > floor else floor


def _require_interior(rho, gamma):
    if rho <= 0.0:
        raise DomainError("rho must be positive")
    if abs(gamma) >= 0.5 * math.pi - ANGLE_GUARD:
        raise DomainError("gamma at or beyond the tangent pole pi/2")


def _assemble(v, r, gamma, omega_bar):
    # omega = (v/r) (sin g + cos^3 g * omega_bar), r already clipped
    cg = math.cos(gamma)
    return (v / r) * (math.sin(gamma) + cg * cg * cg * omega_bar)


def _view_backstep(r, delta, gamma, c1, c2) -> ZetaView:
    tg = math.tan(gamma)
    zeta = tg + c1 * delta
    return ZetaView(zeta=zeta, omega_bar=c2 * zeta + delta + c1 * tg)


def _view_smooth(r, delta, gamma, c1, c2) -> ZetaView:
    tg = math.tan(gamma)
    zeta = tg + (c1 / r) * delta
    return ZetaView(zeta=zeta, omega_bar=delta + (c1 * (tg + delta) + c2 * zeta) / r)


def _view_nofront(r, delta, gamma, c1, c2) -> ZetaView:
    tg = math.tan(gamma)
    sd = math.sin(delta)
    th = math.tan(0.5 * delta)
    zeta = tg + (c1 / r) * sd
    omega_bar = (1.0 + th * th) * 2.0 * th + (c1 * (math.cos(delta) * tg + sd) + c2 * zeta) / r
    return ZetaView(zeta=zeta, omega_bar=omega_bar)


def _view_curbsafe(r, delta, gamma, c1, c2) -> ZetaView:
    tg = math.tan(gamma)
    sd = math.sin(delta)
    th = math.tan(0.5 * delta)
    zeta = tg + (c1 / r) * sd
    sec4 = (1.0 + th * th) ** 2
    omega_bar = (c1 * (sd + math.cos(delta) * tg) + c2 * (1.0 + r * r) * sec4 * zeta) / r
    return ZetaView(zeta=zeta, omega_bar=omega_bar)


_VIEWS = {
    LawVariant.BACKSTEP: _view_backstep,
    LawVariant.SMOOTH: _view_smooth,
    LawVariant.NOFRONT: _view_nofront,
    LawVariant.DECEL: _view_backstep,
    LawVariant.CURBSAFE: _view_curbsafe,
}


def omega_backstep(state: PolarState, v: float, c1: float, c2: float) -> float:
    """Steering rate of the plain backstepping law (1/rho gains)."""
    _require_interior(state.rho, state.gamma)
    vw = _view_backstep(state.rho, state.delta, state.gamma, c1, c2)
    return _assemble(v, state.rho, state.gamma, vw.omega_bar)


def omega_smooth(state: PolarState, v: float, c1: float, c2: float) -> float:
    """Steering rate of the smooth-shutdown law (1/rho^2 gains)."""
    _require_interior(state.rho, state.gamma)
    vw = _view_smooth(state.rho, state.delta, state.gamma, c1, c2)
    return _assemble(v, state.rho, state.gamma, vw.omega_bar)


def omega_nofront(state: PolarState, v: float, c1: float, c2: float) -> float:
    """Steering rate of the law that avoids the half-line in front of the
    target. Needs |delta| < pi."""
    _require_interior(state.rho, state.gamma)
    if abs(state.delta) >= math.pi - ANGLE_GUARD:
        raise DomainError("delta at or beyond the half-angle tangent pole pi")
    vw = _view_nofront(state.rho, state.delta, state.gamma, c1, c2)
    return _assemble(v, state.rho, state.gamma, vw.omega_bar)


def omega_curbsafe(state: PolarState, v: float, c1: float, c2: float) -> float:
    """Steering rate of the curb-respecting law. Needs delta in [0, pi)."""
    _require_interior(state.rho, state.gamma)
    if not (-ANGLE_GUARD <= state.delta < math.pi - ANGLE_GUARD):
        raise DomainError("delta outside [0, pi)")
    vw = _view_curbsafe(state.rho, state.delta, state.gamma, c1, c2)
    return _assemble(v, state.rho, state.gamma, vw.omega_bar)


def decel_inputs(state: PolarState, c0: float, c1: float, c2: float, n: int) -> tuple[float, float]:
    """Speed and steering of the decelerating law: v = c0 rho^(n/(n+1)) with
    the backstepping steering evaluated at that speed. Returns (v, omega)."""
    _require_interior(state.rho, state.gamma)
    v = c0 * state.rho ** (n / (n + 1.0))
    vw = _view_backstep(state.rho, state.delta, state.gamma, c1, c2)
    return v, _assemble(v, state.rho, state.gamma, vw.omega_bar)


def zeta_view(state: PolarState, variant: LawVariant, c1: float, c2: float,
              rho_floor: float = 0.0) -> ZetaView:
    """Backstepping internals (zeta, omega_bar) of a variant at one state."""
    _require_interior(state.rho, state.gamma)
    r = clip_rho(state.rho, rho_floor)
    return _VIEWS[variant](r, state.delta, state.gamma, c1, c2)


def curbsafe_c1_floor(state0: PolarState) -> float:
    """Smallest admissible c1 for the curb-respecting law at this start:
    max(0, -rho0 tan(gamma0) / sin(delta0)). The start needs delta0 in (0, pi)."""
    if not (0.0 < state0.delta < math.pi):
        raise DomainError("curbsafe start needs delta0 strictly inside (0, pi)")
    _require_interior(state0.rho, state0.gamma)
    return max(0.0, -state0.rho * math.tan(state0.gamma) / math.sin(state0.delta))


def steering_envelope_gain(c1: float, c2: float) -> float:
    """Coefficient sqrt(2) (1 + max(c1 c2, c1 + c2)) M(c1) that scales the
    peak-steering envelopes of the backstepping-style laws."""
    return math.sqrt(2.0) * (1.0 + max(c1 * c2, c1 + c2)) * gain_margin(c1)


def velocity_for_omega_limit(omega_max: float, state0: PolarState, c1: float, c2: float) -> float:
    """Largest constant speed that keeps the backstepping law's steering rate
    below omega_max from this start. Scales linearly with omega_max."""
    if omega_max <= 0.0:
        raise DomainError("omega_max must be positive")
    if min(c1, c2) <= 1.0:
        raise LawConstraintError("backstep law requires min(c1, c2) > 1")
    b0 = error_norm(state0.delta, state0.gamma, ErrorNorm.EUCLID)
    if b0 == 0.0:
        raise DomainError("zero start error needs no steering; speed is unconstrained")
    return omega_max * state0.rho / (b0 * steering_envelope_gain(c1, c2))


def arrival_deadline(rho0: float, v: float, c1: float, b0: float) -> float:
    """Time bound by which a constant-speed law with cross gain c1 and start
    error b0 is guaranteed to reach the target: (rho0/v) sqrt(1 + M^2 b0^2)."""
    if rho0 <= 0.0 or v <= 0.0:
        raise DomainError("rho0 and v must be positive")
    m = gain_margin(c1)
    return (rho0 / v) * math.sqrt(1.0 + m * m * b0 * b0)


def arrival_deadline_decel(rho0: float, c0: float, n: int, c1: float, b0: float) -> float:
    """Arrival-time bound for the decelerating law:
    (n+1) (rho0^(1/(n+1)) / c0) sqrt(1 + M^2 b0^2)."""
    if rho0 <= 0.0 or c0 <= 0.0:
        raise DomainError("rho0 and c0 must be positive")
    m = gain_margin(c1)
    return (n + 1.0) * (rho0 ** (1.0 / (n + 1.0)) / c0) * math.sqrt(1.0 + m * m * b0 * b0)


@dataclass(frozen=True)
class ControlLaw:
    """A parking law plus its gains.

    v is the fixed forward speed for every variant except DECEL, which
    commands v = c0 rho^(n/(n+1)) itself (leave v unset there). rho_floor,
    when set, overrides the gain-clipping floor; integrate() defaults it to
    the cutoff radius.
    """

    variant: LawVariant
    c1: float
    c2: float
    v: float | None = None
    c0: float | None = None
    n: int | None = None
    rho_floor: float | None = None

    def __post_init__(self):
        var = self.variant
        if var is not LawVariant.DECEL:
            if self.c0 is not None or self.n is not None:
                raise LawConstraintError("c0 and n only apply to the decel law")
            if self.v is None or not self.v > 0.0:
                raise LawConstraintError(f"{var.value} law requires a fixed speed v > 0")
        if self.rho_floor is not None and self.rho_floor < 0.0:
            raise LawConstraintError("rho_floor must be nonnegative")
        if var is LawVariant.BACKSTEP:
            if min(self.c1, self.c2) <= 1.0:
                raise LawConstraintError("backstep law requires min(c1, c2) > 1")
        elif var in (LawVariant.SMOOTH, LawVariant.NOFRONT):
            if min(self.c1, self.c2) <= 0.0:
                raise LawConstraintError(f"{var.value} law requires min(c1, c2) > 0")
        elif var is LawVariant.DECEL:
            if self.v is not None:
                raise LawConstraintError("decel law commands its own speed; leave v unset")
            if self.n is None or not (isinstance(self.n, int) and self.n >= 1):
                raise LawConstraintError("decel law requires a positive integer n")
            if self.c0 is None or not self.c0 > 0.0:
                raise LawConstraintError("decel law requires c0 > 0")
            if min(self.c1, self.c2) <= 1.0 / (self.n + 1.0):
                raise LawConstraintError("decel law requires min(c1, c2) > 1/(n+1)")
        elif var is LawVariant.CURBSAFE:
            if self.c2 <= 0.0:
                raise LawConstraintError("curbsafe law requires c2 > 0")
            if self.c1 <= 0.0:
                raise LawConstraintError(
                    "curbsafe law requires c1 > max(0, -rho0 tan(gamma0)/sin(delta0)), so c1 > 0")

    @property
    def error_variant(self) -> ErrorNorm:
        if self.variant is LawVariant.NOFRONT:
            return ErrorNorm.HALF4
        if self.variant is LawVariant.CURBSAFE:
            return ErrorNorm.HALF1
        return ErrorNorm.EUCLID

    def require_valid_start(self, state0: PolarState):
        """Reject a start state outside this law's domain. The message names
        the violated condition."""
        if state0.rho <= 0.0:
            raise DomainError("start requires rho0 > 0")
        if abs(state0.gamma) >= 0.5 * math.pi - ANGLE_GUARD:
            raise DomainError("start requires |gamma0| < pi/2")
        if self.variant is LawVariant.NOFRONT:
            if abs(state0.delta) >= math.pi - ANGLE_GUARD:
                raise DomainError("nofront law requires delta0 inside (-pi, pi)")
        elif self.variant is LawVariant.CURBSAFE:
            if not (0.0 < state0.delta < math.pi):
                raise DomainError("curbsafe law requires delta0 inside (0, pi)")
            floor = curbsafe_c1_floor(state0)
            if not self.c1 > floor:
                raise LawConstraintError(
                    "curbsafe law requires c1 > max(0, -rho0 tan(gamma0)/sin(delta0)) "
                    f"= {floor!r} at this start")

    def shell_speed(self, cutoff_rho: float) -> float:
        """Commanded speed at the cutoff shell; sizes the default step."""
        if self.variant is LawVariant.DECEL:
            return self.c0 * cutoff_rho ** (self.n / (self.n + 1.0))
        return self.v

    def deadline(self, state0: PolarState) -> float:
        """Arrival-time bound from this start. Exact for BACKSTEP and DECEL;
        for the other variants the same formula with their own c1 serves as a
        conservative horizon (their sharp constants are fitted, not closed
        form)."""
        b0 = error_norm(state0.delta, state0.gamma, ErrorNorm.EUCLID)
        if self.variant is LawVariant.DECEL:
            return arrival_deadline_decel(state0.rho, self.c0, self.n, self.c1, b0)
        return arrival_deadline(state0.rho, self.v, self.c1, b0)

    def feedback(self, state: PolarState, rho_floor: float = 0.0) -> tuple[float, float]:
        """Evaluate the law at one state. Returns (v, omega). The gain floor
        is self.rho_floor when set, else the rho_floor argument."""
        floor = self.rho_floor if self.rho_floor is not None else rho_floor
        return self.scalar_feedback(floor)(state.rho, state.delta, state.gamma)

    def scalar_feedback(self, floor: float):
        """Bind gains into a plain (rho, delta, gamma) -> (v, omega) function,
        the hot path used by the integrators."""
        c1 = self.c1
        c2 = self.c2
        v = self.v
        if self.variant is LawVariant.BACKSTEP:
            def fb(rho, delta, gamma, c1=c1, c2=c2, v=v, floor=floor):
                r = rho if rho > floor else floor
                vw = _view_backstep(r, delta, gamma, c1, c2)
                return v, _assemble(v, r, gamma, vw.omega_bar)
        elif self.variant is LawVariant.SMOOTH:
            def fb(rho, delta, gamma, c1=c1, c2=c2, v=v, floor=floor):
                r = rho if rho > floor else floor
                vw = _view_smooth(r, delta, gamma, c1, c2)
                return v, _assemble(v, r, gamma, vw.omega_bar)
        elif self.variant is LawVariant.NOFRONT:
            def fb(rho, delta, gamma, c1=c1, c2=c2, v=v, floor=floor):
                r = rho if rho > floor else floor
                vw = _view_nofront(r, delta, gamma, c1, c2)
                return v, _assemble(v, r, gamma, vw.omega_bar)
        elif self.variant is LawVariant.CURBSAFE:
            def fb(rho, delta, gamma, c1=c1, c2=c2, v=v, floor=floor):
                r = rho if rho > floor else floor
                vw = _view_curbsafe(r, delta, gamma, c1, c2)
                return v, _assemble(v, r, gamma, vw.omega_bar)
        else:
            c0 = self.c0
            p = self.n / (self.n + 1.0)
            def fb(rho, delta, gamma, c1=c1, c2=c2, c0=c0, p=p, floor=floor):
                r = rho if rho > floor else floor
                vr = c0 * r ** p
                vw = _view_backstep(r, delta, gamma, c1, c2)
                return vr, _assemble(vr, r, gamma, vw.omega_bar)
        return fb

    def delta_guard(self) -> tuple[float, float]:
        """Open interval delta must stay inside while this law runs.

        Edges that sit on a tangent pole keep the 1e-9 pole margin. The
        curbsafe lower edge at delta = 0 is not a pole but a safety boundary;
        converged runs jitter around 0 at the 1e-9 scale, so the guard there
        matches the certificate slack (1e-6) instead of tripping on dust.
        """
        if self.variant is LawVariant.NOFRONT:
            return (-math.pi + ANGLE_GUARD, math.pi - ANGLE_GUARD)
        if self.variant is LawVariant.CURBSAFE:
            return (-1e-6, math.pi - ANGLE_GUARD)
        return (-math.inf, math.inf)
