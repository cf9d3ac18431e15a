"""Target-relative polar coordinates and the scalar error norms built on them.

The target sits at the origin facing +x. A planar pose (x, y, theta) maps to
(rho, delta, gamma) where rho is the range, delta is the angle of the vehicle's
position around the target shifted so delta = 0 means "directly behind the
target", and gamma is the bearing of the target off the vehicle's nose
(gamma = 0 means the nose points straight at the target).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DegenerateOrigin, DomainError

TWO_PI = 2.0 * math.pi

# States this close to a tangent pole (|gamma| near pi/2, |delta| near pi for
# the half-angle norms) are rejected rather than evaluated.
ANGLE_GUARD = 1e-9


def wrap_angle(a: float) -> float:
    """Wrap an angle to [-pi, pi)."""
    return (a + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class CartesianPose:
    """Planar pose. theta is stored wrapped to [-pi, pi)."""

    x: float
    y: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(self.theta))


@dataclass(frozen=True)
class PolarState:
    """Range rho, position angle delta, nose-to-target angle gamma.

    delta is deliberately not wrapped: the laws that accept any real delta
    integrate it as a continuous quantity, and wrapping mid-run would tear
    the decay envelopes.
    """

    rho: float
    delta: float
    gamma: float


class ErrorNorm(enum.Enum):
    """Scalar error a decay certificate tracks.

    EUCLID  sqrt(delta^2 + tan(gamma)^2)
    HALF4   sqrt(4 tan(delta/2)^2 + tan(gamma)^2)
    HALF1   sqrt(tan(delta/2)^2 + tan(gamma)^2)
    """

    EUCLID = "euclid"
    HALF4 = "half4"
    HALF1 = "half1"


def cart_to_polar(pose: CartesianPose) -> PolarState:
    """Convert a pose to target-relative polar coordinates.

    Both angles land in [-pi, pi). Raises DegenerateOrigin for a pose at the
    target point, where the bearings are undefined.
    """
    rho = math.hypot(pose.x, pose.y)
    if rho == 0.0:
        raise DegenerateOrigin("bearings are undefined at the target point")
    los = math.atan2(pose.y, pose.x)
    delta = los % TWO_PI - math.pi
    gamma = (los - pose.theta) % TWO_PI - math.pi
    return PolarState(rho=rho, delta=delta, gamma=gamma)


def polar_to_cart(state: PolarState) -> CartesianPose:
    """Inverse of cart_to_polar: x = -rho cos(delta), y = -rho sin(delta),
    theta = wrap(delta - gamma)."""
    if state.rho <= 0.0:
        raise DomainError("rho must be positive")
    return CartesianPose(
        x=-state.rho * math.cos(state.delta),
        y=-state.rho * math.sin(state.delta),
        theta=wrap_angle(state.delta - state.gamma),
    )


def error_norm(delta: float, gamma: float, variant: ErrorNorm = ErrorNorm.EUCLID) -> float:
    """Evaluate the scalar error norm for one (delta, gamma) pair.

    The half-angle variants additionally need |delta| < pi. Raises DomainError
    when a tangent argument reaches its pole.
    """
    if abs(gamma) >= 0.5 * math.pi - ANGLE_GUARD:
        raise DomainError("gamma at or beyond the tangent pole pi/2")
    tg = math.tan(gamma)
    if variant is ErrorNorm.EUCLID:
        return math.hypot(delta, tg)
    if abs(delta) >= math.pi - ANGLE_GUARD:
        raise DomainError("delta at or beyond the half-angle tangent pole pi")
    th = math.tan(0.5 * delta)
    if variant is ErrorNorm.HALF4:
        return math.hypot(2.0 * th, tg)
    if variant is ErrorNorm.HALF1:
        return math.hypot(th, tg)
    raise DomainError(f"unknown error norm variant {variant!r}")


def gain_margin(s: float) -> float:
    """Worst-case amplification of the coupled-error quadratic form.

    Equals sqrt(lmax/lmin) for the 2x2 form [[1 + s^2, s], [s, 1]], where s is
    the cross gain mixing the two error coordinates. Increasing in s, equal to
    1 at s = 0.
    """
    if s < 0.0:
        raise DomainError("cross gain must be nonnegative")
    return 1.0 + 0.5 * s * s + s * math.sqrt(1.0 + 0.25 * s * s)
