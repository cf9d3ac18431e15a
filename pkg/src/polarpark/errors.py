"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the region where a formula is defined."""


class DegenerateOrigin(DomainError):
    """Bearing angles are undefined at the target point itself."""


class LawConstraintError(ValueError):
    """A gain or start state violates the conditions a control law needs."""


class MismatchedLaw(ValueError):
    """Trajectory metadata disagrees with the law it is being checked against."""


class ScenarioError(ValueError):
    """An input file (scenario, sweep, or trace) is malformed: wrong schema,
    missing table, bad header, bad value."""


class GuardTripped(RuntimeError):
    """The closed-loop state left the controller's domain during integration.

    Carries the offending sample and the partial trajectory up to the trip
    point so callers can inspect what happened. Never swallowed silently.
    """

    def __init__(self, message, sample=None, trajectory=None):
        super().__init__(message)
        self.sample = sample
        self.trajectory = trajectory
