"""Exception hierarchy shared by the solver, the decision engine and the CLI."""


class InvalidArgument(ValueError):
    """Input violates a documented precondition."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class SolverError(RuntimeError):
    """Base class for failures raised by the knot solvers."""


class NoSolution(SolverError):
    """The moment system has no ordered positive solution at this knot count."""


class MaxIterations(SolverError):
    """Iteration budget exhausted without a verdict on feasibility."""


class PathCollision(SolverError):
    """Two tracked knots merged before the continuation reached its target."""


class NumericalFailure(SolverError):
    """A decision could not be completed numerically.

    Carries the stage (order index) at which the failure happened and any
    samples collected so far, so callers can report or replay it.
    """

    def __init__(self, message, stage=None, samples=None):
        super().__init__(message)
        self.stage = stage
        self.samples = list(samples) if samples is not None else []
