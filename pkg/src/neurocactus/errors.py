"""Exception hierarchy shared by the neurocactus modules."""


class NeurocactusError(Exception):
    """Base class for every error raised by this package."""


# graph construction
class GraphError(NeurocactusError, ValueError):
    pass


class DuplicateEdge(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class WeightOutOfBounds(GraphError):
    pass


class BadControlNode(GraphError):
    pass


class InfeasibleSize(GraphError):
    pass


# numerics
class BadInterval(NeurocactusError, ValueError):
    pass


class DimensionMismatch(NeurocactusError, ValueError):
    pass


class StepMismatch(NeurocactusError, ValueError):
    pass


class ConditionViolated(NeurocactusError):
    """The decay rate does not dominate the worst-case row weight sum."""


class NumericalFailure(NeurocactusError):
    pass


class NotStabilizable(NumericalFailure):
    pass


class IllConditioned(NumericalFailure):
    pass


# scenario files
class SchemaError(NeurocactusError, ValueError):
    def __init__(self, message, pointer=""):
        self.pointer = pointer
        super().__init__(f"{pointer or '/'}: {message}")


class DanglingReference(NeurocactusError, ValueError):
    pass


class TargetResidualWarning(UserWarning):
    """The requested regulation target is not an exact steady state."""

    def __init__(self, residual):
        self.residual = float(residual)
        super().__init__(f"target is not sustainable; feedforward residual {self.residual:.3e}")
