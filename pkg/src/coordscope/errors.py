class CoordscopeError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(CoordscopeError, ValueError):
    pass


class EvaluationError(CoordscopeError):
    """A non-finite objective value was hit during finite differencing."""

    def __init__(self, message, coordinate=None):
        super().__init__(message)
        self.coordinate = coordinate


class CapacityError(CoordscopeError, ValueError):
    pass


class ContractError(CoordscopeError, ValueError):
    pass


class InfeasibleInstanceError(CoordscopeError):
    pass


class SolverFailure(CoordscopeError):
    pass


class ConfigError(CoordscopeError, ValueError):
    pass
