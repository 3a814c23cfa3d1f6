"""Exception hierarchy shared by the solver, the oracle and the CLI."""


class HotellingError(Exception):
    """Base class for every error raised by this package."""


class DomainError(HotellingError, ValueError):
    """An argument lies outside the domain of an operation."""


class NonConvexCostError(DomainError):
    """Cost function is not strictly convex."""


class UnboundedObjectiveError(DomainError):
    """Discounted objective diverges (price drift at or above the discount rate)."""


class DivergenceSignal(HotellingError, ArithmeticError):
    """Marginal revenue is unbounded at zero extraction.

    Not a domain error: callers are expected to read it as +inf.
    """


class SolverError(HotellingError, RuntimeError):
    """Internal numerical failure. Should never fire for validated scenarios."""


class InfeasibleHorizonError(HotellingError):
    """Discrete horizon too short to place the whole stock."""


class IntegrityError(HotellingError):
    """A path violates the first-order condition it claims to satisfy."""


class UndefinedMetricError(HotellingError):
    """Metric is undefined for the given path (e.g. zero stock)."""


class ConfigError(HotellingError):
    """Configuration document could not be turned into a run."""


class ConfigParseError(ConfigError):
    def __init__(self, msg, line, column):
        super().__init__(f"{msg} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownKeyError(ConfigError):
    def __init__(self, key, where):
        super().__init__(f"unknown key {key!r} in {where}")
        self.key = key
