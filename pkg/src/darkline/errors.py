"""Exception hierarchy for darkline."""


class DarklineError(Exception):
    """Base class for every error raised by the package."""


class ConfigError(DarklineError, ValueError):
    """A configuration violates one of its invariants."""


class DegenerateParameterError(DarklineError, ArithmeticError):
    """Parameters sit on a singular point (zero denominator, singular matrix)."""


class UndefinedResultError(DarklineError, ArithmeticError):
    """A closed form evaluates to 0/0 for the given parameters."""


class NoSolutionError(DarklineError, ValueError):
    """A nulling condition has no solution for the given parameters."""


class PathResolutionError(DarklineError, KeyError):
    """A dotted parameter path does not name a configuration field."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class DivergenceError(DarklineError, RuntimeError):
    """Time integration blew up."""

    def __init__(self, message, time):
        super().__init__(message)
        self.time = time


class ScenarioParseError(DarklineError, ValueError):
    """A scenario file could not be parsed."""

    def __init__(self, message, line=None, token=None):
        self.line = line
        self.token = token
        where = f"line {line}: " if line is not None else ""
        tok = f" (near {token!r})" if token is not None else ""
        super().__init__(f"{where}{message}{tok}")
