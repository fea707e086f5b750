"""Exception types shared across the package."""


class SymtoepError(Exception):
    """Base class for errors raised by symtoep."""


class InputError(SymtoepError, ValueError):
    """Malformed arguments: wrong lengths, extents, domains."""


class SingularSymbolError(SymtoepError):
    """|f| falls below the admissible threshold where f/|f| is needed."""


class AssumptionError(SymtoepError):
    """A theoretical precondition (e.g. essential positivity) is violated."""


class SingularPreconditionerError(SymtoepError):
    """A preconditioner has a (numerically) zero eigenvalue or pivot."""


class SizeCapError(SymtoepError):
    """Refusal to build a dense object above the configured size cap."""


class ConfigError(SymtoepError, ValueError):
    """Invalid or incompatible run configuration."""
