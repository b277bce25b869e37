"""Exception hierarchy shared by the library and the command line."""


class PressureLabError(Exception):
    """Base class for every error raised by pressurelab."""

    exit_code = 1


class InputError(PressureLabError, ValueError):
    """Malformed arguments: out-of-range symbols, bad lengths, bad grids."""


class ConfigError(InputError):
    """A configuration file failed strict validation.

    ``path`` names the offending field (for example ``matrices.2[0][1]``).
    """

    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class PreconditionError(PressureLabError):
    """A mathematical precondition does not hold (e.g. A not primitive)."""

    exit_code = 2


class DegenerateSystemError(PreconditionError):
    """Every product vanishes at the requested length."""


class UnsupportedModeError(PressureLabError):
    """The operation is not defined for this kind of matrix family."""


class SizeGuardError(PressureLabError):
    """An enumeration or lifted matrix would exceed the configured budget."""

    exit_code = 3


class ConvergenceError(PressureLabError):
    """An iterative routine hit its iteration cap."""
