"""Exception hierarchy shared by the simulation, statistics and runner layers."""


class WindingLabError(Exception):
    pass


class DomainError(WindingLabError, ValueError):
    """Argument outside the mathematical domain of a function."""


class ConfigError(WindingLabError, ValueError):
    """Invalid simulation or experiment configuration."""


class DataError(WindingLabError, ValueError):
    """Empty, non-finite or otherwise unusable sample data."""


class ContractError(WindingLabError, ValueError):
    """A user-supplied callable broke its contract (e.g. a CDF left [0, 1])."""


class InvalidFamilyError(WindingLabError, ValueError):
    pass


class InconsistentPathError(WindingLabError, RuntimeError):
    """Path does not reach the requested horizon and is not flagged censored."""


class CensoredSampleError(WindingLabError, RuntimeError):
    """The internal-clock cap was hit before the target event occurred."""


class CensoringError(WindingLabError, RuntimeError):
    """Censored fraction of a batch exceeded the hard limit."""


class PathAbortError(WindingLabError, RuntimeError):
    """Direct sampler gave up on a path after too many step rejections."""
