class VhoevalError(Exception):
    """Base class for every error raised by this package."""


class MatrixError(VhoevalError, ValueError):
    pass


class JudgmentError(VhoevalError, ValueError):
    pass


class SimulationError(VhoevalError):
    pass


class ConfigError(VhoevalError, ValueError):
    pass
