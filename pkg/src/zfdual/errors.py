"""Exception types shared across the toolkit."""


class ZfdualError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ZfdualError):
    """Invalid parameter value or incompatible option combination."""


class DegenerateChannel(ZfdualError):
    """Channel realization too close to singular for the requested construction."""


class SingularMatrix(ZfdualError):
    """Matrix is numerically singular (pivot ratio below threshold)."""


class NotZFSystem(ZfdualError):
    """Filter bank does not satisfy the zero-forcing conditions."""


class UnsupportedConstellation(ZfdualError):
    """Operation requires a different constellation family."""


class InsufficientData(ZfdualError):
    """Not enough qualifying points for the requested estimate."""
