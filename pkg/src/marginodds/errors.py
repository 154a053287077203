"""Exception and warning types raised by marginodds."""


class MarginOddsError(Exception):
    """Base class for all errors raised by this package."""


class PartitionError(MarginOddsError, ValueError):
    """Malformed partition, or a partition that does not match the table."""


class DomainError(MarginOddsError, ValueError):
    """Argument outside the domain of a function."""


class DegenerateParameterError(DomainError):
    """A probability vector touches the boundary of the simplex."""


class PoleError(DomainError):
    """Gamma function evaluated at a nonpositive integer."""


class UnreliableResultError(MarginOddsError, RuntimeError):
    """A statistic cannot be trusted, e.g. too few effective samples."""


class ConfigError(MarginOddsError, ValueError):
    """Invalid experiment configuration."""


class DegenerateWeightsWarning(UserWarning):
    """Importance weights collapsed onto a small fraction of the draws."""
