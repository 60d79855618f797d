"""Exception hierarchy shared by every module."""


class WergodicError(Exception):
    """Base class for all library errors."""


class TableInvalid(WergodicError, ValueError):
    pass


class SizeLimit(WergodicError):
    pass


class IndexOutOfRange(WergodicError, IndexError):
    pass


class EmptySupport(WergodicError, ValueError):
    pass


class GroupMismatch(WergodicError, ValueError):
    pass


class SupportOverflow(WergodicError):
    """A measure on the integers outgrew the configured window cap."""


class OracleDisagreement(WergodicError):
    """Two independent routes to the same predicate disagreed."""


class NotPowerBounded(WergodicError):
    pass


class NotAbelian(WergodicError):
    pass


class EigensolverFailure(WergodicError):
    pass


class CesaroNotConverged(WergodicError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class CustomOutOfRange(WergodicError, IndexError):
    pass


class Inconclusive(WergodicError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConfigError(WergodicError, ValueError):
    """Scenario configuration failed to parse or validate."""
