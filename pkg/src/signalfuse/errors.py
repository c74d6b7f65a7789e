"""Exception hierarchy shared across the pipeline.

Three branches map onto the CLI exit codes: ConfigError (1), DataError (2),
NumericalError (3).
"""


class SignalFuseError(Exception):
    pass


class ConfigError(SignalFuseError):
    """Bad parameters, malformed config, unknown rule names."""


class DataError(SignalFuseError):
    """Malformed or insufficient input data."""


class NumericalError(SignalFuseError):
    """A numerical procedure failed to produce a usable result."""


# -- market data -------------------------------------------------------------

class MissingColumn(DataError):
    pass


class DuplicateDate(DataError):
    pass


class NonMonotonicDate(DataError):
    pass


class NegativePrice(DataError):
    pass


class TooShort(DataError):
    pass


class InvalidThresholds(ConfigError):
    pass


# -- news pipeline ------------------------------------------------------------

class EmptyGroup(DataError):
    pass


class LagOutOfRange(ConfigError):
    pass


class BeyondCalendar(DataError):
    pass


# -- indicators ---------------------------------------------------------------

class PeriodTooLong(DataError):
    pass


class SeriesTooShort(DataError):
    pass


class ZeroVolumeWindow(DataError):
    pass


class UnknownRule(ConfigError):
    pass


# -- forecasters --------------------------------------------------------------

class NonConvergence(NumericalError):
    pass


class InsufficientHistory(DataError):
    pass


class NonPositiveData(DataError):
    pass


# -- strategy engine ----------------------------------------------------------

class InvalidComponent(DataError):
    pass


class SignalPriceMismatch(DataError):
    pass


# -- evaluation ---------------------------------------------------------------

class NoOverlap(DataError):
    pass


class WindowMismatch(DataError):
    pass


class EmptyInput(DataError):
    pass
