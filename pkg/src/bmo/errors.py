"""Exception types shared across the package."""


class BmoError(Exception):
    """Base class for every error raised by this package."""


class EmptyClauseError(BmoError):
    pass


class TautologyError(BmoError):
    """A soft clause contains a complementary pair of literals."""


class NotBMOError(BmoError):
    """Level weights violate the multilevel dominance condition.

    ``level`` is the 1-based index of the first offending level; the hard
    tier is reported as ``len(levels) + 1``.
    """

    def __init__(self, level, message):
        super().__init__(message)
        self.level = level


class HardUnsatError(BmoError):
    """The hard clauses admit no model."""


class TooLargeError(BmoError):
    pass


class ParseError(BmoError):
    def __init__(self, lineno, message):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class UniverseError(BmoError):
    """Invalid package universe (undeclared reference, self-conflict, ...)."""


class ConfigError(BmoError):
    pass
