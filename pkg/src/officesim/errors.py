"""Exception types shared across the package.

ConfigError and its subclasses map to CLI exit code 1; anything else
that escapes is a runtime error (exit code 2).
"""


class ConfigError(Exception):
    """A problem with user-supplied configuration."""


class ParseError(ConfigError):
    """Input file could not be parsed at all."""


class ValidationError(ConfigError):
    """Input parsed but violates a documented constraint.

    ``problems`` carries one message per violation so callers can report
    everything wrong with a file in one pass.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class CapacityError(ValidationError):
    """Requested population exceeds the building's desk capacity."""


class AccountingError(Exception):
    """An energy-accounting identity failed; indicates a bug, not bad input."""
