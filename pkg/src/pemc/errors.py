"""Exception hierarchy shared across the package.

``ValidationError`` and its subclasses signal bad inputs (CLI exit code 2);
the remaining ``PemcError`` subclasses signal runtime infeasibility
(CLI exit code 3).
"""


class PemcError(Exception):
    """Base class for all package errors."""


class ValidationError(PemcError, ValueError):
    """Invalid input data, configuration or call arguments."""


class ScenarioParseError(ValidationError):
    """Scenario JSON/CSV could not be parsed or is missing required fields."""


class SeriesLengthError(ValidationError):
    """A tariff/weather series does not cover the scheduling horizon."""


class DegenerateLoadError(ValidationError):
    """Load with max_delay_slots <= duration_slots (delay denominator zero)."""


class InfeasibleScheduleError(PemcError):
    """A schedule starts a load before its arrival slot."""


class InfeasibleActionError(PemcError):
    """Battery action outside the feasible charge/discharge ranges."""


class SearchSpaceError(PemcError):
    """Exhaustive enumeration refused because the space is too large."""

    def __init__(self, count, limit):
        self.count = count
        self.limit = limit
        super().__init__(
            f"exhaustive search space has {count} schedules, exceeds limit {limit}"
        )
