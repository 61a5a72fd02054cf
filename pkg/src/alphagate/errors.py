"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument fell outside its mathematical domain."""


class InvalidBattery(ValueError):
    """A test battery violates its structural invariants."""


class InvalidMethod(ValueError):
    """The requested adjustment method is not valid for this operation."""


class InvalidScenario(ValueError):
    """A simulation scenario violates its structural invariants."""


class FileFormatError(ValueError):
    """An input file failed schema validation; the message carries the location."""
