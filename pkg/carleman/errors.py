"""
Error types raised by the analysis modules
"""


class CarlemanError(Exception):
    """Base class for every analysis error"""


class InvalidParameterError(CarlemanError, ValueError):
    """A family parameter or option is outside its allowed range"""


class NormalizationError(InvalidParameterError):
    """The first log-term of a table is not zero (M_0 must equal 1)"""


class SequenceSpecError(CarlemanError, ValueError):
    """A sequence or proximate-order spec string could not be parsed or loaded"""


class InsufficientDataError(CarlemanError):
    """The prefix is too short for the requested estimate"""


class DomainError(CarlemanError, ValueError):
    """An argument lies outside the mathematical domain of a function"""


class RangeError(DomainError):
    """An argument lies beyond what the stored prefix certifies"""

    def __init__(self, message: str, covered_bound: float = None):
        super().__init__(message)
        self.covered_bound = covered_bound


class InvariantViolation(CarlemanError):
    """An internal consistency rule was broken; this is a bug, not a user error"""
