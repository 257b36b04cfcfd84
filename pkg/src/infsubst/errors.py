"""Exception hierarchy shared by all modules."""


class InfSubstError(Exception):
    """Base class for every error raised by this package."""


# numerics
class NumericsError(InfSubstError):
    pass


class NonConvergent(NumericsError):
    pass


class PrecisionExhausted(NumericsError):
    pass


class NoSignChange(NumericsError):
    pass


# sequence validation
class ValidationError(InfSubstError):
    """A coefficient sequence violates one of the admissibility conditions."""

    condition = "?"

    def __init__(self, index, message=""):
        self.index = index
        super().__init__(f"violates {self.condition} at index {index}" + (f": {message}" if message else ""))


class ViolatesA1(ValidationError):
    condition = "A1"


class ViolatesA2(ValidationError):
    condition = "A2"


class ViolatesA3(ValidationError):
    condition = "A3"


# substitution / geometry / recognition
class UnsupportedLimitLetter(InfSubstError):
    pass


class BudgetExceeded(InfSubstError):
    pass


class NoConvergence(InfSubstError):
    pass


class InternalInconsistency(InfSubstError):
    """Two independent computations of the same quantity disagree."""


class DeloneViolation(InfSubstError):
    pass


class NotLegal(InfSubstError):
    pass
