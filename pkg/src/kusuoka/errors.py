"""Exception and warning types raised by the library."""


class KusuokaError(Exception):
    """Base class for all library errors."""


class ValidationError(KusuokaError, ValueError):
    """Input failed a structural or numerical validation check."""


class DimensionMismatch(ValidationError):
    pass


class BadDimension(ValidationError):
    pass


class NotHermitian(ValidationError):
    pass


class NotUnitary(ValidationError):
    pass


class NotPsd(ValidationError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ZeroElement(ValidationError):
    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class SumNotIdentity(ValidationError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotDensityMatrix(ValidationError):
    pass


class EmptyString(ValidationError):
    pass


class WrongPovmKind(KusuokaError):
    """The operation is only defined for a particular measurement class."""


class ZeroProbabilityBranch(KusuokaError):
    """An evolution map was applied to a state where its outcome has probability zero."""


class NoConvergence(KusuokaError):
    pass


class NoFixedPoint(KusuokaError):
    pass


class GuardViolation(KusuokaError):
    """A size guard on an exhaustive enumeration was exceeded."""


class TooManyOutcomes(GuardViolation):
    pass


class EnumerationTooLarge(GuardViolation):
    pass


class ConsistencyError(KusuokaError):
    """Two independent evaluation routes disagreed beyond tolerance."""


class NonUniqueWarning(UserWarning):
    """The stationary density of an operator family is not unique."""
