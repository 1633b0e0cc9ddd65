"""Exception hierarchy shared across the package.

Three families, matching the CLI exit codes: validation errors (malformed
or inconsistent input data, exit 1), numerical errors (a tolerance-guarded
computation failed, exit 2), and the unsupported case of the classification
(exit 3).
"""


class TcmpError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(TcmpError):
    """Input data is malformed or violates a structural requirement."""


class MissingMoment(ValidationError):
    pass


class SymmetryViolation(ValidationError):
    """gamma_ji differs from conj(gamma_ij) beyond tolerance."""


class NonpositiveMass(ValidationError):
    """gamma_00 must be real and strictly positive."""


class DegreeTooLow(ValidationError):
    """The sequence does not carry enough degrees for the request."""


class BadAtomSpec(ValidationError):
    pass


class ParseError(ValidationError):
    """A moment or measure file could not be parsed."""


class MissingInitialData(ValidationError):
    """Recurrence extension lacks a required seed entry."""


class NumericalError(TcmpError):
    """A tolerance-guarded numerical step failed."""


class NotHermitian(NumericalError):
    pass


class NotPsd(NumericalError):
    pass


class RangeNotIncluded(NumericalError):
    """Column-range inclusion B = M W has no solution within tolerance.

    Carries the worst residual as ``residual``.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class PersymmetryViolation(NumericalError):
    pass


class ConflictingEntry(NumericalError):
    """A recurrence-defined entry disagrees with a value already present."""


class InfeasibleGamma33(NumericalError):
    """No admissible diagonal value exists for the sixtic completion."""


class NoIntersection(NumericalError):
    """The two completion circles do not meet within tolerance."""


class RankMismatch(NumericalError):
    """A constructed block has the wrong numeric rank."""


class AlphaZero(NumericalError):
    """The extracted column relation has vanishing leading coefficient."""


class UnimodularAlpha(NumericalError):
    """|alpha| = 1 makes the conjugate-linear equation singular."""


class SingularBorderedSystem(NumericalError):
    pass


class FlatnessFailure(NumericalError):
    """The extended moment matrix is not flat over the previous order."""


class VerificationFailure(NumericalError):
    """The extracted measure does not reproduce the input moments.

    Carries the worst relative residual as ``residual``.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ExpressFailure(NumericalError):
    """A column could not be expressed over the chosen basis columns."""


class NegativeWeight(NumericalError):
    pass


class IllConditionedVandermonde(NumericalError):
    pass


class UnsupportedCase(TcmpError):
    """Input falls in the a = e, b != f family that the method cannot treat."""
