"""Exception hierarchy shared by every module of the package."""


class SplitRingError(Exception):
    """Base class for all errors raised by splitring."""

    hint = ""


class ZeroElement(SplitRingError):
    hint = "the operation is only defined for nonzero elements"


class ZeroDivisor(SplitRingError):
    hint = "the divisor must be nonzero"


class NotDivisible(SplitRingError):
    hint = "the dividend does not lie in the principal ideal of the divisor"


class RankTooLow(SplitRingError):
    hint = "the chosen indeterminate has smaller rank than the element"


class NonMember(SplitRingError):
    hint = "the Laurent expression does not lie in the tower ring"


class ParseError(SplitRingError):
    def __init__(self, message, position=None, source=None):
        self.position = position
        self.source = source
        if position is not None:
            message = f"{message} (column {position + 1})"
        super().__init__(message)


class UnknownIndeterminate(SplitRingError):
    hint = "indeterminates must be created by split/freshu before they are referenced"


class TooManyTerms(SplitRingError):
    hint = "expansion exceeded the configured --max-terms guard"


class NotCertifiedPrime(SplitRingError):
    hint = "only t-indeterminates and linear polynomials in a fresh variable with coprime coefficients can be split"


class AlreadyStableOrUnit(SplitRingError):
    hint = "the element is associate to a stable or unit prime, so it is not temporary and never splits"


class ZeroOrConstant(SplitRingError):
    hint = "zero and nonzero constants are not primes"


class RankTooHigh(SplitRingError):
    hint = "u-indeterminate arguments must already live at the previous stage"


class TemporaryDivisor(SplitRingError):
    hint = "b has a temporary prime factor at the previous stage; see u-eligibility condition"


class StableSquare(SplitRingError):
    hint = "b is divisible by the square of a stable prime; see u-eligibility condition"


class NotCoprime(SplitRingError):
    hint = "the two arguments share a prime factor"


class ZeroArgument(SplitRingError):
    hint = "arguments of a u-indeterminate must be nonzero"


class UnknownHandle(SplitRingError):
    hint = "the prime handle is not registered in this tower"


class NotSubcertificate(SplitRingError):
    hint = "the divisor certificate has an exponent larger than the dividend's"


class CertificateRequired(SplitRingError):
    hint = "division steps need factorization certificates for both arguments"


class UnsupportedShape(SplitRingError):
    hint = "only quotients and unit multipliers of rank at most rank(p)+1 avoiding t_{rank(p)+1} are witnessed"
