"""Exception hierarchy.

Two families matter to callers: ``PreconditionError`` (bad input, the
operation was never attempted) and ``CertificateError`` (the operation ran
but a numerical certificate did not hold).
"""


class RankPertError(Exception):
    pass


class PreconditionError(RankPertError, ValueError):
    pass


class CertificateError(RankPertError, ArithmeticError):
    pass


class ParseError(RankPertError, ValueError):
    pass


class DimensionMismatch(PreconditionError):
    pass


class PreconditionViolated(PreconditionError):
    pass


class PoleOnSpectrum(PreconditionError):
    pass


class PoleOnSupport(PreconditionError):
    pass


class NotUnitary(PreconditionError):
    pass


class NotHermitian(PreconditionError):
    pass


class NotNormal(PreconditionError):
    pass


class TargetNotReal(PreconditionError):
    pass


class NotOnCurve(PreconditionError):
    pass


class IncompatibleTolerance(PreconditionError):
    pass


class DistanceTooSmall(PreconditionError):
    pass


class Derogatory(PreconditionError):
    pass


class DuplicateNode(PreconditionError):
    pass


class ZeroCoefficient(PreconditionError):
    pass


class NotInterlacing(PreconditionError):
    pass


class DuplicateEigenvalue(PreconditionError):
    pass


class TooSmall(PreconditionError):
    pass


class NodeCollision(PreconditionError):
    pass


class HypothesisViolated(PreconditionError):
    pass


class IllConditioned(CertificateError):
    pass


class CyclicVectorFailure(CertificateError):
    pass


class IllConditionedKrylov(CertificateError):
    pass


class NumericalLossOfUnitarity(CertificateError):
    pass


class IsometryCheckFailed(CertificateError):
    pass
