"""Exception hierarchy shared by every module."""


class ReclabError(Exception):
    pass


class UnsupportedPrime(ReclabError, ValueError):
    pass


class PrecisionTooLow(ReclabError, ValueError):
    pass


class PrimeMismatch(ReclabError, ValueError):
    pass


class ParamsMismatch(ReclabError, ValueError):
    pass


class NotAUnit(ReclabError, ArithmeticError):
    pass


class NotDivisible(ReclabError, ArithmeticError):
    pass


class NotInBaseField(ReclabError, ValueError):
    pass


class NotInMaximalIdeal(ReclabError, ValueError):
    pass


class ExpDiverges(ReclabError, ArithmeticError):
    pass


class NoSolution(ReclabError, ArithmeticError):
    pass


class ConstructionFailed(ReclabError, RuntimeError):
    pass


class ConvergenceStall(ReclabError, RuntimeError):
    pass


class NoUnitCandidate(ReclabError, RuntimeError):
    pass


class TruncationTooSmall(ReclabError, ValueError):
    pass


class NoRootInM(ReclabError, ArithmeticError):
    """x has no isogeny preimage in the unramified extension."""


class NotTorsion(ReclabError, ArithmeticError):
    pass


class SigmaVarianceDetected(ReclabError, ArithmeticError):
    pass


class DenominatorDegenerate(ReclabError, ArithmeticError):
    pass


class ParseError(ReclabError, ValueError):
    pass
