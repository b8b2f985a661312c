"""Exception hierarchy.

Validators raise a subclass of :class:`ValidationError`; its ``violations``
attribute lists every ``(condition, witness)`` that failed, with the exception
type chosen from the first one.
"""


class GQError(Exception):
    pass


class ValidationError(GQError):
    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class BudgetExceeded(GQError):
    pass


# finite spaces
class InvalidSpace(ValidationError):
    pass


class MissingEmptyOrTop(InvalidSpace):
    pass


class NotClosedUnderUnion(InvalidSpace):
    pass


class NotClosedUnderIntersection(InvalidSpace):
    pass


class UnknownPoint(GQError, KeyError):
    pass


class NotSober(ValidationError):
    pass


# groupoids
class AxiomViolation(ValidationError):
    def __init__(self, message, violations=()):
        super().__init__(message, violations)
        self.axiom = self.violations[0][0] if self.violations else None


class NotEquivalence(ValidationError):
    pass


class InvalidAction(ValidationError):
    pass


# quantales
class InvalidQuantale(ValidationError):
    pass


class NotLattice(InvalidQuantale):
    pass


class NotAssociative(InvalidQuantale):
    pass


class DistributivityFail(InvalidQuantale):
    pass


class UnitFail(InvalidQuantale):
    pass


class InvolutionFail(InvalidQuantale):
    pass


class NotUnionClosed(InvalidQuantale):
    pass


class NotOperationClosed(InvalidQuantale):
    pass


class ArgumentsOutOfDomain(GQError, ValueError):
    pass


# selection bases and groupoid quantales
class SelectionBaseError(ValidationError):
    def __init__(self, message, report):
        failed = [(k, v.witness) for k, v in report.items() if not v]
        super().__init__(message, failed)
        self.report = report


class SizeBudgetExceeded(BudgetExceeded):
    pass


class RecoveryFailure(GQError):
    def __init__(self, which, witness):
        super().__init__(f"recovery check {which!r} failed: {witness!r}")
        self.which = which
        self.witness = witness


# reconstruction
class NoTransport(GQError):
    pass


class NonUniqueTransport(GQError):
    pass


class TheoremViolation(GQError):
    def __init__(self, item, witness):
        super().__init__(f"{item}: {witness!r}")
        self.item = item
        self.witness = witness


class RoundTripFailure(GQError):
    def __init__(self, direction, stage, detail=None):
        super().__init__(f"{direction} round trip failed at {stage}: {detail!r}")
        self.direction = direction
        self.stage = stage
        self.detail = detail


# input handling
class ParseError(GQError):
    pass
