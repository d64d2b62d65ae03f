"""Exception types shared across the workbench.

Two broad families matter to callers: malformed or inconsistent input
(ValidationError and subclasses), and computations refused because they
would exceed a configured size bound (ResourceLimit).  Mathematical
negatives -- a certification obstruction, a failed verification -- are
ordinary return values, not exceptions.
"""


class GpdError(Exception):
    pass


class ValidationError(GpdError):
    """Input violates a structural precondition.  Carries a witness."""


class ResourceLimit(GpdError):
    """An enumeration or matrix would exceed the configured cap."""


# groupoid structure

class AxiomViolation(ValidationError):
    pass


class UnknownUnit(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


# bisections and filtrations

class NotABisection(ValidationError):
    pass


class NotSubgroupoid(ValidationError):
    pass


class NotIncreasing(ValidationError):
    pass


class UnionIncomplete(ValidationError):
    pass


# coefficient rings and matrices

class UnsupportedRing(ValidationError):
    pass


class RingMismatch(ValidationError):
    pass


class NotAComplex(ValidationError):
    """d_out . d_in != 0; the witness names the offending column."""


# convolution algebra

class AmbientMismatch(ValidationError):
    pass


class UnknownMap(ValidationError):
    pass


class CoverFailure(ValidationError):
    """A bisection family fails to cover what the operation requires."""


class NotFull(ValidationError):
    pass


class NotGroupBundle(ValidationError):
    pass


class OrderNotInvertible(GpdError):
    """A finite order that must be a unit in the coefficient ring is not.

    Carries the offending integer so callers can report it.
    """

    def __init__(self, order, message=""):
        self.order = order
        super().__init__(message or f"order {order} is not a unit in the coefficient ring")


# modules over a groupoid

class FunctorialityViolation(ValidationError):
    pass


class NotInvariant(ValidationError):
    pass


class IncompatibleModules(ValidationError):
    pass


# Bratteli diagrams

class Malformed(ValidationError):
    """Diagram text fails to parse or names inconsistent dimensions."""


class SourceVertex(ValidationError):
    """A non-root vertex has no incoming edge."""

    def __init__(self, level, vertex):
        self.level = level
        self.vertex = vertex
        super().__init__(f"vertex {vertex} at level {level} has no "
                         f"incoming edge")


class DepthExceeded(ValidationError):
    pass
