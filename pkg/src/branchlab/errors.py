"""Exception hierarchy.

Every domain error carries an ``exit_code`` used by the command line:
2 for input errors, 3 for resource caps, 1 for detected invariant violations.
"""


class BranchlabError(Exception):
    exit_code = 2


class InputError(BranchlabError):
    pass


class ParseError(InputError):
    pass


class DivisionByZero(BranchlabError, ZeroDivisionError):
    pass


class TowerMismatch(BranchlabError):
    pass


class NotIrreducible(InputError):
    pass


class NotDivisible(BranchlabError):
    pass


class VariableMismatch(InputError):
    pass


class LineInsideHypersurface(InputError):
    pass


class PointNotOnCurve(InputError):
    pass


class NonSquarefreeAtPoint(InputError):
    pass


class ComponentUnknown(InputError):
    pass


class CommonComponent(InputError):
    pass


class InfiniteIntersection(CommonComponent):
    pass


class NonRationalPoint(InputError):
    pass


class FamilyDegenerate(InputError):
    pass


class TruncationTooShort(InputError):
    pass


class DegenerateBranch(InputError):
    pass


class HyperplaneContainsBranch(InputError):
    pass


class ProjectionCollapsesBranch(InputError):
    pass


class SystemVanishesOnBranch(InputError):
    pass


class MemberContainsCurve(InputError):
    pass


class DegenerateSystem(InputError):
    pass


class LedgerExceedsFixedContribution(InputError):
    pass


class OrderTooSmall(InputError):
    pass


class ResourceCap(BranchlabError):
    exit_code = 3


class TowerDepthExceeded(ResourceCap):
    pass


class ProbeExhausted(ResourceCap):
    pass


class DirectionDegenerate(ResourceCap):
    pass


class TruncationCapReached(ResourceCap):
    pass


class InvariantViolation(BranchlabError):
    exit_code = 1
