"""Exception hierarchy.

Every numerical failure mode gets its own class so callers (and the CLI) can
tell a malformed input apart from a genuinely singular point.
"""


class SigmaSurfError(Exception):
    """Base class for all package errors."""


class InputError(SigmaSurfError, ValueError):
    """Malformed input (bad dimension, bad file field, ...)."""


class SingularityError(SigmaSurfError, ArithmeticError):
    """Evaluation hit a pole, zero or degenerate point."""


class ConvergenceError(SigmaSurfError, ArithmeticError):
    """A numerical procedure failed its convergence certificate."""


# jet-core
class ShapeMismatch(InputError):
    pass


class PoleAtBase(SingularityError):
    pass


class DivisionBySingularJet(SingularityError):
    pass


class OrderExhausted(SigmaSurfError, ValueError):
    pass


class BranchCut(SingularityError):
    pass


class ZeroBase(SingularityError):
    pass


# model-core
class InvalidDimension(InputError):
    pass


class NullVector(SingularityError):
    pass


class TowerDepthExceeded(InputError):
    pass


# quadrature / immersion
class QuadratureDivergence(ConvergenceError):
    pass


class PathThroughSingularity(SingularityError):
    pass


class NonConvergent(ConvergenceError):
    pass


class NotAntiHermitian(InputError):
    pass


# geometry
class DegenerateMetric(SingularityError):
    pass


# meron
class ZeroOfF(SingularityError):
    pass


class RootFindingFailure(ConvergenceError):
    pass


class ClusteredRoots(SingularityError):
    pass


class SeedAtCriticalPoint(SingularityError):
    pass


class StepTooLarge(ConvergenceError):
    pass
