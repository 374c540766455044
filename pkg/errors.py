"""
Error types for the newton-osc toolkit
Library modules raise these; only the command layer catches them
"""


class NewtonOscError(Exception):
    """Base class for every error raised by the toolkit"""


class InputFormatError(NewtonOscError):
    """Malformed JSON term data"""


class InvariantViolation(NewtonOscError):
    """A hard cross-check between two independent computations failed"""


class ArgumentOutOfRange(NewtonOscError, ValueError):
    """An argument outside the domain of the operation"""


# Exact geometry
class EmptyInput(NewtonOscError):
    pass


class UnsupportedDimension(NewtonOscError):
    pass


class PointNotOnBoundary(NewtonOscError):
    pass


class PointOutsidePolyhedron(NewtonOscError):
    pass


class Overflow(NewtonOscError):
    pass


# Newton core
class FlatFunction(NewtonOscError):
    """Only flat markers present, the Newton polyhedron is empty"""


class FaceNotOfThisPolyhedron(NewtonOscError):
    pass


# Pair metrics
class PhaseWithoutFiniteDistance(NewtonOscError):
    pass


# Fan machine
class UnimodularizationBudgetExceeded(NewtonOscError):
    """Raised with the partial (non-unimodular) fan attached"""

    def __init__(self, message, partial_fan=None):
        super().__init__(message)
        self.partial_fan = partial_fan


class ConeNotCompatible(NewtonOscError):
    pass


class NotUnimodular(NewtonOscError):
    pass


class FanNotCompatible(NewtonOscError):
    pass


# Numeric harness
class DimensionTooLarge(NewtonOscError):
    pass


class QuadratureBudgetExceeded(NewtonOscError):
    pass


class InsufficientSamples(NewtonOscError):
    pass


class PoorFit(NewtonOscError):
    """Raised only on strict fits, otherwise the flagged result is returned"""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class GatesNotHeld(NewtonOscError):
    pass


class NoncompactPrincipalFaceWithoutLocalization(NewtonOscError):
    pass
