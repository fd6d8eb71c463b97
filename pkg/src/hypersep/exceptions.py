"""Exception hierarchy.

Every domain error derives from :class:`HypersepError` so callers (and the
CLI) can separate domain failures from programming errors.
"""


class HypersepError(Exception):
    """Base class for all domain errors raised by hypersep."""


class OutsideDisc(HypersepError, ValueError):
    pass


class DomainError(HypersepError, ValueError):
    pass


class CoincidentEndpoints(HypersepError, ValueError):
    pass


class ThroughOrigin(HypersepError, ValueError):
    pass


class TooLarge(HypersepError, ValueError):
    pass


class EmptyInput(HypersepError, ValueError):
    pass


class EvaluationFailure(HypersepError, RuntimeError):
    pass


class DuplicatePoints(HypersepError, ValueError):
    def __init__(self, msg, pair=None):
        super().__init__(msg)
        self.pair = pair


class NotSplittable(HypersepError):
    def __init__(self, msg, cycle=None):
        super().__init__(msg)
        self.cycle = list(cycle) if cycle is not None else []


class NotSeparated(HypersepError, ValueError):
    pass


class HypothesisViolation(HypersepError, ValueError):
    def __init__(self, msg, hypothesis=None):
        super().__init__(msg)
        self.hypothesis = hypothesis


class PartitionHypothesisViolation(HypothesisViolation):
    pass


class NoIntersection(HypersepError, ValueError):
    pass


class OracleOffSegment(HypersepError):
    def __init__(self, msg, triple=None, distance=None):
        super().__init__(msg)
        self.triple = triple
        self.distance = distance


class ProjectionOverlap(HypersepError, ValueError):
    pass


class ContourThroughZero(HypersepError, RuntimeError):
    pass


class TailTooLarge(HypersepError, RuntimeError):
    pass


class NoNehariPoint(HypersepError):
    def __init__(self, msg, max_value=0.0, location=None):
        super().__init__(msg)
        self.max_value = max_value
        self.location = location


class CriticalPoint(HypersepError, ValueError):
    pass


class DependentSolutions(HypersepError, ValueError):
    pass
