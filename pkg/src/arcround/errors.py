"""Exception hierarchy for input validation, numeric failures and invariant breaches."""


class ArcRoundError(Exception):
    """Base class for all library errors."""


class InputError(ArcRoundError):
    """Invalid input geometry, rejected at load."""


class NotClosed(InputError):
    pass


class SelfIntersecting(InputError):
    pass


class DegenerateElement(InputError):
    pass


class NonFinite(InputError):
    pass


class PointNotOnCarrier(ArcRoundError):
    pass


class EndpointNotOnInput(ArcRoundError):
    pass


class InvalidStart(ArcRoundError):
    pass


class PointNotOnCurve(ArcRoundError):
    pass


class NumericalFailure(ArcRoundError):
    """A bracket or root expected by an upstream invariant was not found."""


class ChordTooLong(ArcRoundError):
    pass


class PerfectArc(ArcRoundError):
    """A perfect cut arc reached a code path that should have skipped it."""


class InvariantError(ArcRoundError):
    """Internal state violated a structural invariant; carries a dump payload."""

    def __init__(self, msg, dump=None):
        super().__init__(msg)
        self.dump = dump


class IterationBudgetExceeded(InvariantError):
    pass


class TopologyError(InvariantError):
    pass


class InconsistentIndex(InvariantError):
    pass


class NoHit(ArcRoundError):
    """Circular ray query closed on itself without meeting the boundary."""


class ResolutionTooCoarse(ArcRoundError):
    pass


class GridMismatch(ArcRoundError):
    pass
