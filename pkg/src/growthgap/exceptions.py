"""Exception hierarchy.

Input-shaped problems subclass :class:`ValueError` so callers that only care
about "bad input" can catch that.  Certification failures that still carry a
usable partial result are not exceptions; they are flags on the result.
"""


class GrowthGapError(Exception):
    """Base class for every error raised by this package."""


class InvalidAutomaton(GrowthGapError, ValueError):
    """Malformed automaton.

    ``field`` names the offending top-level key and ``transition`` the index
    of the offending transition in input order, when known; file loaders use
    them to point at a line.
    """

    def __init__(self, msg, field=None, transition=None):
        super().__init__(msg)
        self.field = field
        self.transition = transition


class NondeterministicTransition(InvalidAutomaton):
    pass


class NonpositiveWeight(InvalidAutomaton):
    pass


class DanglingStateReference(InvalidAutomaton):
    pass


class EmptyLanguage(GrowthGapError):
    pass


class NoCycle(GrowthGapError):
    """Raised for the 1x1 zero block, which has no period."""


class NotComparable(GrowthGapError, ValueError):
    pass


class SeparationFailed(GrowthGapError):
    pass


class InsufficientData(GrowthGapError, ValueError):
    pass


class InvalidWord(GrowthGapError, ValueError):
    pass


class FiniteIndexSubgroup(GrowthGapError):
    pass


class NotFound(GrowthGapError):
    pass


class DeterminismClash(GrowthGapError, ValueError):
    pass


class InjectivityViolation(GrowthGapError):
    def __init__(self, message, first=None, second=None):
        super().__init__(message)
        self.first = first
        self.second = second


class LoopAtBasepoint(GrowthGapError, ValueError):
    pass


class Disconnected(GrowthGapError, ValueError):
    pass


class AttemptCapExceeded(GrowthGapError):
    def __init__(self, message, best_girth=None, best_cover=None):
        super().__init__(message)
        self.best_girth = best_girth
        self.best_cover = best_cover
