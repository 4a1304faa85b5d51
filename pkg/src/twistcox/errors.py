"""Exception hierarchy shared by all modules."""


class CoxeterError(Exception):
    """Base class for every error raised by twistcox."""


class MalformedMatrix(CoxeterError, ValueError):
    pass


class NonCrystallographic(CoxeterError, ValueError):
    """Rank >= 3 with a label outside {2, 3, 4, 6, inf}."""


class BackendMismatch(CoxeterError, ValueError):
    pass


class InfiniteParabolic(CoxeterError):
    pass


class InfiniteGroup(CoxeterError):
    pass


class BudgetExceeded(CoxeterError):
    """An enumeration or chain count exceeded its configured cap."""

    def __init__(self, what, budget):
        super().__init__(f"{what} exceeded budget of {budget}")
        self.what = what
        self.budget = budget


class InvalidAutomorphism(CoxeterError, ValueError):
    pass


class NotTwistedInvolution(CoxeterError, ValueError):
    pass


class SubwordBudget(BudgetExceeded):
    pass


class TruncationTooSmall(CoxeterError):
    pass


class InfiniteDihedralPair(CoxeterError):
    pass


class UnsupportedInfinitePair(CoxeterError):
    pass


class InfiniteFix(CoxeterError):
    pass


class ThetaNotConjugationByW0(CoxeterError, ValueError):
    pass


class NotComparable(CoxeterError, ValueError):
    pass


class InconsistentRanks(CoxeterError, ValueError):
    pass


class NotAComplex(CoxeterError, ValueError):
    pass


class HypothesisFailed(CoxeterError, ValueError):
    """The interval/generator data do not satisfy a matching's preconditions."""


class MatchingError(CoxeterError):
    """A constructed matching produced a cell outside the face poset."""


class NoPartition(CoxeterError, ValueError):
    pass


class KBudget(BudgetExceeded):
    pass


class UnknownPreset(CoxeterError, ValueError):
    pass
