"""Exception hierarchy shared by all modules."""


class CRNError(Exception):
    """Base class for every error raised by :mod:`autocrn`."""


class NetworkFormatError(CRNError, ValueError):
    """A network document is malformed or violates a structural invariant."""


class UnknownSpecies(NetworkFormatError):
    pass


class NonPositiveRate(NetworkFormatError):
    pass


class SelfLoop(NetworkFormatError):
    pass


class DuplicateReaction(NetworkFormatError):
    pass


class EmptyComplex(NetworkFormatError):
    pass


class NegativeConcentration(CRNError, ValueError):
    pass


class NoConvergence(CRNError, RuntimeError):
    pass


class NotReversible(CRNError):
    """A reaction lacks its reverse, or a cycle violates the Kolmogorov criterion."""


class NotMassPreserving(CRNError):
    pass


class NotIrreducible(CRNError):
    pass


class TooManyStates(CRNError):
    pass


class NotAutocatalytic(CRNError):
    """Raised where a profile is required but classification failed."""

    def __init__(self, violations):
        self.violations = violations
        super().__init__("; ".join(f"({v.condition}) {v.reason}" for v in violations))


class FugacityOutsideRadius(CRNError, ValueError):
    pass


class WrongRegime(CRNError):
    pass


class WrongFactorType(CRNError, ValueError):
    pass
