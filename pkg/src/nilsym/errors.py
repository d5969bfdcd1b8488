"""Exception hierarchy shared by every nilsym module."""


class NilsymError(Exception):
    """Base class for all errors raised by the library."""


class InvalidInput(NilsymError, ValueError):
    pass


class InvalidForm(InvalidInput):
    pass


class DimensionMismatch(InvalidInput):
    pass


class AmbientDegenerate(NilsymError):
    pass


class CenterDegenerate(NilsymError):
    pass


class JNotInjective(NilsymError):
    pass


class NotSubalgebra(NilsymError):
    pass


class NotNaturallyReductive(NilsymError):
    pass


class NotReductiveDecomposition(NilsymError):
    pass


class JacobiFailure(NilsymError):
    pass


class InvalidDataSet(NilsymError):
    pass


class NotCompact(NilsymError):
    pass


class DecompositionFailure(NilsymError):
    pass


class NoBoostPart(NilsymError):
    pass


class NotScalarMultiple(NilsymError):
    pass


class NoTimelikeFixed(NilsymError):
    pass


class ZNotInGbar(NilsymError):
    pass


class ZNotCentral(NilsymError):
    pass


class NotADerivation(NilsymError):
    pass


class StepTooLarge(NilsymError):
    pass


class TheoremMismatch(NilsymError):
    """A computed quantity disagrees with a proven identity.

    Raised loudly because it means an implementation bug or a numerically
    degenerate input, never an expected outcome.
    """
