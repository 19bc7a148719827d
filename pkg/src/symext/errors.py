"""Exception types shared across the package."""


class SymextError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(SymextError):
    """Operands have incompatible or inconsistent dimensions."""


class NotHermitian(SymextError):
    """Matrix fails the Hermiticity tolerance check."""


class NotAState(SymextError):
    """Matrix is not a valid density operator (Hermitian, PSD, unit trace)."""


class ZeroProbability(SymextError):
    """A probabilistic operation succeeded with (numerically) zero probability."""


class SpectrumMismatch(SymextError):
    """Global and local spectra differ where equality is required."""


class InvalidInstrument(SymextError):
    """Kraus families violate their completeness/subnormalization constraints."""


class NotSymmetric(SymextError):
    """Tripartite operator is not invariant under the B <-> B' swap."""


class WrongRank(SymextError):
    """Operator rank differs from what the operation requires."""


class ConditionUnsatisfied(SymextError):
    """A required spectral condition does not hold for the input."""


class NotCanonical(SymextError):
    """Parameters are not in the canonical ordering the operation expects."""


class OutOfRange(SymextError):
    """A parameter lies outside its admissible interval."""


class PreconditionFailed(SymextError):
    """Operation-specific precondition violated."""


class TooLarge(SymextError):
    """Problem size exceeds what the numerical routine is sized for."""


class WrongDimension(SymextError):
    """Subsystem dimension differs from what the operation supports."""


class InvalidChannel(SymextError):
    """Kraus family is not trace preserving or is otherwise malformed."""


class NotAChoiState(SymextError):
    """Bipartite state lacks the maximally mixed input marginal of a Choi state."""


class NotAnExtension(SymextError):
    """Claimed symmetric extension fails re-verification against its target."""
