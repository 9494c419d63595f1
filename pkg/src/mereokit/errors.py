"""Exception types shared across the toolkit."""


class MereokitError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(MereokitError, ValueError):
    """Operands have incompatible shapes or factor dimensions."""


class InvariantViolation(MereokitError, ValueError):
    """A checked algebraic invariant fails at construction."""


class HypothesisViolation(MereokitError, ValueError):
    """A spectral precondition of the fingerprint construction fails.

    ``reason`` is one of ``"degenerate_spectrum"`` (eigenvalue gap below
    threshold) or ``"zero_projection"`` (the state has a vanishing
    component on some eigenvector).
    """

    def __init__(self, reason: str, message: str):
        super().__init__(message)
        self.reason = reason


class NoWitnessError(MereokitError):
    """The two structures are not on the same orbit; no unitary maps one to the other."""


class ObjectiveUndefined(MereokitError, ValueError):
    """The locality objective is undefined (operator proportional to the identity)."""


class IncomparableFingerprints(MereokitError, ValueError):
    """Fingerprints with different probe sets or skip patterns cannot be compared."""
