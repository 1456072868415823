"""Shared exception types.

The hierarchy separates recoverable skip signals (a prime is abandoned and the
pipeline carries on) from hard errors that indicate a bug or unusable input.
"""


class G2Error(Exception):
    """Base class for all package errors."""


class UsageError(G2Error):
    """Malformed user input (curve strings, flags, file paths)."""


class GuardExceeded(G2Error):
    """A configured resource guard was hit; callers should skip and move on."""


class NonGeneric(G2Error):
    """A subgroup violates the genericity needed for the Groebner-shape ideal.

    Carries a short reason: "weight<2 point", "u1 collision" or "v1 = 0".
    """

    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


class NotRational(G2Error):
    """Interpolated kernel data fails to descend to the base field."""


class NotEigen(G2Error):
    """No Frobenius eigenvalue exists on a supposedly stable cyclic subgroup."""


class Ramified(G2Error):
    """The rational prime ramifies in the real quadratic field."""


class BoundNotMet(G2Error):
    """A reconstruction precondition (N(B) > 16q, product of moduli) fails."""


class InconsistentResidues(G2Error):
    """No candidate satisfies the collected congruences within the Weil box."""


class ValidationError(G2Error):
    """A data file violates a structural invariant; the message names it."""


class DenominatorVanishes(G2Error):
    """A modular-equation denominator vanishes at the evaluation point."""


class EmptyRange(G2Error):
    """A prime range contains no primes."""


class InternalInconsistency(G2Error):
    """An invariant that should hold unconditionally was violated (a bug)."""
