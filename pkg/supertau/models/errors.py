"""
Exception hierarchy for the super tau-cover engine.

Check failures are never raised; they are reported as failed CheckResult
entries. Exceptions signal misuse or inputs outside the supported algebra.
"""


class SupertauError(Exception):
    """Base class for every error raised by the engine."""


class ValidationError(SupertauError):
    """A Frobenius manifold document violates a required identity."""

    def __init__(self, identity, message=None):
        self.identity = identity
        super().__init__(message or f"identity '{identity}' is violated")


class NotATotalDerivative(SupertauError):
    """The antiderivative algorithm met a polynomial outside dx(A)."""

    def __init__(self, message, residue=None):
        self.residue = residue
        super().__init__(message)


class NotInvertible(SupertauError):
    """A Laurent series has a leading coefficient that cannot be inverted."""


class UnsupportedGenerators(SupertauError):
    """An operation restricted to the free subalgebra met a nonlocal generator."""


class DimensionMismatch(SupertauError):
    """Operator and vector sizes disagree."""


class SolveError(SupertauError):
    """The Hamiltonian density ansatz is inconsistent."""


class DivisibilityError(SupertauError):
    """The two-point generating function is not divisible by z1 + z2."""


class UnsupportedOrder(SupertauError):
    """No Virasoro coefficient table is available for the requested order."""


class TruncationTooSmall(SupertauError):
    """A check needs time variables beyond the configured truncation."""


class WindowError(SupertauError):
    """A series coefficient outside the exactly known window was requested."""


class DegreeError(SupertauError):
    """A local functional has mixed or unexpected odd degree."""
