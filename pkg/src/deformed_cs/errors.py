"""Exception hierarchy.

Every error raised on purpose by the library derives from
:class:`DeformedCSError`; domain and pole errors also derive from
:class:`ValueError` so ordinary ``except ValueError`` handlers keep working.
"""


class DeformedCSError(Exception):
    """Base class for library errors."""


class DomainError(DeformedCSError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class PoleError(DomainError):
    """Evaluation at a pole (e.g. Gamma at a non-positive integer)."""


class NonUnitary(DeformedCSError):
    """A lowest-weight radicand C(j) - g(j+m-1) is not strictly positive."""

    def __init__(self, m, radicand):
        self.m = m
        self.radicand = radicand
        super().__init__(
            f"representation is not unitary (or terminates) at m={m}: "
            f"C(j) - g(j+m-1) = {radicand:.6g}"
        )


class DivergentConjugate(DeformedCSError):
    """The canonical conjugate has a vanishing denominator (finite-type rep)."""

    def __init__(self, m):
        self.m = m
        super().__init__(f"canonical conjugate diverges: C - g(j+m) = 0 at m={m}")


class DivergentMapping(DeformedCSError):
    """The Lie-algebra mapping has a vanishing denominator."""

    def __init__(self, m):
        self.m = m
        super().__init__(f"Lie mapping diverges: C - g(j+m-1) = 0 at m={m}")


class TailNotConvergent(DeformedCSError):
    """No certified geometric tail was found within the dimension budget."""


class NonNormalizable(DeformedCSError):
    """Coefficient sequence does not decay within the requested truncation."""

    def __init__(self, growth_rate, message=""):
        self.growth_rate = growth_rate
        super().__init__(message or f"coefficients grow with ratio {growth_rate:.6g}")


class TruncationError(DeformedCSError):
    """A state has leaked onto the last basis vectors of a truncated space."""

    def __init__(self, trailing, threshold):
        self.trailing = trailing
        self.threshold = threshold
        super().__init__(
            f"trailing coefficient {trailing:.3e} exceeds {threshold:.1e}; increase dim"
        )


class NonConvergent(DeformedCSError):
    """Quadrature failed to certify its tail or reach tolerance."""


class EmptySector(DeformedCSError):
    """The requested joint charge eigenspace is empty."""


class NoLowestWeight(DeformedCSError):
    """The lowering operator has no kernel inside the sector."""


class NonLadder(DeformedCSError):
    """The sector is not a single irreducible ladder."""

    def __init__(self, defect, message=""):
        self.defect = defect
        super().__init__(message or f"sector is not a single ladder (defect dimension {defect})")


class SpecError(DeformedCSError):
    """Problem-spec loading failed (CLI exit code 2)."""


class ParseError(SpecError):
    """Malformed JSON or schema violation in a problem spec."""
