"""Exception types shared across the package."""


class PwError(Exception):
    """Base class for all package-specific errors."""


class SpecValidationError(PwError, ValueError):
    """A space specification (or one of its parts) is malformed.

    Carries an optional ``location`` naming the offending field, e.g.
    ``pairs[1].weights.ratio``.
    """

    def __init__(self, message, location=None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class IncomparableLayout(PwError, ValueError):
    """Two partition schemes do not live over the same index layout."""


class AddressOutOfRange(PwError, ValueError):
    """A (block, offset) address does not resolve to a valid index."""


class RatioAssumptionViolated(PwError, ValueError):
    """The pointwise domination w1 >= w2 fails somewhere on the block."""


class NotARefinement(PwError, ValueError):
    """The fine partition does not refine the coarse one."""


class HypothesisNotMet(PwError, ValueError):
    """A certification check was requested on a spec that does not satisfy
    the check's hypothesis.  ``predicate`` names the failed condition."""

    def __init__(self, predicate, message=None):
        self.predicate = predicate
        super().__init__(message or f"hypothesis not met: {predicate}")


class DimensionTooLarge(PwError, ValueError):
    """Brute-force sphere search requested above the supported dimension."""


class NotSimplifiable(PwError, ValueError):
    """Direct-sum simplification left the supported class enumeration."""


class UnsupportedFamily(PwError, ValueError):
    """A symbolic query cannot be decided for the given weight structure."""
