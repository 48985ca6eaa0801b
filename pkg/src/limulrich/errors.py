"""Exception types shared across the package.

The CLI maps these onto exit codes: ``CapExceeded`` and its subclasses
exit with 3, ``InputError`` with 4, ``VerdictFailure`` with 2.
"""


class CapExceeded(Exception):
    """A computation needed data beyond a configured degree or length cap."""


class HomologyNotFinite(CapExceeded):
    """Per-degree homology was still nonzero when the degree cap was reached."""


class GenerationNotDetected(CapExceeded):
    """New minimal generators kept appearing up to the module's degree cap."""


class NotPolynomial(CapExceeded):
    """A Hilbert function did not become polynomial within the cap."""


class ResolutionTooLong(CapExceeded):
    """Projective dimension exceeds the length cap (possibly infinite)."""


class NotSystemOfParameters(ValueError):
    """A sequence expected to be a system of parameters has infinite colength."""


class NotShortComplex(ValueError):
    """A complex required to be short (length = dim R, finite nonzero homology) is not."""


class InputError(ValueError):
    """Malformed or inconsistent user input (scenario files, constructor arguments)."""


class VerdictFailure(AssertionError):
    """A check that the theory guarantees came out false: an implementation bug."""
