"""Exact graded commutative algebra in positive characteristic: Koszul homology,
multiplicities, Frobenius functors and Ulrich-type inequalities."""

from .errors import (CapExceeded, GenerationNotDetected, HomologyNotFinite, InputError, NotPolynomial,
                     NotShortComplex, NotSystemOfParameters, ResolutionTooLong, VerdictFailure)
from .exactlin import QQ, FieldSpec

__version__ = "0.1.0"

__all__ = [
    "CapExceeded", "GenerationNotDetected", "HomologyNotFinite", "InputError", "NotPolynomial",
    "NotShortComplex", "NotSystemOfParameters", "ResolutionTooLong", "VerdictFailure", "QQ", "FieldSpec",
]
