"""Exception hierarchy.

Errors carry a ``stage`` tag so the command line front end can report where a
pipeline stopped. Three families map onto exit codes: input problems,
honest verification failures, and internal invariant breaches (a theorem
check that failed, which indicates a numerical bug rather than bad input).
"""
from __future__ import annotations


class SpectraError(Exception):
    stage = "general"

    def __init__(self, message: str = "", **details):
        super().__init__(message)
        self.details = details

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "stage": self.stage,
                "message": str(self), **{k: _plain(v) for k, v in self.details.items()}}


def _plain(value):
    try:
        import numpy as np
        if isinstance(value, np.ndarray):
            return value.tolist()
        if isinstance(value, np.generic):
            return value.item()
    except ImportError:  # pragma: no cover
        pass
    if isinstance(value, tuple):
        return list(value)
    return value


# -- input errors ------------------------------------------------------------

class InputError(SpectraError, ValueError):
    stage = "input"


class DimensionMismatch(InputError):
    pass


class ParseError(InputError):
    pass


class AsymmetryTooLarge(InputError):
    pass


class MalformedHermitian(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class PreconditionError(InputError):
    stage = "precondition"


class InvalidPair(PreconditionError):
    pass


class InvalidBounds(PreconditionError):
    pass


class HypothesisNotVerified(PreconditionError):
    pass


class NotOnBoundary(PreconditionError):
    stage = "strata"


class PointOutsideSection(PreconditionError):
    stage = "sections"


class NonPositiveEntry(PreconditionError):
    stage = "perron"


class ZeroEntry(PreconditionError):
    stage = "hadamard"


# -- verification failures ---------------------------------------------------

class VerificationFailure(SpectraError):
    stage = "verification"


class EmptySpectrahedron(VerificationFailure):
    stage = "reduce"


class Unbounded(VerificationFailure):
    stage = "reduce"


class ReductionFailed(VerificationFailure):
    stage = "reduce"


class AmbiguousKernelDim(VerificationFailure):
    stage = "strata"


class WitnessSearchFailed(VerificationFailure):
    stage = "strata"


class SpectralGapViolation(VerificationFailure):
    stage = "sections"


class SeedVectorNotFound(VerificationFailure):
    stage = "sections"


class CoverFailure(VerificationFailure):
    stage = "cover"


class ReadConditionFailed(VerificationFailure):
    stage = "read"


class DominationFailed(VerificationFailure):
    stage = "domination"


# -- internal invariant breaches ---------------------------------------------

class InvariantBreach(SpectraError):
    stage = "internal"


class ResidualFailure(InvariantBreach):
    stage = "perron"


class BoundViolation(InvariantBreach):
    stage = "perron"


class ReadTheoremViolation(InvariantBreach):
    stage = "read"


class EqualityViolation(InvariantBreach):
    stage = "povm"
