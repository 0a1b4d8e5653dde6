"""Exception types raised by the estimation pipeline."""
from __future__ import annotations


class EstimationError(Exception):
    """Base class for recoverable pipeline failures."""


class InsufficientSamplesError(EstimationError):
    """Stream too short for the requested operation."""


class OrderDeficientError(EstimationError):
    """Numerical rank collapsed below the requested model order."""

    def __init__(self, requested: int, achieved: int):
        super().__init__(
            f"requested model order {requested} but achieved rank is {achieved}"
        )
        self.requested = requested
        self.achieved = achieved


class DegenerateBasisError(EstimationError):
    """Fit basis contains (nearly) duplicate frequencies."""


class PairingSizeError(EstimationError):
    """Channel component sets differ in size; cannot form a perfect matching."""


class InvalidComponentError(EstimationError):
    """A component carries non-finite amplitude or phase."""


class NoCandidateError(EstimationError):
    """No fold-index pair reconciles the two aliases within tolerance."""


class AmbiguousFrequencyError(EstimationError):
    """Multiple well-separated frequencies are consistent with the alias pair."""

    def __init__(self, candidates):
        freqs = ", ".join(f"{f:.6g}" for f in sorted(candidates))
        super().__init__(f"ambiguous de-aliasing: candidate frequencies [{freqs}]")
        self.candidates = tuple(sorted(candidates))
