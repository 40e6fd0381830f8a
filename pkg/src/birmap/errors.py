"""Exception hierarchy.

Every failure mode that callers are expected to handle gets its own class;
all inherit from BirmapError so batch drivers can catch the lot.
"""
from __future__ import annotations


class BirmapError(Exception):
    """Base class for all toolkit errors."""


# --- algebra layer ---

class ZeroSeries(BirmapError):
    """Series has no nonzero coefficient below its truncation order."""


class IdenticallySingular(BirmapError):
    """A composed step's denominator vanishes identically."""


# --- mapping layer ---

class DegenerateStep(BirmapError):
    """Solved forward step has identically zero determinant (parameters collide)."""


class SingularOrbit(BirmapError):
    """Numeric orbit hit an exact singularity."""

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"orbit singular at index {index}")


class SamplePoleHit(BirmapError):
    """A sampled evaluation point lies on a pole; caller should resample."""


class NoBranch(BirmapError):
    """Ancillary inverse does not exist in this field (x^2 - 4 is a non-square)."""


# --- growth layer ---

class UnluckyEvaluation(BirmapError):
    """Degree sequences failed to agree across witness runs after retries."""


class TooShort(BirmapError):
    """Not enough sequence terms for the requested verdict."""


# --- invariants layer ---

class AllSamplesSingular(BirmapError):
    """Resampling budget exhausted without enough regular orbit points."""


class RankDeficientSamples(BirmapError):
    """Sampled constraint matrix failed fresh-sample verification after retries."""


# --- confinement layer ---

class TruncationExhausted(BirmapError):
    """Series truncation order too low to resolve the trace."""


class NoSingularityEntered(BirmapError):
    """The requested entry factor does not produce a singular step at n0."""


class ConstraintViolated(BirmapError):
    """Parameter sequence does not satisfy the constraint required here."""


# --- linearisation layer ---

class KUndefined(BirmapError):
    """Pencil parameter cannot be extracted: its coefficient vanishes."""


class DenominatorZero(BirmapError):
    """A named sub-expression's denominator vanished at this index."""

    def __init__(self, what: str):
        self.what = what
        super().__init__(f"denominator zero in {what}")


class DegenerateStart(BirmapError):
    """Initial data sits on a degenerate configuration for this scheme."""


class DegenerateZ(BirmapError):
    """z sequence takes a value (0 or +-1) that degenerates the substitution."""


# --- cli layer ---

class ManifestInvalid(BirmapError):
    """Manifest failed schema validation."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"manifest invalid at {field}: {message}")


class AnalysisFailed(BirmapError):
    """One or more manifest analyses failed their assertions."""

    def __init__(self, failures: list[str]):
        self.failures = failures
        super().__init__("; ".join(failures))
