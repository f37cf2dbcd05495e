"""Exception hierarchy for the toolkit.

Parser-facing errors derive from :class:`PositionedError` and carry the
1-based line (or record) number of the offending input, so command-line
output can point at the exact spot.
"""

from __future__ import annotations


class SeqlabError(Exception):
    """Base class for every error raised by this package."""


class PositionedError(SeqlabError):
    """An error tied to a specific line or record of an input."""

    def __init__(self, message: str, *, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


# label grammar

class MalformedLabel(PositionedError):
    """Label string does not match "O" or "<prefix>-<class>"."""


class PrefixNotInScheme(PositionedError):
    """Label prefix is valid in general but not under the scheme in force."""

    def __init__(self, label: str, scheme: str, *, line: int | None = None):
        self.label = label
        self.scheme = scheme
        super().__init__(f"prefix of {label!r} is not part of scheme {scheme}", line=line)


# dataset ingestion

class RaggedRow(PositionedError):
    """Column-format row with fewer than two columns."""


class EmptyInput(SeqlabError):
    """Input stream contained no parseable records."""


class LengthMismatch(PositionedError):
    """Two parallel sequences differ in length."""


class MalformedJson(PositionedError):
    """A line or document is not valid JSON, or lacks required keys."""


class SpanOutOfBounds(PositionedError):
    """Character span lies outside the text it annotates."""


class OverlappingSpans(PositionedError):
    """Two annotated spans overlap; flat annotation is assumed throughout."""


class UnresolvableSource(SeqlabError):
    """Dataset source cannot be resolved to readable files."""


class FractionOutOfRange(SeqlabError):
    """Pruning fraction must lie in (0, 1]."""


# scheme operations

class AllOutside(SeqlabError):
    """Only outside labels present; the annotation scheme is undecidable."""


class InconsistentSource(SeqlabError):
    """Sequence violates its scheme's transition rules and cannot be converted."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        detail = ", ".join(f"{v.kind.value}@{v.position}" for v in self.violations)
        super().__init__(f"sequence is inconsistent with its scheme: {detail}")


class MisalignedEntity(SeqlabError):
    """Entity boundary falls inside a word instead of on a word boundary."""


# evaluation

class OverlapWithinList(SeqlabError):
    """Chunks within a single gold or prediction list overlap."""


class MissingGold(SeqlabError):
    """Document carries no gold annotation to evaluate against."""


# inference

class TaggerLengthMismatch(SeqlabError):
    """Tagger returned a different number of labels than words given."""


class EmptyText(SeqlabError):
    """Text is empty after trimming whitespace."""


# schedule

class Stopped(SeqlabError):
    """Schedule has already stopped; no further transitions are allowed."""


class NonFiniteLoss(SeqlabError):
    """Validation loss must be a finite number."""


class UnknownPreset(SeqlabError):
    """No hyperparameter preset registered under that name."""


# multi-run aggregation

class EmptyRunSet(SeqlabError):
    """At least one run record is required."""


class MissingMetric(SeqlabError):
    """A run record does not contain the requested metric path."""
