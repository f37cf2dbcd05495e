"""Shared domain types for sequence labeling.

Data lives on three levels: tokens (model subunits of words), words
(whitespace or linguistic units), and entities (typed character spans).
The types here encode that three-level model once, so parsers, scheme
translation, evaluation and inference all speak the same language.

Character offsets are Unicode scalar-value indices (ordinary Python
string indices), never bytes. All span ends are exclusive. Every type
is immutable after construction and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Sequence

from .errors import MalformedLabel, PrefixNotInScheme

ENTITY_PREFIXES = ("B", "I", "L", "U")
ALL_PREFIXES = ("B", "I", "L", "O", "U")


class AnnotationScheme(Enum):
    """Convention for encoding entity spans as per-position labels.

    BIO is interpreted as the IOB2 variant: B starts every entity.
    """

    IO = "IO"
    BIO = "BIO"
    BILOU = "BILOU"

    @property
    def prefixes(self) -> frozenset[str]:
        """The prefix inventory allowed under this scheme."""
        return _SCHEME_PREFIXES[self]

    @classmethod
    def coerce(cls, value: "AnnotationScheme | str") -> "AnnotationScheme":
        if isinstance(value, AnnotationScheme):
            return value
        try:
            return cls[str(value).upper()]
        except KeyError:
            raise ValueError(f"unknown annotation scheme: {value!r}") from None


_SCHEME_PREFIXES = {
    AnnotationScheme.IO: frozenset({"I", "O"}),
    AnnotationScheme.BIO: frozenset({"B", "I", "O"}),
    AnnotationScheme.BILOU: frozenset({"B", "I", "L", "O", "U"}),
}


class Level(Enum):
    """Granularity a label sequence is attached to."""

    TOKEN = "token"
    WORD = "word"


@dataclass(frozen=True)
class Label:
    """One position label: the outside label "O" or "<prefix>-<class>".

    The serialized form splits on the first hyphen only, so class names
    may themselves contain hyphens ("B-art-broadcastprogram").
    """

    prefix: str
    class_name: str = ""

    def __post_init__(self):
        if self.prefix not in ALL_PREFIXES:
            raise MalformedLabel(f"unknown label prefix {self.prefix!r}")
        if self.prefix == "O" and self.class_name:
            raise MalformedLabel("the outside label carries no class name")
        if self.prefix != "O" and not self.class_name:
            raise MalformedLabel(f"prefix {self.prefix!r} requires a class name")

    @property
    def is_outside(self) -> bool:
        return self.prefix == "O"

    def serialize(self) -> str:
        return "O" if self.prefix == "O" else f"{self.prefix}-{self.class_name}"

    def __str__(self) -> str:
        return self.serialize()


OUTSIDE = Label("O")


def parse_label(raw: str, scheme: AnnotationScheme) -> Label:
    """Parse a raw label string under the given scheme.

    Splits on the first hyphen only: "I-MISC-X" is inside-of-"MISC-X".

    Raises:
        MalformedLabel: no hyphen in a non-O label, empty class name,
            or a prefix outside the B/I/L/O/U universe.
        PrefixNotInScheme: prefix exists but the scheme forbids it,
            e.g. "L-PER" under BIO.
    """
    if not raw:
        raise MalformedLabel("empty label string")
    if raw == "O":
        return OUTSIDE
    prefix, sep, class_name = raw.partition("-")
    if not sep:
        raise MalformedLabel(f"non-O label without hyphen: {raw!r}")
    if not class_name:
        raise MalformedLabel(f"label {raw!r} has an empty class name")
    if prefix not in ENTITY_PREFIXES:
        raise MalformedLabel(f"unknown label prefix in {raw!r}")
    if prefix not in scheme.prefixes:
        raise PrefixNotInScheme(raw, scheme.value)
    return Label(prefix, class_name)


@dataclass(frozen=True)
class LabelSequence:
    """Ordered labels at a declared level under a declared scheme."""

    labels: tuple[Label, ...]
    level: Level
    scheme: AnnotationScheme

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        for lab in self.labels:
            if lab.prefix not in self.scheme.prefixes:
                raise PrefixNotInScheme(lab.serialize(), self.scheme.value)

    @classmethod
    def from_raw(
        cls, raw: Iterable[str], level: Level, scheme: AnnotationScheme
    ) -> "LabelSequence":
        return cls(tuple(parse_label(r, scheme) for r in raw), level, scheme)

    def serialized(self) -> list[str]:
        return [lab.serialize() for lab in self.labels]

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[Label]:
        return iter(self.labels)

    def __getitem__(self, index: int) -> Label:
        return self.labels[index]


class ViolationKind(Enum):
    #: continuation label (I, or L under BILOU) without a matching open chunk
    DANGLING_INSIDE = "dangling_inside"
    #: an open BILOU chunk was abandoned without its closing L
    UNTERMINATED_CHUNK = "unterminated_chunk"


@dataclass(frozen=True)
class Violation:
    """A position whose label breaks the scheme's transition rules.

    ``position == len(labels)`` marks a chunk left open at sequence end.
    """

    position: int
    kind: ViolationKind


def validate_sequence(seq: LabelSequence) -> list[Violation]:
    """Report every position inconsistent with the scheme transition rules.

    Violations are data, not errors: inconsistent model output is a normal
    occurrence and downstream code decides how to treat it.

    Under BIO, I-X must follow B-X or I-X of the same class. Under BILOU,
    I/L must continue an open chunk of the same class, B/U must not appear
    while a chunk is open, and open chunks must be closed by L. IO has no
    transition constraints.
    """
    if seq.scheme is AnnotationScheme.IO:
        return []
    if seq.scheme is AnnotationScheme.BIO:
        return _validate_bio(seq.labels)
    return _validate_bilou(seq.labels)


def _validate_bio(labels: Sequence[Label]) -> list[Violation]:
    violations = []
    prev: Label | None = None
    for i, lab in enumerate(labels):
        if lab.prefix == "I":
            legal = (
                prev is not None
                and prev.prefix in ("B", "I")
                and prev.class_name == lab.class_name
            )
            if not legal:
                violations.append(Violation(i, ViolationKind.DANGLING_INSIDE))
        prev = lab
    return violations


def _validate_bilou(labels: Sequence[Label]) -> list[Violation]:
    violations = []
    open_class: str | None = None
    for i, lab in enumerate(labels):
        p = lab.prefix
        if p == "O":
            if open_class is not None:
                violations.append(Violation(i, ViolationKind.UNTERMINATED_CHUNK))
                open_class = None
        elif p == "B":
            if open_class is not None:
                violations.append(Violation(i, ViolationKind.UNTERMINATED_CHUNK))
            open_class = lab.class_name
        elif p == "U":
            if open_class is not None:
                violations.append(Violation(i, ViolationKind.UNTERMINATED_CHUNK))
            open_class = None
        elif p == "I":
            if open_class != lab.class_name:
                violations.append(Violation(i, ViolationKind.DANGLING_INSIDE))
                # recover as if the chunk had been opened here
                open_class = lab.class_name
        else:  # L
            if open_class != lab.class_name:
                violations.append(Violation(i, ViolationKind.DANGLING_INSIDE))
            open_class = None
    if open_class is not None:
        violations.append(Violation(len(labels), ViolationKind.UNTERMINATED_CHUNK))
    return violations


@dataclass(frozen=True)
class Word:
    """A word with its character span in the owning document's text."""

    surface: str
    char_start: int
    char_end: int

    def __post_init__(self):
        if self.char_start < 0:
            raise ValueError(f"char_start must be >= 0, got {self.char_start}")
        if self.char_end <= self.char_start:
            raise ValueError(
                f"char_end must be > char_start, got {self.char_end} <= {self.char_start}"
            )


@dataclass(frozen=True)
class EntitySpan:
    """A typed span addressed by character offsets and/or word indices.

    ``char_end`` and ``word_end`` are exclusive. ``probability`` is only
    populated on predicted spans (None on gold data); it is the minimum
    of the member words' probabilities.
    """

    class_name: str
    char_start: int
    char_end: int
    surface: str
    word_start: int | None = None
    word_end: int | None = None
    probability: float | None = None

    def __post_init__(self):
        if not self.class_name:
            raise ValueError("entity class_name cannot be empty")
        if self.char_start < 0 or self.char_end <= self.char_start:
            raise ValueError(
                f"invalid char span [{self.char_start}, {self.char_end})"
            )
        if (self.word_start is None) != (self.word_end is None):
            raise ValueError("word_start and word_end must be set together")
        if self.word_start is not None and self.word_end <= self.word_start:
            raise ValueError(
                f"invalid word span [{self.word_start}, {self.word_end})"
            )
        if self.probability is not None and not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"probability out of [0, 1]: {self.probability}")


@dataclass(frozen=True)
class Document:
    """The canonical record: raw text plus whichever annotations exist.

    A document may carry word tokenization, word-level labels, character
    entities, any combination, or none. Word spans must be non-overlapping
    and strictly increasing; entities must be non-overlapping and sorted
    by char_start; every span's surface must equal the text slice.
    """

    text: str
    words: tuple[Word, ...] | None = None
    word_labels: LabelSequence | None = None
    entities: tuple[EntitySpan, ...] | None = None

    def __post_init__(self):
        if self.words is not None:
            object.__setattr__(self, "words", tuple(self.words))
            self._check_words()
        if self.word_labels is not None:
            if self.words is None:
                raise ValueError("word_labels require words")
            if self.word_labels.level is not Level.WORD:
                raise ValueError("word_labels must be word-level")
            if len(self.word_labels) != len(self.words):
                raise ValueError(
                    f"{len(self.word_labels)} labels for {len(self.words)} words"
                )
        if self.entities is not None:
            object.__setattr__(self, "entities", tuple(self.entities))
            self._check_entities()

    def _check_words(self):
        prev_end = 0
        for w in self.words:
            if w.char_start < prev_end:
                raise ValueError(f"word spans overlap or decrease at {w!r}")
            if w.char_end > len(self.text):
                raise ValueError(f"word span out of text bounds: {w!r}")
            if self.text[w.char_start : w.char_end] != w.surface:
                raise ValueError(
                    f"word surface {w.surface!r} does not match text slice "
                    f"{self.text[w.char_start:w.char_end]!r}"
                )
            prev_end = w.char_end

    def _check_entities(self):
        prev_end = 0
        for e in self.entities:
            if e.char_start < prev_end:
                raise ValueError(f"entities overlap or are unsorted at {e!r}")
            if e.char_end > len(self.text):
                raise ValueError(f"entity span out of text bounds: {e!r}")
            if self.text[e.char_start : e.char_end] != e.surface:
                raise ValueError(
                    f"entity surface {e.surface!r} does not match text slice "
                    f"{self.text[e.char_start:e.char_end]!r}"
                )
            if e.word_start is not None and self.words is not None:
                if not (0 <= e.word_start < e.word_end <= len(self.words)):
                    raise ValueError(f"entity word span out of range: {e!r}")
            prev_end = e.char_end


@dataclass(frozen=True)
class TagSet:
    """Ordered set of entity class names; "O" is never a member."""

    class_names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "class_names", tuple(self.class_names))
        if not self.class_names:
            raise ValueError("tag set cannot be empty")
        if len(set(self.class_names)) != len(self.class_names):
            raise ValueError("tag set contains duplicates")
        if "O" in self.class_names or "" in self.class_names:
            raise ValueError('"O" and empty strings are not entity classes')

    @classmethod
    def from_labels(cls, sequences: Iterable[LabelSequence]) -> "TagSet":
        names = sorted(
            {lab.class_name for seq in sequences for lab in seq if not lab.is_outside}
        )
        return cls(tuple(names))

    def __iter__(self) -> Iterator[str]:
        return iter(self.class_names)

    def __contains__(self, name: object) -> bool:
        return name in self.class_names

    def __len__(self) -> int:
        return len(self.class_names)
