"""Scheme detection, scheme translation, and level projection.

Annotation schemes encode the same chunk structure with different label
vocabularies, so translation goes through the chunk set: decode chunks,
re-emit them in the target scheme. Translating into IO merges adjacent
same-class chunks and is therefore lossy; that loss is documented and
surfaced, not hidden.

Level projection moves labels between entities, words and tokens. Word
to token projection supports two training styles: masking continuation
tokens with a sentinel, or giving them real chunk-continuation labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import (
    OUTSIDE,
    AnnotationScheme,
    Document,
    Label,
    LabelSequence,
    Level,
    validate_sequence,
)
from .errors import AllOutside, InconsistentSource, LengthMismatch, MalformedLabel, MisalignedEntity
from .evaluation import Chunk, extract_entities

IGNORE_INDEX = -100


@dataclass(frozen=True)
class TokenAlignment:
    """How model tokens map back onto words.

    ``token_spans`` holds one (word_index, is_first_of_word) pair per
    token. Word indices are non-decreasing, every word contributes at
    least one token, and exactly one token per word is marked first.
    ``ignore_index`` is the sentinel label id used for masked positions.
    """

    token_spans: tuple[tuple[int, bool], ...]
    ignore_index: int = IGNORE_INDEX

    def __post_init__(self):
        object.__setattr__(
            self, "token_spans", tuple((int(w), bool(f)) for w, f in self.token_spans)
        )
        prev = -1
        firsts: set[int] = set()
        for word_index, is_first in self.token_spans:
            if word_index < prev:
                raise ValueError("token word indices must be non-decreasing")
            if word_index > prev:
                if word_index != prev + 1:
                    raise ValueError(f"word {prev + 1} contributes no tokens")
                if not is_first:
                    raise ValueError(f"first token of word {word_index} not marked")
                firsts.add(word_index)
            elif is_first:
                raise ValueError(f"word {word_index} has two first tokens")
            prev = word_index

    @classmethod
    def from_token_counts(
        cls, counts: Sequence[int], ignore_index: int = IGNORE_INDEX
    ) -> "TokenAlignment":
        """Build an alignment from tokens-per-word counts, e.g. [1, 3, 2]."""
        spans = []
        for word_index, count in enumerate(counts):
            if count < 1:
                raise ValueError(f"word {word_index} must have >= 1 token")
            spans.extend((word_index, k == 0) for k in range(count))
        return cls(tuple(spans), ignore_index)

    @property
    def word_count(self) -> int:
        return self.token_spans[-1][0] + 1 if self.token_spans else 0

    def __len__(self) -> int:
        return len(self.token_spans)


def detect_scheme(sequences: Iterable[Sequence[str]]) -> AnnotationScheme:
    """Infer the annotation scheme from raw label strings.

    BILOU if any L/U prefix occurs, else BIO if any B occurs, else IO.
    Raises AllOutside when only "O" labels are present, because the
    scheme is undecidable then.
    """
    seen: set[str] = set()
    for seq in sequences:
        for raw in seq:
            if raw == "O":
                continue
            prefix = raw.partition("-")[0]
            if prefix not in ("B", "I", "L", "U") or "-" not in raw:
                raise MalformedLabel(f"cannot read a scheme prefix from {raw!r}")
            seen.add(prefix)
    if not seen:
        raise AllOutside("only outside labels present; scheme is undecidable")
    if seen & {"L", "U"}:
        return AnnotationScheme.BILOU
    if "B" in seen:
        return AnnotationScheme.BIO
    return AnnotationScheme.IO


def labels_for_chunk(cls: str, length: int, scheme: AnnotationScheme) -> list[Label]:
    """The label run encoding one chunk of the given length."""
    if scheme is AnnotationScheme.IO:
        return [Label("I", cls)] * length
    if scheme is AnnotationScheme.BIO:
        return [Label("B", cls)] + [Label("I", cls)] * (length - 1)
    if length == 1:
        return [Label("U", cls)]
    return [Label("B", cls)] + [Label("I", cls)] * (length - 2) + [Label("L", cls)]


def encode_chunks(
    chunks: Iterable[Chunk], length: int, scheme: AnnotationScheme, level: Level = Level.WORD
) -> LabelSequence:
    """Emit the label sequence for a set of non-overlapping chunks."""
    labels: list[Label] = [OUTSIDE] * length
    for chunk in chunks:
        run = labels_for_chunk(chunk.class_name, chunk.word_end - chunk.word_start, scheme)
        labels[chunk.word_start : chunk.word_end] = run
    return LabelSequence(tuple(labels), level, scheme)


def convert_scheme(seq: LabelSequence, target: AnnotationScheme) -> LabelSequence:
    """Chunk-preserving translation of a consistent sequence.

    Only consistent sequences are convertible; sequences with transition
    violations raise InconsistentSource. Converting to IO merges adjacent
    same-class chunks (lossy by construction).
    """
    violations = validate_sequence(seq)
    if violations:
        raise InconsistentSource(violations)
    chunks = extract_entities(seq, "strict")
    return encode_chunks(chunks, len(seq), target, seq.level)


def entities_to_word_labels(doc: Document, scheme: AnnotationScheme) -> LabelSequence:
    """Project a document's character entities onto its words.

    Every entity boundary must coincide with a word boundary; an entity
    boundary inside a word raises MisalignedEntity with the character
    positions, never silently clips.
    """
    if doc.words is None:
        raise ValueError("document has no word tokenization")
    starts = {w.char_start: i for i, w in enumerate(doc.words)}
    ends = {w.char_end: i + 1 for i, w in enumerate(doc.words)}
    chunks = []
    for ent in doc.entities or ():
        word_start = starts.get(ent.char_start)
        word_end = ends.get(ent.char_end)
        if word_start is None or word_end is None:
            raise MisalignedEntity(
                f"entity {ent.class_name!r} at chars [{ent.char_start}, {ent.char_end}) "
                f"does not align with word boundaries"
            )
        chunks.append(Chunk(ent.class_name, word_start, word_end))
    return encode_chunks(chunks, len(doc.words), scheme)


def word_labels_to_token_labels(
    seq: LabelSequence, alignment: TokenAlignment, mode: str = "word_level_masked"
) -> list[Label | int]:
    """Expand word labels to token labels.

    ``word_level_masked``: the first token of each word gets the word's
    label, continuation tokens get the alignment's ignore_index (their
    loss contribution is meant to be masked out).

    ``token_level_full``: continuation tokens get real labels in
    chunk-continuation form, keeping the token sequence consistent:
    B-X continues as I-X, O stays O; under BILOU the final token of an
    L-word keeps L-X with I-X before it, and a U-word split across k > 1
    tokens becomes B, I, ..., L.
    """
    if mode not in ("word_level_masked", "token_level_full"):
        raise ValueError(f"unknown projection mode {mode!r}")
    if seq.level is not Level.WORD:
        raise ValueError("input sequence must be word-level")
    if alignment.word_count != len(seq):
        raise LengthMismatch(
            f"alignment covers {alignment.word_count} words, sequence has {len(seq)}"
        )
    token_counts = [0] * len(seq)
    for word_index, _ in alignment.token_spans:
        token_counts[word_index] += 1

    per_word: list[list[Label | int]] = []
    for label, count in zip(seq.labels, token_counts):
        if mode == "word_level_masked":
            per_word.append([label] + [alignment.ignore_index] * (count - 1))
        else:
            per_word.append(_full_token_run(label, count))
    return [tok for runs in per_word for tok in runs]


def _full_token_run(label: Label, count: int) -> list[Label | int]:
    if label.is_outside or label.prefix == "I":
        return [label] * count
    cls = label.class_name
    if label.prefix == "B":
        return [label] + [Label("I", cls)] * (count - 1)
    if label.prefix == "L":
        return [Label("I", cls)] * (count - 1) + [label]
    # U split across several tokens becomes a complete B..L run
    if count == 1:
        return [label]
    return [Label("B", cls)] + [Label("I", cls)] * (count - 2) + [Label("L", cls)]


def token_labels_to_word_labels(
    token_labels: Sequence[Label | int],
    alignment: TokenAlignment,
    scheme: AnnotationScheme,
) -> LabelSequence:
    """Collapse token labels back to word labels: each word takes its
    first token's label. Masked continuation positions are ignored."""
    if len(token_labels) != len(alignment):
        raise LengthMismatch(
            f"{len(token_labels)} token labels for {len(alignment)} alignment slots"
        )
    labels = []
    for token_label, (_, is_first) in zip(token_labels, alignment.token_spans):
        if not is_first:
            continue
        if not isinstance(token_label, Label):
            raise ValueError("first token of a word cannot be a masked position")
        labels.append(token_label)
    return LabelSequence(tuple(labels), Level.WORD, scheme)
