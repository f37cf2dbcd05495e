"""Dataset ingestion and normalization.

Datasets arrive from four kinds of sources: local files, exports from
the big model-hub ecosystem (pretokenized JSONL), annotation-tool
exports (LabelStudio JSON, Doccano JSONL), and small built-in corpora
bundled with the package. Whatever the source, `set_up` turns them into
one canonical on-disk format: UTF-8 JSONL with one document per line,

    {"text": ..., "words": [{"surface", "start", "end"}, ...] | null,
     "labels": [...] | null, "entities": [{"start", "end", "label"}, ...] | null}

plus an `analysis.json` with corpus statistics. Splitting of unsplit
sources is a deterministic seeded shuffle with floor/floor/remainder
sizing, so the same input and seed always produce the same splits.

Column-format (CoNLL-style) input has no recoverable raw text, so word
offsets are synthesized by joining surfaces with single spaces.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import IO, Iterable, Iterator, Sequence

from .core import (
    AnnotationScheme,
    Document,
    EntitySpan,
    LabelSequence,
    Level,
    Word,
    parse_label,
)
from .errors import (
    AllOutside,
    EmptyInput,
    FractionOutOfRange,
    LengthMismatch,
    MalformedJson,
    MalformedLabel,
    OverlappingSpans,
    PrefixNotInScheme,
    RaggedRow,
    SpanOutOfBounds,
    UnresolvableSource,
)
from .evaluation import extract_entities
from .schemes import detect_scheme

SPLIT_NAMES = ("train", "val", "test")
DEFAULT_SPLIT_RATIO = (0.8, 0.1, 0.1)

#: bundled corpora, name -> package data directory
BUILTIN_DATASETS = {"mini-conll": "mini_conll"}


class SourceKind(Enum):
    """Where a dataset comes from."""

    LOCAL_FILE = "LF"
    HUGGINGFACE_EXPORT = "HF"
    ANNOTATION_TOOL_EXPORT = "AT"
    BUILT_IN = "BI"

    @classmethod
    def coerce(cls, value: "SourceKind | str") -> "SourceKind":
        if isinstance(value, SourceKind):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            pass
        try:
            return cls[str(value).upper()]
        except KeyError:
            raise UnresolvableSource(f"unknown source kind: {value!r}") from None


@dataclass(frozen=True)
class DatasetSplit:
    name: str
    documents: tuple[Document, ...]

    def __post_init__(self):
        if self.name not in SPLIT_NAMES:
            raise ValueError(f"split name must be one of {SPLIT_NAMES}")
        object.__setattr__(self, "documents", tuple(self.documents))

    def __len__(self) -> int:
        return len(self.documents)


@dataclass(frozen=True)
class DatasetAnalysis:
    """Corpus statistics computed during set-up."""

    num_documents: dict[str, int]
    num_words: dict[str, int]
    entity_counts: dict[str, dict[str, int]]
    scheme_detected: AnnotationScheme
    pretokenized: bool
    seed: int | None = None

    def as_dict(self) -> dict:
        return {
            "num_documents": dict(self.num_documents),
            "num_words": dict(self.num_words),
            "entity_counts": {s: dict(c) for s, c in self.entity_counts.items()},
            "scheme_detected": self.scheme_detected.value,
            "pretokenized": self.pretokenized,
            "seed": self.seed,
        }


def resolve_scheme(
    raw_sequences: Iterable[Sequence[str]],
    explicit: AnnotationScheme | str | None = None,
) -> AnnotationScheme:
    """Detect the scheme, falling back to BIO for all-outside corpora.

    A corpus without a single entity label is consistent with every
    scheme; BIO is the conventional default and any later validation
    of all-O sequences passes under it.
    """
    if explicit is not None:
        return AnnotationScheme.coerce(explicit)
    try:
        return detect_scheme(raw_sequences)
    except AllOutside:
        return AnnotationScheme.BIO


def _lines(source: str | Iterable[str]) -> Iterator[tuple[int, str]]:
    lines = source.splitlines() if isinstance(source, str) else source
    for lineno, line in enumerate(lines, 1):
        yield lineno, line.rstrip("\n").rstrip("\r")


def _parse_labels(
    raw_with_lines: Iterable[tuple[str, int]], scheme: AnnotationScheme
) -> list:
    labels = []
    for raw, lineno in raw_with_lines:
        try:
            labels.append(parse_label(raw, scheme))
        except PrefixNotInScheme:
            raise PrefixNotInScheme(raw, scheme.value, line=lineno) from None
        except MalformedLabel as err:
            raise MalformedLabel(str(err), line=lineno) from None
    return labels


def _synthetic_words(surfaces: Sequence[str]) -> tuple[str, tuple[Word, ...]]:
    words = []
    pos = 0
    for i, surface in enumerate(surfaces):
        if i:
            pos += 1
        words.append(Word(surface, pos, pos + len(surface)))
        pos += len(surface)
    return " ".join(surfaces), tuple(words)


def parse_conll(
    source: str | Iterable[str], *, scheme: AnnotationScheme | str | None = None
) -> list[Document]:
    """Parse whitespace-column text: last column is the label, blank
    lines separate sentences, "-DOCSTART-" rows are skipped.

    Word offsets are synthetic (single-space joined). Entities are left
    unset; they are derivable from the labels when needed.
    """
    sentences: list[list[tuple[str, str, int]]] = []
    current: list[tuple[str, str, int]] = []
    for lineno, line in _lines(source):
        if not line.strip():
            if current:
                sentences.append(current)
                current = []
            continue
        columns = line.split()
        if columns[0] == "-DOCSTART-":
            continue
        if len(columns) < 2:
            raise RaggedRow(
                f"expected at least 2 whitespace-separated columns, got {len(columns)}",
                line=lineno,
            )
        current.append((columns[0], columns[-1], lineno))
    if current:
        sentences.append(current)
    if not sentences:
        raise EmptyInput("no sentences found in column input")

    resolved = resolve_scheme([[raw for _, raw, _ in s] for s in sentences], scheme)
    documents = []
    for sentence in sentences:
        surfaces = [surface for surface, _, _ in sentence]
        labels = _parse_labels([(raw, ln) for _, raw, ln in sentence], resolved)
        text, words = _synthetic_words(surfaces)
        documents.append(
            Document(
                text,
                words=words,
                word_labels=LabelSequence(tuple(labels), Level.WORD, resolved),
            )
        )
    return documents


def write_conll(documents: Iterable[Document], dest: IO[str]) -> None:
    """Inverse of `parse_conll` for word-labeled documents."""
    for doc in documents:
        if doc.words is None or doc.word_labels is None:
            raise ValueError("column output needs words and word labels")
        for word, label in zip(doc.words, doc.word_labels):
            dest.write(f"{word.surface} {label.serialize()}\n")
        dest.write("\n")


def _scan_json_lines(source: str | Iterable[str]) -> list[tuple[int, dict]]:
    records = []
    for lineno, line in _lines(source):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as err:
            raise MalformedJson(f"invalid JSON ({err.msg})", line=lineno) from None
        if not isinstance(record, dict):
            raise MalformedJson("expected a JSON object", line=lineno)
        records.append((lineno, record))
    return records


def _align_words(text: str, surfaces: Sequence[str], lineno: int) -> tuple[Word, ...]:
    words = []
    cursor = 0
    for surface in surfaces:
        position = text.find(surface, cursor)
        if not surface or position < 0:
            raise MalformedJson(
                f"word {surface!r} cannot be aligned with the text", line=lineno
            )
        words.append(Word(surface, position, position + len(surface)))
        cursor = position + len(surface)
    return tuple(words)


def _words_from_record(record: dict, lineno: int) -> tuple[str, tuple[Word, ...]]:
    raw_words = record["words"]
    text = record.get("text")
    if not isinstance(raw_words, list) or not raw_words:
        raise MalformedJson('"words" must be a non-empty array', line=lineno)
    if all(isinstance(w, str) for w in raw_words):
        if any(not w for w in raw_words):
            raise MalformedJson("words cannot be empty strings", line=lineno)
        if text is None:
            return _synthetic_words(raw_words)
        if not isinstance(text, str):
            raise MalformedJson('"text" must be a string', line=lineno)
        return text, _align_words(text, raw_words, lineno)
    if all(isinstance(w, dict) for w in raw_words):
        if not isinstance(text, str):
            raise MalformedJson(
                'offset-bearing "words" require a "text" string', line=lineno
            )
        try:
            words = tuple(
                Word(w["surface"], int(w["start"]), int(w["end"])) for w in raw_words
            )
        except (KeyError, TypeError, ValueError, OverflowError) as err:
            raise MalformedJson(f"bad word record: {err}", line=lineno) from None
        return text, words
    raise MalformedJson('"words" mixes strings and objects', line=lineno)


def _entities_from_record(
    text: str, raw_entities: list, lineno: int, *, triples: bool = False
) -> tuple[EntitySpan, ...]:
    spans = []
    for item in raw_entities:
        try:
            if triples:
                start, end, label = item
            else:
                start, end, label = item["start"], item["end"], item["label"]
            start, end, label = int(start), int(end), str(label)
        except (KeyError, TypeError, ValueError, OverflowError) as err:
            raise MalformedJson(f"bad entity record: {err}", line=lineno) from None
        if not (0 <= start < end <= len(text)):
            raise SpanOutOfBounds(
                f"span [{start}, {end}) outside text of length {len(text)}",
                line=lineno,
            )
        spans.append((start, end, label))
    spans.sort()
    previous_end = 0
    for start, end, _ in spans:
        if start < previous_end:
            raise OverlappingSpans(
                f"span starting at {start} overlaps the previous one", line=lineno
            )
        previous_end = end
    return tuple(
        EntitySpan(label, start, end, text[start:end]) for start, end, label in spans
    )


def _document_from_record(
    lineno: int, record: dict, scheme: AnnotationScheme
) -> Document:
    words = None
    word_labels = None
    entities = None
    text = record.get("text")

    if record.get("words") is not None:
        text, words = _words_from_record(record, lineno)
    elif not isinstance(text, str):
        raise MalformedJson('record needs a "text" string', line=lineno)

    raw_labels = record.get("labels")
    if raw_labels is not None:
        if words is None:
            raise MalformedJson('"labels" require "words"', line=lineno)
        if not isinstance(raw_labels, list) or not all(
            isinstance(r, str) for r in raw_labels
        ):
            raise MalformedJson('"labels" must be an array of strings', line=lineno)
        if len(raw_labels) != len(words):
            raise LengthMismatch(
                f"{len(raw_labels)} labels for {len(words)} words", line=lineno
            )
        labels = _parse_labels([(raw, lineno) for raw in raw_labels], scheme)
        word_labels = LabelSequence(tuple(labels), Level.WORD, scheme)

    raw_entities = record.get("entities")
    if raw_entities is not None:
        if not isinstance(raw_entities, list):
            raise MalformedJson('"entities" must be an array', line=lineno)
        entities = _entities_from_record(text, raw_entities, lineno)

    try:
        return Document(text, words=words, word_labels=word_labels, entities=entities)
    except ValueError as err:
        raise MalformedJson(str(err), line=lineno) from None


def _record_label_lists(records: list[tuple[int, dict]]) -> list[list[str]]:
    lists = []
    for _, record in records:
        labels = record.get("labels")
        if isinstance(labels, list) and all(isinstance(x, str) for x in labels):
            lists.append(labels)
    return lists


def read_canonical_jsonl(
    source: str | Iterable[str], *, scheme: AnnotationScheme | str | None = None
) -> list[Document]:
    """Read the canonical JSONL format (word-level, entity-level, or both)."""
    records = _scan_json_lines(source)
    if not records:
        raise EmptyInput("no records in JSONL input")
    resolved = resolve_scheme(_record_label_lists(records), scheme)
    return [_document_from_record(ln, rec, resolved) for ln, rec in records]


def parse_pretokenized_jsonl(
    source: str | Iterable[str], *, scheme: AnnotationScheme | str | None = None
) -> list[Document]:
    """Parse pretokenized JSONL: every record carries "words" and
    "labels" of equal length; "text" is optional and synthesized by
    single-space joining when absent."""
    records = _scan_json_lines(source)
    if not records:
        raise EmptyInput("no records in JSONL input")
    for lineno, record in records:
        if record.get("words") is None or record.get("labels") is None:
            raise MalformedJson(
                'pretokenized records need "words" and "labels"', line=lineno
            )
    resolved = resolve_scheme(_record_label_lists(records), scheme)
    return [_document_from_record(ln, rec, resolved) for ln, rec in records]


def _parse_doccano_jsonl(source: str | Iterable[str]) -> list[Document]:
    records = _scan_json_lines(source)
    if not records:
        raise EmptyInput("no records in JSONL input")
    documents = []
    for lineno, record in records:
        text = record.get("text")
        if not isinstance(text, str):
            raise MalformedJson('record needs a "text" string', line=lineno)
        raw = record.get("label", [])
        if not isinstance(raw, list):
            raise MalformedJson('"label" must be an array of triples', line=lineno)
        entities = _entities_from_record(text, raw, lineno, triples=True)
        documents.append(Document(text, entities=entities))
    return documents


def _parse_labelstudio_json(source: str | IO[str]) -> list[Document]:
    payload = source.read() if hasattr(source, "read") else source
    if not isinstance(payload, str):
        payload = "\n".join(payload)
    try:
        tasks = json.loads(payload)
    except json.JSONDecodeError as err:
        raise MalformedJson(f"invalid JSON ({err.msg})", line=err.lineno) from None
    if not isinstance(tasks, list):
        raise MalformedJson("expected a JSON array of tasks")
    if not tasks:
        raise EmptyInput("no tasks in export")
    documents = []
    for index, task in enumerate(tasks, 1):
        try:
            text = task["data"]["text"]
        except (KeyError, TypeError):
            raise MalformedJson("task lacks data.text", line=index) from None
        if not isinstance(text, str):
            raise MalformedJson("data.text must be a string", line=index)
        annotations = task.get("annotations") or []
        if not isinstance(annotations, list) or not all(
            isinstance(a, dict) for a in annotations
        ):
            raise MalformedJson("annotations must be an array of objects", line=index)
        results = annotations[0].get("result", []) if annotations else []
        if not isinstance(results, list):
            raise MalformedJson("annotation result must be an array", line=index)
        raw = []
        for item in results:
            if not isinstance(item, dict) or item.get("type") != "labels":
                continue
            value = item.get("value", {})
            try:
                raw.append(
                    {"start": value["start"], "end": value["end"], "label": value["labels"][0]}
                )
            except (KeyError, IndexError, TypeError):
                raise MalformedJson("bad labels result in task", line=index) from None
        entities = _entities_from_record(text, raw, index)
        documents.append(Document(text, entities=entities))
    return documents


_AT_DIALECTS = {
    "labelstudiojson": "labelstudio",
    "labelstudio": "labelstudio",
    "doccanojsonl": "doccano",
    "doccano": "doccano",
}


def parse_annotation_tool_export(
    source: str | Iterable[str], dialect: str
) -> list[Document]:
    """Parse an annotation-tool export into entity-level documents.

    Supported dialects: "LabelStudioJson" (a JSON array of tasks, spans
    from the first annotation's results of type "labels") and
    "DoccanoJsonl" (one object per line with "text" and
    "label": [[start, end, class], ...]). Ends are exclusive.
    """
    key = _AT_DIALECTS.get(str(dialect).replace("_", "").replace("-", "").lower())
    if key == "labelstudio":
        return _parse_labelstudio_json(source)
    if key == "doccano":
        return _parse_doccano_jsonl(source)
    raise ValueError(f"unknown annotation tool dialect: {dialect!r}")


def document_to_record(doc: Document) -> dict:
    return {
        "text": doc.text,
        "words": None
        if doc.words is None
        else [
            {"surface": w.surface, "start": w.char_start, "end": w.char_end}
            for w in doc.words
        ],
        "labels": None if doc.word_labels is None else doc.word_labels.serialized(),
        "entities": None
        if doc.entities is None
        else [
            {"start": e.char_start, "end": e.char_end, "label": e.class_name}
            for e in doc.entities
        ],
    }


def write_canonical_jsonl(documents: Iterable[Document], dest: IO[str]) -> None:
    for doc in documents:
        dest.write(json.dumps(document_to_record(doc), ensure_ascii=False))
        dest.write("\n")


def save_canonical_jsonl(documents: Iterable[Document], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        write_canonical_jsonl(documents, handle)


def split_documents(
    documents: Sequence[Document],
    ratio: Sequence[float] = DEFAULT_SPLIT_RATIO,
    seed: int = 42,
) -> tuple[DatasetSplit, DatasetSplit, DatasetSplit]:
    """Deterministic shuffled split: train and val sizes are floored,
    test takes the remainder."""
    if len(ratio) != 3 or any(r < 0 for r in ratio) or abs(sum(ratio) - 1.0) > 1e-9:
        raise ValueError(f"split ratio must be three non-negative numbers summing to 1, got {ratio}")
    shuffled = list(documents)
    random.Random(seed).shuffle(shuffled)
    n = len(shuffled)
    n_train = math.floor(ratio[0] * n)
    n_val = math.floor(ratio[1] * n)
    return (
        DatasetSplit("train", tuple(shuffled[:n_train])),
        DatasetSplit("val", tuple(shuffled[n_train : n_train + n_val])),
        DatasetSplit("test", tuple(shuffled[n_train + n_val :])),
    )


def prune(split: DatasetSplit, fraction: float) -> DatasetSplit:
    """Keep the first ceil(fraction * n) documents of an already
    shuffled split."""
    if not 0.0 < fraction <= 1.0:
        raise FractionOutOfRange(f"fraction must be in (0, 1], got {fraction}")
    keep = math.ceil(fraction * len(split.documents))
    return DatasetSplit(split.name, split.documents[:keep])


def analyze(
    splits: Sequence[DatasetSplit],
    *,
    scheme: AnnotationScheme | str | None = None,
    seed: int | None = None,
) -> DatasetAnalysis:
    """Compute corpus statistics: document/word counts, per-class entity
    counts (strict chunk decoding for labeled documents), detected
    scheme, and whether the corpus is pretokenized."""
    num_documents = {}
    num_words = {}
    entity_counts: dict[str, dict[str, int]] = {}
    label_lists: list[list[str]] = []
    pretokenized = True
    for split in splits:
        num_documents[split.name] = len(split.documents)
        words = 0
        counts: dict[str, int] = {}
        for doc in split.documents:
            if doc.words is None:
                pretokenized = False
            else:
                words += len(doc.words)
            if doc.word_labels is not None:
                label_lists.append(doc.word_labels.serialized())
                for chunk in extract_entities(doc.word_labels, "strict"):
                    counts[chunk.class_name] = counts.get(chunk.class_name, 0) + 1
            elif doc.entities is not None:
                for entity in doc.entities:
                    counts[entity.class_name] = counts.get(entity.class_name, 0) + 1
        num_words[split.name] = words
        entity_counts[split.name] = dict(sorted(counts.items()))
    return DatasetAnalysis(
        num_documents=num_documents,
        num_words=num_words,
        entity_counts=entity_counts,
        scheme_detected=resolve_scheme(label_lists, scheme),
        pretokenized=pretokenized,
        seed=seed,
    )


def parse_file(
    path: str | Path,
    *,
    dialect: str | None = None,
    scheme: AnnotationScheme | str | None = None,
) -> list[Document]:
    """Parse one dataset file, dispatching on extension (and content
    sniffing for .jsonl, which may be pretokenized, canonical, or a
    Doccano export)."""
    path = Path(path)
    if not path.is_file():
        raise UnresolvableSource(f"not a readable file: {path}")
    data = path.read_text(encoding="utf-8")
    suffix = path.suffix.lower()
    if dialect is not None:
        return parse_annotation_tool_export(data, dialect)
    if suffix in (".conll", ".txt"):
        return parse_conll(data, scheme=scheme)
    if suffix == ".json":
        return parse_annotation_tool_export(data, "LabelStudioJson")
    if suffix == ".jsonl":
        for _, record in _scan_json_lines(data):
            if "label" in record and "labels" not in record and "words" not in record:
                return parse_annotation_tool_export(data, "DoccanoJsonl")
            break
        return read_canonical_jsonl(data, scheme=scheme)
    raise UnresolvableSource(f"cannot infer a format from extension {suffix!r}")


def _builtin_documents(name: str) -> dict[str, list[Document]]:
    if name not in BUILTIN_DATASETS:
        raise UnresolvableSource(
            f"unknown built-in dataset {name!r}; available: {sorted(BUILTIN_DATASETS)}"
        )
    base = resources.files("seqlab").joinpath("data", BUILTIN_DATASETS[name])
    out = {}
    for split_name in SPLIT_NAMES:
        data = base.joinpath(f"{split_name}.jsonl").read_text(encoding="utf-8")
        out[split_name] = read_canonical_jsonl(data)
    return out


def set_up(
    source: SourceKind | str,
    *,
    name: str,
    path: str | Path | None = None,
    train_path: str | Path | None = None,
    val_path: str | Path | None = None,
    test_path: str | Path | None = None,
    dialect: str | None = None,
    split_ratio: Sequence[float] = DEFAULT_SPLIT_RATIO,
    seed: int = 42,
    train_fraction: float | None = None,
    val_fraction: float | None = None,
    test_fraction: float | None = None,
    scheme: AnnotationScheme | str | None = None,
    data_dir: str | Path | None = None,
) -> tuple[tuple[DatasetSplit, DatasetSplit, DatasetSplit], DatasetAnalysis]:
    """Normalize a dataset from any source into canonical files.

    Pre-split sources (three paths, or a built-in) pass through; unsplit
    sources are shuffled with the seed and split by ratio. Optional
    per-split fractions prune after splitting. Canonical
    {train,val,test}.jsonl and analysis.json are written under
    data_dir/name and the splits plus analysis are returned.
    """
    kind = SourceKind.coerce(source)
    used_seed: int | None = None

    if kind is SourceKind.BUILT_IN:
        per_split = _builtin_documents(name)
        splits = tuple(DatasetSplit(s, tuple(per_split[s])) for s in SPLIT_NAMES)
    elif train_path or val_path or test_path:
        if not (train_path and val_path and test_path):
            raise UnresolvableSource("pre-split input needs all three split paths")
        splits = tuple(
            DatasetSplit(s, tuple(parse_file(p, dialect=dialect, scheme=scheme)))
            for s, p in zip(SPLIT_NAMES, (train_path, val_path, test_path))
        )
    else:
        if path is None:
            raise UnresolvableSource(f"source {kind.value} needs a file path")
        documents = parse_file(path, dialect=dialect, scheme=scheme)
        splits = split_documents(documents, split_ratio, seed)
        used_seed = seed

    pruned = []
    for split, fraction in zip(splits, (train_fraction, val_fraction, test_fraction)):
        pruned.append(prune(split, fraction) if fraction is not None else split)
    splits = tuple(pruned)

    analysis = analyze(splits, scheme=scheme, seed=used_seed)

    out_dir = resolve_data_dir(data_dir) / name
    out_dir.mkdir(parents=True, exist_ok=True)
    for split in splits:
        save_canonical_jsonl(split.documents, out_dir / f"{split.name}.jsonl")
    with open(out_dir / "analysis.json", "w", encoding="utf-8") as handle:
        json.dump(analysis.as_dict(), handle, ensure_ascii=False, indent=2)
        handle.write("\n")
    return splits, analysis


def resolve_data_dir(data_dir: str | Path | None = None) -> Path:
    import os

    if data_dir is not None:
        return Path(data_dir)
    return Path(os.environ.get("SEQLAB_DATA_DIR", "seqlab_data"))


def load_split(
    dataset_dir: str | Path,
    phase: str,
    *,
    scheme: AnnotationScheme | str | None = None,
) -> DatasetSplit:
    """Load one canonical split file written by `set_up`."""
    if phase not in SPLIT_NAMES:
        raise ValueError(f"phase must be one of {SPLIT_NAMES}")
    path = Path(dataset_dir) / f"{phase}.jsonl"
    if not path.is_file():
        raise UnresolvableSource(f"missing split file: {path}")
    try:
        documents = read_canonical_jsonl(path.read_text(encoding="utf-8"), scheme=scheme)
    except EmptyInput:
        documents = []  # a split may legitimately be empty after splitting
    return DatasetSplit(phase, tuple(documents))


def load_analysis(dataset_dir: str | Path) -> dict:
    path = Path(dataset_dir) / "analysis.json"
    if not path.is_file():
        raise UnresolvableSource(f"missing analysis file: {path}")
    return json.loads(path.read_text(encoding="utf-8"))
