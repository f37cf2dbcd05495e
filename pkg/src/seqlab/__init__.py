"""seqlab: a sequence-labeling workflow toolkit.

Covers the non-neural parts of a named-entity-recognition pipeline:
dataset ingestion and normalization from heterogeneous sources,
annotation-scheme detection and translation (IO / BIO / BILOU),
projection between entity, word and token levels, strict and lenient
entity-level evaluation with micro/macro/per-class metrics, inference
post-processing with exact character offsets, learning-rate schedules
with warm restarts and early stopping, and multi-seed run aggregation.
The neural model itself stays behind the pluggable tagger interface.
"""

from .core import (
    OUTSIDE,
    AnnotationScheme,
    Document,
    EntitySpan,
    Label,
    LabelSequence,
    Level,
    TagSet,
    Violation,
    ViolationKind,
    Word,
    parse_label,
    validate_sequence,
)
from .errors import SeqlabError
from .evaluation import (
    Chunk,
    DatasetEvaluation,
    EvalReport,
    evaluate_on_dataset,
    extract_entities,
    score_entities,
    score_words,
)
from .inference import (
    EchoTagger,
    LexiconTagger,
    Tagger,
    WordPrediction,
    load_tagger,
    predict,
    predict_batch,
    predict_file,
    split_words,
)
from .ingest import (
    DatasetAnalysis,
    DatasetSplit,
    SourceKind,
    analyze,
    parse_annotation_tool_export,
    parse_conll,
    parse_pretokenized_jsonl,
    prune,
    read_canonical_jsonl,
    set_up,
    split_documents,
    write_canonical_jsonl,
    write_conll,
)
from .runs import AggregateResult, RunRecord, aggregate, best_model
from .schedule import (
    ScheduleConfig,
    ScheduleState,
    from_preset,
    initial_state,
    lr_at,
    observe_validation,
    simulate,
)
from .schemes import (
    TokenAlignment,
    convert_scheme,
    detect_scheme,
    entities_to_word_labels,
    token_labels_to_word_labels,
    word_labels_to_token_labels,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationScheme",
    "AggregateResult",
    "Chunk",
    "DatasetAnalysis",
    "DatasetEvaluation",
    "DatasetSplit",
    "Document",
    "EchoTagger",
    "EntitySpan",
    "EvalReport",
    "Label",
    "LabelSequence",
    "Level",
    "LexiconTagger",
    "OUTSIDE",
    "RunRecord",
    "ScheduleConfig",
    "ScheduleState",
    "SeqlabError",
    "SourceKind",
    "Tagger",
    "TagSet",
    "TokenAlignment",
    "Violation",
    "ViolationKind",
    "Word",
    "WordPrediction",
    "aggregate",
    "analyze",
    "best_model",
    "convert_scheme",
    "detect_scheme",
    "entities_to_word_labels",
    "evaluate_on_dataset",
    "extract_entities",
    "from_preset",
    "initial_state",
    "load_tagger",
    "lr_at",
    "observe_validation",
    "parse_annotation_tool_export",
    "parse_conll",
    "parse_label",
    "parse_pretokenized_jsonl",
    "predict",
    "predict_batch",
    "predict_file",
    "prune",
    "read_canonical_jsonl",
    "score_entities",
    "score_words",
    "set_up",
    "simulate",
    "split_documents",
    "split_words",
    "token_labels_to_word_labels",
    "validate_sequence",
    "word_labels_to_token_labels",
    "write_canonical_jsonl",
    "write_conll",
]
