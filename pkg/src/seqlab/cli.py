"""Command-line entry point.

Subcommands mirror the model life cycle: `dataset set-up` normalizes a
corpus, `convert` translates annotation schemes, `evaluate` scores a
tagger against a dataset, `predict` runs single-text or file inference,
`schedule simulate` renders a learning-rate trajectory, and `aggregate`
summarizes multi-seed runs.

Exit codes: 0 success, 1 data or processing error, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import ingest, runs, schedule
from .core import AnnotationScheme, Document, validate_sequence
from .errors import SeqlabError
from .evaluation import evaluate_on_dataset
from .inference import load_tagger, predict, predict_file, prediction_record
from .schemes import convert_scheme

SCHEME_CHOICES = [s.value for s in AnnotationScheme]

log = logging.getLogger("seqlab")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqlab", description="sequence-labeling workflow toolkit"
    )
    parser.add_argument("--data-dir", default=None, help="dataset root (or $SEQLAB_DATA_DIR)")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--verbose", action="store_true")
    commands = parser.add_subparsers(dest="command", required=True)

    dataset = commands.add_parser("dataset", help="dataset management")
    dataset_commands = dataset.add_subparsers(dest="dataset_command", required=True)
    setup = dataset_commands.add_parser("set-up", help="normalize a dataset into canonical files")
    setup.add_argument("--source", required=True, choices=["LF", "HF", "AT", "BI"])
    setup.add_argument("--name", required=True)
    setup.add_argument("--path")
    setup.add_argument("--train-path")
    setup.add_argument("--val-path")
    setup.add_argument("--test-path")
    setup.add_argument("--dialect", choices=["labelstudio", "doccano"])
    setup.add_argument("--split-ratio", default="0.8,0.1,0.1")
    setup.add_argument("--fraction", type=float, help="prune the training split")
    setup.set_defaults(handler=cmd_dataset_setup)

    convert = commands.add_parser("convert", help="translate between annotation schemes")
    convert.add_argument("--from", dest="from_scheme", required=True, choices=SCHEME_CHOICES)
    convert.add_argument("--to", dest="to_scheme", required=True, choices=SCHEME_CHOICES)
    convert.add_argument("--input", required=True)
    convert.add_argument("--output", required=True)
    convert.set_defaults(handler=cmd_convert)

    evaluate = commands.add_parser("evaluate", help="score a tagger on a dataset split")
    evaluate.add_argument("--tagger", required=True, help="lexicon:<path>, echo:<path>, or all-o")
    evaluate.add_argument("--dataset", required=True, help="dataset name or directory")
    evaluate.add_argument("--phase", default="test", choices=list(ingest.SPLIT_NAMES))
    evaluate.add_argument("--output", help="report path (default: <dataset>/eval_<phase>.json)")
    evaluate.set_defaults(handler=cmd_evaluate)

    pred = commands.add_parser("predict", help="tag raw text or a JSONL file")
    pred.add_argument("--tagger", required=True)
    pred.add_argument("--text")
    pred.add_argument("--input")
    pred.add_argument("--output")
    pred.add_argument("--level", default="entity", choices=["entity", "word"])
    pred.add_argument("--probabilities", action="store_true")
    pred.set_defaults(handler=cmd_predict)

    sched = commands.add_parser("schedule", help="learning-rate schedule tools")
    sched_commands = sched.add_subparsers(dest="schedule_command", required=True)
    simulate = sched_commands.add_parser("simulate", help="render a schedule trajectory as CSV")
    simulate.add_argument("--config", required=True, help="JSON schedule config")
    simulate.add_argument("--losses", help="JSON array of validation losses")
    simulate.add_argument("--output", help="CSV path (default: stdout)")
    simulate.set_defaults(handler=cmd_schedule_simulate)

    agg = commands.add_parser("aggregate", help="aggregate multi-seed run records")
    agg.add_argument("--runs-dir", required=True)
    agg.add_argument("--selection-metric", default=runs.DEFAULT_SELECTION_METRIC)
    agg.set_defaults(handler=cmd_aggregate)
    return parser


def cmd_dataset_setup(args) -> int:
    try:
        ratio = tuple(float(r) for r in args.split_ratio.split(","))
    except ValueError:
        print(f"bad --split-ratio: {args.split_ratio!r}", file=sys.stderr)
        return 2
    _, analysis = ingest.set_up(
        args.source,
        name=args.name,
        path=args.path,
        train_path=args.train_path,
        val_path=args.val_path,
        test_path=args.test_path,
        dialect=args.dialect,
        split_ratio=ratio,
        seed=args.seed,
        train_fraction=args.fraction,
        data_dir=args.data_dir,
    )
    out_dir = ingest.resolve_data_dir(args.data_dir) / args.name
    print(f"wrote canonical dataset to {out_dir}")
    print(json.dumps(analysis.as_dict(), ensure_ascii=False, indent=2))
    return 0


def cmd_convert(args) -> int:
    source = AnnotationScheme.coerce(args.from_scheme)
    target = AnnotationScheme.coerce(args.to_scheme)
    if target is AnnotationScheme.IO:
        print(
            "warning: IO output merges adjacent same-class chunks (lossy)",
            file=sys.stderr,
        )
    text = Path(args.input).read_text(encoding="utf-8")
    documents = ingest.read_canonical_jsonl(text, scheme=source)
    problems = []
    for lineno, doc in enumerate(documents, 1):
        if doc.word_labels is None:
            problems.append(f"line {lineno}: document has no word labels to convert")
            continue
        for violation in validate_sequence(doc.word_labels):
            problems.append(
                f"line {lineno}: {violation.kind.value} at position {violation.position}"
            )
    if problems:
        for problem in problems:
            print(problem, file=sys.stderr)
        return 1
    converted = [
        Document(
            doc.text,
            words=doc.words,
            word_labels=convert_scheme(doc.word_labels, target),
            entities=doc.entities,
        )
        for doc in documents
    ]
    ingest.save_canonical_jsonl(converted, args.output)
    print(f"converted {len(converted)} documents {source.value} -> {target.value}")
    return 0


def _dataset_dir(args) -> Path:
    candidate = Path(args.dataset)
    if candidate.is_dir():
        return candidate
    return ingest.resolve_data_dir(args.data_dir) / args.dataset


def cmd_evaluate(args) -> int:
    dataset_dir = _dataset_dir(args)
    log.debug("evaluating %s split of %s", args.phase, dataset_dir)
    scheme = None
    try:
        scheme = AnnotationScheme.coerce(ingest.load_analysis(dataset_dir)["scheme_detected"])
    except SeqlabError:
        pass  # fall back to detection from the split itself
    split = ingest.load_split(dataset_dir, args.phase, scheme=scheme)
    if scheme is None:
        labeled = [d.word_labels.serialized() for d in split.documents if d.word_labels]
        scheme = ingest.resolve_scheme(labeled)
    tagger = load_tagger(args.tagger)
    result = evaluate_on_dataset(tagger, split, scheme)
    report = result.as_dict()
    print(json.dumps(report, ensure_ascii=False, indent=2))
    micro_f1 = report["strict"]["micro"]["entity"]["f1"]
    print(f"strict entity micro f1 = {micro_f1:.4f}")
    out_path = Path(args.output) if args.output else dataset_dir / f"eval_{args.phase}.json"
    out_path.write_text(
        json.dumps(report, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    return 0


def cmd_predict(args) -> int:
    if (args.text is None) == (args.input is None):
        print("predict needs exactly one of --text or --input", file=sys.stderr)
        return 2
    if args.input is not None and args.output is None:
        print("file mode needs --output", file=sys.stderr)
        return 2
    try:
        tagger = load_tagger(args.tagger)
    except (ValueError, OSError, json.JSONDecodeError) as err:
        print(f"cannot load tagger {args.tagger!r}: {err}", file=sys.stderr)
        return 1
    if args.text is not None:
        predictions = predict(
            tagger, args.text, level=args.level, with_probabilities=args.probabilities
        )
        print(json.dumps([prediction_record(p) for p in predictions], ensure_ascii=False))
        return 0
    summary = predict_file(
        tagger,
        args.input,
        args.output,
        level=args.level,
        with_probabilities=args.probabilities,
    )
    print(f"processed={summary.processed} failed={summary.failed}")
    return 0


def cmd_schedule_simulate(args) -> int:
    try:
        config_data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if not isinstance(config_data, dict):
            raise ValueError("schedule config must be a JSON object")
        losses = config_data.pop("val_losses", None)
        if args.losses:
            losses = json.loads(Path(args.losses).read_text(encoding="utf-8"))
        if not isinstance(losses, list) or not losses:
            raise ValueError("a non-empty loss array is required (config val_losses or --losses)")
        preset = config_data.pop("preset", None)
        if preset is not None:
            base = dataclasses.asdict(schedule.from_preset(preset))
            cfg = schedule.ScheduleConfig(**{**base, **config_data, "preset": preset})
        else:
            cfg = schedule.ScheduleConfig(**config_data)
    except (OSError, ValueError, TypeError, SeqlabError) as err:
        print(f"bad schedule config: {err}", file=sys.stderr)
        return 2
    rows = schedule.simulate(cfg, [float(x) for x in losses])
    out = open(args.output, "w", newline="", encoding="utf-8") if args.output else sys.stdout
    try:
        writer = csv.writer(out)
        writer.writerow(["epoch", "lr", "stopped"])
        for row in rows:
            writer.writerow([row.epoch, f"{row.lr:.10g}", str(row.stopped).lower()])
    finally:
        if args.output:
            out.close()
    if args.output:
        print(f"wrote {len(rows)} epochs to {args.output}")
    return 0


def cmd_aggregate(args) -> int:
    records = runs.load_runs(args.runs_dir)
    result = runs.aggregate(records, args.selection_metric)
    runs.save_aggregate(result, args.runs_dir)
    chosen = result.metrics[args.selection_metric]
    print(
        f"{args.selection_metric}: {chosen.mean:.4f} +/- {chosen.uncertainty:.4f} "
        f"(n={chosen.n}), best run: {result.best_run}"
    )
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_info:
        return exit_info.code if isinstance(exit_info.code, int) else 2
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    try:
        return args.handler(args)
    except SeqlabError as err:
        log.debug("failing command: %s", args.command, exc_info=True)
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
