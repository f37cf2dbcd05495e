"""Multi-run bookkeeping: aggregate metrics across seeds, pick the best run.

Training a neural tagger is stochastic, so the same configuration is
typically run under several seeds. Each run's evaluation tree is stored
as a record; aggregation walks every numeric metric path shared by all
records and reports mean and uncertainty, where uncertainty is the
standard error of the mean (sample standard deviation over sqrt(n), 0
for a single run). The best run is the argmax of the selection metric,
ties broken by the lowest seed.

Records persist as JSON under ``runs/<training_name>/<run_name>.json``
with the aggregate written next to them as ``aggregate.json``.
"""

from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Mapping, Sequence

from .errors import EmptyRunSet, MissingMetric

#: strict entity micro F1; prepend a phase segment ("val." etc.) when
#: records store per-phase trees.
DEFAULT_SELECTION_METRIC = "strict.micro.entity.f1"


@dataclass(frozen=True)
class RunRecord:
    run_name: str
    seed: int
    reports: Mapping
    artifacts_path: str = ""


@dataclass(frozen=True)
class MetricAggregate:
    mean: float
    uncertainty: float
    n: int
    per_run: tuple[float, ...]

    def as_dict(self) -> dict:
        return {
            "mean": self.mean,
            "uncertainty": self.uncertainty,
            "n": self.n,
            "per_run": list(self.per_run),
        }


@dataclass(frozen=True)
class AggregateResult:
    metrics: Mapping[str, MetricAggregate]
    best_run: str
    selection_metric: str

    def as_dict(self) -> dict:
        return {
            "selection_metric": self.selection_metric,
            "best_run": self.best_run,
            "metrics": {path: agg.as_dict() for path, agg in self.metrics.items()},
        }


def lookup_metric(tree: Mapping, path: str) -> float | None:
    node = tree
    for part in path.split("."):
        if not isinstance(node, Mapping) or part not in node:
            return None
        node = node[part]
    if isinstance(node, bool) or not isinstance(node, (int, float)):
        return None
    return float(node)


def _numeric_paths(tree: Mapping, prefix: str = "") -> Iterator[str]:
    for key, value in tree.items():
        path = f"{prefix}.{key}" if prefix else str(key)
        if isinstance(value, Mapping):
            yield from _numeric_paths(value, path)
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            yield path


def _check_records(records: Sequence[RunRecord], selection_metric: str):
    if not records:
        raise EmptyRunSet("at least one run record is required")
    names = [r.run_name for r in records]
    if len(set(names)) != len(names):
        raise ValueError(f"run names must be unique, got {names}")
    for record in records:
        if lookup_metric(record.reports, selection_metric) is None:
            raise MissingMetric(
                f"run {record.run_name!r} has no metric {selection_metric!r}"
            )


def best_model(
    records: Sequence[RunRecord],
    selection_metric: str = DEFAULT_SELECTION_METRIC,
) -> RunRecord:
    """The record with the highest selection metric; ties go to the
    lowest seed."""
    _check_records(records, selection_metric)
    return max(
        records,
        key=lambda r: (lookup_metric(r.reports, selection_metric), -r.seed),
    )


def _sem(values: Sequence[float]) -> float:
    if len(values) < 2:
        return 0.0
    return statistics.stdev(values) / math.sqrt(len(values))


def aggregate(
    records: Sequence[RunRecord],
    selection_metric: str = DEFAULT_SELECTION_METRIC,
) -> AggregateResult:
    """Mean and standard-error aggregation over every metric path
    present (and numeric) in all records."""
    _check_records(records, selection_metric)
    shared = set(_numeric_paths(records[0].reports))
    for record in records[1:]:
        shared &= set(_numeric_paths(record.reports))
    metrics = {}
    for path in sorted(shared):
        values = [lookup_metric(r.reports, path) for r in records]
        metrics[path] = MetricAggregate(
            mean=statistics.fmean(values),
            uncertainty=_sem(values),
            n=len(values),
            per_run=tuple(values),
        )
    best = best_model(records, selection_metric)
    return AggregateResult(metrics, best.run_name, selection_metric)


def save_run(record: RunRecord, directory: str | Path) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{record.run_name}.json"
    payload = {
        "run_name": record.run_name,
        "seed": record.seed,
        "reports": record.reports,
        "artifacts_path": record.artifacts_path,
    }
    path.write_text(
        json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    return path


def load_run(path: str | Path) -> RunRecord:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return RunRecord(
        run_name=data["run_name"],
        seed=int(data["seed"]),
        reports=data["reports"],
        artifacts_path=data.get("artifacts_path", ""),
    )


def load_runs(directory: str | Path) -> list[RunRecord]:
    directory = Path(directory)
    if not directory.is_dir():
        raise EmptyRunSet(f"run directory does not exist: {directory}")
    records = [
        load_run(path)
        for path in sorted(directory.glob("*.json"))
        if path.name != "aggregate.json"
    ]
    if not records:
        raise EmptyRunSet(f"no run records under {directory}")
    return records


def save_aggregate(result: AggregateResult, directory: str | Path) -> Path:
    path = Path(directory) / "aggregate.json"
    path.write_text(
        json.dumps(result.as_dict(), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    return path
