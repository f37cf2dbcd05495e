import random

import pytest

from seqlab.errors import EmptyRunSet, MissingMetric
from seqlab.runs import (
    DEFAULT_SELECTION_METRIC,
    RunRecord,
    aggregate,
    best_model,
    load_runs,
    save_aggregate,
    save_run,
)

from .oracles import oracle_mean_sem

METRIC = "strict.micro.entity.f1"


def record(name, seed, f1, extra=None):
    reports = {"strict": {"micro": {"entity": {"f1": f1, "precision": f1}}}}
    if extra:
        reports.update(extra)
    return RunRecord(run_name=name, seed=seed, reports=reports)


class TestAggregate:
    def test_two_runs_mean_and_standard_error(self):
        result = aggregate([record("r0", 0, 0.8), record("r1", 1, 0.9)], METRIC)
        agg = result.metrics[METRIC]
        assert agg.mean == pytest.approx(0.85, abs=1e-12)
        # s = 0.0707106..., s / sqrt(2) = 0.05 exactly
        assert agg.uncertainty == pytest.approx(0.05, abs=1e-12)
        assert agg.n == 2
        assert agg.per_run == (0.8, 0.9)

    def test_single_run_has_zero_uncertainty(self):
        result = aggregate([record("only", 3, 0.7)], METRIC)
        agg = result.metrics[METRIC]
        assert (agg.mean, agg.uncertainty, agg.n) == (0.7, 0.0, 1)

    def test_identical_runs_have_zero_uncertainty(self):
        records = [record(f"r{i}", i, 0.6) for i in range(3)]
        agg = aggregate(records, METRIC).metrics[METRIC]
        assert (agg.mean, agg.uncertainty) == (0.6, 0.0)

    def test_matches_arithmetic_oracle(self):
        rng = random.Random(31)
        for _ in range(100):
            values = [rng.random() for _ in range(rng.randint(1, 8))]
            records = [record(f"r{i}", i, v) for i, v in enumerate(values)]
            agg = aggregate(records, METRIC).metrics[METRIC]
            mean, sem = oracle_mean_sem(values)
            assert agg.mean == pytest.approx(mean, abs=1e-12)
            assert agg.uncertainty == pytest.approx(sem, abs=1e-12)

    def test_mean_within_run_range(self):
        rng = random.Random(32)
        for _ in range(50):
            values = [rng.random() for _ in range(rng.randint(1, 6))]
            records = [record(f"r{i}", i, v) for i, v in enumerate(values)]
            agg = aggregate(records, METRIC).metrics[METRIC]
            assert min(values) <= agg.mean <= max(values)

    def test_all_shared_numeric_paths_are_aggregated(self):
        records = [record("a", 0, 0.5), record("b", 1, 0.7)]
        result = aggregate(records, METRIC)
        assert set(result.metrics) == {
            "strict.micro.entity.f1",
            "strict.micro.entity.precision",
        }

    def test_empty_run_set(self):
        with pytest.raises(EmptyRunSet):
            aggregate([], METRIC)

    def test_missing_metric(self):
        with pytest.raises(MissingMetric):
            aggregate([record("a", 0, 0.5)], "lenient.micro.entity.f1")

    def test_duplicate_run_names_rejected(self):
        with pytest.raises(ValueError):
            aggregate([record("a", 0, 0.5), record("a", 1, 0.6)], METRIC)

    def test_default_selection_metric(self):
        result = aggregate([record("a", 0, 0.5)])
        assert result.selection_metric == DEFAULT_SELECTION_METRIC


class TestBestModel:
    def test_argmax(self):
        best = best_model([record("lo", 0, 0.8), record("hi", 1, 0.9)], METRIC)
        assert best.run_name == "hi"

    def test_tie_broken_by_lowest_seed(self):
        best = best_model([record("a", 2, 0.9), record("b", 1, 0.9)], METRIC)
        assert best.run_name == "b"

    def test_single_run(self):
        best = best_model([record("only", 5, 0.1)], METRIC)
        assert best.run_name == "only"

    def test_invariant_under_permutation(self):
        rng = random.Random(33)
        records = [record(f"r{i}", i, rng.random()) for i in range(6)]
        expected = best_model(records, METRIC).run_name
        for _ in range(10):
            rng.shuffle(records)
            assert best_model(records, METRIC).run_name == expected

    def test_invariant_under_positive_affine_rescaling(self):
        rng = random.Random(34)
        for _ in range(100):
            values = [rng.random() for _ in range(rng.randint(2, 6))]
            records = [record(f"r{i}", i, v) for i, v in enumerate(values)]
            expected = best_model(records, METRIC).run_name
            scale = rng.uniform(0.1, 10.0)
            shift = rng.uniform(-5.0, 5.0)
            rescaled = [
                record(f"r{i}", i, scale * v + shift) for i, v in enumerate(values)
            ]
            assert best_model(rescaled, METRIC).run_name == expected


class TestPersistence:
    def test_save_load_aggregate_round_trip(self, tmp_path):
        run_dir = tmp_path / "runs" / "my_training"
        for i, f1 in enumerate((0.8, 0.9)):
            save_run(record(f"run{i}", i, f1), run_dir)
        records = load_runs(run_dir)
        assert [r.run_name for r in records] == ["run0", "run1"]
        result = aggregate(records, METRIC)
        path = save_aggregate(result, run_dir)
        assert path.name == "aggregate.json"
        # aggregate.json must not be picked up as a run record
        assert [r.run_name for r in load_runs(run_dir)] == ["run0", "run1"]

    def test_missing_directory(self, tmp_path):
        with pytest.raises(EmptyRunSet):
            load_runs(tmp_path / "nope")
