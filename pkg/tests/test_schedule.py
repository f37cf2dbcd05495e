import math
import random

import pytest

from seqlab.errors import NonFiniteLoss, Stopped, UnknownPreset
from seqlab.schedule import (
    PRESETS,
    ScheduleConfig,
    ScheduleState,
    from_preset,
    initial_state,
    lr_at,
    observe_validation,
    simulate,
)


def config(**overrides):
    base = dict(
        max_lr=1.0,
        min_lr=0.0,
        restart_period_initial=4,
        restart_period_mult=1.0,
        max_epochs=100,
        early_stop_patience=None,
        warmup_fraction=0.0,
    )
    base.update(overrides)
    return ScheduleConfig(**base)


class TestLrAt:
    def test_cycle_start_is_max(self):
        cfg = config(max_lr=3e-5, min_lr=1e-6)
        assert lr_at(initial_state(cfg), cfg) == pytest.approx(3e-5, abs=1e-12)

    def test_cycle_end_is_min(self):
        cfg = config(max_lr=3e-5, min_lr=1e-6)
        state = ScheduleState(cycle_length=4, position_in_cycle=4)
        assert lr_at(state, cfg) == pytest.approx(1e-6, abs=1e-12)

    def test_midpoint_is_average(self):
        cfg = config(max_lr=1.0, min_lr=0.0)
        state = ScheduleState(cycle_length=4, position_in_cycle=2)
        assert lr_at(state, cfg) == pytest.approx(0.5, abs=1e-12)

    def test_range_invariant(self):
        rng = random.Random(2)
        for _ in range(500):
            max_lr = rng.uniform(1e-6, 1.0)
            min_lr = rng.uniform(0, max_lr)
            cycle = rng.randint(1, 30)
            cfg = config(max_lr=max_lr, min_lr=min_lr, restart_period_initial=cycle)
            state = ScheduleState(
                cycle_length=cycle,
                position_in_cycle=rng.randint(0, cycle),
                restart_index=rng.randint(0, 3),
            )
            lr = lr_at(state, cfg)
            assert min_lr - 1e-15 <= lr <= max_lr + 1e-15

    def test_sub_epoch_resolution_is_monotone_within_cycle(self):
        cfg = config(steps_per_epoch=10, restart_period_initial=2)
        state = initial_state(cfg)
        rates = [lr_at(state, cfg, step=s) for s in range(10)]
        assert rates == sorted(rates, reverse=True)

    def test_warmup_starts_at_zero_and_is_linear(self):
        cfg = config(warmup_fraction=0.5, restart_period_initial=4, steps_per_epoch=4)
        state = initial_state(cfg)
        assert lr_at(state, cfg) == 0.0
        quarter = lr_at(state, cfg, step=1)  # t = 0.25 of a 2-epoch warmup
        assert quarter == pytest.approx(1.0 * 0.25 / 2, abs=1e-12)

    def test_warmup_peak_meets_cosine(self):
        cfg = config(warmup_fraction=0.5, restart_period_initial=4)
        state = ScheduleState(cycle_length=4, position_in_cycle=2)
        assert lr_at(state, cfg) == pytest.approx(1.0, abs=1e-12)

    def test_no_warmup_after_first_restart(self):
        cfg = config(warmup_fraction=0.5, restart_period_initial=4)
        state = ScheduleState(cycle_length=4, position_in_cycle=0, restart_index=1)
        assert lr_at(state, cfg) == pytest.approx(1.0, abs=1e-12)

    def test_stopped_state_rejected(self):
        cfg = config()
        state = ScheduleState(cycle_length=4, stopped=True)
        with pytest.raises(Stopped):
            lr_at(state, cfg)


class TestObserveValidation:
    def run(self, cfg, losses):
        state = initial_state(cfg)
        states = []
        for loss in losses:
            state = observe_validation(state, cfg, loss)
            states.append(state)
        return states

    def test_monotone_improvement_never_stops(self):
        cfg = config(early_stop_patience=2)
        states = self.run(cfg, [1.0, 0.9, 0.8])
        assert not any(s.stopped for s in states)

    def test_constant_losses_stop_after_patience_plus_one(self):
        cfg = config(early_stop_patience=2)
        states = self.run(cfg, [1.0, 1.0, 1.0])
        assert [s.stopped for s in states] == [False, False, True]

    @pytest.mark.parametrize("patience", range(6))
    def test_patience_property_on_constant_stream(self, patience):
        cfg = config(early_stop_patience=patience)
        state = initial_state(cfg)
        observations = 0
        while not state.stopped:
            state = observe_validation(state, cfg, 0.5)
            observations += 1
        assert observations == patience + 1

    def test_equal_to_threshold_counts_as_no_improvement(self):
        cfg = config(early_stop_patience=1, early_stop_min_delta=0.1)
        states = self.run(cfg, [1.0, 0.9])  # 0.9 == best - min_delta exactly
        assert states[-1].stopped

    def test_restart_epochs_for_doubling_period(self):
        cfg = config(restart_period_initial=2, restart_period_mult=2.0)
        state = initial_state(cfg)
        restart_epochs = []
        for epoch in range(1, 15):
            state = observe_validation(state, cfg, 1.0 / epoch)
            if state.position_in_cycle == 0:
                restart_epochs.append(state.epoch)
        assert restart_epochs == [2, 6, 14]  # cycle lengths 2 -> 4 -> 8
        assert state.cycle_length == 16

    def test_lr_jumps_back_to_max_after_restart(self):
        cfg = config(restart_period_initial=2, restart_period_mult=2.0)
        state = initial_state(cfg)
        for epoch in range(2):
            state = observe_validation(state, cfg, 1.0 / (epoch + 1))
        assert state.position_in_cycle == 0
        assert lr_at(state, cfg) == pytest.approx(cfg.max_lr, abs=1e-12)

    def test_max_epochs_stops(self):
        cfg = config(max_epochs=3)
        states = self.run(cfg, [1.0, 0.9, 0.8])
        assert states[-1].stopped

    def test_stopped_is_absorbing(self):
        cfg = config(max_epochs=1)
        state = observe_validation(initial_state(cfg), cfg, 1.0)
        assert state.stopped
        with pytest.raises(Stopped):
            observe_validation(state, cfg, 0.5)
        with pytest.raises(Stopped):
            lr_at(state, cfg)

    def test_non_finite_loss(self):
        cfg = config()
        for bad in (math.nan, math.inf, -math.inf):
            with pytest.raises(NonFiniteLoss):
                observe_validation(initial_state(cfg), cfg, bad)


class TestPresets:
    def test_adaptive_enables_early_stopping_and_restarts(self):
        cfg = from_preset("adaptive")
        assert cfg.early_stop_patience is not None and cfg.early_stop_patience > 0
        assert cfg.restart_period_mult > 1

    def test_original_has_no_early_stopping(self):
        cfg = from_preset("original")
        assert cfg.early_stop_patience is None
        assert cfg.restart_period_mult == 1.0
        assert cfg.restart_period_initial == cfg.max_epochs  # one long half-cycle

    def test_stable_is_a_long_low_rate_run_with_warmup(self):
        cfg = from_preset("stable")
        assert cfg.max_epochs > from_preset("original").max_epochs
        assert cfg.warmup_fraction > 0

    def test_unknown_preset(self):
        with pytest.raises(UnknownPreset):
            from_preset("bogus")

    def test_preset_names_recorded(self):
        for name in PRESETS:
            assert from_preset(name).preset == name


class TestSimulate:
    def test_constant_losses_patience_zero_stops_at_first_epoch(self):
        cfg = config(early_stop_patience=0)
        rows = simulate(cfg, [1.0, 1.0, 1.0])
        assert len(rows) == 1
        assert rows[0].epoch == 1 and rows[0].stopped

    def test_decreasing_losses_run_to_max_epochs(self):
        cfg = config(max_epochs=5, early_stop_patience=3)
        rows = simulate(cfg, [1.0 / (i + 1) for i in range(10)])
        assert len(rows) == 5
        assert rows[-1].stopped

    def test_rates_stay_in_range(self):
        cfg = config(max_lr=2e-5, min_lr=1e-7, restart_period_initial=3,
                     restart_period_mult=1.5, max_epochs=50)
        rows = simulate(cfg, [1.0 / (i + 1) for i in range(50)])
        assert all(cfg.min_lr - 1e-18 <= r.lr <= cfg.max_lr + 1e-18 for r in rows)

    def test_deterministic(self):
        cfg = from_preset("adaptive")
        losses = [1.0, 0.8, 0.9, 0.7, 0.7, 0.7]
        assert simulate(cfg, losses) == simulate(cfg, losses)

    def test_empty_losses_rejected(self):
        with pytest.raises(ValueError):
            simulate(config(), [])
