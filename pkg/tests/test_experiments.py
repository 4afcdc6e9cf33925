"""Monte-Carlo harness tests: seed derivation, ensembles, grid sweeps."""

import math

import numpy as np
import pytest

import ifburst.experiments as experiments
from ifburst.experiments import (
    DEFAULT_NOISE_LADDER,
    MODES,
    EnsembleSpec,
    GridSpec,
    derive_trial_seed,
    run_ensemble,
    run_grid,
)


class TestSeedDerivation:
    # Known-answer values frozen from an independent SHA-256 computation.
    @pytest.mark.parametrize(
        "args,expected",
        [
            ((0, 0, 0), 11353731683375535838),
            ((0, 0, 1), 17116910238405733946),
            ((42, 3, 7), 11054526244629343732),
            ((7,), 11811690271803249212),
            ((2**64 - 1, 5), 3609962028267619716),
        ],
    )
    def test_known_answers(self, args, expected):
        assert derive_trial_seed(*args) == expected

    def test_uniqueness_over_index_block(self):
        seeds = {
            derive_trial_seed(0, i, j) for i in range(20) for j in range(300)
        }
        assert len(seeds) == 20 * 300

    def test_base_seed_changes_everything(self):
        a = [derive_trial_seed(0, i) for i in range(100)]
        b = [derive_trial_seed(1, i) for i in range(100)]
        assert not set(a) & set(b)

    def test_result_is_u64(self):
        for args in [(0,), (123, 456), (2**64 - 1, 2**64 - 1)]:
            s = derive_trial_seed(*args)
            assert 0 <= s < 2**64

    def test_derived_streams_uncorrelated(self):
        n = 1_000_000
        x = np.random.default_rng(derive_trial_seed(0, 0, 0)).standard_normal(n)
        y = np.random.default_rng(derive_trial_seed(0, 0, 1)).standard_normal(n)
        rho = np.corrcoef(x, y)[0, 1]
        assert abs(rho) < 0.01


class TestSpecs:
    def test_noise_ladder_shape(self):
        assert DEFAULT_NOISE_LADDER[0] == 0.0
        assert list(DEFAULT_NOISE_LADDER) == sorted(DEFAULT_NOISE_LADDER)
        assert {0.06, 0.3, 0.5, 2.0, 3.0, 7.0, 10.0} <= set(DEFAULT_NOISE_LADDER)

    def test_ensemble_defaults(self):
        spec = EnsembleSpec(initial_condition=(-45.0, 0.045), D_values=(0.0, 1))
        assert spec.n_trials == 300
        assert spec.trial_duration == 30000.0
        assert spec.D_values == (0.0, 1.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(n_trials=0),
            dict(trial_duration=50.0),  # shorter than the transient cutoff
            dict(D_values=()),
            dict(D_values=(-0.5,)),
            dict(D_values=(math.inf,)),
            dict(transient_cutoff=-1.0),
        ],
    )
    def test_ensemble_validation(self, kwargs):
        base = dict(initial_condition=(-45.0, 0.045), D_values=(0.0,))
        base.update(kwargs)
        with pytest.raises(ValueError):
            EnsembleSpec(**base)

    def test_grid_axis_values(self):
        spec = GridSpec(v0_range=(-90.0, -35.0), h0_range=(0.0, 1.0),
                        v0_resolution=2.0, h0_resolution=0.02)
        v0s, h0s = spec.v0_values(), spec.h0_values()
        assert len(v0s) == 28 and v0s[0] == -90.0 and v0s[-1] == -36.0
        assert len(h0s) == 51 and h0s[0] == 0.0 and h0s[-1] == pytest.approx(1.0)

    def test_grid_default_resolution(self):
        spec = GridSpec()
        assert len(spec.v0_values()) == 111  # -90 .. -35 in 0.5 mV steps
        assert len(spec.h0_values()) == 101  # 0 .. 1 in 0.01 steps

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(v0_resolution=0.0),
            dict(h0_resolution=-0.1),
            dict(v0_range=(-35.0, -90.0)),
            dict(D=-1.0),
            dict(duration=50.0),
        ],
    )
    def test_grid_validation(self, kwargs):
        with pytest.raises(ValueError):
            GridSpec(**kwargs)


class TestEnsemble:
    def test_deterministic_level_is_pure_mode_2(self):
        spec = EnsembleSpec(initial_condition=(-45.0, 0.045), D_values=(0.0,),
                            n_trials=3, trial_duration=3000.0)
        curve = run_ensemble(spec)
        assert curve.transition_rate_mean[0] == 0.0
        assert curve.occurrence_mean[0] == {1: 0.0, 2: 1.0, 3: 0.0, 4: 0.0}
        assert curve.pooled_isih[0].bin_fractions.sum() == pytest.approx(1.0)

    def test_occurrence_means_sum_to_one(self):
        spec = EnsembleSpec(initial_condition=(-45.0, 0.045), D_values=(0.5, 2.0),
                            n_trials=4, trial_duration=4000.0)
        curve = run_ensemble(spec)
        for occ in curve.occurrence_mean:
            assert set(occ) == set(MODES)
            assert sum(occ.values()) == pytest.approx(1.0, abs=1e-12)

    def test_noise_raises_transition_rate(self):
        spec = EnsembleSpec(initial_condition=(-45.0, 0.045), D_values=(0.06, 1.0),
                            n_trials=10, trial_duration=5000.0)
        curve = run_ensemble(spec)
        assert curve.transition_rate_mean[1] > curve.transition_rate_mean[0]

    def test_serial_and_parallel_are_bitwise_identical(self):
        spec = EnsembleSpec(initial_condition=(-45.0, 0.045), D_values=(0.5, 2.0),
                            n_trials=6, trial_duration=2000.0)
        serial = run_ensemble(spec, workers=1)
        parallel = run_ensemble(spec, workers=3)
        assert np.array_equal(serial.transition_rate_mean, parallel.transition_rate_mean)
        assert serial.occurrence_mean == parallel.occurrence_mean
        for a, b in zip(serial.pooled_isih, parallel.pooled_isih):
            assert np.array_equal(a.bin_fractions, b.bin_fractions)
            assert a.total_isi_count == b.total_isi_count

    def test_burst_free_level_reports_nan_occurrence(self):
        # From deep hyperpolarization with a closed gate and no noise, the
        # short window ends before any burst completes.
        spec = EnsembleSpec(initial_condition=(-90.0, 0.0), D_values=(0.0,),
                            n_trials=2, trial_duration=150.0, transient_cutoff=100.0)
        curve = run_ensemble(spec)
        assert all(math.isnan(x) for x in curve.occurrence_mean[0].values())
        assert curve.transition_rate_mean[0] == 0.0

    def test_failing_trial_aborts_with_identity(self, monkeypatch):
        def boom(*args, **kwargs):
            raise FloatingPointError("synthetic failure")

        monkeypatch.setattr(experiments, "simulate", boom)
        spec = EnsembleSpec(initial_condition=(-45.0, 0.045), D_values=(0.5,),
                            n_trials=2, trial_duration=1000.0)
        with pytest.raises(RuntimeError, match=r"D=0\.5, trial=0.*seed="):
            run_ensemble(spec)


class TestGrid:
    def test_known_basins(self):
        spec = GridSpec(v0_range=(-45.0, -45.0), h0_range=(0.045, 0.5),
                        v0_resolution=1.0, h0_resolution=0.455,
                        duration=3000.0, transient_cutoff=400.0)
        gmap = run_grid(spec)
        assert gmap.mean_spikes.shape == (1, 2)
        assert gmap.mean_spikes[0, 0] == 2.0
        assert gmap.mean_spikes[0, 1] == 3.0

    def test_burst_free_cell_is_nan(self):
        spec = GridSpec(v0_range=(-90.0, -90.0), h0_range=(0.0, 0.0),
                        v0_resolution=1.0, h0_resolution=1.0,
                        duration=150.0, transient_cutoff=100.0)
        gmap = run_grid(spec)
        assert math.isnan(gmap.mean_spikes[0, 0])

    def test_serial_and_parallel_are_bitwise_identical(self):
        spec = GridSpec(v0_range=(-60.0, -45.0), h0_range=(0.0, 0.4),
                        v0_resolution=5.0, h0_resolution=0.2,
                        D=0.5, duration=1500.0)
        serial = run_grid(spec, workers=1)
        parallel = run_grid(spec, workers=3)
        assert np.array_equal(serial.mean_spikes, parallel.mean_spikes, equal_nan=True)

    def test_failing_cell_aborts_with_identity(self, monkeypatch):
        def boom(*args, **kwargs):
            raise FloatingPointError("synthetic failure")

        monkeypatch.setattr(experiments, "simulate", boom)
        spec = GridSpec(v0_range=(-50.0, -50.0), h0_range=(0.1, 0.1),
                        v0_resolution=1.0, h0_resolution=1.0, duration=1000.0)
        with pytest.raises(RuntimeError, match=r"v0=-50\.0, h0=0\.1"):
            run_grid(spec)

    def test_metadata_round_trip(self):
        spec = GridSpec(v0_range=(-50.0, -48.0), h0_range=(0.0, 0.1),
                        v0_resolution=2.0, h0_resolution=0.1,
                        D=0.0, duration=500.0, base_seed=9)
        gmap = run_grid(spec)
        assert gmap.D == 0.0 and gmap.duration == 500.0 and gmap.base_seed == 9
        assert gmap.mean_spikes.shape == (len(gmap.v0_values), len(gmap.h0_values))
