"""Seeded Monte-Carlo harness: noise-ladder ensembles and IC-grid sweeps.

Every trial owns an independent random stream whose seed is derived from a
base seed and the trial's index tuple by a fixed SHA-256 mixing function, so
any single trial or grid cell can be recomputed in isolation and results are
bitwise identical however the work is scheduled.  Trials may run on a
bounded thread pool (the integrator kernel releases the GIL); results are
merged in submission order, making serial and concurrent execution
indistinguishable.  A failing trial aborts the whole run with its identity
attached - silent gaps would corrupt averaged curves.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .analysis import (
    DEFAULT_BINWIDTH_MS,
    DEFAULT_ISI_THRESHOLD_MS,
    IsiHistogram,
    histogram_from_isis,
    mean_spikes_per_burst,
    occurrence_percentages,
    remove_transient,
    segment_bursts,
    transition_rate,
)
from .integrator import SimulationSettings, simulate
from .model import DEFAULT_PARAMS, ModelParameters

__all__ = [
    "DEFAULT_NOISE_LADDER",
    "MODES",
    "EnsembleSpec",
    "GridSpec",
    "AggregateCurve",
    "GridMap",
    "derive_trial_seed",
    "run_ensemble",
    "run_grid",
]

# Log-ish noise ladder covering the deterministic point and the weak,
# intermediate, strong, and extra-strong regimes.
DEFAULT_NOISE_LADDER = (
    0.0, 0.01, 0.02, 0.03, 0.06, 0.1, 0.14, 0.2, 0.3,
    0.5, 0.8, 1.2, 1.5, 2.0, 3.0, 5.0, 7.0, 10.0,
)

MODES = (1, 2, 3, 4)

_U64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class EnsembleSpec:
    """A family of repeated trials from one initial condition across noise levels."""

    initial_condition: tuple[float, float]  # (v0, h0)
    D_values: tuple[float, ...]
    n_trials: int = 300
    trial_duration: float = 30000.0  # ms
    base_seed: int = 0
    transient_cutoff: float = 100.0  # ms

    def __post_init__(self) -> None:
        object.__setattr__(self, "D_values", tuple(float(d) for d in self.D_values))
        if self.n_trials < 1:
            raise ValueError(f"n_trials must be >= 1, got {self.n_trials}")
        if not (self.trial_duration > self.transient_cutoff >= 0):
            raise ValueError(
                f"need trial_duration > transient_cutoff >= 0, got "
                f"{self.trial_duration} and {self.transient_cutoff}"
            )
        if any(d < 0 or not math.isfinite(d) for d in self.D_values):
            raise ValueError(f"noise intensities must be finite and >= 0: {self.D_values}")
        if not self.D_values:
            raise ValueError("D_values must not be empty")


@dataclass(frozen=True)
class GridSpec:
    """One trial per (v0, h0) cell over a rectangular initial-condition grid."""

    v0_range: tuple[float, float] = (-90.0, -35.0)
    h0_range: tuple[float, float] = (0.0, 1.0)
    v0_resolution: float = 0.5   # mV
    h0_resolution: float = 0.01
    D: float = 0.0
    duration: float = 40000.0    # ms per cell
    base_seed: int = 0
    transient_cutoff: float = 100.0

    def __post_init__(self) -> None:
        if self.v0_resolution <= 0 or self.h0_resolution <= 0:
            raise ValueError("grid resolutions must be positive")
        if self.v0_range[1] < self.v0_range[0] or self.h0_range[1] < self.h0_range[0]:
            raise ValueError("grid ranges must be non-decreasing")
        if self.D < 0 or not math.isfinite(self.D):
            raise ValueError(f"noise intensity must be finite and >= 0, got {self.D}")
        if not (self.duration > self.transient_cutoff >= 0):
            raise ValueError("need duration > transient_cutoff >= 0")

    def v0_values(self) -> np.ndarray:
        return _axis(self.v0_range[0], self.v0_range[1], self.v0_resolution)

    def h0_values(self) -> np.ndarray:
        return _axis(self.h0_range[0], self.h0_range[1], self.h0_resolution)


@dataclass(frozen=True)
class AggregateCurve:
    """Per-noise-level ensemble averages, plus the pooled ISIH at each level."""

    D_values: tuple[float, ...]
    n_trials: int
    transition_rate_mean: np.ndarray        # one mean per D
    occurrence_mean: list[dict[int, float]]  # per D: mode -> mean fraction
    pooled_isih: list[IsiHistogram]


@dataclass(frozen=True)
class GridMap:
    """Mean spikes per complete burst per grid cell; nan marks burst-free cells."""

    v0_values: np.ndarray
    h0_values: np.ndarray
    mean_spikes: np.ndarray  # shape (len(v0_values), len(h0_values))
    D: float
    duration: float
    base_seed: int


def _axis(lo: float, hi: float, resolution: float) -> np.ndarray:
    n = int(math.floor((hi - lo) / resolution + 1e-9)) + 1
    return lo + resolution * np.arange(n, dtype=np.float64)


def derive_trial_seed(base_seed: int, *indices: int) -> int:
    """Mix a base seed and an index tuple into an independent 64-bit seed.

    The inputs are encoded as consecutive 8-byte big-endian words (values
    reduced mod 2^64), hashed with SHA-256, and the first 8 digest bytes are
    read back big-endian.  The mapping is fixed across platforms and
    collision-resistant across index tuples.
    """
    blob = b"".join((int(x) & _U64).to_bytes(8, "big") for x in (base_seed, *indices))
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "big")


def _map_ordered(jobs: Sequence[Callable], workers: int) -> list:
    """Run jobs on up to `workers` threads; return results in submission order."""
    if workers <= 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(job) for job in jobs]
        return [f.result() for f in futures]


def _ensemble_trial(
    v0: float,
    h0: float,
    D: float,
    seed: int,
    duration: float,
    dt: float,
    cutoff: float,
    isi_threshold: float,
    p: ModelParameters,
    label: str,
):
    try:
        settings = SimulationSettings(duration=duration, dt=dt, D=D, seed=seed)
        result = simulate(v0, h0, settings, p)
        kept = remove_transient(result.spike_train, cutoff)
        seq = segment_bursts(
            kept, isi_threshold=isi_threshold, window_start=cutoff, window_end=duration
        )
        isis = np.diff(kept.spike_times) if kept.spike_times.size >= 2 else np.empty(0)
        return transition_rate(seq), occurrence_percentages(seq), isis
    except Exception as exc:
        raise RuntimeError(f"trial failed ({label}, seed={seed}): {exc}") from exc


def run_ensemble(
    spec: EnsembleSpec,
    p: ModelParameters = DEFAULT_PARAMS,
    dt: float = 0.02,
    isi_threshold: float = DEFAULT_ISI_THRESHOLD_MS,
    binwidth: float = DEFAULT_BINWIDTH_MS,
    workers: int = 1,
) -> AggregateCurve:
    """Run n_trials independent trials at every noise level and aggregate.

    Trial seeds come from derive_trial_seed(base_seed, D_index, trial_index).
    Transition rates average over all trials (a burst-free trial counts 0);
    occurrence fractions average over trials that produced at least one
    complete burst, so the per-level means still sum to 1; ISIs pool across
    all trials of a level.
    """
    v0, h0 = spec.initial_condition
    jobs = []
    for d_idx, D in enumerate(spec.D_values):
        for t_idx in range(spec.n_trials):
            seed = derive_trial_seed(spec.base_seed, d_idx, t_idx)
            jobs.append(
                lambda v0=v0, h0=h0, D=D, seed=seed, d_idx=d_idx, t_idx=t_idx: _ensemble_trial(
                    v0,
                    h0,
                    D,
                    seed,
                    spec.trial_duration,
                    dt,
                    spec.transient_cutoff,
                    isi_threshold,
                    p,
                    f"D={D}, trial={t_idx}",
                )
            )
    results = _map_ordered(jobs, workers)

    rate_means = np.empty(len(spec.D_values), dtype=np.float64)
    occurrence_mean: list[dict[int, float]] = []
    pooled: list[IsiHistogram] = []
    for d_idx in range(len(spec.D_values)):
        chunk = results[d_idx * spec.n_trials : (d_idx + 1) * spec.n_trials]
        rate_means[d_idx] = float(np.mean([r[0] for r in chunk]))
        with_bursts = [r[1] for r in chunk if r[1]]
        if with_bursts:
            occurrence = {
                m: float(np.mean([occ.get(m, 0.0) for occ in with_bursts])) for m in MODES
            }
        else:
            occurrence = {m: math.nan for m in MODES}
        occurrence_mean.append(occurrence)
        all_isis = np.concatenate([r[2] for r in chunk])
        pooled.append(histogram_from_isis(all_isis, binwidth))
    return AggregateCurve(
        D_values=spec.D_values,
        n_trials=spec.n_trials,
        transition_rate_mean=rate_means,
        occurrence_mean=occurrence_mean,
        pooled_isih=pooled,
    )


def _grid_cell(
    v0: float,
    h0: float,
    spec: GridSpec,
    dt: float,
    isi_threshold: float,
    p: ModelParameters,
    seed: int,
):
    try:
        settings = SimulationSettings(duration=spec.duration, dt=dt, D=spec.D, seed=seed)
        result = simulate(v0, h0, settings, p)
        kept = remove_transient(result.spike_train, spec.transient_cutoff)
        seq = segment_bursts(
            kept,
            isi_threshold=isi_threshold,
            window_start=spec.transient_cutoff,
            window_end=spec.duration,
        )
        return mean_spikes_per_burst(seq)
    except Exception as exc:
        raise RuntimeError(f"grid cell failed (v0={v0}, h0={h0}, seed={seed}): {exc}") from exc


def run_grid(
    spec: GridSpec,
    p: ModelParameters = DEFAULT_PARAMS,
    dt: float = 0.02,
    isi_threshold: float = DEFAULT_ISI_THRESHOLD_MS,
    workers: int = 1,
) -> GridMap:
    """One trial per grid cell; returns mean spikes per complete burst.

    Cell seeds come from derive_trial_seed(base_seed, v_index, h_index); the
    map is fully deterministic (and independent of D only when D = 0).
    Cells that never produce a complete burst are marked nan rather than
    failing the sweep.
    """
    v0s = spec.v0_values()
    h0s = spec.h0_values()
    jobs = []
    for i_v, v0 in enumerate(v0s):
        for i_h, h0 in enumerate(h0s):
            seed = derive_trial_seed(spec.base_seed, i_v, i_h)
            jobs.append(
                lambda v0=float(v0), h0=float(h0), seed=seed: _grid_cell(
                    v0, h0, spec, dt, isi_threshold, p, seed
                )
            )
    results = _map_ordered(jobs, workers)
    matrix = np.array(results, dtype=np.float64).reshape(len(v0s), len(h0s))
    return GridMap(
        v0_values=v0s,
        h0_values=h0s,
        mean_spikes=matrix,
        D=spec.D,
        duration=spec.duration,
        base_seed=spec.base_seed,
    )
