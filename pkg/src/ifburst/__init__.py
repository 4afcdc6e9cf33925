"""ifburst: stochastic integrate-and-fire-or-burst simulation and analysis.

A small toolkit for a two-variable bursting neuron model driven by a
sinusoidal current and additive white noise: a fast fixed-step
Euler-Maruyama integrator, burst/ISI analytics (mode labels, transition
rates, occurrence fractions, ISI histograms, per-cycle extrema), and a
seeded Monte-Carlo harness for noise sweeps and initial-condition grids,
all exposed through the `ifburst` command-line tool.
"""

from ._version import __version__
from .analysis import (
    Burst,
    BurstSequence,
    IsiHistogram,
    TrialStatistics,
    analyze_trial,
    classify_mode,
    classify_noise_regime,
    find_isih_trough,
    histogram_from_isis,
    isi_histogram,
    mean_spikes_per_burst,
    occurrence_percentages,
    per_cycle_extrema,
    remove_transient,
    segment_bursts,
    transition_rate,
)
from .config import ConfigError, RunConfig, load_config_file
from .experiments import (
    DEFAULT_NOISE_LADDER,
    AggregateCurve,
    EnsembleSpec,
    GridMap,
    GridSpec,
    derive_trial_seed,
    run_ensemble,
    run_grid,
)
from .integrator import (
    SimResult,
    SimulationSettings,
    SpikeTrain,
    Trajectory,
    draw_gaussian,
    em_step,
    gaussian_stream,
    simulate,
)
from .model import (
    DEFAULT_PARAMS,
    ModelParameters,
    NeuronState,
    apply_threshold_reset,
    drift_h,
    drift_v,
    leak_current,
    t_current,
)

__all__ = [
    "__version__",
    # model
    "ModelParameters",
    "NeuronState",
    "DEFAULT_PARAMS",
    "leak_current",
    "t_current",
    "drift_v",
    "drift_h",
    "apply_threshold_reset",
    # integrator
    "SimulationSettings",
    "SpikeTrain",
    "Trajectory",
    "SimResult",
    "simulate",
    "em_step",
    "gaussian_stream",
    "draw_gaussian",
    # analysis
    "Burst",
    "BurstSequence",
    "IsiHistogram",
    "TrialStatistics",
    "segment_bursts",
    "classify_mode",
    "transition_rate",
    "occurrence_percentages",
    "mean_spikes_per_burst",
    "isi_histogram",
    "histogram_from_isis",
    "find_isih_trough",
    "per_cycle_extrema",
    "classify_noise_regime",
    "remove_transient",
    "analyze_trial",
    # experiments
    "EnsembleSpec",
    "GridSpec",
    "AggregateCurve",
    "GridMap",
    "run_ensemble",
    "run_grid",
    "derive_trial_seed",
    "DEFAULT_NOISE_LADDER",
    # config / io
    "ConfigError",
    "RunConfig",
    "load_config_file",
]
