"""Spike-train analytics: bursts, mode labels, ISI histograms, extrema.

A burst is a run of spikes whose consecutive inter-spike intervals (ISIs)
all stay within a separation threshold (default 80 ms); a longer gap opens a
new burst.  Bursts are labeled by spike count: modes 1, 2, 3, and 4 (where
4 stands for "4 or more").  Trial-level statistics - the rate of switches
between modes, per-mode occurrence fractions, normalized ISI histograms, and
per-cycle (h_max, v_min) extrema - are derived from the segmented train.

Observation windows truncate: the first burst after a transient cutoff and
the final burst of a trial are dropped from mode statistics when their edge
spike sits within one ISI threshold of the window boundary, because spikes
outside the window could then have belonged to them.  Bursts that provably
start and end inside the window are "complete" and carry the statistics.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .integrator import SpikeTrain, Trajectory
from .model import DEFAULT_PARAMS, ModelParameters

__all__ = [
    "DEFAULT_ISI_THRESHOLD_MS",
    "DEFAULT_BINWIDTH_MS",
    "DEFAULT_TRANSIENT_MS",
    "EXTREMA_TRANSIENT_MS",
    "TROUGH_WINDOW_MS",
    "NOISE_REGIMES",
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
]

DEFAULT_ISI_THRESHOLD_MS = 80.0
DEFAULT_BINWIDTH_MS = 1.0
DEFAULT_TRANSIENT_MS = 100.0
# Steady-state extrema are read after two full forcing periods have elapsed.
EXTREMA_TRANSIENT_MS = 400.0
TROUGH_WINDOW_MS = (30.0, 150.0)

NOISE_REGIMES = ("deterministic", "weak", "intermediate", "strong", "extra-strong")


@dataclass(frozen=True)
class Burst:
    """One burst: a nonempty run of spike times with intra-burst gaps only."""

    spike_times: np.ndarray

    @property
    def mode(self) -> int:
        return classify_mode(self)


@dataclass(frozen=True)
class BurstSequence:
    """All bursts of one observation window, with boundary-truncation flags."""

    bursts: tuple[Burst, ...]
    trial_duration: float  # length of the observation window (ms)
    first_truncated: bool
    last_truncated: bool

    @property
    def complete_bursts(self) -> tuple[Burst, ...]:
        """Bursts whose spike counts are trustworthy (not window-clipped)."""
        lo = 1 if self.first_truncated else 0
        hi = len(self.bursts) - 1 if self.last_truncated else len(self.bursts)
        if lo >= hi:
            return ()
        return self.bursts[lo:hi]


@dataclass(frozen=True)
class IsiHistogram:
    """Normalized ISI histogram: fraction of all ISIs per fixed-width bin."""

    binwidth: float
    bin_fractions: np.ndarray  # dense, indexed by bin = floor(isi/binwidth)
    total_isi_count: int


@dataclass(frozen=True)
class TrialStatistics:
    transition_rate: float              # mode switches per second
    occurrence: dict[int, float]        # mode -> fraction of complete bursts
    mean_spikes_per_burst: float        # nan when no complete bursts
    isih: IsiHistogram
    cycle_extrema: list[tuple[float, float]]  # (h_max, v_min) per cycle


def _spike_array(spikes: Union[SpikeTrain, np.ndarray, Sequence[float]]) -> np.ndarray:
    if isinstance(spikes, SpikeTrain):
        times = spikes.spike_times
    else:
        times = np.asarray(spikes, dtype=np.float64)
    if times.size > 1 and np.any(np.diff(times) <= 0):
        raise ValueError("spike times must be strictly increasing")
    return times


def segment_bursts(
    spikes: Union[SpikeTrain, np.ndarray, Sequence[float]],
    isi_threshold: float = DEFAULT_ISI_THRESHOLD_MS,
    window_start: Optional[float] = None,
    window_end: Optional[float] = None,
) -> BurstSequence:
    """Group spikes into bursts: a gap > isi_threshold starts a new burst.

    Every spike belongs to exactly one burst.  All given spikes are assumed
    to lie inside the observation window [window_start, window_end], which
    defaults to [0, trial duration] for a SpikeTrain and to [0, last spike]
    for a bare array.  A burst is flagged as possibly truncated when its
    edge spike sits within isi_threshold of the window boundary (except at
    window_start = 0, where the trial genuinely began and nothing precedes
    the first burst).
    """
    if isi_threshold <= 0:
        raise ValueError(f"isi_threshold must be positive, got {isi_threshold}")
    times = _spike_array(spikes)
    if window_start is None:
        window_start = 0.0
    if window_end is None:
        if isinstance(spikes, SpikeTrain):
            window_end = float(spikes.duration)
        else:
            window_end = float(times[-1]) if times.size else window_start
    duration = float(window_end) - float(window_start)

    if times.size == 0:
        return BurstSequence((), duration, False, False)

    breaks = np.nonzero(np.diff(times) > isi_threshold)[0]
    groups = np.split(times, breaks + 1)
    bursts = tuple(Burst(np.array(g)) for g in groups)
    first_truncated = window_start > 0 and (times[0] - window_start) <= isi_threshold
    last_truncated = (window_end - times[-1]) <= isi_threshold
    return BurstSequence(bursts, duration, bool(first_truncated), bool(last_truncated))


def classify_mode(b: Burst) -> int:
    """Mode label by spike count: 1, 2, 3, or 4 for any count >= 4."""
    n = len(b.spike_times)
    if n < 1:
        raise ValueError("burst must contain at least one spike")
    return min(n, 4)


def transition_rate(seq: BurstSequence) -> float:
    """Mode switches between adjacent complete bursts, per second of window."""
    if not (seq.trial_duration > 0):
        raise ValueError(f"trial_duration must be positive, got {seq.trial_duration}")
    modes = [classify_mode(b) for b in seq.complete_bursts]
    if len(modes) < 2:
        return 0.0
    switches = sum(1 for a, b in zip(modes[:-1], modes[1:]) if a != b)
    return switches / (seq.trial_duration / 1000.0)


def occurrence_percentages(seq: BurstSequence) -> dict[int, float]:
    """Fraction of complete bursts per mode; empty when no complete bursts."""
    complete = seq.complete_bursts
    if not complete:
        return {}
    counts: dict[int, int] = {}
    for b in complete:
        m = classify_mode(b)
        counts[m] = counts.get(m, 0) + 1
    total = len(complete)
    return {m: counts[m] / total for m in sorted(counts)}


def mean_spikes_per_burst(seq: BurstSequence) -> float:
    """Average spike count of complete bursts; nan when none exist."""
    complete = seq.complete_bursts
    if not complete:
        return math.nan
    return float(np.mean([len(b.spike_times) for b in complete]))


def histogram_from_isis(
    isis: Union[np.ndarray, Sequence[float]],
    binwidth: float = DEFAULT_BINWIDTH_MS,
) -> IsiHistogram:
    """Normalized histogram of the given ISIs; bin = floor(isi/binwidth)."""
    if binwidth <= 0:
        raise ValueError(f"binwidth must be positive, got {binwidth}")
    isis = np.asarray(isis, dtype=np.float64)
    if isis.size == 0:
        return IsiHistogram(binwidth, np.empty(0, dtype=np.float64), 0)
    if np.any(isis <= 0):
        raise ValueError("ISIs must be positive")
    bins = np.floor(isis / binwidth).astype(np.int64)
    counts = np.bincount(bins)
    return IsiHistogram(binwidth, counts / isis.size, int(isis.size))


def isi_histogram(
    spikes: Union[SpikeTrain, np.ndarray, Sequence[float]],
    binwidth: float = DEFAULT_BINWIDTH_MS,
) -> IsiHistogram:
    """ISI histogram of one spike train; empty histogram below 2 spikes."""
    times = _spike_array(spikes)
    if times.size < 2:
        return IsiHistogram(binwidth, np.empty(0, dtype=np.float64), 0)
    return histogram_from_isis(np.diff(times), binwidth)


def find_isih_trough(
    h: IsiHistogram,
    search_window: tuple[float, float] = TROUGH_WINDOW_MS,
) -> tuple[float, float]:
    """Locate the lowest-fraction bin between the two ISIH peaks.

    Searches bins whose start time lies in [search_window[0],
    search_window[1]] and returns (bin start in ms, fraction), taking the
    earliest bin on ties.  A positive trough fraction means the intra- and
    inter-burst peaks have merged into a connected distribution.  Raises
    when the histogram is empty or the window lies entirely beyond its
    support.
    """
    if h.total_isi_count == 0 or h.bin_fractions.size == 0:
        raise ValueError("cannot search an empty histogram")
    lo, hi = search_window
    if not (0 <= lo <= hi):
        raise ValueError(f"invalid search window {search_window}")
    lo_bin = int(math.floor(lo / h.binwidth))
    hi_bin = int(math.floor(hi / h.binwidth))
    if lo_bin >= h.bin_fractions.size:
        raise ValueError(
            f"search window {search_window} lies outside histogram support "
            f"(max ISI bin {h.bin_fractions.size - 1})"
        )
    hi_bin = min(hi_bin, h.bin_fractions.size - 1)
    segment = h.bin_fractions[lo_bin : hi_bin + 1]
    offset = int(np.argmin(segment))  # argmin returns the earliest minimum
    return ((lo_bin + offset) * h.binwidth, float(segment[offset]))


def per_cycle_extrema(
    traj: Trajectory,
    p: ModelParameters = DEFAULT_PARAMS,
) -> list[tuple[float, float]]:
    """(h at the closing upward v_h-crossing, minimum v) for each full cycle.

    Upward crossings of v through v_h delimit burst cycles: the gate h
    recovers while the cell is hyperpolarized and peaks exactly when v
    climbs back through v_h.  For crossings c_0 < c_1 < ... the i-th cycle
    spans (c_i, c_{i+1}] and reports h at c_{i+1} together with the deepest
    v inside the cycle.  Fewer than two crossings yield an empty list.
    """
    v = np.asarray(traj.v_samples, dtype=np.float64)
    h = np.asarray(traj.h_samples, dtype=np.float64)
    if v.size < 2:
        return []
    above = v >= p.v_h
    crossings = np.nonzero(~above[:-1] & above[1:])[0] + 1
    if crossings.size < 2:
        return []
    out: list[tuple[float, float]] = []
    for a, b in zip(crossings[:-1], crossings[1:]):
        v_min = float(np.min(v[a + 1 : b + 1]))
        out.append((float(h[b]), v_min))
    return out


def classify_noise_regime(D: float) -> str:
    """Regime label for a noise intensity (left-inclusive boundaries)."""
    if D < 0 or not math.isfinite(D):
        raise ValueError(f"noise intensity must be finite and >= 0, got {D}")
    if D == 0:
        return "deterministic"
    if D <= 0.14:
        return "weak"
    if D <= 1.2:
        return "intermediate"
    if D <= 5:
        return "strong"
    return "extra-strong"


def remove_transient(obj, cutoff: float = DEFAULT_TRANSIENT_MS):
    """Drop all events/samples before `cutoff` (ms); type is preserved."""
    if cutoff < 0:
        raise ValueError(f"cutoff must be >= 0, got {cutoff}")
    if isinstance(obj, SpikeTrain):
        return dataclasses.replace(obj, spike_times=obj.spike_times[obj.spike_times >= cutoff])
    if isinstance(obj, Trajectory):
        keep = obj.times >= cutoff
        return Trajectory(obj.times[keep], obj.v_samples[keep], obj.h_samples[keep])
    arr = np.asarray(obj, dtype=np.float64)
    return arr[arr >= cutoff]


def analyze_trial(
    train: SpikeTrain,
    traj: Optional[Trajectory] = None,
    p: ModelParameters = DEFAULT_PARAMS,
    isi_threshold: float = DEFAULT_ISI_THRESHOLD_MS,
    binwidth: float = DEFAULT_BINWIDTH_MS,
    transient: float = DEFAULT_TRANSIENT_MS,
) -> TrialStatistics:
    """Full post-transient statistics pipeline for one trial.

    Spikes before `transient` are discarded; bursts are segmented on the
    window [transient, duration]; the ISIH uses all post-transient ISIs.
    Cycle extrema are computed when a trajectory is supplied, after the
    longer steady-state cutoff EXTREMA_TRANSIENT_MS.
    """
    kept = remove_transient(train, transient)
    seq = segment_bursts(
        kept,
        isi_threshold=isi_threshold,
        window_start=transient,
        window_end=float(train.duration),
    )
    extrema: list[tuple[float, float]] = []
    if traj is not None:
        extrema = per_cycle_extrema(remove_transient(traj, EXTREMA_TRANSIENT_MS), p)
    return TrialStatistics(
        transition_rate=transition_rate(seq),
        occurrence=occurrence_percentages(seq),
        mean_spikes_per_burst=mean_spikes_per_burst(seq),
        isih=isi_histogram(kept, binwidth),
        cycle_extrema=extrema,
    )
