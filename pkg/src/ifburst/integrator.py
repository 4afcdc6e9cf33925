"""Fixed-step Euler-Maruyama integration of the stochastic IFB model.

The integrator advances (v, h) on a uniform grid t_n = n*dt:

    v_{n+1} = v_n + dt * drift_v(t_n, v_n, h_n) + (D/C) * sqrt(dt) * z_n
    h_{n+1} = clamp(h_n + dt * drift_h(v_n, h_n), 0, 1)

followed by the threshold/reset rule: if the candidate v_{n+1} reaches
v_theta, a spike is stamped at t_{n+1} and v_{n+1} becomes v_reset.  Spike
times therefore always lie on the dt grid.

Two engines produce bitwise-identical results: a numba-compiled scalar
kernel (default, used for all production runs) and a plain-Python loop kept
as an independently readable reference.  Both consume the same pre-generated
noise array, use the same floating-point expression order, and are compiled
without fastmath, so trajectories and spike steps agree exactly.

Randomness: Gaussian increments come from numpy's PCG64 generator seeded
with a 64-bit token; the seed-to-sequence mapping is platform-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit

from .model import (
    DEFAULT_PARAMS,
    ModelParameters,
    NeuronState,
    drift_h,
    drift_v,
    forcing_omega,
)

__all__ = [
    "SimulationSettings",
    "Trajectory",
    "SpikeTrain",
    "SimResult",
    "ENGINES",
    "step_count",
    "noise_amplitude",
    "gaussian_stream",
    "draw_gaussian",
    "em_step",
    "simulate",
]

ENGINES = ("numba", "python")


@dataclass(frozen=True)
class SimulationSettings:
    """Integration controls for one trial."""

    duration: float            # total simulated time (ms)
    dt: float = 0.02           # step size (ms)
    D: float = 0.0             # noise intensity (current units)
    seed: int = 0              # 64-bit reproducibility token
    record_trajectory: bool = False
    record_stride: int = 10    # steps between stored trajectory samples

    def __post_init__(self) -> None:
        if not (self.dt > 0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive and finite, got {self.dt}")
        if not (self.duration > 0 and math.isfinite(self.duration)):
            raise ValueError(f"duration must be positive and finite, got {self.duration}")
        if not (self.D >= 0 and math.isfinite(self.D)):
            raise ValueError(f"noise intensity D must be >= 0 and finite, got {self.D}")
        if self.record_stride < 1:
            raise ValueError(f"record_stride must be >= 1, got {self.record_stride}")
        if not (0 <= int(self.seed) < 2**64):
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")


@dataclass(frozen=True)
class Trajectory:
    """Strided (t, v, h) samples of one trial; post-reset states are stored."""

    times: np.ndarray      # sample times (ms), strictly increasing
    v_samples: np.ndarray  # membrane potential (mV)
    h_samples: np.ndarray  # gate values, each in [0, 1]


@dataclass(frozen=True)
class SpikeTrain:
    """Ordered spike times of one trial plus the metadata that produced it."""

    spike_times: np.ndarray  # ms, strictly increasing, multiples of dt
    seed: int
    D: float
    v0: float
    h0: float
    duration: float


@dataclass(frozen=True)
class SimResult:
    spike_train: SpikeTrain
    trajectory: Optional[Trajectory]
    final_state: NeuronState


def step_count(duration: float, dt: float) -> int:
    """Number of Euler steps covering `duration`: ceil(duration/dt).

    A small epsilon guards against binary round-off in the quotient when the
    division is exact in real arithmetic (e.g. 0.1/0.02).
    """
    return int(math.ceil(duration / dt - 1e-9))


def noise_amplitude(D: float, C: float, dt: float) -> float:
    """Per-step noise scale (D/C) * sqrt(dt) multiplying a unit Gaussian."""
    return (D / C) * math.sqrt(dt)


def gaussian_stream(seed: int) -> np.random.Generator:
    """Independent Gaussian source for a 64-bit seed (PCG64).

    The mapping seed -> sample sequence is fixed across platforms.
    """
    return np.random.default_rng(int(seed))


def draw_gaussian(stream: np.random.Generator, size: Optional[int] = None):
    """i.i.d. standard normal samples from `stream`."""
    return stream.standard_normal(size)


def em_step(
    s: NeuronState,
    t: float,
    settings: SimulationSettings,
    p: ModelParameters = DEFAULT_PARAMS,
    z: float = 0.0,
) -> NeuronState:
    """One Euler-Maruyama update of (v, h) at time t, including the reset.

    `z` is a standard normal draw; with D = 0 the step reduces to the
    deterministic forward-Euler update exactly.
    """
    dv = drift_v(t, s, p)
    dh = drift_h(s, p)
    if settings.D > 0:
        amp = noise_amplitude(settings.D, p.C, settings.dt)
        v_new = s.v + settings.dt * dv + amp * z
    else:
        v_new = s.v + settings.dt * dv
    h_new = s.h + settings.dt * dh
    if h_new < 0.0:
        h_new = 0.0
    elif h_new > 1.0:
        h_new = 1.0
    if v_new >= p.v_theta:
        v_new = p.v_reset
    return NeuronState(v_new, h_new)


@njit(cache=True, nogil=True)
def _em_kernel(
    v0,
    h0,
    n_steps,
    dt,
    omega,
    C,
    v_h,
    v_theta,
    v_reset,
    v_L,
    v_T,
    g_L,
    g_T,
    I0,
    I1,
    tau_plus,
    tau_minus,
    corrected,
    noise,
    stride,
    record,
    traj_v,
    traj_h,
    spike_steps,
):
    v = v0
    h = h0
    n_spikes = 0
    n_rec = 0
    if record:
        traj_v[0] = v
        traj_h[0] = h
        n_rec = 1
    has_noise = noise.shape[0] > 0
    for n in range(n_steps):
        t = n * dt
        i_l = g_L * (v - v_L)
        if v > v_h:
            i_t = g_T * h * (v - v_T)
        else:
            i_t = 0.0
        dv = (I0 + I1 * math.cos(omega * t) - i_l - i_t) / C
        if corrected:
            if v <= v_h:
                dh = (1.0 - h) / tau_plus
            else:
                dh = -h / tau_minus
        else:
            if v <= v_h:
                dh = -h / tau_minus
            else:
                dh = (1.0 - h) / tau_plus
        if has_noise:
            v_new = v + dt * dv + noise[n]
        else:
            v_new = v + dt * dv
        h_new = h + dt * dh
        if h_new < 0.0:
            h_new = 0.0
        elif h_new > 1.0:
            h_new = 1.0
        if v_new >= v_theta:
            spike_steps[n_spikes] = n + 1
            n_spikes += 1
            v_new = v_reset
        v = v_new
        h = h_new
        if record and (n + 1) % stride == 0:
            traj_v[n_rec] = v
            traj_h[n_rec] = h
            n_rec += 1
    return n_spikes, n_rec, v, h


def _run_python(
    v0: float,
    h0: float,
    n_steps: int,
    settings: SimulationSettings,
    p: ModelParameters,
    noise: np.ndarray,
    traj_v: Optional[np.ndarray],
    traj_h: Optional[np.ndarray],
    spike_steps: np.ndarray,
):
    """Reference loop; mirrors the kernel's arithmetic expression for expression."""
    dt = settings.dt
    stride = settings.record_stride
    record = traj_v is not None
    state = NeuronState(v0, h0)
    n_spikes = 0
    n_rec = 0
    if record:
        traj_v[0] = state.v
        traj_h[0] = state.h
        n_rec = 1
    has_noise = noise.shape[0] > 0
    for n in range(n_steps):
        t = n * dt
        dv = drift_v(t, state, p)
        dh = drift_h(state, p)
        if has_noise:
            v_new = state.v + dt * dv + noise[n]
        else:
            v_new = state.v + dt * dv
        h_new = state.h + dt * dh
        if h_new < 0.0:
            h_new = 0.0
        elif h_new > 1.0:
            h_new = 1.0
        if v_new >= p.v_theta:
            spike_steps[n_spikes] = n + 1
            n_spikes += 1
            v_new = p.v_reset
        state = NeuronState(v_new, h_new)
        if record and (n + 1) % stride == 0:
            traj_v[n_rec] = state.v
            traj_h[n_rec] = state.h
            n_rec += 1
    return n_spikes, n_rec, state.v, state.h


def simulate(
    v0: float,
    h0: float,
    settings: SimulationSettings,
    p: ModelParameters = DEFAULT_PARAMS,
    engine: str = "numba",
) -> SimResult:
    """Run one trial from (v0, h0) at t = 0 and collect spikes.

    Returns the spike train and, when `settings.record_trajectory` is set,
    the strided trajectory (initial state included, post-reset values
    stored).  Spike detection always runs at full step resolution.  Output
    is a pure function of (v0, h0, settings, p) - identical seeds give
    bitwise-identical results on either engine.
    """
    if not (math.isfinite(v0) and math.isfinite(h0)):
        raise ValueError(f"initial condition must be finite, got ({v0}, {h0})")
    if not (0.0 <= h0 <= 1.0):
        raise ValueError(f"h0 must lie in [0, 1], got {h0}")
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}, got {engine!r}")

    n_steps = step_count(settings.duration, settings.dt)
    if settings.D > 0:
        amp = noise_amplitude(settings.D, p.C, settings.dt)
        z = gaussian_stream(settings.seed).standard_normal(n_steps)
        noise = amp * z
    else:
        noise = np.empty(0, dtype=np.float64)

    if settings.record_trajectory:
        n_rec_max = n_steps // settings.record_stride + 1
        traj_v = np.empty(n_rec_max, dtype=np.float64)
        traj_h = np.empty(n_rec_max, dtype=np.float64)
    else:
        traj_v = None
        traj_h = None
    spike_steps = np.empty(n_steps + 1, dtype=np.int64)

    if engine == "numba":
        kernel_traj_v = traj_v if traj_v is not None else np.empty(1, dtype=np.float64)
        kernel_traj_h = traj_h if traj_h is not None else np.empty(1, dtype=np.float64)
        n_spikes, n_rec, v_end, h_end = _em_kernel(
            float(v0),
            float(h0),
            n_steps,
            settings.dt,
            forcing_omega(p),
            p.C,
            p.v_h,
            p.v_theta,
            p.v_reset,
            p.v_L,
            p.v_T,
            p.g_L,
            p.g_T,
            p.I0,
            p.I1,
            p.tau_h_plus,
            p.tau_h_minus,
            p.h_equation == "corrected",
            noise,
            settings.record_stride,
            settings.record_trajectory,
            kernel_traj_v,
            kernel_traj_h,
            spike_steps,
        )
    else:
        n_spikes, n_rec, v_end, h_end = _run_python(
            float(v0), float(h0), n_steps, settings, p, noise, traj_v, traj_h, spike_steps
        )

    spike_times = spike_steps[:n_spikes].astype(np.float64) * settings.dt
    train = SpikeTrain(
        spike_times=spike_times,
        seed=int(settings.seed),
        D=settings.D,
        v0=float(v0),
        h0=float(h0),
        duration=settings.duration,
    )
    trajectory = None
    if settings.record_trajectory:
        sample_steps = np.arange(0, n_steps + 1, settings.record_stride, dtype=np.int64)
        trajectory = Trajectory(
            times=sample_steps.astype(np.float64) * settings.dt,
            v_samples=traj_v[:n_rec].copy(),
            h_samples=traj_h[:n_rec].copy(),
        )
    return SimResult(
        spike_train=train,
        trajectory=trajectory,
        final_state=NeuronState(float(v_end), float(h_end)),
    )
