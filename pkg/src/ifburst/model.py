"""Pure evaluation of the integrate-and-fire-or-burst (IFB) vector field.

The model tracks a membrane potential ``v`` (mV) and a calcium-inactivation
gate ``h`` (dimensionless, confined to [0, 1]).  A low-threshold calcium
current switches on through a Heaviside gate when ``v`` rises past ``v_h``,
and a hard threshold/reset rule at ``v_theta`` produces spikes.  A sinusoidal
current drives the cell; additive white noise is handled by the integrator.

Everything here is a pure function of its arguments: no integration, no
randomness, no mutable state.  Time is in milliseconds throughout; the
forcing frequency ``f`` is specified in Hz and converted internally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

__all__ = [
    "H_EQUATION_CHOICES",
    "ModelParameters",
    "NeuronState",
    "DEFAULT_PARAMS",
    "leak_current",
    "t_current",
    "drift_v",
    "drift_h",
    "apply_threshold_reset",
    "forcing_omega",
]

# Gate-equation variants: "corrected" recovers the gate toward 1 while the
# cell is hyperpolarized (v below v_h) and decays it during depolarization;
# "as_printed" swaps the two branches and is provided for comparison runs.
H_EQUATION_CHOICES = ("corrected", "as_printed")


@dataclass(frozen=True)
class ModelParameters:
    """IFB model constants plus the gate-equation selector.

    Defaults are the reference parameter set used throughout the test
    suite: a 2 uF membrane driven at 5 Hz with a T-type calcium current
    that deinactivates below -60 mV.
    """

    C: float = 2.0            # membrane capacitance (uF)
    v_h: float = -60.0        # calcium-gate switching potential (mV)
    v_theta: float = -35.0    # spike threshold (mV)
    v_reset: float = -50.0    # post-spike reset potential (mV)
    v_L: float = -65.0        # leak reversal potential (mV)
    v_T: float = 120.0        # calcium reversal potential (mV)
    g_L: float = 0.035        # leak conductance (mS)
    g_T: float = 0.07         # calcium conductance (mS)
    f: float = 5.0            # forcing frequency (Hz)
    I0: float = -0.05         # constant drive (uA)
    I1: float = 1.6           # forcing amplitude (uA)
    tau_h_plus: float = 200.0   # gate recovery time constant (ms)
    tau_h_minus: float = 20.0   # gate decay time constant (ms)
    h_equation: str = "corrected"

    def __post_init__(self) -> None:
        if not (self.C > 0):
            raise ValueError(f"C must be positive, got {self.C}")
        if self.g_L < 0 or self.g_T < 0:
            raise ValueError("conductances g_L and g_T must be non-negative")
        if not (self.tau_h_plus > 0 and self.tau_h_minus > 0):
            raise ValueError("gate time constants must be positive")
        if not (self.v_reset < self.v_theta):
            raise ValueError(
                f"v_reset ({self.v_reset}) must lie below v_theta ({self.v_theta})"
            )
        if self.h_equation not in H_EQUATION_CHOICES:
            raise ValueError(
                f"h_equation must be one of {H_EQUATION_CHOICES}, got {self.h_equation!r}"
            )
        for fld in fields(self):
            value = getattr(self, fld.name)
            if fld.name != "h_equation" and not math.isfinite(value):
                raise ValueError(f"parameter {fld.name} must be finite, got {value}")


@dataclass(frozen=True)
class NeuronState:
    """Instantaneous (v, h) pair advanced by the integrator."""

    v: float  # membrane potential (mV)
    h: float  # calcium inactivation gate, in [0, 1]


DEFAULT_PARAMS = ModelParameters()


def forcing_omega(p: ModelParameters) -> float:
    """Angular frequency of the drive in rad/ms (f is given in Hz)."""
    return 2.0 * math.pi * (p.f / 1000.0)


def leak_current(v: float, p: ModelParameters) -> float:
    """Leakage current g_L * (v - v_L), in uA."""
    return p.g_L * (v - p.v_L)


def t_current(v: float, h: float, p: ModelParameters) -> float:
    """T-type calcium current g_T * H(v - v_h) * h * (v - v_T), in uA.

    The Heaviside gate uses the convention H(0) = 0, so the current is zero
    at v = v_h exactly.  Because v_T sits far above the spike threshold, the
    current is depolarizing (negative) whenever the gate is open.
    """
    if v > p.v_h:
        return p.g_T * h * (v - p.v_T)
    return 0.0


def drift_v(t: float, s: NeuronState, p: ModelParameters) -> float:
    """Deterministic dv/dt in mV/ms at time t (ms)."""
    omega = 2.0 * math.pi * (p.f / 1000.0)
    i_l = leak_current(s.v, p)
    i_t = t_current(s.v, s.h, p)
    return (p.I0 + p.I1 * math.cos(omega * t) - i_l - i_t) / p.C


def drift_h(s: NeuronState, p: ModelParameters) -> float:
    """dh/dt in 1/ms under the configured gate-equation variant.

    corrected:  recovery (1 - h)/tau_h_plus while v <= v_h, decay
                -h/tau_h_minus above.
    as_printed: the swapped form, -h/tau_h_minus while v <= v_h and
                (1 - h)/tau_h_plus above.

    Both variants apply their sub-threshold branch at v = v_h exactly,
    matching the Heaviside convention of :func:`t_current`.
    """
    if p.h_equation == "corrected":
        if s.v <= p.v_h:
            return (1.0 - s.h) / p.tau_h_plus
        return -s.h / p.tau_h_minus
    if s.v <= p.v_h:
        return -s.h / p.tau_h_minus
    return (1.0 - s.h) / p.tau_h_plus


def apply_threshold_reset(s: NeuronState, p: ModelParameters) -> tuple[NeuronState, bool]:
    """Apply the spike rule: v >= v_theta resets v to v_reset (h unchanged).

    Returns the (possibly unchanged) state and whether a spike occurred.
    Idempotent because v_reset < v_theta.
    """
    if s.v >= p.v_theta:
        return NeuronState(p.v_reset, s.h), True
    return s, False
