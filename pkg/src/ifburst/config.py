"""Run configuration: defaults, JSON config files, and strict validation.

A RunConfig carries every knob the CLI exposes - model constants, one-trial
simulation settings, analysis settings, and the ensemble/grid experiment
shapes - in one flat object with a canonical nested-dict form used by config
files and run manifests.  Parsing is strict: unknown sections or keys are
rejected so that a typo cannot silently fall back to a default.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Union

from .experiments import DEFAULT_NOISE_LADDER
from .model import DEFAULT_PARAMS, ModelParameters

__all__ = ["ConfigError", "RunConfig", "load_config_file"]


class ConfigError(ValueError):
    """Invalid configuration (bad key, bad value, unreadable file)."""


_MODEL_KEYS = tuple(f.name for f in dataclasses.fields(ModelParameters))
_SECTIONS = ("model", "simulation", "analysis", "ensemble", "grid", "output")


@dataclass(frozen=True)
class RunConfig:
    """Effective settings of one CLI invocation (defaults pre-filled)."""

    params: ModelParameters = DEFAULT_PARAMS
    # single-trial simulation (simulate / isih)
    dt: float = 0.02
    duration: float = 3000.0
    noise: float = 0.0
    seed: int = 0
    v0: float = -45.0
    h0: float = 0.045
    record_trajectory: bool = False
    record_stride: int = 10
    # analysis
    isi_threshold: float = 80.0
    binwidth: float = 1.0
    transient: float = 100.0
    # ensemble sweeps (sweep-noise)
    trials: int = 300
    trial_duration: float = 30000.0
    noise_values: tuple[float, ...] = DEFAULT_NOISE_LADDER
    # grid sweeps (sweep-grid)
    grid_v0_range: tuple[float, float] = (-90.0, -35.0)
    grid_h0_range: tuple[float, float] = (0.0, 1.0)
    grid_v0_resolution: float = 0.5
    grid_h0_resolution: float = 0.01
    grid_noise: float = 0.0
    grid_duration: float = 40000.0
    # output
    out_dir: str = "."

    def validate(self) -> "RunConfig":
        """Raise ConfigError on any out-of-range value; return self."""
        checks = [
            (self.dt > 0, f"dt must be positive, got {self.dt}"),
            (self.duration > 0, f"duration must be positive, got {self.duration}"),
            (self.noise >= 0, f"noise intensity must be >= 0, got {self.noise}"),
            (0 <= self.h0 <= 1, f"h0 must lie in [0, 1], got {self.h0}"),
            (0 <= int(self.seed) < 2**64, f"seed must fit in 64 unsigned bits, got {self.seed}"),
            (self.record_stride >= 1, f"record_stride must be >= 1, got {self.record_stride}"),
            (self.isi_threshold > 0, f"isi_threshold must be positive, got {self.isi_threshold}"),
            (self.binwidth > 0, f"binwidth must be positive, got {self.binwidth}"),
            (self.transient >= 0, f"transient must be >= 0, got {self.transient}"),
            (self.trials >= 1, f"trials must be >= 1, got {self.trials}"),
            (
                self.trial_duration > self.transient,
                f"trial_duration ({self.trial_duration}) must exceed transient ({self.transient})",
            ),
            (
                all(d >= 0 for d in self.noise_values) and len(self.noise_values) > 0,
                f"noise_values must be non-empty and >= 0, got {self.noise_values}",
            ),
            (
                self.grid_v0_resolution > 0 and self.grid_h0_resolution > 0,
                "grid resolutions must be positive",
            ),
            (self.grid_noise >= 0, f"grid noise must be >= 0, got {self.grid_noise}"),
            (
                self.grid_duration > self.transient,
                f"grid duration ({self.grid_duration}) must exceed transient ({self.transient})",
            ),
            (
                self.grid_v0_range[1] >= self.grid_v0_range[0]
                and self.grid_h0_range[1] >= self.grid_h0_range[0],
                "grid ranges must be non-decreasing",
            ),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        return self

    def to_dict(self) -> dict[str, Any]:
        """Canonical nested form used by config files and manifests."""
        return {
            "model": {k: getattr(self.params, k) for k in _MODEL_KEYS},
            "simulation": {
                "dt": self.dt,
                "duration": self.duration,
                "noise": self.noise,
                "seed": self.seed,
                "v0": self.v0,
                "h0": self.h0,
                "record_trajectory": self.record_trajectory,
                "record_stride": self.record_stride,
            },
            "analysis": {
                "isi_threshold": self.isi_threshold,
                "binwidth": self.binwidth,
                "transient": self.transient,
            },
            "ensemble": {
                "trials": self.trials,
                "trial_duration": self.trial_duration,
                "noise_values": list(self.noise_values),
            },
            "grid": {
                "v0_range": list(self.grid_v0_range),
                "h0_range": list(self.grid_h0_range),
                "v0_resolution": self.grid_v0_resolution,
                "h0_resolution": self.grid_h0_resolution,
                "noise": self.grid_noise,
                "duration": self.grid_duration,
            },
            "output": {"directory": self.out_dir},
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        """Build from the nested form; unknown sections/keys are rejected."""
        if not isinstance(data, dict):
            raise ConfigError(f"config root must be an object, got {type(data).__name__}")
        unknown = set(data) - set(_SECTIONS)
        if unknown:
            raise ConfigError(f"unknown config section(s): {sorted(unknown)}")

        def section(name: str) -> dict[str, Any]:
            value = data.get(name, {})
            if not isinstance(value, dict):
                raise ConfigError(f"config section {name!r} must be an object")
            return value

        def pick(sec: dict[str, Any], name: str, allowed: tuple[str, ...]) -> dict[str, Any]:
            unknown = set(sec) - set(allowed)
            if unknown:
                raise ConfigError(f"unknown key(s) in section {name!r}: {sorted(unknown)}")
            return sec

        model = pick(section("model"), "model", _MODEL_KEYS)
        sim = pick(
            section("simulation"),
            "simulation",
            ("dt", "duration", "noise", "seed", "v0", "h0", "record_trajectory", "record_stride"),
        )
        ana = pick(section("analysis"), "analysis", ("isi_threshold", "binwidth", "transient"))
        ens = pick(section("ensemble"), "ensemble", ("trials", "trial_duration", "noise_values"))
        grid = pick(
            section("grid"),
            "grid",
            ("v0_range", "h0_range", "v0_resolution", "h0_resolution", "noise", "duration"),
        )
        out = pick(section("output"), "output", ("directory",))

        base = cls()
        try:
            params = dataclasses.replace(DEFAULT_PARAMS, **model)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid model parameters: {exc}") from exc

        def pair(sec: dict[str, Any], key: str, default: tuple[float, float]) -> tuple[float, float]:
            raw = sec.get(key, list(default))
            if not (isinstance(raw, (list, tuple)) and len(raw) == 2):
                raise ConfigError(f"grid.{key} must be a [low, high] pair, got {raw!r}")
            return (float(raw[0]), float(raw[1]))

        try:
            return cls(
                params=params,
                dt=float(sim.get("dt", base.dt)),
                duration=float(sim.get("duration", base.duration)),
                noise=float(sim.get("noise", base.noise)),
                seed=int(sim.get("seed", base.seed)),
                v0=float(sim.get("v0", base.v0)),
                h0=float(sim.get("h0", base.h0)),
                record_trajectory=bool(sim.get("record_trajectory", base.record_trajectory)),
                record_stride=int(sim.get("record_stride", base.record_stride)),
                isi_threshold=float(ana.get("isi_threshold", base.isi_threshold)),
                binwidth=float(ana.get("binwidth", base.binwidth)),
                transient=float(ana.get("transient", base.transient)),
                trials=int(ens.get("trials", base.trials)),
                trial_duration=float(ens.get("trial_duration", base.trial_duration)),
                noise_values=tuple(float(d) for d in ens.get("noise_values", base.noise_values)),
                grid_v0_range=pair(grid, "v0_range", base.grid_v0_range),
                grid_h0_range=pair(grid, "h0_range", base.grid_h0_range),
                grid_v0_resolution=float(grid.get("v0_resolution", base.grid_v0_resolution)),
                grid_h0_resolution=float(grid.get("h0_resolution", base.grid_h0_resolution)),
                grid_noise=float(grid.get("noise", base.grid_noise)),
                grid_duration=float(grid.get("duration", base.grid_duration)),
                out_dir=str(out.get("directory", base.out_dir)),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid config value: {exc}") from exc


def load_config_file(path: Union[str, Path]) -> RunConfig:
    """Parse a JSON config file into a RunConfig (strict keys, no defaults lost)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return RunConfig.from_dict(data)
