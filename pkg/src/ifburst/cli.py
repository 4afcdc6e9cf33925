"""Command-line front end.

Subcommands:
    simulate     one trial -> spike-time file (+ optional trajectory), burst
                 summary on stdout
    sweep-noise  seeded trial ensembles across a noise ladder -> rate/occurrence
                 table plus one pooled ISIH table per noise level
    sweep-grid   one trial per initial-condition cell -> long-form map table
    isih         pooled inter-spike-interval histogram over repeated trials,
                 with the between-peaks trough diagnostic on stdout

Settings come from defaults, then an optional JSON config file (--config),
then command-line flags; flags win.  Exit codes: 0 success, 2 configuration
error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path
from typing import Optional

import numpy as np

from ._version import __version__
from .analysis import (
    classify_mode,
    find_isih_trough,
    histogram_from_isis,
    occurrence_percentages,
    remove_transient,
    segment_bursts,
    transition_rate,
)
from .config import ConfigError, RunConfig, load_config_file
from .experiments import EnsembleSpec, GridSpec, derive_trial_seed, run_ensemble, run_grid
from .integrator import SimulationSettings, simulate
from .output import write_manifest, write_table

__all__ = ["main"]


def _parse_noise_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip() != "")
    except ValueError as exc:
        raise ConfigError(f"bad noise list {text!r}: {exc}") from exc


def _parse_pair(text: str, flag: str) -> tuple[float, float]:
    parts = [p for p in text.split(",") if p.strip() != ""]
    if len(parts) != 2:
        raise ConfigError(f"{flag} expects 'low,high', got {text!r}")
    try:
        return (float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise ConfigError(f"{flag} expects numbers, got {text!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ifburst",
        description="Stochastic integrate-and-fire-or-burst simulator and burst analytics",
    )
    parser.add_argument("--version", action="version", version=f"ifburst {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--config", help="JSON config file; flags override its values")
        sp.add_argument("--seed", type=int, help="base 64-bit seed")
        sp.add_argument("--v0", type=float, help="initial membrane potential (mV)")
        sp.add_argument("--h0", type=float, help="initial gate value in [0, 1]")
        sp.add_argument("--dt-ms", type=float, help="integration step (default 0.02 ms)")
        sp.add_argument(
            "--isi-threshold-ms", type=float, help="burst separation threshold (default 80 ms)"
        )
        sp.add_argument("--binwidth-ms", type=float, help="ISIH bin width (default 1 ms)")
        sp.add_argument(
            "--transient-ms", type=float, help="transient removed before statistics (default 100 ms)"
        )
        sp.add_argument("--out", help="output directory (default '.')")
        sp.add_argument(
            "--h-equation",
            choices=["corrected", "as-printed"],
            help="gate-equation variant (default corrected)",
        )
        sp.add_argument("--workers", type=int, default=1, help="worker threads (default 1)")

    sp = sub.add_parser("simulate", help="run one trial and write its spike train")
    common(sp)
    sp.add_argument("--noise", type=float, help="noise intensity D (default 0)")
    sp.add_argument("--duration-ms", type=float, help="trial length (default 3000 ms)")
    sp.add_argument(
        "--trajectory", action="store_true", help="also write the strided (t, v, h) trajectory"
    )
    sp.add_argument("--record-stride", type=int, help="steps between trajectory samples (default 10)")

    sp = sub.add_parser("sweep-noise", help="trial ensembles across a noise ladder")
    common(sp)
    sp.add_argument(
        "--noise", help="comma-separated noise intensities (default: built-in ladder)"
    )
    sp.add_argument("--duration-ms", type=float, help="duration per trial (default 30000 ms)")
    sp.add_argument("--trials", type=int, help="trials per noise level (default 300)")

    sp = sub.add_parser("sweep-grid", help="one trial per initial-condition grid cell")
    common(sp)
    sp.add_argument("--noise", type=float, help="noise intensity D for every cell (default 0)")
    sp.add_argument("--duration-ms", type=float, help="duration per cell (default 40000 ms)")
    sp.add_argument("--v0-range", help="grid v0 span as 'low,high' (default -90,-35)")
    sp.add_argument("--h0-range", help="grid h0 span as 'low,high' (default 0,1)")
    sp.add_argument("--v0-res", type=float, help="grid v0 resolution (default 0.5 mV)")
    sp.add_argument("--h0-res", type=float, help="grid h0 resolution (default 0.01)")

    sp = sub.add_parser("isih", help="pooled ISI histogram over repeated trials")
    common(sp)
    sp.add_argument("--noise", type=float, help="noise intensity D (default 0)")
    sp.add_argument("--duration-ms", type=float, help="duration per trial (default 3000 ms)")
    sp.add_argument("--trials", type=int, help="number of pooled trials (default 1)")

    return parser


def _apply_flags(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    updates: dict = {}

    def put(field: str, value) -> None:
        if value is not None:
            updates[field] = value

    put("seed", args.seed)
    put("v0", args.v0)
    put("h0", args.h0)
    put("dt", args.dt_ms)
    put("isi_threshold", args.isi_threshold_ms)
    put("binwidth", args.binwidth_ms)
    put("transient", args.transient_ms)
    put("out_dir", args.out)

    if args.command == "simulate":
        put("noise", args.noise)
        put("duration", args.duration_ms)
        put("record_stride", args.record_stride)
        if args.trajectory:
            updates["record_trajectory"] = True
    elif args.command == "sweep-noise":
        if args.noise is not None:
            updates["noise_values"] = _parse_noise_list(args.noise)
        put("trial_duration", args.duration_ms)
        put("trials", args.trials)
    elif args.command == "sweep-grid":
        put("grid_noise", args.noise)
        put("grid_duration", args.duration_ms)
        if args.v0_range is not None:
            updates["grid_v0_range"] = _parse_pair(args.v0_range, "--v0-range")
        if args.h0_range is not None:
            updates["grid_h0_range"] = _parse_pair(args.h0_range, "--h0-range")
        put("grid_v0_resolution", args.v0_res)
        put("grid_h0_resolution", args.h0_res)
    elif args.command == "isih":
        put("noise", args.noise)
        put("duration", args.duration_ms)
        updates["trials"] = args.trials if args.trials is not None else 1

    cfg = dataclasses.replace(cfg, **updates)
    if args.h_equation is not None:
        try:
            params = dataclasses.replace(
                cfg.params, h_equation=args.h_equation.replace("-", "_")
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        cfg = dataclasses.replace(cfg, params=params)
    return cfg


def _burst_summary(kept_train, cfg: RunConfig) -> list[str]:
    seq = segment_bursts(
        kept_train,
        isi_threshold=cfg.isi_threshold,
        window_start=cfg.transient,
        window_end=float(kept_train.duration),
    )
    modes = [classify_mode(b) for b in seq.complete_bursts]
    shown = " ".join(map(str, modes[:60])) + (" ..." if len(modes) > 60 else "")
    occ = occurrence_percentages(seq)
    occ_text = "  ".join(f"mode{m}: {frac:.3f}" for m, frac in occ.items()) or "none"
    return [
        f"complete bursts: {len(modes)}",
        f"mode sequence: {shown or '(none)'}",
        f"transition rate: {transition_rate(seq):.6g} /s",
        f"occurrence: {occ_text}",
    ]


def _cmd_simulate(cfg: RunConfig, out: Path, workers: int) -> None:
    settings = SimulationSettings(
        duration=cfg.duration,
        dt=cfg.dt,
        D=cfg.noise,
        seed=cfg.seed,
        record_trajectory=cfg.record_trajectory,
        record_stride=cfg.record_stride,
    )
    result = simulate(cfg.v0, cfg.h0, settings, cfg.params)
    train = result.spike_train
    write_table(out / "spikes.csv", "simulate", cfg, [("spike_time_ms", train.spike_times)])
    if result.trajectory is not None:
        traj = result.trajectory
        write_table(
            out / "trajectory.csv",
            "simulate",
            cfg,
            [("t_ms", traj.times), ("v_mV", traj.v_samples), ("h", traj.h_samples)],
        )
    write_manifest(out / "manifest.json", "simulate", cfg)
    print(f"spikes: {train.spike_times.size} -> {out / 'spikes.csv'}")
    for line in _burst_summary(remove_transient(train, cfg.transient), cfg):
        print(line)


def _cmd_sweep_noise(cfg: RunConfig, out: Path, workers: int) -> None:
    spec = EnsembleSpec(
        initial_condition=(cfg.v0, cfg.h0),
        D_values=cfg.noise_values,
        n_trials=cfg.trials,
        trial_duration=cfg.trial_duration,
        base_seed=cfg.seed,
        transient_cutoff=cfg.transient,
    )
    curve = run_ensemble(
        spec,
        cfg.params,
        dt=cfg.dt,
        isi_threshold=cfg.isi_threshold,
        binwidth=cfg.binwidth,
        workers=workers,
    )
    columns = [
        ("D", np.asarray(curve.D_values)),
        ("transition_rate_mean", curve.transition_rate_mean),
    ]
    for m in (1, 2, 3, 4):
        columns.append((f"occ_mode{m}", np.array([occ[m] for occ in curve.occurrence_mean])))
    columns.append(("n_trials", np.full(len(curve.D_values), curve.n_trials, dtype=np.int64)))
    write_table(out / "sweep_noise.csv", "sweep-noise", cfg, columns)
    for D, hist in zip(curve.D_values, curve.pooled_isih):
        bins = np.arange(hist.bin_fractions.size, dtype=np.float64) * hist.binwidth
        write_table(
            out / f"isih_D{D:g}.csv",
            "sweep-noise",
            cfg,
            [("isi_bin_ms", bins), ("fraction", hist.bin_fractions)],
        )
    write_manifest(out / "manifest.json", "sweep-noise", cfg)
    print(f"sweep-noise: {len(curve.D_values)} noise levels x {curve.n_trials} trials -> {out}")


def _cmd_sweep_grid(cfg: RunConfig, out: Path, workers: int) -> None:
    spec = GridSpec(
        v0_range=cfg.grid_v0_range,
        h0_range=cfg.grid_h0_range,
        v0_resolution=cfg.grid_v0_resolution,
        h0_resolution=cfg.grid_h0_resolution,
        D=cfg.grid_noise,
        duration=cfg.grid_duration,
        base_seed=cfg.seed,
        transient_cutoff=cfg.transient,
    )
    grid = run_grid(spec, cfg.params, dt=cfg.dt, isi_threshold=cfg.isi_threshold, workers=workers)
    v0s = np.repeat(grid.v0_values, grid.h0_values.size)
    h0s = np.tile(grid.h0_values, grid.v0_values.size)
    write_table(
        out / "grid.csv",
        "sweep-grid",
        cfg,
        [("v0_mV", v0s), ("h0", h0s), ("mean_spikes_per_burst", grid.mean_spikes.ravel())],
    )
    write_manifest(out / "manifest.json", "sweep-grid", cfg)
    flat = grid.mean_spikes.ravel()
    n_empty = int(np.isnan(flat).sum())
    print(
        f"sweep-grid: {grid.v0_values.size} x {grid.h0_values.size} cells "
        f"({n_empty} without bursts) -> {out / 'grid.csv'}"
    )


def _cmd_isih(cfg: RunConfig, out: Path, workers: int) -> None:
    pooled = []
    for k in range(cfg.trials):
        settings = SimulationSettings(
            duration=cfg.duration, dt=cfg.dt, D=cfg.noise, seed=derive_trial_seed(cfg.seed, k)
        )
        result = simulate(cfg.v0, cfg.h0, settings, cfg.params)
        kept = remove_transient(result.spike_train, cfg.transient)
        if kept.spike_times.size >= 2:
            pooled.append(np.diff(kept.spike_times))
    isis = np.concatenate(pooled) if pooled else np.empty(0)
    hist = histogram_from_isis(isis, cfg.binwidth)
    bins = np.arange(hist.bin_fractions.size, dtype=np.float64) * hist.binwidth
    counts = np.rint(hist.bin_fractions * hist.total_isi_count).astype(np.int64)
    write_table(
        out / "isih.csv",
        "isih",
        cfg,
        [("isi_bin_ms", bins), ("fraction", hist.bin_fractions), ("count", counts)],
    )
    write_manifest(out / "manifest.json", "isih", cfg)
    print(f"isih: {hist.total_isi_count} ISIs pooled over {cfg.trials} trial(s) -> {out / 'isih.csv'}")
    try:
        trough_isi, trough_fraction = find_isih_trough(hist)
        print(f"trough in (30, 150) ms: bin {trough_isi:g} ms, fraction {trough_fraction:.6g}")
    except ValueError:
        print("trough in (30, 150) ms: undefined (histogram too sparse)")


_COMMANDS = {
    "simulate": _cmd_simulate,
    "sweep-noise": _cmd_sweep_noise,
    "sweep-grid": _cmd_sweep_grid,
    "isih": _cmd_isih,
}


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config_file(args.config) if args.config else RunConfig()
        cfg = _apply_flags(cfg, args)
        cfg.validate()
    except ConfigError as exc:
        print(f"ifburst: config error: {exc}", file=sys.stderr)
        return 2
    try:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _COMMANDS[args.command](cfg, out, max(1, args.workers))
    except Exception as exc:  # runtime failures map to a distinct exit code
        print(f"ifburst: error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
