"""Command-line interface.

Verbs: ``simulate``, ``trrs``, ``estimate-distance``, ``track``,
``experiment``, ``convert``.  Exit codes: 0 success, 2 configuration
error, 3 data error.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from . import experiments, motion, pipeline, traceio
from .errors import ConfigError, DataError, ParameterError
from .trrs import trrs_series, trrs_sliding_matrix
from .floorplan import FloorPlan


def _exit_codes(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ConfigError, ParameterError) as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(2)
        except (DataError, OSError) as exc:
            click.echo(f"data error: {exc}", err=True)
            sys.exit(3)
    return wrapper


@click.group()
def main():
    """Time-reversal focusing-ball indoor tracking toolkit."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="JSON scene/trajectory description.")
@click.option("--seed", type=int, default=None, help="Override the scene seed.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["binary", "jsonl"]),
              default="binary", show_default=True)
@_exit_codes
def simulate(config_path, seed, out_path, fmt):
    """Synthesize a channel-response trajectory from a scene config.

    The config document holds scene parameters plus a trajectory:

    \b
      {"scene": {"seed": 1, "n_scatterers": 200, "region_side": 7.5,
                 "tx_rx_separation": 30.0, "carrier_f0": 5.8e9,
                 "bandwidth": 5e8, "include_direct_path": false},
       "waypoints": [[[0, 0], 0.0], [[8, 0], 8.0]],
       "sample_period": 0.005}
    """
    from .channel import generate_scene, synthesize_trajectory

    if config_path is None:
        raise ConfigError("simulate requires --config")
    doc = json.loads(Path(config_path).read_text())
    scene_doc = dict(doc.get("scene", {}))
    if seed is not None:
        scene_doc["seed"] = seed
    try:
        scene = generate_scene(**scene_doc)
        waypoints = [(np.asarray(p, dtype=float), float(t))
                     for p, t in doc["waypoints"]]
        sample_period = float(doc.get("sample_period", 5e-3))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad simulate config: {exc}") from exc
    span = max(float(np.max(np.abs([p for p, _ in waypoints]))), 1.0)
    scene = scene.with_guard_taps(int(np.ceil(2 * span / scene.sample_spacing)) + 4)
    cirs = synthesize_trajectory(scene, waypoints, sample_period)
    traceio.write_cirs(cirs, out_path, fmt)
    click.echo(f"wrote {len(cirs)} records to {out_path}")


@main.command(name="trrs")
@click.argument("cir_file", type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["series", "matrix"]),
              default="matrix", show_default=True)
@click.option("--max-lag", type=float, default=0.16, show_default=True,
              help="Largest lag (s) for matrix mode.")
@click.option("--reference", type=int, default=0, show_default=True,
              help="Record index of the reference for series mode.")
@click.option("--out", "out_path", required=True, type=click.Path())
@_exit_codes
def trrs_cmd(cir_file, mode, max_lag, reference, out_path):
    """Resonating strength of a recorded stream, exported as CSV."""
    cirs = traceio.read_cirs(cir_file)
    if not cirs:
        raise DataError("empty channel record stream")
    if mode == "series":
        if not 0 <= reference < len(cirs):
            raise ConfigError(f"reference index {reference} out of range")
        series = trrs_series(cirs[reference], cirs)
        traceio.write_series_csv(series, out_path)
    else:
        matrix = trrs_sliding_matrix(cirs, max_lag)
        traceio.write_matrix_csv(matrix, out_path)
    click.echo(f"wrote {out_path}")


@main.command(name="estimate-distance")
@click.argument("cir_file", type=click.Path(exists=True))
@click.option("--wavelength", type=float, required=True,
              help="Carrier wavelength in meters (c/f0).")
@click.option("--max-lag", type=float, default=0.16, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Optional speed-series CSV.")
@_exit_codes
def estimate_distance(cir_file, wavelength, max_lag, out_path):
    """Estimate total moving distance from a channel record stream."""
    cirs = traceio.read_cirs(cir_file)
    if len(cirs) < 2:
        raise DataError("need at least two records")
    matrix = trrs_sliding_matrix(cirs, max_lag)
    speeds = motion.speed_series(matrix, wavelength)
    track = motion.integrate_distance(
        speeds, t_start=cirs[0].timestamp, t_end=cirs[-1].timestamp)
    if out_path:
        traceio.write_speeds_csv(speeds, out_path)
    click.echo(f"estimated distance: {track.cumulative_distance:.3f} m")


@main.command(name="track")
@click.option("--cir", "cir_file", required=True, type=click.Path(exists=True))
@click.option("--imu", "imu_file", required=True, type=click.Path(exists=True))
@click.option("--plan", "plan_file", type=click.Path(exists=True), default=None)
@click.option("--wavelength", type=float, required=True)
@click.option("--start", nargs=2, type=float, default=(0.0, 0.0),
              show_default=True, help="Initial position (m).")
@click.option("--heading", type=float, default=0.0, show_default=True,
              help="Initial heading (rad).")
@click.option("--out", "out_path", required=True, type=click.Path())
@_exit_codes
def track_cmd(cir_file, imu_file, plan_file, wavelength, start, heading, out_path):
    """Fuse channel and IMU streams into a pose trace CSV."""
    cirs = traceio.read_cirs(cir_file)
    imu = traceio.read_imu(imu_file)
    plan = FloorPlan.load(plan_file) if plan_file else None
    cfg = pipeline.TrackConfig(wavelength=wavelength, initial_pos=tuple(start),
                               initial_heading=heading)
    result = pipeline.track(cirs, imu, plan, cfg)
    traceio.write_trace_csv(result.trace, out_path)
    for name, a, b in result.gaps:
        click.echo(f"warning: {name} stream gap {a:.3f}s -> {b:.3f}s", err=True)
    click.echo(f"wrote {len(result.trace)} poses to {out_path}")


@main.command()
@click.argument("scenario", required=False)
@click.option("--config", "config_path", type=click.Path(exists=True))
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_dir", type=click.Path(), default=None)
@_exit_codes
def experiment(scenario, config_path, seed, out_dir):
    """Run an experiment scenario and write data, figures and a report.

    SCENARIO is one of: bessel_convergence, trrs_vs_distance, train_loop,
    walk_distance, office_track, error_cdf, packet_loss_sweep.
    """
    cfg = experiments.load_config(config_path, scenario=scenario, seed=seed,
                                  output_dir=out_dir)
    report = experiments.run_scenario(cfg)
    for name, ok in report.checks:
        click.echo(f"[{'PASS' if ok else 'FAIL'}] {name}")
    click.echo(f"report: {Path(cfg.output_dir) / 'report.md'}")
    if not report.passed:
        sys.exit(1)


@main.command()
@click.argument("input_file", type=click.Path(exists=True))
@click.option("--format", "fmt", required=True,
              type=click.Choice(["binary", "jsonl"]))
@click.option("--out", "out_path", required=True, type=click.Path())
@_exit_codes
def convert(input_file, fmt, out_path):
    """Convert channel record streams between binary and JSONL."""
    traceio.convert_cirs(input_file, out_path, fmt)
    click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
