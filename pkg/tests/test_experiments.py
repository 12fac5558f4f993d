"""Experiment harness: config validation, loop geometry, report output."""

import json
from pathlib import Path

import numpy as np
import pytest

from trtrack.errors import ConfigError
from trtrack.experiments import (ExperimentConfig, OFFICE_LOOP_H,
                                 OFFICE_LOOP_W, OFFICE_START, build_office_plan,
                                 first_extrema_locations, load_config,
                                 loop_trajectory, office_loop_increments,
                                 office_loop_pose, run_scenario)


def test_config_rejects_unknown_scenario(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig("teleport", [0], tmp_path, {})


def test_config_rejects_unknown_params(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig("train_loop", [0], tmp_path, {"warp_factor": 9})


def test_config_rejects_empty_seeds(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig("train_loop", [], tmp_path, {})


def test_load_config_file_with_overrides(tmp_path):
    doc = {"scenario": "train_loop", "seeds": [1, 2, 3],
           "track_length": 6.0, "output_dir": str(tmp_path / "a")}
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(doc))
    cfg = load_config(p)
    assert cfg.scenario == "train_loop"
    assert cfg.params["track_length"] == 6.0
    # CLI-style overrides
    cfg2 = load_config(p, seed=10, output_dir=tmp_path / "b")
    assert cfg2.seeds == [10, 11, 12]
    assert cfg2.output_dir == tmp_path / "b"


def test_load_config_requires_scenario(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text("{}")
    with pytest.raises(ConfigError):
        load_config(p)
    p.write_text("[1]")
    with pytest.raises(ConfigError):
        load_config(p)


# ---------------------------------------------------------------------------
# office loop geometry

def test_office_plan_shape():
    plan = build_office_plan()
    assert plan.walls.shape == (8, 4)
    assert len(plan.landmarks) == 4
    # start point sits inside the corridor, not in a wall
    assert not plan.segment_hits_wall(OFFICE_START, (OFFICE_START[0] + 0.1, 0.0))


def test_office_loop_pose_landmarks():
    # 4 m from the start is the first corner
    pos, heading = office_loop_pose(4.0)
    assert np.allclose(pos, [OFFICE_LOOP_W, 0.0])
    perimeter = 2 * (OFFICE_LOOP_W + OFFICE_LOOP_H)
    pos2, _ = office_loop_pose(4.0 + perimeter)
    assert np.allclose(pos2, [OFFICE_LOOP_W, 0.0])
    pos3, heading3 = office_loop_pose(4.0 + OFFICE_LOOP_H)
    assert np.allclose(pos3, [OFFICE_LOOP_W, OFFICE_LOOP_H])
    assert heading3 == pytest.approx(np.pi / 2)


def test_office_increments_total_and_turns():
    incs = office_loop_increments(24.0)
    assert sum(d for d, _ in incs) == pytest.approx(24.0)
    assert sum(th for _, th in incs) == pytest.approx(2 * (np.pi / 2))  # 2 corners


def test_increment_playback_matches_pose():
    # integrating the increments lands on the closed-form pose; corners are
    # injected at step boundaries so agreement is only to within one step
    for length in (3.0, 10.0, 24.0, 47.0):
        pos = np.array(OFFICE_START, dtype=float)
        heading = 0.0
        n_turns = 0
        for d, dth in office_loop_increments(length, step=0.16):
            heading += dth
            n_turns += int(round(dth / (np.pi / 2)))
            pos = pos + d * np.array([np.cos(heading), np.sin(heading)])
        expected, _ = office_loop_pose(length)
        assert np.allclose(pos, expected, atol=0.01 + 0.16 * n_turns), length


# ---------------------------------------------------------------------------
# trajectory helpers

def test_loop_trajectory_closes():
    cirs, scene = loop_trajectory(seed=0, circumference=8.0, speed=1.0)
    first = cirs[0].pose_label
    last = cirs[-1].pose_label
    assert np.allclose(first, last, atol=1e-9)
    # 8 s at 5 ms
    assert len(cirs) == 1601


def test_extrema_locator():
    d = np.linspace(0, 2, 200)
    curve = np.cos(2 * np.pi * d) ** 2  # null at 0.25, peak at 0.5
    null_d, peak_d = first_extrema_locations(d, curve)
    assert null_d == pytest.approx(0.25, abs=0.01)
    assert peak_d == pytest.approx(0.5, abs=0.01)
    assert first_extrema_locations(d, np.ones_like(d)) == (None, None)


# ---------------------------------------------------------------------------
# report output (cheap scenario end to end)

def test_run_scenario_writes_report_and_figure(tmp_path):
    cfg = ExperimentConfig("trrs_vs_distance", [0, 1], tmp_path / "out",
                           {"n_points": 41})
    report = run_scenario(cfg)
    out = tmp_path / "out"
    assert (out / "report.json").exists()
    assert (out / "report.md").exists()
    assert (out / "trrs_vs_distance.csv").exists()
    assert (out / "trrs_vs_distance.png").exists()
    doc = json.loads((out / "report.json").read_text())
    assert doc["scenario"] == "trrs_vs_distance"
    assert set(doc["checks"]) == {name for name, _ in report.checks}


def test_run_scenario_deterministic(tmp_path):
    cfg1 = ExperimentConfig("trrs_vs_distance", [3], tmp_path / "a",
                            {"n_points": 31})
    cfg2 = ExperimentConfig("trrs_vs_distance", [3], tmp_path / "b",
                            {"n_points": 31})
    run_scenario(cfg1)
    run_scenario(cfg2)
    assert (tmp_path / "a" / "trrs_vs_distance.csv").read_text() == \
        (tmp_path / "b" / "trrs_vs_distance.csv").read_text()
