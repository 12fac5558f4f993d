"""Trace and config file I/O.

Formats:

* Channel records, binary (``.cir``): little-endian; 12-byte header
  (magic ``CIR1``, uint32 version, uint32 tap count L), then one record per
  measurement: float64 timestamp, uint8 pose flag, 2x float64 pose,
  2L float64 interleaved real/imag taps.
* Channel records, JSONL: one object per line,
  ``{"t": ..., "taps": [re0, im0, re1, im1, ...], "pose": [x, y] | null}``.
* IMU records, CSV or JSONL: columns/keys t, wx, wy, wz, ax, ay, az in SI
  units.
* Scene documents: JSON with the scene's fields spelled out.
* Floorplans: JSON, see :mod:`trtrack.floorplan`.

Binary <-> JSONL conversion is lossless (float64 values survive the JSON
round trip bit-exactly).
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path

import numpy as np

from .channel import Cir, Scene
from .errors import DataError, ParameterError
from .heading import ImuSample
from .motion import SpeedEstimate
from .trrs import TrrsMatrix, TrrsSeries

CIR_MAGIC = b"CIR1"
CIR_VERSION = 1
_HEADER = struct.Struct("<4sII")


# ---------------------------------------------------------------------------
# channel record streams

def write_cirs_binary(cirs: list[Cir], path) -> None:
    if not cirs:
        Path(path).write_bytes(_HEADER.pack(CIR_MAGIC, CIR_VERSION, 0))
        return
    L = len(cirs[0].taps)
    rec = struct.Struct(f"<dB2d{2 * L}d")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(CIR_MAGIC, CIR_VERSION, L))
        for c in cirs:
            if len(c.taps) != L:
                raise ParameterError("all records must share one tap count")
            flag = 1 if c.pose_label is not None else 0
            pose = c.pose_label if flag else np.zeros(2)
            inter = np.empty(2 * L)
            inter[0::2] = c.taps.real
            inter[1::2] = c.taps.imag
            fh.write(rec.pack(c.timestamp, flag, pose[0], pose[1], *inter))


def read_cirs_binary(path) -> list[Cir]:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise DataError("truncated channel record file: missing header")
    magic, version, L = _HEADER.unpack_from(raw)
    if magic != CIR_MAGIC or version != CIR_VERSION:
        raise DataError("not a channel record file")
    rec = struct.Struct(f"<dB2d{2 * L}d")
    body = raw[_HEADER.size:]
    if len(body) % rec.size:
        raise DataError(
            f"truncated channel record file at record {len(body) // rec.size}")
    out = []
    for i in range(len(body) // rec.size):
        vals = rec.unpack_from(body, i * rec.size)
        t, flag, px, py = vals[0], vals[1], vals[2], vals[3]
        inter = np.asarray(vals[4:])
        taps = inter[0::2] + 1j * inter[1::2]
        pose = np.array([px, py]) if flag else None
        out.append(Cir(taps=taps, timestamp=t, pose_label=pose))
    return out


def write_cirs_jsonl(cirs: list[Cir], path) -> None:
    with open(path, "w") as fh:
        for c in cirs:
            inter = np.empty(2 * len(c.taps))
            inter[0::2] = c.taps.real
            inter[1::2] = c.taps.imag
            doc = {"t": c.timestamp, "taps": inter.tolist(),
                   "pose": None if c.pose_label is None else list(map(float, c.pose_label))}
            fh.write(json.dumps(doc) + "\n")


def read_cirs_jsonl(path) -> list[Cir]:
    out = []
    with open(path) as fh:
        for i, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                inter = np.asarray(doc["taps"], dtype=np.float64)
                taps = inter[0::2] + 1j * inter[1::2]
                pose = doc.get("pose")
                out.append(Cir(
                    taps=taps, timestamp=float(doc["t"]),
                    pose_label=None if pose is None else np.asarray(pose, dtype=np.float64)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DataError(f"malformed channel record at line {i}: {exc}") from exc
    return out


def read_cirs(path, fmt: str | None = None) -> list[Cir]:
    fmt = fmt or _sniff_cir_format(path)
    if fmt == "binary":
        return read_cirs_binary(path)
    if fmt == "jsonl":
        return read_cirs_jsonl(path)
    raise ParameterError(f"unknown channel record format {fmt!r}")


def write_cirs(cirs: list[Cir], path, fmt: str) -> None:
    if fmt == "binary":
        write_cirs_binary(cirs, path)
    elif fmt == "jsonl":
        write_cirs_jsonl(cirs, path)
    else:
        raise ParameterError(f"unknown channel record format {fmt!r}")


def _sniff_cir_format(path) -> str:
    with open(path, "rb") as fh:
        head = fh.read(4)
    return "binary" if head == CIR_MAGIC else "jsonl"


def convert_cirs(input_path, output_path, fmt: str) -> Path:
    """Lossless conversion between the binary and JSONL record formats."""
    write_cirs(read_cirs(input_path), output_path, fmt)
    return Path(output_path)


# ---------------------------------------------------------------------------
# IMU record streams

IMU_FIELDS = ("t", "wx", "wy", "wz", "ax", "ay", "az")


def write_imu_csv(samples: list[ImuSample], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(IMU_FIELDS)
        for s in samples:
            w.writerow([repr(float(v)) for v in
                        (s.timestamp, *s.angular_velocity, *s.acceleration)])


def read_imu_csv(path) -> list[ImuSample]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != IMU_FIELDS:
            raise DataError(f"IMU CSV must have columns {','.join(IMU_FIELDS)}")
        for i, row in enumerate(reader):
            try:
                vals = [float(row[k]) for k in IMU_FIELDS]
            except (KeyError, TypeError, ValueError) as exc:
                raise DataError(f"malformed IMU record at row {i}: {exc}") from exc
            out.append(ImuSample(timestamp=vals[0],
                                 angular_velocity=vals[1:4],
                                 acceleration=vals[4:7]))
    return out


def write_imu_jsonl(samples: list[ImuSample], path) -> None:
    with open(path, "w") as fh:
        for s in samples:
            doc = dict(zip(IMU_FIELDS,
                           (s.timestamp, *map(float, s.angular_velocity),
                            *map(float, s.acceleration))))
            fh.write(json.dumps(doc) + "\n")


def read_imu_jsonl(path) -> list[ImuSample]:
    out = []
    with open(path) as fh:
        for i, line in enumerate(fh):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                out.append(ImuSample(
                    timestamp=float(doc["t"]),
                    angular_velocity=[doc["wx"], doc["wy"], doc["wz"]],
                    acceleration=[doc["ax"], doc["ay"], doc["az"]]))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise DataError(f"malformed IMU record at line {i}: {exc}") from exc
    return out


def read_imu(path) -> list[ImuSample]:
    with open(path, "rb") as fh:
        text_head = fh.read(2)
    if text_head.startswith(b"{"):
        return read_imu_jsonl(path)
    return read_imu_csv(path)


# ---------------------------------------------------------------------------
# scene documents

def scene_to_dict(scene: Scene) -> dict:
    return {
        "scatterers": scene.scatterers.tolist(),
        "reflection_coeffs": scene.reflection_coeffs.tolist(),
        "tx_pos": scene.tx_pos.tolist(),
        "rx_focal_pos": scene.rx_focal_pos.tolist(),
        "carrier_f0": scene.carrier_f0,
        "bandwidth": scene.bandwidth,
        "pulse_shaper": scene.pulse_shaper,
        "tap_count": scene.tap_count,
        "include_direct_path": scene.include_direct_path,
    }


def scene_from_dict(doc: dict) -> Scene:
    try:
        return Scene(
            scatterers=np.asarray(doc["scatterers"], dtype=np.float64),
            reflection_coeffs=np.asarray(doc["reflection_coeffs"], dtype=np.float64),
            tx_pos=np.asarray(doc["tx_pos"], dtype=np.float64),
            rx_focal_pos=np.asarray(doc["rx_focal_pos"], dtype=np.float64),
            carrier_f0=float(doc["carrier_f0"]),
            bandwidth=float(doc["bandwidth"]),
            pulse_shaper=doc.get("pulse_shaper", "rectangular"),
            tap_count=int(doc.get("tap_count", 0)),
            include_direct_path=bool(doc.get("include_direct_path", True)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"malformed scene document: {exc}") from exc


def save_scene(scene: Scene, path) -> None:
    Path(path).write_text(json.dumps(scene_to_dict(scene), indent=2))


def load_scene(path) -> Scene:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"scene file is not valid JSON: {exc}") from exc
    return scene_from_dict(doc)


# ---------------------------------------------------------------------------
# CSV exports for plotting

def write_series_csv(series: TrrsSeries, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["timestamp", "lag", "value"])
        for t, v in zip(series.timestamps, series.values):
            w.writerow([repr(float(t)),
                        repr(float(t - series.reference_timestamp)),
                        repr(float(v))])


def write_matrix_csv(matrix: TrrsMatrix, path) -> None:
    """Long-format (timestamp, lag, value) rows, column-major: one matrix
    column (= one measurement instant) at a time; absent entries skipped."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["timestamp", "lag", "value"])
        for m, t in enumerate(matrix.times):
            for k, lag in enumerate(matrix.lags):
                v = matrix.values[k, m]
                if np.isfinite(v):
                    w.writerow([repr(float(t)), repr(float(lag)), repr(float(v))])


def write_speeds_csv(speeds: list[SpeedEstimate], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["timestamp", "speed", "peak_lag", "confidence"])
        for s in speeds:
            w.writerow([repr(s.timestamp), repr(s.speed),
                        repr(s.peak_lag), repr(s.confidence)])


def write_trace_csv(trace: list, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["timestamp", "x", "y", "heading", "cum_distance",
                    "dominant_scale"])
        for row in trace:
            w.writerow([repr(float(v)) for v in row])


def write_table_csv(header: list[str], rows: list, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (int, float, np.floating))
                        else v for v in row])
