"""
Output files: trajectory CSVs, the gravity dataset, plot datasets, the hop batch
table and the run summary. Floats are written with 17 significant digits so identical
runs give byte-identical files.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

import numpy as np

from asteroid_gnc.core.trajectory_log import COLUMNS, TrajectoryLog

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
INT_FORMAT = "%d"

GRAVITY_COLUMNS = ("x", "y", "z", "V", "gx", "gy", "gz", "laplacian", "error_flag")
SUMMARY_FILE = "summary.json"


def _write_table(path, columns: Sequence[str], data, comments: Dict[str, object], int_columns=()) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.asarray(data, dtype=float).reshape(-1, len(columns))
    fmt = [INT_FORMAT if name in int_columns else FLOAT_FORMAT for name in columns]
    header = "".join(f"# {key}: {value}\n" for key, value in comments.items()) + ",".join(columns)
    np.savetxt(path, data, fmt=fmt, delimiter=",", header=header, comments="")
    logger.debug(f"Wrote {len(data)} rows to {path}")
    return path


def read_table(path) -> Tuple[Dict[str, str], List[str], np.ndarray]:
    """Inverse of the table writers: (header comments, column names, data)."""
    comments, columns, skip = {}, [], 0
    with open(path, encoding="utf-8") as f:
        for line in f:
            skip += 1
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                comments[key.strip()] = value.strip()
                continue
            columns = line.strip().split(",")
            break
    data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)
    return comments, columns, data.reshape(-1, len(columns))


def write_trajectory_csv(log: TrajectoryLog, path, phase: str) -> Path:
    """One row per logged step; positions are in the log's frame, declared in the header."""
    return _write_table(
        path,
        COLUMNS,
        log.as_array(),
        {"phase": phase, "frame": log.frame, "dt": repr(float(log.dt))},
        int_columns=("sat_flags",),
    )


def write_gravity_dataset(rows, path, model_name: str) -> Path:
    """rows: (N, 9) in GRAVITY_COLUMNS order; failed samples carry NaNs and error_flag 1."""
    return _write_table(path, GRAVITY_COLUMNS, rows, {"model": model_name, "frame": "body"}, int_columns=("error_flag",))


def write_dataset(path, columns: Sequence[str], data, **comments) -> Path:
    return _write_table(path, columns, data, comments)


HOP_TABLE_COLUMNS = (
    "hop", "mode", "status", "outcome",
    "launch_vx", "launch_vy", "launch_vz", "launch_speed",
    "flight_time", "final_x", "final_y", "final_z", "final_vx", "final_vy", "final_vz",
    "residual", "iterations", "feasible", "track_deviation", "error",
)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_hop_table(rows: List[Dict[str, object]], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(HOP_TABLE_COLUMNS)
        for row in rows:
            writer.writerow([_cell(row.get(name)) for name in HOP_TABLE_COLUMNS])
    logger.debug(f"Wrote hop table with {len(rows)} rows to {path}")
    return path


def write_summary(summary: Dict[str, object], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2, sort_keys=False, allow_nan=True)
        f.write("\n")
    return path


def read_summary(path) -> Dict[str, object]:
    with open(path, encoding="utf-8") as f:
        return json.load(f)
