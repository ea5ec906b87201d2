"""
Trajectory dumps for offline analysis.

CSV: one ``# {json}`` header line, then the columns
``t, amp_re, amp_im, weight_re, weight_im, w``.
NPZ: the same arrays under those names, plus ``seed`` and ``dt``.
"""

import csv
import json
import os
from typing import Any, Dict, Optional

import numpy as np

from trajectories.functionals import TrajectorySeries

COLUMNS = ["t", "amp_re", "amp_im", "weight_re", "weight_im", "w"]


def _columns(series: TrajectorySeries) -> Dict[str, np.ndarray]:
    weight = series.weight
    return {
        "t": series.t,
        "amp_re": series.amplitude.real,
        "amp_im": series.amplitude.imag,
        "weight_re": weight.real,
        "weight_im": weight.imag,
        "w": series.w,
    }


def write_trajectory_csv(series: TrajectorySeries, path: str, header: Optional[Dict[str, Any]] = None) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    cols = _columns(series)
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write("# " + json.dumps(header or {}, sort_keys=True, separators=(",", ":")) + "\n")
        writer = csv.writer(f)
        writer.writerow(COLUMNS)
        for row in zip(*(cols[name] for name in COLUMNS)):
            writer.writerow([repr(float(v)) for v in row])


def write_trajectory_npz(series: TrajectorySeries, path: str, seed: int, dt: float) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    np.savez_compressed(path, seed=seed, dt=dt, **_columns(series))


def load_trajectory_npz(path: str) -> Dict[str, np.ndarray]:
    with np.load(path) as data:
        return {name: data[name] for name in data.files}
