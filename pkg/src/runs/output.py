"""
Self-describing CSV output.

The first line is ``# `` followed by the compact JSON of the RunConfig,
then a header row, then data rows. Floats are written with repr so they
re-read exactly.
"""

import csv
import json
import os
import threading
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from runs.schema import RunConfig
from utils.logger import logger

HEADER_PREFIX = "# "

_write_lock = threading.Lock()


def header_line(run: RunConfig) -> str:
    return HEADER_PREFIX + json.dumps(run.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))


def _format(value) -> str:
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return repr(float(value))


def write_csv(path: str, run: RunConfig, columns: Sequence[str], rows: Iterable[Sequence[float]]) -> int:
    """Write a table; returns the number of data rows. Writers are serialized."""
    with _write_lock:
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        count = 0
        with open(path, "w", newline="", encoding="utf-8") as f:
            f.write(header_line(run) + "\n")
            writer = csv.writer(f)
            writer.writerow(list(columns))
            for row in rows:
                writer.writerow([_format(v) for v in row])
                count += 1
    logger.info(f"Wrote {count} rows to {path}")
    return count


def read_header(path: str) -> Optional[RunConfig]:
    """RunConfig from the first line of a CSV written by write_csv; None if absent."""
    if not os.path.exists(path):
        return None
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline().rstrip("\n")
    if not first.startswith(HEADER_PREFIX):
        logger.warning(f"{path} has no run header")
        return None
    return RunConfig(**json.loads(first[len(HEADER_PREFIX):]))


def read_csv(path: str) -> Tuple[Optional[RunConfig], List[str], np.ndarray]:
    """(header, column names, float array of rows)."""
    run = read_header(path)
    with open(path, "r", encoding="utf-8") as f:
        lines = [line for line in f if not line.startswith("#")]
    reader = csv.reader(lines)
    columns = next(reader)
    data = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
    return run, columns, data.reshape(-1, len(columns))
