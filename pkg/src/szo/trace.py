"""Run traces and their delimited serialization.

The CSV schema is fixed: one row per recorded event with columns

    run_id, solver, n, k, phase, queries_cumulative, f_center,
    suboptimality, log_volume, cone_angle, instantaneous_regret,
    cumulative_regret

Floats are rendered with shortest round-trip formatting (repr); missing
values are empty fields.  Ground-truth columns (f_center, suboptimality,
...) are verification data computed outside the oracle interface.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field, asdict

import numpy as np

CSV_COLUMNS = (
    "run_id", "solver", "n", "k", "phase", "queries_cumulative", "f_center",
    "suboptimality", "log_volume", "cone_angle", "instantaneous_regret",
    "cumulative_regret",
)


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class IterationRecord:
    k: int
    phase: str
    queries_cumulative: int
    f_center: float = None
    suboptimality: float = None
    log_volume: float = None          # 0.5 * log det A (ball constant omitted)
    cone_angle: float = None
    instantaneous_regret: float = None
    cumulative_regret: float = None


@dataclass
class RunTrace:
    solver: str
    problem: str
    n: int
    records: list = field(default_factory=list)
    final_point: np.ndarray = None
    final_value: float = None
    total_queries: int = 0
    incomplete: bool = False

    def add(self, record):
        self.records.append(record)

    def rows(self, run_id):
        out = []
        for r in self.records:
            out.append((
                run_id, self.solver, str(self.n), str(r.k), r.phase,
                str(r.queries_cumulative), _fmt(r.f_center),
                _fmt(r.suboptimality), _fmt(r.log_volume), _fmt(r.cone_angle),
                _fmt(r.instantaneous_regret), _fmt(r.cumulative_regret),
            ))
        return out

    def to_csv(self, run_id):
        lines = [",".join(CSV_COLUMNS)]
        for row in self.rows(run_id):
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def to_json(self, run_id):
        payload = {
            "run_id": run_id,
            "solver": self.solver,
            "problem": self.problem,
            "n": self.n,
            "total_queries": self.total_queries,
            "incomplete": self.incomplete,
            "final_point": (None if self.final_point is None
                            else [float(v) for v in self.final_point]),
            "final_value": self.final_value,
            "records": [asdict(r) for r in self.records],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def write_atomic(path, text):
    """Write text to `path` via a temp file + rename in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
