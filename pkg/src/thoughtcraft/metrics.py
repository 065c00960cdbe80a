"""Experiment telemetry: JSONL metrics streams and CSV summaries.

One MetricsRecord is emitted per training iteration. Wall-clock fields are
the only nondeterministic ones; reproducibility checks exclude them.
"""
from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

WALL_CLOCK_FIELDS = ("wall_clock_ms", "steps_per_second")


@dataclass
class MetricsRecord:
    run_id: str
    phase: str                     # thought | transfer | target
    iteration: int
    episodes_total: int
    env_steps_total: int
    difficulty: int
    win_rate_window: float
    win_rate_eval: float | None
    policy_loss: float
    value_loss: float
    entropy: float
    clip_fraction: float
    illegal_action_rate: float
    wall_clock_ms: float
    steps_per_second: float

    def to_json_line(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_dict(cls, raw: dict) -> "MetricsRecord":
        names = {f.name for f in fields(cls)}
        return cls(**{k: raw[k] for k in names})


class MetricsWriter:
    """Append-only JSONL sink."""

    def __init__(self, path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = self.path.open("w")

    def write(self, record: MetricsRecord):
        self._fh.write(record.to_json_line() + "\n")
        self._fh.flush()

    def close(self):
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def read_metrics(path) -> list:
    records = []
    with Path(path).open() as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(MetricsRecord.from_dict(json.loads(line)))
    return records


def records_equal(a: MetricsRecord, b: MetricsRecord, ignore_wall_clock: bool = True) -> bool:
    da, db = asdict(a), asdict(b)
    if ignore_wall_clock:
        for f in WALL_CLOCK_FIELDS:
            da.pop(f)
            db.pop(f)
    return da == db


SUMMARY_COLUMNS = (
    "run_id", "phase", "iterations", "episodes_total", "env_steps_total",
    "final_difficulty", "final_win_rate_window", "final_win_rate_eval",
    "best_win_rate_eval", "wall_clock_ms",
)


def summarize_run(records) -> dict:
    """Per-run final/aggregate values, recomputable from the raw stream."""
    if not records:
        raise ValueError("no records to summarize")
    last = records[-1]
    evals = [r.win_rate_eval for r in records if r.win_rate_eval is not None]
    return {
        "run_id": last.run_id,
        "phase": last.phase,
        "iterations": len(records),
        "episodes_total": last.episodes_total,
        "env_steps_total": last.env_steps_total,
        "final_difficulty": last.difficulty,
        "final_win_rate_window": last.win_rate_window,
        "final_win_rate_eval": last.win_rate_eval if last.win_rate_eval is not None else "",
        "best_win_rate_eval": max(evals) if evals else "",
        "wall_clock_ms": last.wall_clock_ms,
    }


def write_summary_csv(path, run_records: dict) -> None:
    """run_records maps run_id -> list of MetricsRecord."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS)
        writer.writeheader()
        for run_id in sorted(run_records):
            writer.writerow(summarize_run(run_records[run_id]))
