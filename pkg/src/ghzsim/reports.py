"""Deterministic report serialization.

Reports are pure functions of their inputs: no timestamps, no hostnames, no
worker counts. That is what makes "same config, same seed => byte-identical
report" hold, which the acceptance suite checks explicitly.

JSON uses 2-space indentation and preserves insertion order. CSV always has
a header row; floats are printed with 12 significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

CSV_HEADER = ("test_name", "n", "k_or_subset", "N", "statistic", "target", "tolerance", "pass")


@dataclass(frozen=True)
class CheckRow:
    """One statistical check: a measured value against a target, plus its
    identifying coordinates (player count, precision level or subset, sample
    count)."""

    name: str
    n: object
    k_or_subset: object
    N: int
    statistic: float
    target: float
    tolerance: float
    passed: bool

    def to_result_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "k_or_subset": self.k_or_subset,
            "N": self.N,
            "value": self.statistic,
            "target": self.target,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }

    def to_csv_row(self) -> tuple:
        return (self.name, self.n, self.k_or_subset, self.N,
                self.statistic, self.target, self.tolerance, self.passed)


def format_value(x) -> str:
    """CSV cell formatting: floats at 12 significant digits, rest as str()."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return f"{x:.12g}"
    return str(x)


def render_csv(rows, header=CSV_HEADER) -> str:
    """CSV text with a mandatory header row."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(cell) for cell in row])
    return buf.getvalue()


def render_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def write_text(path: str | None, text: str) -> None:
    """Write to a file, or stdout when path is None or '-'."""
    if path is None or path == "-":
        print(text, end="")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def report_dict(command: str, config: dict, rows, total_bits_stats: dict | None = None,
                extra: dict | None = None) -> dict:
    """The standard report shape:
    {command, config, results: [...], total_bits_stats}."""
    report = {
        "command": command,
        "config": config,
        "results": [r.to_result_dict() for r in rows],
        "total_bits_stats": total_bits_stats,
    }
    if extra:
        report.update(extra)
    return report


def bits_stats_dict(summary) -> dict:
    """JSON form of a stats.CostSummary."""
    return {
        "mean": summary.mean,
        "stderr": summary.stderr,
        "max": summary.max,
        "total": summary.total,
        "N": summary.n,
        "histogram": {str(k): v for k, v in sorted(summary.histogram.items())},
    }
