"""
CSV output for simulation results.

Responsibilities:
- Render a run or a multi-run summary as one CSV row per iteration.
- Write the per-preset index of final errors.

Numbers use plain decimal notation with 9 significant digits, trailing zeros
trimmed; lines end with LF. Identical results give identical bytes.
"""

from __future__ import annotations

import csv
import sys
from io import StringIO
from pathlib import Path
from typing import Iterable, List, Sequence, TextIO, Union

import numpy as np

from .runner import RunSummary, Trajectory

TRAJECTORY_COLUMNS = [
    "t",
    "error_mean",
    "error_std",
    "successes_mean",
    "active_mean",
    "psi_mean",
    "collisions_mean",
]

INDEX_COLUMNS = [
    "label",
    "policy",
    "K",
    "M",
    "L",
    "p_comp",
    "T",
    "runs",
    "seed",
    "final_error_mean",
    "final_error_std",
    "file",
]

Destination = Union[str, Path, TextIO]


def format_number(value: float) -> str:
    """9 significant digits, decimal notation, e.g. 3.68 or 0.000123456789."""
    return np.format_float_positional(
        float(value), precision=9, unique=False, fractional=False, trim="-"
    )


def csv_text(result: Union[Trajectory, RunSummary]) -> str:
    """Render a trajectory (single run) or a summary as CSV text."""
    if isinstance(result, Trajectory):
        columns = [
            result.column("error"),
            np.zeros(len(result.reports)),
            result.column("successes"),
            result.column("active"),
            result.column("psi"),
            result.column("collisions"),
        ]
        t_values: Sequence[int] = [r.t for r in result.reports]
    else:
        columns = [
            result.error_mean,
            result.error_std,
            result.successes_mean,
            result.active_mean,
            result.psi_mean,
            result.collisions_mean,
        ]
        t_values = result.t.tolist()

    rows = [
        [str(int(t))] + [format_number(col[i]) for col in columns]
        for i, t in enumerate(t_values)
    ]
    return _render_rows(TRAJECTORY_COLUMNS, rows)


def _render_rows(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buffer = StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _write_text(text: str, destination: Destination) -> None:
    if not isinstance(destination, (str, Path)):
        destination.write(text)
        return

    path = Path(destination)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as e:
        raise OSError(f"Error writing CSV file {path}: {e}") from e


def emit_csv(
    result: Union[Trajectory, RunSummary], destination: Destination | None = None
) -> None:
    """
    Write the per-iteration CSV of a run or summary.

    Args:
        result: Output of `run` or `run_many`.
        destination: File path, or an open text stream (default stdout).

    Raises:
        OSError: If the file cannot be written.
    """
    _write_text(csv_text(result), sys.stdout if destination is None else destination)


def index_row(label: str, summary: RunSummary, file_name: str) -> List[str]:
    """One index line describing a summary and the CSV it was written to."""
    cfg = summary.config
    return [
        label,
        cfg.policy.value,
        str(cfg.K),
        str(cfg.M),
        str(cfg.L),
        format_number(cfg.p_comp),
        str(cfg.T),
        str(summary.runs),
        str(cfg.seed),
        format_number(summary.final_error_mean),
        format_number(summary.final_error_std),
        file_name,
    ]


def write_index(rows: Iterable[Sequence[str]], destination: Destination) -> None:
    """
    Write the index of a preset: one line per config with its final error.

    Raises:
        OSError: If the file cannot be written.
    """
    _write_text(_render_rows(INDEX_COLUMNS, rows), destination)
