"""Small shared helpers for delimiter-separated output files.

All numeric output uses ``repr(float(x))``, the shortest decimal string
that round-trips to the same IEEE double. Rounding is the consumer's job.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def fmt(x) -> str:
    """Full-precision decimal text for one numeric cell."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence], delimiter: str = ",") -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([cell if isinstance(cell, str) else fmt(cell) for cell in row])


def write_matrix(
    path: Path,
    values: np.ndarray,
    row_labels: Sequence[str],
    col_labels: Sequence[str],
    delimiter: str = ",",
    corner: str = "location",
) -> None:
    """Header row of column labels, one row per row label."""
    header = [corner, *col_labels]
    rows = ([label, *row] for label, row in zip(row_labels, values))
    write_rows(path, header, rows, delimiter)


def read_matrix(path: Path, delimiter: str = ",") -> tuple[np.ndarray, tuple[str, ...], tuple[str, ...]]:
    """Inverse of :func:`write_matrix`."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        header = next(reader)
        col_labels = tuple(header[1:])
        row_labels = []
        data = []
        for row in reader:
            if not row:
                continue
            row_labels.append(row[0])
            data.append([float(cell) for cell in row[1:]])
    values = np.asarray(data, dtype=float) if data else np.zeros((0, len(col_labels)))
    return values, tuple(row_labels), col_labels


def read_columns(path: Path, delimiter: str = ",") -> tuple[list[str], list[list[str]]]:
    """Header names and raw string rows of a delimited file."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        header = next(reader)
        rows = [row for row in reader if row]
    return header, rows
