"""
Plain-text output helpers. Every float written by the project goes through
format_float so that files round-trip bitwise.
"""
import csv
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def format_float(value: float) -> str:
    """17 significant digits."""
    return f'{float(value):.17g}'


def format_row(values: Iterable) -> list[str]:
    row = []
    for value in values:
        if isinstance(value, (float, np.floating)):
            row.append(format_float(value))
        else:
            row.append(str(value))
    return row


def write_csv(path: Path | str, header: Sequence[str], rows: Iterable[Iterable]) -> Path:
    """Write a CSV file with a header line, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow(format_row(row))
    return path


def write_matrix_csv(path: Path | str, matrix: np.ndarray) -> Path:
    """Row-major dump of a vector or matrix, no header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    with path.open('w', newline='') as handle:
        writer = csv.writer(handle)
        for row in matrix:
            writer.writerow([format_float(v) for v in row])
    return path
