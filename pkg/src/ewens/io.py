"""File helpers for the command-line tools.

Token files hold one token per line; blank lines are skipped so trailing
newlines and spacer lines are harmless.  Tabular data uses RFC-4180 CSV.
All tokens read from disk are strings; callers that need numbers convert
explicitly.
"""

from __future__ import annotations

import csv

__all__ = [
    "read_tokens",
    "write_tokens",
    "read_csv_rows",
    "read_csv_columns",
]


def read_tokens(path) -> list[str]:
    """Read one token per line, skipping blank lines."""
    with open(path, encoding="utf-8") as fh:
        return [line.strip() for line in fh if line.strip()]


def write_tokens(path, tokens) -> None:
    """Write one token per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for tok in tokens:
            fh.write(f"{tok}\n")


def read_csv_rows(path, skip_header: bool = False) -> list[list[str]]:
    """Read CSV rows as lists of string cells.  Fully empty rows are
    dropped; ragged rows are preserved as-is."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh) if any(cell.strip() for cell in row)]
    return rows[1:] if skip_header else rows


def read_csv_columns(path, skip_header: bool = False) -> list[list[str]]:
    """Read CSV and transpose to columns, skipping empty cells so columns
    of unequal length can share a file."""
    rows = read_csv_rows(path, skip_header=skip_header)
    width = max((len(row) for row in rows), default=0)
    return [
        [row[i] for row in rows if i < len(row) and row[i].strip() != ""]
        for i in range(width)
    ]
