"""Deterministic CSV and number formatting for CLI outputs.

Identical inputs must produce byte-identical files: fixed 12-significant-digit
decimal formatting, explicit newlines, and caller-supplied row order.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Sequence


def fmt(value: float) -> str:
    """Format a number with 12 significant digits; parseable by ``float``."""
    x = float(value)
    if x == 0.0:
        x = 0.0  # normalize -0.0
    return format(x, ".12g")


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> Path:
    """Write a CSV file with a header row and LF newlines.

    Cells are written verbatim; callers format numbers with ``fmt`` and must
    not include commas or newlines in text cells.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path
