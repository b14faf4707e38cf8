"""Deterministic CSV output for curve and table data."""
import csv
import io
import logging
import sys
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from dfock.utils.exceptions import OutputPathError

logger = logging.getLogger(__name__)


def format_value(value, digits: int = 17) -> str:
    """Floats with `digits` significant digits, everything else as str."""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.{digits}g}"
    return str(value)


def render_rows(header: Sequence[str], rows: Iterable[Sequence], digits: int = 17) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(value, digits) for value in row])
    return buffer.getvalue()


def write_rows(
    path: Optional[str],
    header: Sequence[str],
    rows: Iterable[Sequence],
    digits: int = 17,
) -> int:
    """
    Write rows to `path`, or to stdout when path is None or "-".

    Returns the number of data rows written.
    """
    rows = list(rows)
    text = render_rows(header, rows, digits)
    if path is None or path == "-":
        sys.stdout.write(text)
        return len(rows)

    target = Path(path)
    if not target.parent.exists():
        raise OutputPathError(str(target), "parent directory does not exist")
    try:
        with open(target, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as e:
        raise OutputPathError(str(target), str(e))
    logger.info(f"Wrote {len(rows)} rows to {target}")
    return len(rows)


def read_rows(path: str) -> List[dict]:
    """Read a CSV written by `write_rows` back as dictionaries of strings."""
    with open(path, encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))
