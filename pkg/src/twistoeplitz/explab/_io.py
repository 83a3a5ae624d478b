"""CSV writing shared by the pipeline and the figure scripts."""

from __future__ import annotations

import csv
from pathlib import Path


def write_csv(path: Path, comment: str, columns, rows) -> Path:
    """UTF-8, comma-separated, one ``# ...`` comment line, then a header row."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        fh.write(comment + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
    return Path(path)
