"""Delimited output: trajectory/report CSVs, gnuplot scripts and the run manifest.

Numbers are written as ``%.16e`` (17 significant digits), enough for doubles
to round-trip exactly, with ``,`` as delimiter and ``.`` as decimal point.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

NUMBER_FORMAT = "%.16e"


def format_value(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return NUMBER_FORMAT % v
    return str(v)


def write_columns(path, columns):
    """Write equal-length named columns as CSV with a header row."""
    names = list(columns)
    data = [np.asarray(columns[n]) for n in names]
    lengths = {len(c) for c in data}
    if len(lengths) != 1:
        raise ValueError(f"columns have different lengths: {sorted(lengths)}")
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in zip(*data):
            writer.writerow([format_value(v) for v in row])
    return path


def write_rows(path, rows):
    """Write a list of dicts sharing the same keys."""
    if not rows:
        raise ValueError("no rows to write")
    names = list(rows[0])
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in rows:
            writer.writerow([format_value(row[n]) for n in names])
    return path


def write_gnuplot(path, csv_path, columns, x, panels, title=""):
    """Script that plots ``panels`` (lists of column names) against ``x``.

    ``columns`` is the CSV header, used to turn names into column numbers.
    Run with ``gnuplot -p <script>``; it reads the CSV next to it.
    """
    index = {name: i + 1 for i, name in enumerate(columns)}
    lines = [
        "# generated by qhe; plots data from the CSV alongside this script",
        "set datafile separator ','",
        "set key autotitle columnhead",
        f"set title '{title}'" if title else "unset title",
        f"set xlabel '{x}'",
    ]
    if len(panels) > 1:
        lines.append(f"set multiplot layout {len(panels)},1")
    data = Path(csv_path).name
    for ys in panels:
        parts = [f"'{data}' using {index[x]}:{index[y]} with lines" for y in ys]
        lines.append("plot " + ", \\\n     ".join(parts))
    if len(panels) > 1:
        lines.append("unset multiplot")
    path = Path(path)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_manifest(path, *, config, version, wall_time, outputs, checks):
    """Written last; refuses to list an output that is missing or empty."""
    missing = [str(p) for p in outputs if not Path(p).is_file() or Path(p).stat().st_size == 0]
    if missing:
        raise RuntimeError(f"outputs missing or empty: {missing}")
    manifest = {
        "tool": "qhe",
        "version": version,
        "config": config,
        "wall_time_s": wall_time,
        "outputs": [str(p) for p in outputs],
        "checks": checks,
        "passed": all(c["passed"] for c in checks.values()),
    }
    path = Path(path)
    path.write_text(json.dumps(manifest, indent=2, default=_json_default) + "\n",
                    encoding="utf-8")
    return path


def _json_default(v):
    if isinstance(v, (np.floating, np.integer, np.bool_)):
        return v.item()
    raise TypeError(f"cannot serialise {type(v).__name__}")
