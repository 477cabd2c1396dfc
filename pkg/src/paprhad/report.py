"""Serialization of curve points to CSV, JSON and gnuplot data files."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

__all__ = ["COLUMNS", "ReportError", "format_csv", "format_json", "emit_results", "read_results", "write_gnuplot"]

COLUMNS = ("scheme", "mu", "papr_db", "papr_linear", "rss_mean", "J", "K", "N", "M", "seed", "converged_fraction")
_FLOATS = {"mu", "papr_db", "papr_linear", "rss_mean", "converged_fraction"}
_INTS = {"J", "K", "N", "M", "seed"}


class ReportError(OSError):
    """Writing or reading a results file failed."""


def _fmt(value) -> str:
    return format(float(value), ".17g")


def _row(point) -> dict:
    row = {}
    for name in COLUMNS:
        value = getattr(point, name) if not isinstance(point, dict) else point[name]
        if name in _FLOATS:
            row[name] = _fmt(value)
        elif name in _INTS:
            row[name] = str(int(value))
        else:
            row[name] = str(value)
    return row


def format_csv(points) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    writer.writeheader()
    for p in points:
        writer.writerow(_row(p))
    return buf.getvalue()


def format_json(points) -> str:
    # floats go through the same 17-digit text as the CSV, so both files agree
    records = []
    for p in points:
        row = _row(p)
        records.append({k: (float(v) if k in _FLOATS else int(v) if k in _INTS else v) for k, v in row.items()})
    return json.dumps(records, indent=2) + "\n"


def emit_results(points, fmt: str = "csv", path=None) -> str:
    """Render ``points`` as ``csv`` or ``json`` and write them to ``path`` if given."""
    if fmt == "csv":
        text = format_csv(points)
    elif fmt == "json":
        text = format_json(points)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
        except OSError as exc:
            raise ReportError(f"cannot write results to {path}: {exc.strerror or exc}") from exc
    return text


def _parse(record: dict) -> dict:
    out = {}
    for name in COLUMNS:
        value = record[name]
        out[name] = float(value) if name in _FLOATS else int(value) if name in _INTS else str(value)
    return out


def read_results(path) -> list[dict]:
    """Parse a CSV or JSON results file (chosen by suffix) into row dicts."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ReportError(f"cannot read results from {path}: {exc.strerror or exc}") from exc
    if path.suffix.lower() == ".json":
        return [_parse(r) for r in json.loads(text)]
    return [_parse(r) for r in csv.DictReader(io.StringIO(text))]


def write_gnuplot(points, path) -> None:
    """Two-column ``papr_db rss_mean`` blocks, one per scheme, sorted by PAPR."""
    lines = []
    schemes = []
    for p in points:
        if p.scheme not in schemes:
            schemes.append(p.scheme)
    for scheme in schemes:
        lines.append(f"# {scheme}")
        lines.append("# papr_db rss_mean")
        for p in sorted((q for q in points if q.scheme == scheme), key=lambda q: q.papr_db):
            lines.append(f"{_fmt(p.papr_db)} {_fmt(p.rss_mean)}")
        lines += ["", ""]
    try:
        Path(path).write_text("\n".join(lines))
    except OSError as exc:
        raise ReportError(f"cannot write curve file {path}: {exc.strerror or exc}") from exc
