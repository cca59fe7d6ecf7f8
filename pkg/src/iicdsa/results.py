"""CSV / JSON serialization of sweep rows."""
from __future__ import annotations

import csv
import io
import json
import math
from typing import List, Sequence

from .harness import CSV_FIELDS, SweepRow
from .model import format_alpha, parse_alpha

INT_FIELDS = {"n", "r", "k", "windows", "seed"}


class ResultsIOError(OSError):
    pass


def _cell(name: str, value):
    if name == "alpha":
        return format_alpha(value)
    if name in INT_FIELDS:
        return str(int(value))
    return f"{float(value):.6g}"


def format_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in rows:
        writer.writerow([_cell(name, getattr(row, name)) for name in CSV_FIELDS])
    return buf.getvalue()


def format_json(rows: Sequence[SweepRow]) -> str:
    records = []
    for row in rows:
        rec = {}
        for name in CSV_FIELDS:
            text = _cell(name, getattr(row, name))
            if name == "alpha":
                rec[name] = int(text) if text != "inf" else "inf"
            elif name in INT_FIELDS:
                rec[name] = int(text)
            else:
                value = float(text)
                rec[name] = value if math.isfinite(value) else text
        records.append(rec)
    return json.dumps(records, indent=1) + "\n"


def write_results(rows: Sequence[SweepRow], fmt: str, path) -> None:
    """Write ``rows`` as ``csv`` or ``json`` to ``path`` (``-`` for stdout)."""
    if not rows:
        raise ValueError("no rows to write")
    if fmt == "csv":
        text = format_csv(rows)
    elif fmt == "json":
        text = format_json(rows)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if str(path) == "-":
        import sys

        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ResultsIOError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _parse_record(rec: dict) -> dict:
    out = {}
    for name in CSV_FIELDS:
        value = rec[name]
        if name == "alpha":
            out[name] = parse_alpha(value)
        elif name in INT_FIELDS:
            out[name] = int(value)
        else:
            out[name] = float(value)
    return out


def read_results(path) -> List[dict]:
    """Parse a file written by :func:`write_results` back into dicts."""
    with open(path, newline="") as fh:
        text = fh.read()
    if text.lstrip().startswith("["):
        return [_parse_record(rec) for rec in json.loads(text)]
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_FIELDS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [_parse_record(rec) for rec in reader]
