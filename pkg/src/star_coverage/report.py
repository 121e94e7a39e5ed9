"""Tabular result emission: CSV (RFC-4180 quoting) and JSON with metadata.

Column conventions: distances carry 6 significant digits, rates 9, and all
numbers use locale-independent decimal points. JSON mirrors the CSV records
and adds a metadata object (seed, tolerances, library version, config echo).
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from contextlib import contextmanager

from . import __version__
from .config import STDOUT_SENTINEL, RunConfig


def format_distance(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return f"{x:#.6g}"  # '#' keeps trailing zeros: always 6 significant digits


def format_rate(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return f"{x:#.9g}"


def format_axis(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return f"{x:g}"


def format_general(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return repr(x)
    return str(x)


def render_csv(header: list[str], rows: list[dict]) -> str:
    """Rows are dicts of already-formatted strings; missing cells print empty."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([row.get(col, "") for col in header])
    return buf.getvalue()


def render_json(records: list[dict], cfg: RunConfig, extra_metadata: dict | None = None) -> str:
    metadata = {
        "library_version": __version__,
        "seed": cfg.mc.seed,
        "tolerances": {
            "quad_rel_tolerance": cfg.quadrature.rel_tolerance,
            "quad_abs_tolerance": cfg.quadrature.abs_tolerance,
            "solver_rate_tolerance": cfg.solver_rate_tolerance,
        },
        "config": cfg.echo(),
    }
    if extra_metadata:
        metadata.update(extra_metadata)
    doc = {"metadata": metadata, "records": records}
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


@contextmanager
def open_output(path: str):
    """'-' writes to stdout; anything else is a regular file path."""
    if path == STDOUT_SENTINEL:
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh
