"""Compositional CSV ingestion and tabular output (17 significant digits, LF line endings)."""

import csv

import numpy as np

from .errors import EmptyFile, NegativePart, ParseError
from .estimator import Dataset
from .simplex import CLAMP_TOL


def fmt(x):
    return f"{float(x):.17g}"


def _rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            yield lineno, row


def ingest_csv(path, closure=True):
    """Read a header-first CSV of compositions into a :class:`Dataset`.

    With ``closure`` each row holds d + 1 nonnegative parts and is divided by
    its sum; the last part is dropped. Without it each row holds d coordinates
    with sum at most 1.
    """
    it = _rows(path)
    try:
        _, header = next(it)
    except StopIteration:
        raise EmptyFile(f"{path} is empty") from None
    width = len(header)
    pts = []
    for lineno, row in it:
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != width:
            raise ParseError(lineno, f"expected {width} fields, got {len(row)}")
        try:
            vals = np.array([float(c) for c in row])
        except ValueError as exc:
            raise ParseError(lineno, str(exc)) from None
        if not np.all(np.isfinite(vals)):
            raise ParseError(lineno, "non-finite value")
        if np.any(vals < 0):
            raise NegativePart(lineno, f"negative part {vals.min()!r}")
        if closure:
            total = vals.sum()
            if not total > 0:
                raise ParseError(lineno, "parts sum to zero")
            vals = vals[:-1] / total
        elif vals.sum() > 1 + CLAMP_TOL:
            raise ParseError(lineno, f"coordinates sum to {vals.sum()!r} > 1")
        pts.append(vals)
    if not pts:
        raise EmptyFile(f"{path} has no data rows")
    if closure and width < 2:
        raise ParseError(1, "closure needs at least two parts per row")
    return Dataset(np.array(pts))


def write_table(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])


def write_parts(path, points):
    """Write points of S as d + 1 closed parts, the last being 1 - |s|_1."""
    pts = np.atleast_2d(points)
    d = pts.shape[1]
    parts = np.column_stack([pts, np.clip(1.0 - pts.sum(axis=1), 0.0, None)])
    write_table(path, [f"p{k + 1}" for k in range(d + 1)], parts.tolist())


def write_grid(path, nodes, values, name="fhat"):
    d = nodes.shape[1]
    rows = np.column_stack([nodes, values]).tolist()
    write_table(path, [f"s{k + 1}" for k in range(d)] + [name], rows)
