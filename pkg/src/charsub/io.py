"""Deterministic file output: CSV tables, static SVG line charts, atomic writes."""
from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def csv_text(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def write_csv(path, rows) -> None:
    write_atomic(path, csv_text(rows))


def _num(s: str):
    try:
        return float(s)
    except ValueError:
        return None


def svg_from_csv(text: str, x_col: str = "n", y_cols=None, title: str = "",
                 log_x: bool = True, width: int = 640, height: int = 400) -> str:
    """Static line chart of y_cols against x_col.  A pure function of the CSV text."""
    import math

    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    xi = header.index(x_col)
    y_cols = y_cols or [h for h in header if h != x_col][-1:]
    series = []
    for name in y_cols:
        yi = header.index(name)
        pts = []
        for r in body:
            x, y = _num(r[xi]), _num(r[yi])
            if x is None or y is None or (log_x and x <= 0) or not math.isfinite(y):
                continue
            pts.append((math.log10(x) if log_x else x, y))
        series.append((name, pts))
    allpts = [p for _, pts in series for p in pts] or [(0.0, 0.0)]
    x0, x1 = min(p[0] for p in allpts), max(p[0] for p in allpts)
    y0, y1 = min(0.0, min(p[1] for p in allpts)), max(p[1] for p in allpts)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    m = 50
    sx = lambda x: m + (x - x0) / (x1 - x0) * (width - 2 * m)
    sy = lambda y: height - m - (y - y0) / (y1 - y0) * (height - 2 * m)
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>',
           f'<text x="{width // 2}" y="20" text-anchor="middle" font-size="14">{_esc(title)}</text>',
           f'<line x1="{m}" y1="{height - m}" x2="{width - m}" y2="{height - m}" stroke="black"/>',
           f'<line x1="{m}" y1="{m}" x2="{m}" y2="{height - m}" stroke="black"/>',
           f'<text x="{width // 2}" y="{height - 10}" text-anchor="middle" font-size="12">'
           f'{"log10 " if log_x else ""}{_esc(x_col)}</text>',
           f'<text x="{m - 5}" y="{height - m}" text-anchor="end" font-size="10">{y0:.3g}</text>',
           f'<text x="{m - 5}" y="{m + 4}" text-anchor="end" font-size="10">{y1:.3g}</text>',
           f'<text x="{m}" y="{height - m + 14}" text-anchor="middle" font-size="10">{x0:.3g}</text>',
           f'<text x="{width - m}" y="{height - m + 14}" text-anchor="middle" font-size="10">{x1:.3g}</text>']
    for i, (name, pts) in enumerate(series):
        color = colors[i % len(colors)]
        if pts:
            path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{path}"/>')
        out.append(f'<text x="{width - m}" y="{m + 14 * i}" text-anchor="end" font-size="11" '
                   f'fill="{color}">{_esc(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _esc(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
