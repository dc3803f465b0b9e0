"""Tables with provenance headers: CSV/JSON writers, a CSV reader, and SVG plots.

CSV layout::

    # key: value          provenance lines, one per key
    col1,col2,...
    1.0,0.25,...          shortest round-trip float repr

Empty cells stand for missing values (skipped sweep points).
"""

from __future__ import annotations

import csv
import io
import json
import math
import numbers
from dataclasses import dataclass, field
from html import escape

__all__ = ["Table", "format_value", "read_table", "render_svg", "table_to_text"]


@dataclass
class Table:
    columns: list[str]
    rows: list[tuple]
    provenance: dict = field(default_factory=dict)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, numbers.Integral):
        return str(int(v))
    if isinstance(v, numbers.Real):
        return repr(float(v))
    return str(v)


def _header_lines(provenance: dict) -> list[str]:
    lines = []
    for key, value in provenance.items():
        text = json.dumps(value) if isinstance(value, (list, tuple, dict)) else str(value)
        lines.append(f"# {key}: {text}".replace("\n", " "))
    return lines


def table_to_text(table: Table, fmt: str = "csv") -> str:
    if fmt == "csv":
        buf = io.StringIO()
        for line in _header_lines(table.provenance):
            buf.write(line + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(table.columns)
        for row in table.rows:
            writer.writerow([format_value(v) for v in row])
        return buf.getvalue()
    if fmt == "json":
        payload = {
            "provenance": table.provenance,
            "columns": table.columns,
            "rows": [list(row) for row in table.rows],
        }
        return json.dumps(payload, indent=1, allow_nan=False) + "\n"
    raise ValueError(f"unsupported table format {fmt!r}")


def _parse_cell(text: str):
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_table(source) -> Table:
    """Parse a CSV written by :func:`table_to_text` (path or text)."""
    if isinstance(source, str) and "\n" in source:
        text = source
    else:
        with open(source) as fh:
            text = fh.read()
    provenance = {}
    body = []
    for line in text.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            provenance[key] = value
        elif line.strip():
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    rows = [tuple(_parse_cell(c) for c in row) for row in reader]
    return Table(columns, rows, provenance)


# ---------------------------------------------------------------- SVG output

_W, _H = 640, 440
_M = dict(left=80, right=30, top=40, bottom=60)
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _span(values):
    lo, hi = min(values), max(values)
    if hi == lo:
        pad = abs(lo) * 0.05 or 1.0
        return lo - pad, hi + pad
    return lo, hi


def _viridis(t: float) -> str:
    # coarse 5-stop viridis-like ramp
    stops = [(68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37)]
    t = min(max(t, 0.0), 1.0) * (len(stops) - 1)
    i = min(int(t), len(stops) - 2)
    f = t - i
    rgb = [round(a + (b - a) * f) for a, b in zip(stops[i], stops[i + 1])]
    return "#%02x%02x%02x" % tuple(rgb)


class _Frame:
    def __init__(self, xs, ys):
        self.x0, self.x1 = _span(xs)
        self.y0, self.y1 = _span(ys)
        self.pw = _W - _M["left"] - _M["right"]
        self.ph = _H - _M["top"] - _M["bottom"]

    def px(self, x):
        return _M["left"] + (x - self.x0) / (self.x1 - self.x0) * self.pw

    def py(self, y):
        return _M["top"] + self.ph - (y - self.y0) / (self.y1 - self.y0) * self.ph

    def axes(self, xlabel, ylabel) -> list[str]:
        out = [
            f'<rect x="{_M["left"]}" y="{_M["top"]}" width="{self.pw}" height="{self.ph}" '
            'fill="none" stroke="black"/>'
        ]
        for t in _ticks(self.x0, self.x1):
            x = self.px(t)
            out.append(f'<line x1="{x:.2f}" y1="{_M["top"] + self.ph}" x2="{x:.2f}" '
                       f'y2="{_M["top"] + self.ph + 5}" stroke="black"/>')
            out.append(f'<text x="{x:.2f}" y="{_M["top"] + self.ph + 20}" '
                       f'text-anchor="middle" font-size="11">{t:.3g}</text>')
        for t in _ticks(self.y0, self.y1):
            y = self.py(t)
            out.append(f'<line x1="{_M["left"] - 5}" y1="{y:.2f}" x2="{_M["left"]}" '
                       f'y2="{y:.2f}" stroke="black"/>')
            out.append(f'<text x="{_M["left"] - 8}" y="{y + 4:.2f}" text-anchor="end" '
                       f'font-size="11">{t:.3g}</text>')
        out.append(f'<text x="{_M["left"] + self.pw / 2}" y="{_H - 15}" text-anchor="middle" '
                   f'font-size="13">{escape(xlabel)}</text>')
        out.append(f'<text x="18" y="{_M["top"] + self.ph / 2}" text-anchor="middle" '
                   f'font-size="13" transform="rotate(-90 18 {_M["top"] + self.ph / 2})">'
                   f'{escape(ylabel)}</text>')
        return out


def _finite_rows(table: Table, cols: list[str]):
    idx = [table.columns.index(c) for c in cols]
    for row in table.rows:
        vals = [row[i] for i in idx]
        if all(isinstance(v, (int, float)) and math.isfinite(v) for v in vals):
            yield vals


def render_svg(table: Table, plot_kind: str, x: str | None = None, y=None,
               value: str | None = None, title: str = "") -> str:
    """Standalone SVG of a table.

    ``lines``: ``x`` against one or more ``y`` columns.  ``heatmap``: cells at
    ``(x, y)`` coloured by ``value``.  ``scatter``: points at ``(x, y)``,
    optionally coloured by ``value``.
    """
    if not table.rows:
        raise ValueError("cannot plot an empty table")
    if plot_kind not in ("lines", "heatmap", "scatter"):
        raise ValueError(f"unknown plot kind {plot_kind!r}")
    x = x or table.columns[0]
    ys = [y] if isinstance(y, str) else list(y or table.columns[1:2])
    body: list[str] = []
    if plot_kind == "lines":
        pts = {c: list(_finite_rows(table, [x, c])) for c in ys}
        allx = [p[0] for c in ys for p in pts[c]]
        ally = [p[1] for c in ys for p in pts[c]]
        if not allx:
            raise ValueError("no finite values to plot")
        fr = _Frame(allx, ally)
        for k, c in enumerate(ys):
            colour = _PALETTE[k % len(_PALETTE)]
            path = " ".join(f"{fr.px(a):.2f},{fr.py(b):.2f}" for a, b in pts[c])
            body.append(f'<polyline points="{path}" fill="none" stroke="{colour}" '
                        'stroke-width="1.5"/>')
            body.append(f'<text x="{_W - _M["right"] - 5}" y="{_M["top"] + 15 + 15 * k}" '
                        f'text-anchor="end" font-size="12" fill="{colour}">{escape(c)}</text>')
        ylabel = ", ".join(ys)
    else:
        cols = [x, ys[0]] + ([value] if value else [])
        pts = list(_finite_rows(table, cols))
        if not pts:
            raise ValueError("no finite values to plot")
        fr = _Frame([p[0] for p in pts], [p[1] for p in pts])
        vals = [p[2] for p in pts] if value else [0.0] * len(pts)
        vlo, vhi = min(vals), max(vals)
        norm = (lambda v: 0.5) if vhi == vlo else (lambda v: (v - vlo) / (vhi - vlo))
        if plot_kind == "heatmap":
            xs = sorted({p[0] for p in pts})
            yv = sorted({p[1] for p in pts})
            hx = 0.5 * ((xs[-1] - xs[0]) / (len(xs) - 1) if len(xs) > 1 else 1.0)
            hy = 0.5 * ((yv[-1] - yv[0]) / (len(yv) - 1) if len(yv) > 1 else 1.0)
            fr.x0, fr.x1 = xs[0] - hx, xs[-1] + hx
            fr.y0, fr.y1 = yv[0] - hy, yv[-1] + hy
            for (a, b, *_), v in zip(pts, vals):
                left, top = fr.px(a - hx), fr.py(b + hy)
                body.append(f'<rect x="{left:.2f}" y="{top:.2f}" '
                            f'width="{fr.px(a + hx) - left:.2f}" '
                            f'height="{fr.py(b - hy) - top:.2f}" fill="{_viridis(norm(v))}"/>')
        else:
            for (a, b, *_), v in zip(pts, vals):
                fill = _viridis(norm(v)) if value else _PALETTE[0]
                body.append(f'<circle cx="{fr.px(a):.2f}" cy="{fr.py(b):.2f}" r="2.5" '
                            f'fill="{fill}"/>')
        if value:
            body.append(f'<text x="{_W - _M["right"]}" y="{_M["top"] - 8}" text-anchor="end" '
                        f'font-size="11">{escape(value)}: {vlo:.4g} .. {vhi:.4g}</text>')
        ylabel = ys[0]
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        "<metadata><![CDATA[",
        *(line.replace("]]>", "]] >") for line in _header_lines(table.provenance)),
        "]]></metadata>",
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if title:
        head.append(f'<text x="{_W / 2}" y="22" text-anchor="middle" font-size="14">'
                    f'{escape(title)}</text>')
    return "\n".join(head + body + fr.axes(x, ylabel) + ["</svg>"]) + "\n"
