"""Dependency-free SVG scatter plots of result tables."""
import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=70, right=150, top=30, bottom=50)
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


class MissingColumnError(KeyError):
    """A requested column is not in the table."""


def _num(value):
    try:
        v = float(value)
    except (TypeError, ValueError):
        return None
    return v if math.isfinite(v) else None


def _ticks(lo, hi, count=5):
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


def render_svg_scatter(rows, x_col, y_col, series_col=None, title=""):
    """SVG text for a scatter of ``y_col`` against ``x_col``, one series per ``series_col`` value."""
    columns = set(rows[0]) if rows else set()
    for col in (x_col, y_col) + ((series_col,) if series_col else ()):
        if rows and col not in columns:
            raise MissingColumnError(col)

    series = {}
    for r in rows:
        x, y = _num(r[x_col]), _num(r[y_col])
        if x is None or y is None:
            continue
        key = str(r[series_col]) if series_col else y_col
        series.setdefault(key, []).append((x, y))

    pts = [p for ps in series.values() for p in ps]
    xlo, xhi = (min(p[0] for p in pts), max(p[0] for p in pts)) if pts else (0.0, 1.0)
    ylo, yhi = (min(p[1] for p in pts), max(p[1] for p in pts)) if pts else (0.0, 1.0)
    if xhi == xlo:
        xlo, xhi = xlo - 1, xhi + 1
    if yhi == ylo:
        ylo, yhi = ylo - 1, yhi + 1
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]

    def sx(v):
        return x0 + (v - xlo) / (xhi - xlo) * (x1 - x0)

    def sy(v):
        return y0 + (v - ylo) / (yhi - ylo) * (y1 - y0)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
           f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>']
    for t in _ticks(xlo, xhi):
        out.append(f'<text x="{sx(t):.2f}" y="{y0 + 16}" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(ylo, yhi):
        out.append(f'<text x="{x0 - 6}" y="{sy(t) + 4:.2f}" text-anchor="end">{t:.4g}</text>')
    out.append(f'<text x="{(x0 + x1) / 2:.2f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(x_col)}</text>')
    out.append(f'<text x="16" y="{(y0 + y1) / 2:.2f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {(y0 + y1) / 2:.2f})">{escape(y_col)}</text>')
    if title:
        out.append(f'<text x="{(x0 + x1) / 2:.2f}" y="18" text-anchor="middle">{escape(title)}</text>')
    for i, (key, ps) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        for x, y in ps:
            out.append(f'<circle class="marker" cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3.5" fill="{color}"/>')
        ly = MARGIN["top"] + 16 * i
        out.append(f'<circle cx="{x1 + 20}" cy="{ly}" r="4" fill="{color}"/>')
        out.append(f'<text x="{x1 + 30}" y="{ly + 4}">{escape(key)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg_scatter(rows, x_col, y_col, series_col, path, title=""):
    text = render_svg_scatter(rows, x_col, y_col, series_col, title)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path
