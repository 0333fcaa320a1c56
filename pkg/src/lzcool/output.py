"""CSV and standalone SVG emission for experiment tables."""
import csv
import io
import math
import sys
from xml.sax.saxutils import escape

import numpy as np

SIG_DIGITS = 12


def format_number(x):
    """Positional notation, 12 significant digits, locale independent."""
    if isinstance(x, str):
        return x
    x = float(x)
    if not math.isfinite(x):
        return repr(x)
    return np.format_float_positional(x, precision=SIG_DIGITS, unique=False,
                                      fractional=False, trim="k")


def csv_text(table):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([format_number(c) for c in table.columns])
    for row in table.rows:
        writer.writerow([format_number(v) for v in row])
    return buf.getvalue()


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc


def emit_csv(table, path):
    if not table.rows:
        raise ValueError("refusing to write an empty table")
    _write(csv_text(table), path)


def emit_svg(table, path):
    if not table.rows:
        raise ValueError("refusing to write an empty table")
    _write(svg_text(table), path)


# --- SVG -------------------------------------------------------------------

WIDTH, HEIGHT = 640, 440
LEFT, RIGHT, TOP, BOTTOM = 80, 150, 40, 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f")
# viridis anchor colours, low to high
_RAMP = ((68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98),
         (253, 231, 37))


def ramp_colour(u):
    u = min(max(u, 0.0), 1.0) * (len(_RAMP) - 1)
    i = min(int(u), len(_RAMP) - 2)
    f = u - i
    rgb = [round(a + f * (b - a)) for a, b in zip(_RAMP[i], _RAMP[i + 1])]
    return "#%02x%02x%02x" % tuple(rgb)


def _ticks(lo, hi, log):
    if log:
        first, last = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
        ticks = [10.0 ** k for k in range(first, last + 1)]
        return [t for t in ticks if lo * (1 - 1e-9) <= t <= hi * (1 + 1e-9)] or [lo, hi]
    return list(np.linspace(lo, hi, 5))


class _Axis:
    def __init__(self, lo, hi, log, p0, p1):
        if log and lo <= 0:
            log = False
        if hi == lo:
            lo, hi = (lo / 2, lo * 2) if log else (lo - 0.5, hi + 0.5)
        self.lo, self.hi, self.log, self.p0, self.p1 = lo, hi, log, p0, p1

    def __call__(self, x):
        if self.log:
            u = (math.log10(x) - math.log10(self.lo)) / (math.log10(self.hi) - math.log10(self.lo))
        else:
            u = (x - self.lo) / (self.hi - self.lo)
        return self.p0 + u * (self.p1 - self.p0)


def _header(title):
    return [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="22" text-anchor="middle" font-size="14">'
        f'{escape(title)}</text>',
    ]


def _frame(parts, xa, ya, xlabel, ylabel):
    x0, x1, y0, y1 = LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP
    parts.append(f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
                 f'fill="none" stroke="black"/>')
    for t in _ticks(xa.lo, xa.hi, xa.log):
        px = xa(t)
        parts.append(f'<line x1="{px:.2f}" y1="{y0}" x2="{px:.2f}" y2="{y0 + 5}" stroke="black"/>')
        parts.append(f'<text x="{px:.2f}" y="{y0 + 18}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(ya.lo, ya.hi, ya.log):
        py = ya(t)
        parts.append(f'<line x1="{x0 - 5}" y1="{py:.2f}" x2="{x0}" y2="{py:.2f}" stroke="black"/>')
        parts.append(f'<text x="{x0 - 8}" y="{py + 4:.2f}" text-anchor="end">{t:.3g}</text>')
    parts.append(f'<text x="{(x0 + x1) / 2:.1f}" y="{HEIGHT - 15}" '
                 f'text-anchor="middle">{escape(xlabel)}</text>')
    parts.append(f'<text x="18" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
                 f'transform="rotate(-90 18 {(y0 + y1) / 2:.1f})">{escape(ylabel)}</text>')


def _line_svg(table):
    x = table.column(table.x)
    series = []
    groups = table.column(table.group) if table.group else np.zeros(len(x))
    for g in dict.fromkeys(groups.tolist()):
        mask = groups == g
        for y in table.ys:
            label = y if not table.group else f"{table.group}={g:g}"
            if table.group and len(table.ys) > 1:
                label = f"{y}, {label}"
            series.append((label, x[mask], table.column(y)[mask]))
    ys_all = np.concatenate([s[2] for s in series])
    xa = _Axis(float(x.min()), float(x.max()), table.log_x, LEFT, WIDTH - RIGHT)
    ya = _Axis(float(ys_all.min()), float(ys_all.max()), table.log_y,
               HEIGHT - BOTTOM, TOP)
    parts = _header(table.title)
    _frame(parts, xa, ya, table.x, ", ".join(table.ys))
    for k, (label, xs, ys) in enumerate(series):
        colour = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{xa(a):.2f},{ya(b):.2f}" for a, b in zip(xs, ys))
        parts.append(f'<polyline class="series" fill="none" stroke="{colour}" '
                     f'stroke-width="1.5" points="{pts}"/>')
        ly = TOP + 15 + 18 * k
        lx = WIDTH - RIGHT + 10
        parts.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" '
                     f'stroke="{colour}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 25}" y="{ly + 4}">{escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _matrix_svg(table):
    row_vals = np.array([r[0] for r in table.rows], dtype=float)
    col_vals = np.array(table.columns[1:], dtype=float)
    z = np.array([r[1:] for r in table.rows], dtype=float)
    zmin, zmax = float(z.min()), float(z.max())
    span = zmax - zmin or 1.0
    nr, nc = z.shape
    x0, x1, y0, y1 = LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP
    cw, ch = (x1 - x0) / nc, (y0 - y1) / nr
    parts = _header(table.title)
    for i in range(nr):
        for j in range(nc):
            colour = ramp_colour((z[i, j] - zmin) / span)
            parts.append(f'<rect class="cell" x="{x0 + j * cw:.2f}" '
                         f'y="{y0 - (i + 1) * ch:.2f}" width="{cw:.2f}" '
                         f'height="{ch:.2f}" fill="{colour}"><title>'
                         f'{row_vals[i]:g}, {col_vals[j]:g}: {z[i, j]:.4f}</title></rect>')
    # cell centres are equally spaced, so the axes map cell centres
    xa = _Axis(float(col_vals[0]), float(col_vals[-1]), table.log_x,
               x0 + cw / 2, x1 - cw / 2)
    ya = _Axis(float(row_vals[0]), float(row_vals[-1]), table.log_y,
               y0 - ch / 2, y1 + ch / 2)
    row_name, _, col_name = str(table.columns[0]).partition("\\")
    _frame(parts, xa, ya, col_name or "column", row_name)
    # colour bar
    bx = WIDTH - RIGHT + 20
    for k in range(50):
        u = k / 49
        py = y0 - (k + 1) * (y0 - y1) / 50
        parts.append(f'<rect x="{bx}" y="{py:.2f}" width="16" '
                     f'height="{(y0 - y1) / 50 + 0.5:.2f}" fill="{ramp_colour(u)}"/>')
    parts.append(f'<text x="{bx + 22}" y="{y0}">{zmin:.3f}</text>')
    parts.append(f'<text x="{bx + 22}" y="{y1 + 10}">{zmax:.3f}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def svg_text(table):
    if table.layout == "matrix":
        return _matrix_svg(table)
    return _line_svg(table)
