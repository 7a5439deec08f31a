"""CSV and SVG emitters for experiment results."""

import csv
import io
import math
from xml.sax.saxutils import escape

CSV_COLUMNS = ("method", "t", "mean_lower", "mean_upper", "q95_lower", "q95_upper",
               "miscoverage", "distribution", "truth")
_FLOAT_COLUMNS = CSV_COLUMNS[2:7] + ("truth",)

# one colour per method, cycled
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def _open_for_write(path):
    try:
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _rows(result):
    return result.rows if hasattr(result, "rows") else list(result)


def csv_text(result):
    """Serialise rows with ``repr`` floats so re-parsing is exact."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in _rows(result):
        w.writerow([repr(float(r[c])) if c in _FLOAT_COLUMNS else r[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def emit_csv(result, path):
    """Write the aggregate table; an empty result gives a header-only file."""
    text = csv_text(result)
    with _open_for_write(path) as fh:
        fh.write(text)
    return path


def parse_csv(path_or_text):
    """Read rows written by :func:`emit_csv` (a path or the CSV text itself)."""
    if "\n" in str(path_or_text):
        fh = io.StringIO(path_or_text)
    else:
        fh = open(path_or_text, newline="", encoding="utf-8")
    with fh:
        reader = csv.DictReader(fh)
        missing = set(CSV_COLUMNS[:7]) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"CSV is missing columns {sorted(missing)}")
        rows = []
        for rec in reader:
            row = {"method": rec["method"], "t": int(rec["t"])}
            for c in _FLOAT_COLUMNS:
                if c in rec and rec[c] != "":
                    row[c] = float(rec[c])
            row["distribution"] = rec.get("distribution") or "data"
            rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# SVG

PANEL_W, PANEL_H = 360, 260
MARGIN = dict(left=56, right=16, top=28, bottom=40)


def _fmt(v):
    return f"{v:.2f}"


def _ticks(lo, hi, k=5):
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / (k - 1) for i in range(k)]


def _panel(out, rows, dist, x0, methods, colours):
    w = PANEL_W - MARGIN["left"] - MARGIN["right"]
    h = PANEL_H - MARGIN["top"] - MARGIN["bottom"]
    left, top = x0 + MARGIN["left"], MARGIN["top"]
    ts = sorted({r["t"] for r in rows})
    lx = [math.log10(t) for t in ts]
    xmin, xmax = min(lx), max(lx)
    if xmax == xmin:
        xmin, xmax = xmin - 0.5, xmax + 0.5
    vals = [r[c] for r in rows for c in ("mean_lower", "mean_upper", "q95_lower", "q95_upper")]
    vals += [r["truth"] for r in rows if "truth" in r]
    vals = [v for v in vals if math.isfinite(v)]
    ymin, ymax = min(vals), max(vals)
    if ymax == ymin:
        ymax = ymin + 1.0

    def px(t):
        return left + (math.log10(t) - xmin) / (xmax - xmin) * w

    def py(v):
        return top + (ymax - v) / (ymax - ymin) * h

    out.append(f'<g class="panel" data-distribution="{escape(dist)}">')
    out.append(f'<text x="{_fmt(left + w / 2)}" y="{top - 10}" text-anchor="middle" '
               f'font-size="13">{escape(dist)}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{w}" height="{h}" fill="none" '
               f'stroke="#444"/>')
    for v in _ticks(ymin, ymax):
        out.append(f'<text x="{left - 4}" y="{_fmt(py(v) + 4)}" text-anchor="end" '
                   f'font-size="10">{v:.3g}</text>')
    for e in range(math.ceil(xmin), math.floor(xmax) + 1):
        x = left + (e - xmin) / (xmax - xmin) * w
        out.append(f'<line x1="{_fmt(x)}" y1="{top + h}" x2="{_fmt(x)}" y2="{top + h + 4}" '
                   f'stroke="#444"/>')
        out.append(f'<text x="{_fmt(x)}" y="{top + h + 16}" text-anchor="middle" '
                   f'font-size="10">1e{e}</text>')
    out.append(f'<text x="{_fmt(left + w / 2)}" y="{top + h + 32}" text-anchor="middle" '
               f'font-size="11">t</text>')
    truths = {r["truth"] for r in rows if "truth" in r}
    for tv in truths:
        out.append(f'<line class="truth" x1="{left}" y1="{_fmt(py(tv))}" x2="{left + w}" '
                   f'y2="{_fmt(py(tv))}" stroke="#000" stroke-width="1"/>')
    for m in methods:
        mr = sorted((r for r in rows if r["method"] == m), key=lambda r: r["t"])
        if not mr:
            continue
        col = colours[m]
        for key, cls, dash in (("mean_lower", "bound", None), ("mean_upper", "bound", None),
                               ("q95_lower", "quantile", "4 3"),
                               ("q95_upper", "quantile", "4 3")):
            pts = " ".join(f"{_fmt(px(r['t']))},{_fmt(py(r[key]))}" for r in mr
                           if math.isfinite(r[key]))
            extra = f' stroke-dasharray="{dash}" stroke-width="0.8"' if dash else \
                ' stroke-width="1.6"'
            out.append(f'<polyline class="{cls}" data-method="{escape(m)}" '
                       f'data-series="{key}" points="{pts}" fill="none" '
                       f'stroke="{col}"{extra}/>')
    out.append("</g>")


def svg_text(result):
    rows = _rows(result)
    dists = list(dict.fromkeys(r.get("distribution", "data") for r in rows))
    methods = list(dict.fromkeys(r["method"] for r in rows))
    colours = {m: _PALETTE[i % len(_PALETTE)] for i, m in enumerate(methods)}
    width = PANEL_W * max(len(dists), 1)
    height = PANEL_H + 24
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
           f'<rect width="{width}" height="{height}" fill="#fff"/>']
    for i, d in enumerate(dists):
        _panel(out, [r for r in rows if r.get("distribution", "data") == d], d,
               i * PANEL_W, methods, colours)
    x = 8
    for m in methods:
        out.append(f'<g class="legend"><line x1="{x}" y1="{PANEL_H + 12}" x2="{x + 18}" '
                   f'y2="{PANEL_H + 12}" stroke="{colours[m]}" stroke-width="2"/>'
                   f'<text x="{x + 22}" y="{PANEL_H + 16}" font-size="11">{escape(m)}</text>'
                   f'</g>')
        x += 30 + 7 * len(m)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(result, path):
    """Line chart with one panel per distribution and a log time axis.

    Each method contributes one solid ``polyline.bound`` per mean bound
    and one dashed ``polyline.quantile`` per quantile; the true value is a
    horizontal ``line.truth``.
    """
    text = svg_text(result)
    with _open_for_write(path) as fh:
        fh.write(text)
    return path
