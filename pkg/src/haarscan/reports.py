"""CSV and SVG report emission for benchmark and evaluation sweeps.

CSV files are RFC 4180 (header row, CRLF); plots are self-contained
SVG 1.1 documents on a fixed 800x600 viewBox with exactly one polyline
carrying the data series, axes drawn as plain lines.
"""

from __future__ import annotations

import csv
import math
import os
from fractions import Fraction
from typing import Mapping, Sequence

from .evaluate import BenchRow, RocCurve

_SVG_W, _SVG_H = 800, 600
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 80, 40, 50, 70


def format_number(value) -> str:
    """Compact numeric formatting: integral values lose the decimal
    point, everything else keeps repr precision."""
    if value is None:
        return ""
    if isinstance(value, Fraction):
        value = float(value)
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if value == int(value):
            return str(int(value))
        return repr(value)
    return str(value)


def write_csv(path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(v) if not isinstance(v, str) else v
                             for v in row])


# ---------------------------------------------------------------------------
# SVG line plot

def _esc(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))


def line_plot_svg(title: str, x_label: str, y_label: str,
                  points: Sequence[tuple[float, float]],
                  x_range: tuple[float, float] | None = None,
                  y_range: tuple[float, float] | None = None) -> str:
    """A single-series line plot: one polyline, axes, min/max tick labels."""
    if not points:
        raise ValueError("cannot plot an empty series")
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x_lo, x_hi = x_range if x_range else (min(xs), max(xs))
    y_lo, y_hi = y_range if y_range else (0.0, max(max(ys), 1e-9))
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    px_l, px_r = _MARGIN_L, _SVG_W - _MARGIN_R
    py_t, py_b = _MARGIN_T, _SVG_H - _MARGIN_B

    def sx(x: float) -> float:
        return px_l + (x - x_lo) / (x_hi - x_lo) * (px_r - px_l)

    def sy(y: float) -> float:
        return py_b - (y - y_lo) / (y_hi - y_lo) * (py_b - py_t)

    coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in points)
    tick = format_number
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}" width="{_SVG_W}" height="{_SVG_H}">',
        f'<rect x="0" y="0" width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
        f'<text x="{_SVG_W / 2:.0f}" y="28" text-anchor="middle" '
        f'font-family="sans-serif" font-size="18">{_esc(title)}</text>',
        # axes
        f'<line x1="{px_l}" y1="{py_b}" x2="{px_r}" y2="{py_b}" '
        f'stroke="black" stroke-width="1"/>',
        f'<line x1="{px_l}" y1="{py_t}" x2="{px_l}" y2="{py_b}" '
        f'stroke="black" stroke-width="1"/>',
        # axis labels
        f'<text x="{(px_l + px_r) / 2:.0f}" y="{_SVG_H - 20}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{_esc(x_label)}</text>',
        f'<text x="24" y="{(py_t + py_b) / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14" '
        f'transform="rotate(-90 24 {(py_t + py_b) / 2:.0f})">{_esc(y_label)}</text>',
        # min/max tick labels
        f'<text x="{px_l}" y="{py_b + 20}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{_esc(tick(x_lo))}</text>',
        f'<text x="{px_r}" y="{py_b + 20}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{_esc(tick(x_hi))}</text>',
        f'<text x="{px_l - 8}" y="{py_b + 4}" text-anchor="end" '
        f'font-family="sans-serif" font-size="12">{_esc(tick(y_lo))}</text>',
        f'<text x="{px_l - 8}" y="{py_t + 4}" text-anchor="end" '
        f'font-family="sans-serif" font-size="12">{_esc(tick(y_hi))}</text>',
        # the data series
        f'<polyline fill="none" stroke="#1f6fb2" stroke-width="2" '
        f'points="{coords}"/>',
    ]
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# report bundle

def emit_report(out_dir,
                bench_rows: Sequence[BenchRow] | None = None,
                accuracy_by_sf: Mapping[float, Fraction | None] | None = None,
                auc_by_sf: Mapping[float, Fraction | None] | None = None,
                curves_by_sf: Mapping[float, RocCurve] | None = None,
                ) -> tuple[list[str], list[str]]:
    """Write the CSV/SVG artifacts for whichever inputs are given.

    Returns (written paths, warnings). Undefined metric values are
    skipped with a warning rather than plotted as 0.
    """
    os.makedirs(out_dir, exist_ok=True)
    written: list[str] = []
    warnings: list[str] = []

    def emit(name: str, content_writer) -> None:
        path = os.path.join(out_dir, name)
        content_writer(path)
        written.append(path)

    if bench_rows is not None:
        rows = [(r.sf, r.mean_fps) for r in bench_rows]
        emit("speed_vs_sf.csv",
             lambda p: write_csv(p, ["sf", "mean_fps"], rows))
        subj_rows = [(r.sf, subject, fps)
                     for r in bench_rows
                     for subject, fps in sorted(r.per_subject_fps.items())]
        emit("speed_per_subject.csv",
             lambda p: write_csv(p, ["sf", "subject", "fps"], subj_rows))
        emit("speed_vs_sf.svg",
             lambda p: _write_text(p, line_plot_svg(
                 "Processing speed vs scale factor", "scale factor", "mean fps",
                 [(float(sf), float(fps)) for sf, fps in rows])))

    for metric, mapping in (("accuracy", accuracy_by_sf), ("auc", auc_by_sf)):
        if mapping is None:
            continue
        defined = [(float(sf), mapping[sf]) for sf in sorted(mapping)
                   if mapping[sf] is not None]
        skipped = [sf for sf in sorted(mapping) if mapping[sf] is None]
        for sf in skipped:
            warnings.append(f"{metric} undefined at sf={format_number(sf)}; skipped")
        emit(f"{metric}_vs_sf.csv",
             lambda p, d=defined: write_csv(p, ["sf", metric], d))
        if defined:
            emit(f"{metric}_vs_sf.svg",
                 lambda p, d=defined: _write_text(p, line_plot_svg(
                     f"{metric} vs scale factor", "scale factor", metric,
                     [(sf, float(v)) for sf, v in d], y_range=(0.0, 1.0))))
        else:
            warnings.append(f"no defined {metric} values; plot skipped")

    if curves_by_sf is not None:
        if not curves_by_sf:
            warnings.append("no ROC curves to write")
        for sf in sorted(curves_by_sf):
            curve = curves_by_sf[sf]
            tag = format_number(float(sf))
            emit(f"roc_sf{tag}.csv",
                 lambda p, c=curve: write_csv(
                     p, ["fpr", "tpr", "threshold"],
                     [(pt.fpr, pt.tpr, pt.threshold) for pt in c]))
            emit(f"roc_sf{tag}.svg",
                 lambda p, c=curve, t=tag: _write_text(p, line_plot_svg(
                     f"ROC at scale factor {t}", "fpr", "tpr",
                     [(float(pt.fpr), float(pt.tpr)) for pt in c],
                     x_range=(0.0, 1.0), y_range=(0.0, 1.0))))

    return written, warnings


def _write_text(path, content: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(content)
