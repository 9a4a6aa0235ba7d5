"""CSV and SVG writers for experiment artifacts.

Floats are written with 17 significant digits so values round-trip exactly.
Every file starts with ``#`` comment lines carrying the experiment config.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Sequence

import numpy as np

__all__ = ["OutputError", "format_float", "write_csv", "read_csv", "svg_line_plot", "write_text"]


class OutputError(OSError):
    """Writing an artifact failed; the message names the path."""


def format_float(x: float) -> str:
    return f"{float(x):.17g}"


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        # newline="" keeps line endings identical across platforms
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def write_csv(path: Path, header: Sequence[str], columns: Sequence[Sequence[float]], comments: Sequence[str] = ()) -> Path:
    cols = [np.asarray(c) for c in columns]
    if len({len(c) for c in cols}) > 1:
        raise ValueError("CSV columns differ in length")
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in zip(*cols):
        writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else str(v) for v in row])
    return write_text(path, buf.getvalue())


def read_csv(path: Path) -> tuple[list[str], dict[str, np.ndarray], list[str]]:
    """Return (comments, columns by name, header)."""
    comments, body = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("#"):
                comments.append(line[1:].strip())
            else:
                body.append(line)
    rows = list(csv.reader(body))
    header = rows[0]
    data = np.array([[float(v) for v in r] for r in rows[1:]]) if len(rows) > 1 else np.zeros((0, len(header)))
    return comments, {h: data[:, i] for i, h in enumerate(header)}, header


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=raw)
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks


def svg_line_plot(
    series: Sequence[tuple[str, Sequence[float], Sequence[float], float]],
    *,
    title: str = "",
    xlabel: str = "t",
    ylabel: str = "",
    comments: Sequence[str] = (),
    width: int = 720,
    height: int = 420,
) -> str:
    """Render (label, x, y, stroke_width) polylines with axes and a legend."""
    left, right, top, bottom = 70, 20, 40, 50
    pw, ph = width - left - right, height - top - bottom
    xs = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s[2], dtype=float) for s in series])
    finite = np.isfinite(ys)
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = float(ys[finite].min()), float(ys[finite].max())
    if y1 == y0:
        y0, y1 = y0 - 1.0, y1 + 1.0
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    if x1 == x0:
        x1 = x0 + 1.0

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + (y1 - y) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">'
    ]
    for line in comments:
        out.append(f"<!-- {line.replace('--', '- -')} -->")
    out.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>')
    out.append(f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" font-size="15">{title}</text>')
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1"/>')
    for tx in _nice_ticks(x0, x1):
        px = sx(tx)
        out.append(f'<line x1="{px:.2f}" y1="{top + ph}" x2="{px:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{top + ph + 18}" text-anchor="middle" font-family="sans-serif" font-size="11">{tx:g}</text>')
    for ty in _nice_ticks(y0, y1):
        py = sy(ty)
        out.append(f'<line x1="{left - 5}" y1="{py:.2f}" x2="{left}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py + 4:.2f}" text-anchor="end" font-family="sans-serif" font-size="11">{ty:g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle" font-family="sans-serif" font-size="13">{xlabel}</text>')
    out.append(
        f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 16 {top + ph / 2:.1f})">{ylabel}</text>'
    )
    palette = ["#1f4e99", "#c0392b", "#27ae60", "#8e44ad"]
    for k, (label, x, y, stroke) in enumerate(series):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        ok = np.isfinite(y)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x[ok], y[ok]))
        color = palette[k % len(palette)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="{stroke}" points="{pts}"/>')
        ly = top + 16 + 18 * k
        out.append(f'<line x1="{left + pw - 150}" y1="{ly}" x2="{left + pw - 120}" y2="{ly}" stroke="{color}" stroke-width="{stroke}"/>')
        out.append(f'<text x="{left + pw - 114}" y="{ly + 4}" font-family="sans-serif" font-size="12">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
