"""Tiny SVG emitters: line charts and box summaries. No plotting dependency."""

from __future__ import annotations

from html import escape

import numpy as np

WIDTH, HEIGHT = 640, 400
MARGIN = 60
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def _scale(lo, hi, out_lo, out_hi):
    span = (hi - lo) or 1.0
    return lambda v: out_lo + (np.asarray(v, dtype=float) - lo) / span * (out_hi - out_lo)


def _frame(title, xlabel, ylabel, body, xlim, ylim) -> str:
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN / 2}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN / 2}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="15" y="{HEIGHT / 2}" text-anchor="middle" transform="rotate(-90 15 {HEIGHT / 2})">'
        f'{escape(ylabel)}</text>',
    ]
    for label, pos in ((xlim[0], MARGIN), (xlim[1], WIDTH - MARGIN / 2)):
        parts.append(f'<text x="{pos}" y="{HEIGHT - MARGIN + 15}" text-anchor="middle">{label:.4g}</text>')
    for label, pos in ((ylim[0], HEIGHT - MARGIN), (ylim[1], MARGIN / 2)):
        parts.append(f'<text x="{MARGIN - 5}" y="{pos + 4}" text-anchor="end">{label:.4g}</text>')
    parts.extend(body)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def line_chart(series, title="", xlabel="", ylabel="", markers=False) -> str:
    """``series`` is a list of ``(xs, ys, label)``."""
    xs_all = np.concatenate([np.asarray(s[0], dtype=float) for s in series])
    ys_all = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    xlim = (xs_all.min(), xs_all.max())
    ylim = (ys_all.min(), ys_all.max())
    fx = _scale(*xlim, MARGIN, WIDTH - MARGIN / 2)
    fy = _scale(*ylim, HEIGHT - MARGIN, MARGIN / 2)
    body = []
    for k, (xs, ys, label) in enumerate(series):
        color = COLORS[k % len(COLORS)]
        points = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(fx(xs), fy(ys)))
        body.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>')
        if markers:
            body.extend(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="3" fill="{color}"/>'
                        for x, y in zip(fx(xs), fy(ys)))
        if label:
            body.append(f'<text x="{WIDTH - MARGIN}" y="{40 + 15 * k}" fill="{color}" '
                        f'text-anchor="end">{escape(str(label))}</text>')
    return _frame(title, xlabel, ylabel, body, xlim, ylim)


def box_summary(groups: dict, title="", ylabel="") -> str:
    """One box (quartiles, median, min/max whiskers) per named group of values."""
    names = list(groups)
    stats = {n: np.percentile(np.asarray(groups[n], dtype=float), [0, 25, 50, 75, 100]) for n in names}
    lo = min(s[0] for s in stats.values())
    hi = max(s[4] for s in stats.values())
    fy = _scale(lo, hi, HEIGHT - MARGIN, MARGIN / 2)
    slot = (WIDTH - 1.5 * MARGIN) / max(len(names), 1)
    body = []
    for k, name in enumerate(names):
        q0, q1, q2, q3, q4 = fy(stats[name])
        cx = MARGIN + slot * (k + 0.5)
        half = slot / 4
        body += [
            f'<line x1="{cx}" y1="{q0:.2f}" x2="{cx}" y2="{q4:.2f}" stroke="black"/>',
            f'<rect x="{cx - half:.2f}" y="{q3:.2f}" width="{2 * half:.2f}" height="{q1 - q3:.2f}" '
            f'fill="{COLORS[k % len(COLORS)]}" fill-opacity="0.4" stroke="black"/>',
            f'<line x1="{cx - half:.2f}" y1="{q2:.2f}" x2="{cx + half:.2f}" y2="{q2:.2f}" stroke="black" stroke-width="2"/>',
            f'<text x="{cx}" y="{HEIGHT - MARGIN + 30}" text-anchor="middle">{escape(str(name))}</text>',
        ]
    return _frame(title, "", ylabel, body, (0, len(names)), (lo, hi))
