"""CSV and SVG output for patches and point sets."""

from __future__ import annotations

import csv
import io

from .geometry import DeloneSet, Patch
from .numerics import CReal

PALETTE = ("#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac")


def interval_pair(x: CReal, digits: int = 30) -> list[str]:
    return list(x.decimal_bounds(digits))


def patch_to_csv(patch: Patch, digits: int = 30) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["index", "letter", "position_lo", "position_hi", "length_lo", "length_hi"])
    for i, t in enumerate(patch.tiles):
        writer.writerow([i, t.letter, *t.position.decimal_bounds(digits), *t.length.decimal_bounds(digits)])
    return buf.getvalue()


def _svg(width: float, height: float, body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2f}" height="{height:.2f}" '
        f'viewBox="0 0 {width:.2f} {height:.2f}">'
    )
    return "\n".join([head, *body, "</svg>", ""])


def patch_to_svg(patch: Patch, scale: float = 20.0, height: float = 30.0, margin: float = 10.0) -> str:
    """One rectangle per tile, coloured by letter index."""
    if not patch.tiles:
        return _svg(2 * margin, 2 * margin, [])
    x0 = float(patch.tiles[0].position.mid)
    body = []
    for t in patch.tiles:
        x = margin + (float(t.position.mid) - x0) * scale
        w = float(t.length.mid) * scale
        colour = PALETTE[t.letter % len(PALETTE)]
        body.append(
            f'  <rect x="{x:.4f}" y="{margin:.2f}" width="{w:.4f}" height="{height:.2f}" '
            f'fill="{colour}" stroke="#222" stroke-width="0.5"><title>[{t.letter}]</title></rect>'
        )
    total = float(patch.span.mid) * scale + 2 * margin
    return _svg(total, height + 2 * margin, body)


def points_to_svg(points: DeloneSet, scale: float = 10.0, margin: float = 10.0) -> str:
    """Tick marks at the points of a Delone set inside its window."""
    W = float(points.window)
    body = [f'  <line x1="{margin}" y1="20" x2="{margin + W * scale:.4f}" y2="20" stroke="#888"/>']
    for p in points.points:
        x = margin + float(p.mid) * scale
        body.append(f'  <line x1="{x:.4f}" y1="10" x2="{x:.4f}" y2="30" stroke="#222"/>')
    return _svg(W * scale + 2 * margin, 40, body)
