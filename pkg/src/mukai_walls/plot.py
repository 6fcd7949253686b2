"""SVG pictures of walls on a plane ``eta = origin + x direction``, ``t = sqrt(s/(H^2))``.

Wall data stay exact until the final conversion to pixel coordinates.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .mukai_core import NSClass, SurfaceData
from .wall_engine import WallEquation

WIDTH, HEIGHT, MARGIN = 640, 400, 40
SAMPLES = 400
COLORS = {"category": "#c0392b", "stability": "#2c6fbb"}


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def _conic_points(eq: WallEquation, surface: SurfaceData, origin: NSClass, direction: NSClass,
                  x_lo: Fraction, x_hi: Fraction) -> list[list[tuple[Fraction, Fraction]]]:
    """Runs of ``(x, t^2)`` along the wall, split where ``t^2 < 0``."""
    h2 = surface.H_sq
    geom = eq.geometry(surface)
    runs, run = [], []
    for i in range(SAMPLES + 1):
        x = x_lo + (x_hi - x_lo) * Fraction(i, SAMPLES)
        eta = origin + x * direction
        t_sq = (geom.radius_sq + surface.square(eta - geom.center)) / h2
        if t_sq >= 0:
            run.append((x, t_sq))
        elif run:
            runs.append(run)
            run = []
    if run:
        runs.append(run)
    return runs


def render_svg(walls: Sequence[tuple[str, str, WallEquation]], surface: SurfaceData, origin: NSClass,
               direction: NSClass, x_range: tuple[Fraction, Fraction], t_max: Fraction) -> str:
    """Deterministic SVG text; ``walls`` holds ``(kind, label, equation)``."""
    x_lo, x_hi = x_range
    span_x = float(x_hi - x_lo)
    t_top = float(t_max)

    def px(x) -> float:
        return MARGIN + (float(x) - float(x_lo)) / span_x * (WIDTH - 2 * MARGIN)

    def py(t: float) -> float:
        return HEIGHT - MARGIN - t / t_top * (HEIGHT - 2 * MARGIN)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<line x1="{MARGIN}" y1="{_fmt(py(0))}" x2="{WIDTH - MARGIN}" y2="{_fmt(py(0))}" stroke="black"/>',
           f'<text x="{MARGIN}" y="{HEIGHT - 10}" font-size="12">x = {x_lo}</text>',
           f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - 10}" font-size="12" text-anchor="end">x = {x_hi}</text>',
           f'<text x="10" y="{MARGIN - 10}" font-size="12">t = sqrt(s/(H^2)), t max = {t_max}</text>']
    for kind, label, eq in walls:
        color = COLORS.get(kind, "black")
        if eq.P == 0:
            k = surface.form(direction, eq.w)
            if k == 0:
                continue
            x0 = (eq.A - surface.form(origin, eq.w)) / k
            if not x_lo <= x0 <= x_hi:
                continue
            out.append(f'<line x1="{_fmt(px(x0))}" y1="{_fmt(py(0))}" x2="{_fmt(px(x0))}" y2="{_fmt(py(t_top))}" '
                       f'stroke="{color}" data-label="{label}"/>')
            continue
        for run in _conic_points(eq, surface, origin, direction, x_lo, x_hi):
            pts = " ".join(f"{_fmt(px(x))},{_fmt(py(min(math.sqrt(float(t_sq)), t_top)))}" for x, t_sq in run)
            out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" data-label="{label}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
