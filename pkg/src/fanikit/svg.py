"""Minimal SVG views of rank-2 complexes and amoeba scatter overlays."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .dual import DualComplex
from .tropical import TropicalComplex

SIZE = 480
PAD = 24


class _Canvas:
    def __init__(self, box: tuple[float, float, float, float]):
        self.x0, self.y0, self.x1, self.y1 = box
        self.items: list[str] = []

    def map(self, p) -> tuple[float, float]:
        sx = (SIZE - 2 * PAD) / (self.x1 - self.x0)
        sy = (SIZE - 2 * PAD) / (self.y1 - self.y0)
        return PAD + (float(p[0]) - self.x0) * sx, SIZE - PAD - (float(p[1]) - self.y0) * sy

    def clip_ray(self, p, r) -> tuple[float, float]:
        # far enough to leave the box
        span = max(self.x1 - self.x0, self.y1 - self.y0) * 2
        n = float(np.hypot(float(r[0]), float(r[1])))
        return float(p[0]) + span * float(r[0]) / n, float(p[1]) + span * float(r[1]) / n

    def line(self, a, b, stroke="#222", width=2.0):
        (x1, y1), (x2, y2) = self.map(a), self.map(b)
        self.items.append(f'<line x1="{x1:.3f}" y1="{y1:.3f}" x2="{x2:.3f}" y2="{y2:.3f}" '
                          f'stroke="{stroke}" stroke-width="{width}"/>')

    def dot(self, p, r=3.0, fill="#222"):
        x, y = self.map(p)
        self.items.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{r}" fill="{fill}"/>')

    def polygon(self, pts, fill="#cde", opacity=0.5):
        s = " ".join("%.3f,%.3f" % self.map(p) for p in pts)
        self.items.append(f'<polygon points="{s}" fill="{fill}" fill-opacity="{opacity}" stroke="none"/>')

    def text(self, p, label: str):
        x, y = self.map(p)
        self.items.append(f'<text x="{x + 4:.3f}" y="{y - 4:.3f}" font-size="10">{_escape(label)}</text>')

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
                f'viewBox="0 0 {SIZE} {SIZE}">\n<rect x="{PAD}" y="{PAD}" width="{SIZE - 2 * PAD}" '
                f'height="{SIZE - 2 * PAD}" fill="none" stroke="#bbb"/>\n')
        return head + "\n".join(self.items) + "\n</svg>\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _box(points, margin=1.0) -> tuple[float, float, float, float]:
    pts = np.array([[float(a) for a in p] for p in points]) if points else np.zeros((1, 2))
    lo, hi = pts.min(axis=0) - margin, pts.max(axis=0) + margin
    return lo[0], lo[1], hi[0], hi[1]


def _draw_cells(cv: _Canvas, cells, labels: bool):
    for c in cells:
        if c.dim == 2:
            continue
        if c.dim == 0:
            cv.dot(c.vertices[0])
            if labels:
                cv.text(c.vertices[0], str(c.label))
        elif c.rays:
            p0 = c.vertices[0] if c.vertices else None
            if p0 is None:
                continue
            for r in c.rays:
                cv.line(p0, cv.clip_ray(p0, r))
        elif len(c.vertices) == 2:
            cv.line(*c.vertices)


def complex_svg(cx: DualComplex | TropicalComplex, labels: bool = True, overlay: np.ndarray | None = None,
                box=None) -> str:
    dim = cx.ambient if isinstance(cx, DualComplex) else cx.dim
    if dim != 2:
        raise ValueError("SVG output is only available in rank 2")
    verts = [v for c in cx.cells for v in c.vertices]
    cv = _Canvas(box or _box(verts, margin=1.5))
    for c in cx.cells:
        if c.dim == 2 and len(c.vertices) >= 3 and not c.rays:
            cv.polygon(_ccw(c.vertices))
    if overlay is not None and len(overlay):
        for p in overlay:
            cv.dot(p, r=1.0, fill="#c33")
    _draw_cells(cv, cx.cells, labels)
    return cv.render()


def _ccw(pts: Sequence) -> list:
    P = np.array([[float(a) for a in p] for p in pts])
    c = P.mean(axis=0)
    order = np.argsort(np.arctan2(P[:, 1] - c[1], P[:, 0] - c[0]))
    return [pts[i] for i in order]


def scatter_svg(PC: TropicalComplex, points: np.ndarray, box=(-2.0, -2.0, 2.0, 2.0)) -> str:
    """Rescaled amoeba samples drawn over the tropical complex."""
    return complex_svg(PC, labels=False, overlay=points, box=box)
