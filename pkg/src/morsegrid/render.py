"""Deterministic SVG drawings of fields, meshes and Morse-Smale complexes.

Minima are blue, saddles green and maxima red.  Output depends only on the
inputs, so the same input always gives byte-identical SVG.
"""

from __future__ import annotations

import numpy as np

from .fields import ScalarGrid
from .grids import TriMesh

COLORS = {0: "#1f4fd8", 1: "#2ca02c", 2: "#d62728", 3: "#d62728"}
SADDLE_3D = "#e6c200"


def _gray(t: float) -> str:
    g = int(round(40 + 200 * min(max(t, 0.0), 1.0)))
    return f"#{g:02x}{g:02x}{g:02x}"


class _Canvas:
    def __init__(self, bounds, size=600, pad=12):
        x0, x1, y0, y1 = bounds
        w = max(x1 - x0, 1e-12)
        h = max(y1 - y0, 1e-12)
        self.s = (size - 2 * pad) / max(w, h)
        self.x0, self.y1 = x0, y1
        self.pad = pad
        self.w = int(round(w * self.s + 2 * pad))
        self.h = int(round(h * self.s + 2 * pad))
        self.items = []

    def xy(self, x, y):
        # y axis points up in data space
        return self.pad + (x - self.x0) * self.s, self.pad + (self.y1 - y) * self.s

    def polygon(self, pts, fill):
        p = " ".join(f"{a:.2f},{b:.2f}" for a, b in (self.xy(x, y) for x, y in pts))
        self.items.append(f'<polygon points="{p}" fill="{fill}" stroke="{fill}" stroke-width="0.3"/>')

    def polyline(self, pts, color, width=1.5):
        p = " ".join(f"{a:.2f},{b:.2f}" for a, b in (self.xy(x, y) for x, y in pts))
        self.items.append(f'<polyline points="{p}" fill="none" stroke="{color}" stroke-width="{width}"/>')

    def circle(self, x, y, r, color):
        a, b = self.xy(x, y)
        self.items.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="{r}" fill="{color}" stroke="black" stroke-width="0.5"/>')

    def svg(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.w}" height="{self.h}" '
                f'viewBox="0 0 {self.w} {self.h}">\n<rect width="100%" height="100%" fill="white"/>\n')
        return head + "".join(i + "\n" for i in self.items) + "</svg>\n"


def _bounds(points):
    if len(points) == 0:
        return (0.0, 1.0, 0.0, 1.0)
    p = np.asarray(points, dtype=float)
    return (float(p[:, 0].min()), float(p[:, 0].max()), float(p[:, 1].min()), float(p[:, 1].max()))


def _draw_field(cv: _Canvas, field):
    if isinstance(field, ScalarGrid):
        if field.ndim != 2:
            raise ValueError("only 2D grids can be drawn")
        v = field.values
        lo, span = v.min(), max(np.ptp(v), 1e-300)
        (ox, oy), (hx, hy) = field.origin, field.spacing
        nx, ny = field.dims
        for i in range(nx - 1):
            for j in range(ny - 1):
                t = (v[i:i + 2, j:j + 2].mean() - lo) / span
                x, y = ox + i * hx, oy + j * hy
                cv.polygon([(x, y), (x + hx, y), (x + hx, y + hy), (x, y + hy)], _gray(t))
    elif isinstance(field, TriMesh):
        v = field.values
        lo, span = v.min(), max(np.ptp(v), 1e-300)
        for tri in field.triangles.tolist():
            cv.polygon(field.points[tri].tolist(), _gray((v[tri].mean() - lo) / span))


def field_bounds(field):
    if isinstance(field, ScalarGrid):
        x0, y0 = field.origin
        x1, y1 = field.upper()
        return (x0, x1, y0, y1)
    return _bounds(field.points)


def render_field(field, size=600) -> str:
    cv = _Canvas(field_bounds(field), size)
    _draw_field(cv, field)
    return cv.svg()


def render_ms(ms, field=None, size=600) -> str:
    """Separatrices as polylines and one marker per critical cell, over an
    optional grayscale field."""
    pts = [cp.coords[:2] for cp in ms.criticals]
    for s in list(ms.separatrices) + list(ms.open_paths):
        pts.extend(np.asarray(s.polyline)[:, :2].tolist())
    bounds = field_bounds(field) if field is not None else _bounds(pts)
    cv = _Canvas(bounds, size)
    if field is not None:
        _draw_field(cv, field)
    for s in ms.separatrices:
        cv.polyline(np.asarray(s.polyline)[:, :2].tolist(), "#000000" if s.index == 1 else "#555555")
    for s in ms.open_paths:
        cv.polyline(np.asarray(s.polyline)[:, :2].tolist(), "#555555")
    for cp in ms.criticals:
        color = SADDLE_3D if (ms.dim == 3 and cp.index == 2) else COLORS[cp.index]
        cv.circle(cp.coords[0], cp.coords[1], 4, color)
    return cv.svg()
