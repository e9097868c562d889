"""Triangle grids built from scalar grids, and their edge statistics.

Contains a self-contained incremental Delaunay triangulation (Bowyer-Watson
with ghost triangles and adaptive-precision predicates), Poisson-disc
point sets, and the per-cell subdivision that adds edge midpoints and one
random interior point to every cell.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .complex import CellComplex, _cubical_blocks
from .fields import Rng, ScalarGrid


@dataclass
class TriMesh:
    """Planar triangle mesh with one scalar value per vertex.

    ``parent`` and ``tri_cell`` are optional provenance arrays: the uniform
    grid cell id each vertex / triangle came from (set by
    :func:`subdivide_suggested`).
    """

    points: np.ndarray
    values: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray = None
    parent: Optional[np.ndarray] = field(default=None, repr=False)
    tri_cell: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64).reshape(-1, 2)
        n = len(self.points)
        if self.values is None:
            self.values = np.zeros(n)
        self.values = np.asarray(self.values, dtype=np.float64).reshape(n)
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        if self.triangles.size and (self.triangles.min() < 0 or self.triangles.max() >= n):
            raise ValueError("triangle references a missing vertex")
        if self.boundary is None:
            self.boundary = boundary_vertices(n, self.triangles)
        self.boundary = np.asarray(self.boundary, dtype=bool).reshape(n)

    @property
    def vertices(self) -> np.ndarray:
        """(x, y, value) rows."""
        return np.column_stack([self.points, self.values])

    @property
    def n_vertices(self) -> int:
        return len(self.points)

    def edges(self) -> np.ndarray:
        return mesh_edges(self.triangles)

    def euler(self) -> int:
        return self.n_vertices - len(self.edges()) + len(self.triangles)

    def signed_areas(self) -> np.ndarray:
        p = self.points[self.triangles]
        return 0.5 * ((p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1])
                      - (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0]))

    def with_values(self, values) -> "TriMesh":
        return TriMesh(self.points, values, self.triangles, self.boundary, self.parent, self.tri_cell)

    def __eq__(self, other):
        if not isinstance(other, TriMesh):
            return NotImplemented
        return (np.array_equal(self.points, other.points) and np.array_equal(self.values, other.values)
                and np.array_equal(self.triangles, other.triangles)
                and np.array_equal(self.boundary, other.boundary))


@dataclass
class Histogram:
    bin_edges: np.ndarray
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(np.sum(self.counts))

    def nonzero_bins(self) -> int:
        return int(np.count_nonzero(self.counts))


def mesh_edges(triangles) -> np.ndarray:
    t = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    return np.unique(np.sort(e, axis=1), axis=0)


def boundary_vertices(n: int, triangles) -> np.ndarray:
    """Vertices on edges that belong to exactly one triangle."""
    t = np.asarray(triangles, dtype=np.int64).reshape(-1, 3)
    e = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
    u, cnt = np.unique(e, axis=0, return_counts=True)
    flags = np.zeros(n, dtype=bool)
    flags[u[cnt == 1].ravel()] = True
    return flags


# ---------------------------------------------------------------------------
# predicates (float filter, exact fallback)

_EPS = 2.0 ** -53
_CCW_BOUND = (3.0 + 16.0 * _EPS) * _EPS
_ICC_BOUND = (10.0 + 96.0 * _EPS) * _EPS


def orient(ax, ay, bx, by, cx, cy) -> int:
    """Sign of twice the signed area of (a, b, c): 1 if counter-clockwise."""
    l = (ax - cx) * (by - cy)
    r = (ay - cy) * (bx - cx)
    det = l - r
    bound = _CCW_BOUND * (abs(l) + abs(r))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    F = Fraction
    det = (F(ax) - F(cx)) * (F(by) - F(cy)) - (F(ay) - F(cy)) * (F(bx) - F(cx))
    return (det > 0) - (det < 0)


def incircle(ax, ay, bx, by, cx, cy, dx, dy) -> int:
    """1 if d lies strictly inside the circle through counter-clockwise a, b, c."""
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    bc = bdx * cdy - cdx * bdy
    ca = cdx * ady - adx * cdy
    ab = adx * bdy - bdx * ady
    det = alift * bc + blift * ca + clift * ab
    perm = (alift * (abs(bdx * cdy) + abs(cdx * bdy)) + blift * (abs(cdx * ady) + abs(adx * cdy))
            + clift * (abs(adx * bdy) + abs(bdx * ady)))
    bound = _ICC_BOUND * perm
    if det > bound:
        return 1
    if -det > bound:
        return -1
    F = Fraction
    adx, ady = F(ax) - F(dx), F(ay) - F(dy)
    bdx, bdy = F(bx) - F(dx), F(by) - F(dy)
    cdx, cdy = F(cx) - F(dx), F(cy) - F(dy)
    det = ((adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
           + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
           + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady))
    return (det > 0) - (det < 0)


# ---------------------------------------------------------------------------
# Delaunay triangulation

_GHOST = -1


def _spatial_order(pts: np.ndarray) -> np.ndarray:
    """Insertion order along a Hilbert curve so point location walks stay short."""
    n = len(pts)
    if n < 64:
        return np.arange(n)
    lo = pts.min(axis=0)
    span = max(float((pts.max(axis=0) - lo).max()), 1e-300)
    side = 1 << 16
    q = np.minimum(((pts - lo) / span * (side - 1)).astype(np.int64), side - 1)
    x, y = q[:, 0].copy(), q[:, 1].copy()
    d = np.zeros(n, dtype=np.int64)
    s = side >> 1
    while s > 0:
        rx = (x & s) > 0
        ry = (y & s) > 0
        d += s * s * ((3 * rx) ^ ry)
        # rotate quadrant
        flip = ~ry
        swap_x = np.where(flip & rx, s - 1 - x, x)
        swap_y = np.where(flip & rx, s - 1 - y, y)
        x = np.where(flip, swap_y, x)
        y = np.where(flip, swap_x, y)
        s >>= 1
    return np.argsort(d, kind="stable")


class _Triangulation:
    """Triangles as vertex triples with neighbour triples; neighbour ``j`` is
    across the edge opposite vertex ``j``.  Every triple is counter-clockwise
    as a cycle.  Hull edges are closed by ghost triangles ``(q, r, -1)``
    whose outside lies to the left of ``q -> r``."""

    def __init__(self, xs, ys):
        self.x = xs
        self.y = ys
        self.tv = []
        self.tn = []
        self.alive = []
        self.free = []
        self.last = 0

    def _new(self, a, b, c):
        # keep the ghost vertex last
        if a == _GHOST:
            a, b, c = b, c, a
        elif b == _GHOST:
            a, b, c = c, a, b
        if self.free:
            t = self.free.pop()
            self.tv[t] = [a, b, c]
            self.tn[t] = [-1, -1, -1]
            self.alive[t] = True
        else:
            t = len(self.tv)
            self.tv.append([a, b, c])
            self.tn.append([-1, -1, -1])
            self.alive.append(True)
        return t

    def _link(self, new, outside=()):
        """Connect triangles in ``new`` to each other and to ``outside``."""
        edges = {}
        for t in list(new) + list(outside):
            v = self.tv[t]
            for j in range(3):
                edges[(v[(j + 1) % 3], v[(j + 2) % 3])] = (t, j)
        for t in new:
            v = self.tv[t]
            for j in range(3):
                n, k = edges[(v[(j + 2) % 3], v[(j + 1) % 3])]
                self.tn[t][j] = n
                self.tn[n][k] = t

    def start(self, a, b, c):
        x, y = self.x, self.y
        if orient(x[a], y[a], x[b], y[b], x[c], y[c]) < 0:
            b, c = c, b
        t = self._new(a, b, c)
        ghosts = [self._new(b, a, _GHOST), self._new(c, b, _GHOST), self._new(a, c, _GHOST)]
        self._link([t] + ghosts)
        self.last = t

    def _contains_circle(self, t, px, py) -> bool:
        a, b, c = self.tv[t]
        x, y = self.x, self.y
        if c == _GHOST:
            o = orient(x[a], y[a], x[b], y[b], px, py)
            if o != 0:
                return o > 0
            # on the hull line: inside iff strictly between a and b
            return ((px - x[a]) * (x[b] - x[a]) + (py - y[a]) * (y[b] - y[a]) > 0
                    and (px - x[b]) * (x[a] - x[b]) + (py - y[b]) * (y[a] - y[b]) > 0)
        return incircle(x[a], y[a], x[b], y[b], x[c], y[c], px, py) > 0

    def locate(self, px, py) -> int:
        """Triangle containing the point, or a ghost whose outside holds it."""
        x, y = self.x, self.y
        t = self.last
        if not self.alive[t] or self.tv[t][2] == _GHOST:
            t = next(i for i, (v, a) in enumerate(zip(self.tv, self.alive)) if a and v[2] != _GHOST)
        k = 0
        while True:
            v = self.tv[t]
            if v[2] == _GHOST:
                return t
            k += 1
            for i in range(3):
                j = (i + k) % 3
                a = v[(j + 1) % 3]
                b = v[(j + 2) % 3]
                if orient(x[a], y[a], x[b], y[b], px, py) < 0:
                    t = self.tn[t][j]
                    break
            else:
                return t

    def insert(self, p):
        px, py = self.x[p], self.y[p]
        t0 = self.locate(px, py)
        tv, tn = self.tv, self.tn
        if tv[t0][2] != _GHOST:
            for v in tv[t0]:
                if self.x[v] == px and self.y[v] == py:
                    raise ValueError(f"duplicate point {p} at ({px}, {py})")
        cavity = {t0}
        stack = [t0]
        boundary = []
        while stack:
            t = stack.pop()
            for j in range(3):
                n = tn[t][j]
                if n in cavity:
                    continue
                if self._contains_circle(n, px, py):
                    cavity.add(n)
                    stack.append(n)
                else:
                    boundary.append((tv[t][(j + 1) % 3], tv[t][(j + 2) % 3], n))
        for t in cavity:
            self.alive[t] = False
            self.free.append(t)
        new = [self._new(u, v, p) for u, v, _ in boundary]
        self._link(new, {n for _, _, n in boundary})
        self.last = new[0]

    def real_triangles(self):
        return [v for v, a in zip(self.tv, self.alive) if a and v[2] != _GHOST]


def delaunay(points, values=None) -> TriMesh:
    """Delaunay triangulation of planar points.

    Triangles are counter-clockwise and cover the convex hull.  Points on a
    common circle are resolved by insertion order (the result is one of the
    valid Delaunay triangulations).

    Raises
    ------
    ValueError
        With fewer than three points, duplicate points, or all points collinear.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    n = len(pts)
    if n < 3:
        raise ValueError("need at least 3 points")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points must be finite")
    order = _spatial_order(pts).tolist()
    xs = pts[:, 0].tolist()
    ys = pts[:, 1].tolist()
    a, b = order[0], order[1]
    if xs[a] == xs[b] and ys[a] == ys[b]:
        raise ValueError(f"duplicate point {b}")
    c_pos = None
    for i in range(2, n):
        c = order[i]
        if orient(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c]) != 0:
            c_pos = i
            break
    if c_pos is None:
        raise ValueError("all points are collinear")
    tri = _Triangulation(xs, ys)
    tri.start(a, b, order[c_pos])
    for i in range(2, n):
        if i != c_pos:
            tri.insert(order[i])
    t = np.array(tri.real_triangles(), dtype=np.int64).reshape(-1, 3)
    # canonical layout: rotate each triangle to start at its smallest id, sort rows
    r = np.argmin(t, axis=1)
    t = np.stack([t[np.arange(len(t)), (r + k) % 3] for k in range(3)], axis=1)
    t = t[np.lexsort((t[:, 2], t[:, 1], t[:, 0]))]
    return TriMesh(pts, values, t)


# ---------------------------------------------------------------------------
# grid constructions


def diagonal_triangulate(grid: ScalarGrid) -> TriMesh:
    """Split every cell along its lower-left to upper-right diagonal."""
    if grid.ndim != 2:
        raise ValueError("expected a 2D grid")
    nx, ny = grid.dims
    idx = np.arange(nx * ny).reshape(nx, ny)
    v00 = idx[:-1, :-1].ravel()
    v10 = idx[1:, :-1].ravel()
    v01 = idx[:-1, 1:].ravel()
    v11 = idx[1:, 1:].ravel()
    tris = np.concatenate([np.stack([v00, v10, v11], 1), np.stack([v00, v11, v01], 1)])
    return TriMesh(grid.coords(), grid.values.ravel(), tris)


def boundary_ring(domain: Sequence[float], count: int) -> np.ndarray:
    """``count`` points equally spaced (by arc length) around a rectangle,
    counter-clockwise from its lower-left corner."""
    x0, x1, y0, y1 = (float(d) for d in domain)
    w, h = x1 - x0, y1 - y0
    per = 2 * (w + h)
    t = np.arange(count) * (per / count)
    out = np.empty((count, 2))
    for lo, hi, f in ((0, w, lambda s: (x0 + s, y0)), (w, w + h, lambda s: (x1, y0 + s)),
                      (w + h, 2 * w + h, lambda s: (x1 - s, y1)), (2 * w + h, per, lambda s: (x0, y1 - s))):
        m = (t >= lo) & (t < hi)
        px, py = f(t[m] - lo)
        out[m, 0] = px
        out[m, 1] = py
    return out


def poisson_disc(domain: Sequence[float], count: int, min_dist: float, rng: Rng,
                 fixed: Optional[np.ndarray] = None, max_tries: Optional[int] = None) -> np.ndarray:
    """Dart throwing: up to ``count`` interior points pairwise >= ``min_dist``
    apart and at least ``min_dist`` from every ``fixed`` point.

    The fixed points themselves are not tested against each other.  Stops
    after ``count`` acceptances or ``max_tries`` darts.
    """
    x0, x1, y0, y1 = (float(d) for d in domain)
    r = float(min_dist)
    if r <= 0:
        raise ValueError("min_dist must be positive")
    cs = r / np.sqrt(2.0)
    gw = int(np.ceil((x1 - x0) / cs)) + 1
    gh = int(np.ceil((y1 - y0) / cs)) + 1
    grid = {}

    def cell(px, py):
        return int((px - x0) / cs), int((py - y0) / cs)

    r2 = r * r

    def free(px, py):
        ci, cj = cell(px, py)
        for i in range(max(ci - 2, 0), min(ci + 3, gw)):
            for j in range(max(cj - 2, 0), min(cj + 3, gh)):
                for qx, qy in grid.get((i, j), ()):
                    if (qx - px) ** 2 + (qy - py) ** 2 < r2:
                        return False
        return True

    if fixed is not None:
        for qx, qy in np.asarray(fixed, dtype=float).tolist():
            grid.setdefault(cell(qx, qy), []).append((qx, qy))
    gen = rng.generator(stream=0xD15C)
    max_tries = 30 * count + 1000 if max_tries is None else max_tries
    out = []
    tried = 0
    while len(out) < count and tried < max_tries:
        batch = gen.random((min(4096, max_tries - tried), 2))
        bx = (x0 + batch[:, 0] * (x1 - x0)).tolist()
        by = (y0 + batch[:, 1] * (y1 - y0)).tolist()
        for px, py in zip(bx, by):
            tried += 1
            if px <= x0 or px >= x1 or py <= y0 or py >= y1:
                continue
            if free(px, py):
                out.append((px, py))
                grid.setdefault(cell(px, py), []).append((px, py))
                if len(out) == count:
                    break
    return np.array(out, dtype=float).reshape(-1, 2)


def poisson_delaunay(domain: Sequence[float], target_count: int, min_dist: Optional[float], rng: Rng,
                     fn: Callable, n_boundary: Optional[int] = None) -> TriMesh:
    """Equally spaced boundary ring plus Poisson-disc interior, Delaunay-triangulated.

    ``target_count`` is the total vertex count.  ``n_boundary`` defaults to
    the boundary count of a square grid with the same number of vertices;
    ``min_dist`` defaults to 0.7 times the mean spacing.
    """
    x0, x1, y0, y1 = (float(d) for d in domain)
    if n_boundary is None:
        side = max(int(round(np.sqrt(target_count))), 2)
        n_boundary = 4 * (side - 1)
    n_inner = int(target_count) - int(n_boundary)
    if n_boundary < 3 or n_inner < 0:
        raise ValueError("target_count too small for the boundary ring")
    if min_dist is None:
        min_dist = 0.7 * np.sqrt((x1 - x0) * (y1 - y0) / max(target_count, 1))
    ring = boundary_ring((x0, x1, y0, y1), n_boundary)
    inner = poisson_disc((x0, x1, y0, y1), n_inner, min_dist, rng, fixed=ring)
    pts = np.concatenate([ring, inner])
    mesh = delaunay(pts)
    mesh.values = np.asarray(fn(pts[:, 0], pts[:, 1]), dtype=float)
    return mesh


_LOCAL_TRIPLES = np.array([(a, b, c) for a in range(9) for b in range(a + 1, 9) for c in range(b + 1, 9)])


def _cell_delaunay(P: np.ndarray) -> np.ndarray:
    """Delaunay triangles of many 9-point cells at once.

    ``P`` has shape (cells, 9, 2); returns (cells, 8, 3) local indices, or
    -1 rows for cells that need the general routine (near-degenerate input).
    """
    m = len(P)
    T = _LOCAL_TRIPLES
    A, B, C = P[:, T[:, 0]], P[:, T[:, 1]], P[:, T[:, 2]]
    area = ((B[..., 0] - A[..., 0]) * (C[..., 1] - A[..., 1])
            - (B[..., 1] - A[..., 1]) * (C[..., 0] - A[..., 0]))
    scale = np.abs(P - P[:, :1]).max(axis=(1, 2))[:, None]
    ok = np.abs(area) > 1e-12 * scale ** 2
    # make every candidate counter-clockwise
    swap = area < 0
    B2 = np.where(swap[..., None], C, B)
    C2 = np.where(swap[..., None], B, C)
    inside_any = np.zeros_like(ok)
    for d in range(9):
        D = P[:, d][:, None, :]
        ad, bd, cd = A - D, B2 - D, C2 - D
        det = ((ad[..., 0] ** 2 + ad[..., 1] ** 2) * (bd[..., 0] * cd[..., 1] - cd[..., 0] * bd[..., 1])
               + (bd[..., 0] ** 2 + bd[..., 1] ** 2) * (cd[..., 0] * ad[..., 1] - ad[..., 0] * cd[..., 1])
               + (cd[..., 0] ** 2 + cd[..., 1] ** 2) * (ad[..., 0] * bd[..., 1] - bd[..., 0] * ad[..., 1]))
        member = (T[:, 0] == d) | (T[:, 1] == d) | (T[:, 2] == d)
        inside_any |= (det > 1e-10 * scale ** 4) & ~member
        # near-cocircular: flag cell for the exact routine
        ok &= ~((np.abs(det) <= 1e-10 * scale ** 4) & ~member & (np.abs(area) > 0))
    keep = ok & ~inside_any
    out = np.full((m, 8, 3), -1, dtype=np.int64)
    good = keep.sum(axis=1) == 8
    rows, cols = np.nonzero(keep & good[:, None])
    tri = np.where(swap[rows, cols][:, None], T[cols][:, [0, 2, 1]], T[cols])
    out[good] = tri.reshape(-1, 8, 3)
    return out


def subdivide_suggested(grid: ScalarGrid, rng: Rng) -> TriMesh:
    """Refine a 2D grid with edge midpoints and one random point per cell.

    Vertex ids of the result equal the ids of the uniform cubical cells they
    come from: grid vertices keep their index, the midpoint of uniform edge
    ``e`` gets id ``e`` and the interior point of quad ``q`` gets id ``q``.
    Each cell's nine points are Delaunay-triangulated on their own, so the
    mesh is conforming across cells.  Interior points are uniform in the
    central half of each cell; values are bilinear.
    """
    if grid.ndim != 2:
        raise ValueError("expected a 2D grid")
    nx, ny = grid.dims
    if nx < 2 or ny < 2:
        raise ValueError("need at least 2 samples per axis")
    blocks = _cubical_blocks((nx, ny))
    e0, s0 = blocks[(0,)]
    e1, s1 = blocks[(1,)]
    q0, sq = blocks[(0, 1)]
    n_total = q0 + sq[0] * sq[1]
    ox, oy = grid.origin
    hx, hy = grid.spacing
    vals = grid.values

    pts = np.empty((n_total, 2))
    values = np.empty(n_total)
    parent = np.arange(n_total)
    pts[:nx * ny] = grid.coords()
    values[:nx * ny] = vals.ravel()
    # midpoints of edges along axis 0 (x) then axis 1 (y)
    I, J = np.indices(s0)
    pts[e0:e0 + I.size, 0] = ox + (I.ravel() + 0.5) * hx
    pts[e0:e0 + I.size, 1] = oy + J.ravel() * hy
    values[e0:e0 + I.size] = 0.5 * (vals[:-1, :] + vals[1:, :]).ravel()
    I, J = np.indices(s1)
    pts[e1:e1 + I.size, 0] = ox + I.ravel() * hx
    pts[e1:e1 + I.size, 1] = oy + (J.ravel() + 0.5) * hy
    values[e1:e1 + I.size] = 0.5 * (vals[:, :-1] + vals[:, 1:]).ravel()
    # interior points
    ncell = sq[0] * sq[1]
    I, J = (a.ravel() for a in np.indices(sq))
    cid = np.arange(ncell)
    u = 0.25 + 0.5 * rng.uniform(cid, stream=0xC311)
    v = 0.25 + 0.5 * rng.uniform(cid, stream=0xC312)
    pts[q0:, 0] = ox + (I + u) * hx
    pts[q0:, 1] = oy + (J + v) * hy
    values[q0:] = ((1 - u) * (1 - v) * vals[I, J] + u * (1 - v) * vals[I + 1, J]
                   + (1 - u) * v * vals[I, J + 1] + u * v * vals[I + 1, J + 1])

    # local ids: corners 00, 10, 01, 11; midpoints bottom, top, left, right; interior
    V = np.arange(nx * ny).reshape(nx, ny)
    E0 = e0 + np.arange(s0[0] * s0[1]).reshape(s0)
    E1 = e1 + np.arange(s1[0] * s1[1]).reshape(s1)
    local = np.stack([V[I, J], V[I + 1, J], V[I, J + 1], V[I + 1, J + 1],
                      E0[I, J], E0[I, J + 1], E1[I, J], E1[I + 1, J], q0 + cid], axis=1)
    tris = np.empty((ncell, 8, 3), dtype=np.int64)
    chunk = 4096
    for s in range(0, ncell, chunk):
        L = local[s:s + chunk]
        tl = _cell_delaunay(pts[L])
        bad = np.nonzero(tl[:, 0, 0] < 0)[0]
        for b in bad:
            m = delaunay(pts[L[b]])
            if len(m.triangles) != 8:
                raise AssertionError("cell triangulation must have 8 triangles")
            tl[b] = m.triangles
        tris[s:s + chunk] = np.take_along_axis(L[:, None, :], tl, axis=2)
    tri_cell = np.repeat(q0 + cid, 8)
    return TriMesh(pts, values, tris.reshape(-1, 3), parent=parent, tri_cell=tri_cell)


# ---------------------------------------------------------------------------
# statistics


def _edges_and_points(mesh):
    if isinstance(mesh, CellComplex):
        return mesh.vertex_coords[:, :2], mesh.cell_vertices(1), mesh.is_boundary_vertex()
    return mesh.points, mesh.edges(), mesh.boundary


def edge_direction_histogram(mesh, bin_width_deg: float = 5.0) -> Histogram:
    """Angles of undirected edges to the x axis, folded into [0, 180).

    Accepts a :class:`TriMesh` or a cell complex (its 1-skeleton).
    """
    if bin_width_deg <= 0 or 180.0 / bin_width_deg != round(180.0 / bin_width_deg):
        raise ValueError("bin width must divide 180 degrees")
    pts, edges, _ = _edges_and_points(mesh)
    d = pts[edges[:, 1]] - pts[edges[:, 0]]
    ang = np.round(np.degrees(np.arctan2(d[:, 1], d[:, 0])), 9) % 180.0
    nb = int(round(180.0 / bin_width_deg))
    b = np.minimum((ang / bin_width_deg).astype(np.int64), nb - 1)
    return Histogram(np.linspace(0.0, 180.0, nb + 1), np.bincount(b, minlength=nb))


def vertex_degrees(mesh) -> np.ndarray:
    pts, edges, _ = _edges_and_points(mesh)
    return np.bincount(edges.ravel(), minlength=len(pts))


def vertex_degree_histogram(mesh, interior_only: bool = False) -> Histogram:
    """Count of vertices per degree; bin ``i`` holds degree ``i``."""
    _, _, bnd = _edges_and_points(mesh)
    deg = vertex_degrees(mesh)
    if interior_only:
        deg = deg[~bnd]
    top = int(deg.max()) + 1 if len(deg) else 1
    return Histogram(np.arange(top + 1, dtype=float) - 0.5, np.bincount(deg, minlength=top))
