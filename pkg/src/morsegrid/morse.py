"""Morse-Smale complex assembly, separatrix tracing and simplification.

A separatrix is a V-path from a critical (d+1)-cell down to a critical d-cell.
Paths are traced in whichever direction does not branch: descending from
saddles in the vertex/edge layer, ascending from (top-1)-cells in the top
layer.  The 3D edge/quad layer branches both ways and is enumerated by DFS.
Ascending paths that leave through the domain boundary reach no critical
cell; they are kept apart as open paths (upper end ``-1``) because they carry
the ridge lines of fields whose maxima sit on the boundary.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .complex import CellComplex
from .gradient import GradientField


@dataclass(frozen=True)
class CriticalCell:
    cell: int
    index: int
    owner_star: int
    value: float
    coords: tuple

    def to_dict(self):
        return {"cell": self.cell, "index": self.index, "owner_star": self.owner_star,
                "value": self.value, "coords": list(self.coords)}


@dataclass
class Separatrix:
    """V-path from critical cell ``upper`` (index d+1) to ``lower`` (index d).

    ``path`` alternates (d+1)- and d-cells and starts at ``upper``.  Open
    paths have ``upper == -1`` and start at the boundary cell they exit by.
    """

    upper: int
    lower: int
    path: tuple
    endpoint_stars: tuple
    polyline: np.ndarray = field(repr=False, default=None)
    index: int = 0  # index of the upper endpoint

    @property
    def is_open(self) -> bool:
        return self.upper < 0

    @property
    def key(self) -> tuple:
        return (self.index, self.endpoint_stars[0], self.endpoint_stars[1])

    def __eq__(self, other):
        if not isinstance(other, Separatrix):
            return NotImplemented
        return (self.upper == other.upper and self.lower == other.lower
                and tuple(self.path) == tuple(other.path)
                and tuple(self.endpoint_stars) == tuple(other.endpoint_stars)
                and self.index == other.index
                and np.array_equal(self.polyline, other.polyline))


@dataclass
class MSComplex:
    dim: int
    criticals: list
    separatrices: list
    fingerprint: str = ""
    complex: CellComplex = field(default=None, repr=False, compare=False)
    open_paths: list = field(default_factory=list)

    def critical_counts(self) -> list:
        c = Counter(cp.index for cp in self.criticals)
        return [c.get(d, 0) for d in range(self.dim + 1)]

    def euler(self) -> int:
        return sum((-1) ** d * n for d, n in enumerate(self.critical_counts()))

    def by_cell(self) -> dict:
        return {cp.cell: cp for cp in self.criticals}

    def saddles(self) -> list:
        return [cp for cp in self.criticals if 0 < cp.index < self.dim]

    def arcs(self) -> Counter:
        """Multiplicity of V-paths per (upper, lower) pair of critical cells."""
        return Counter((s.upper, s.lower) for s in self.separatrices)

    def __eq__(self, other):
        if not isinstance(other, MSComplex):
            return NotImplemented
        return (self.dim == other.dim and self.fingerprint == other.fingerprint
                and self.criticals == other.criticals
                and self.separatrices == other.separatrices
                and self.open_paths == other.open_paths)


# ---------------------------------------------------------------------------
# tracing


def _descend_linear(faces, pair, start, dims=None):
    """Vertex/edge layer: from a critical edge follow both vertices down."""
    out = []
    for u in faces[start]:
        path = [start, u]
        while pair[u] >= 0:
            e = pair[u]
            a, b = faces[e]
            u = b if a == u else a
            path.extend((e, u))
        out.append(path)
    return out


def _ascend_linear(cofaces, pair, start, open_paths=None):
    """Top layer: from a critical (top-1)-cell climb through each coface.

    Returns paths ordered from the upper endpoint down to ``start``.  Paths
    that exit through the boundary go to ``open_paths`` when given.
    """
    out = []
    for c in cofaces[start]:
        path = [start, c]
        ok = True
        while pair[c] >= 0:
            f = pair[c]
            nxt = [x for x in cofaces[f] if x != c]
            path.append(f)
            if not nxt:
                ok = False
                break
            c = nxt[0]
            path.append(c)
        if ok:
            out.append(path[::-1])
        elif open_paths is not None:
            open_paths.append(path[::-1])
    return out


def _descend_branching(faces, pair, dims, start, limit):
    """Edge/quad layer in 3D: all V-paths from a critical quad down."""
    out = []
    stack = [(start, [start])]
    while stack:
        q, path = stack.pop()
        prev = path[-2] if len(path) > 1 else None
        for e in faces[q]:
            if e == prev:
                continue
            p = pair[e]
            if p < 0:
                out.append(path + [e])
                if len(out) > limit:
                    raise RuntimeError(f"more than {limit} V-paths from cell {start}")
            elif dims[p] == dims[e] + 1:
                stack.append((p, path + [e, p]))
    out.reverse()
    return out


def trace_from(k: CellComplex, pair, c: int, limit: int = 100000, open_paths=None) -> list:
    """V-paths (upper -> lower) for which critical cell ``c`` is the tracing origin.

    Every separatrix has exactly one origin, so looping over all critical
    cells yields each one once.
    """
    faces, cofaces = k._topo_lists
    dims = k.cell_dims()
    d = dims[c]
    out = []
    if d == 1:
        out += _descend_linear(faces, pair, c, dims)
    if d == k.dim - 1:
        out += _ascend_linear(cofaces, pair, c, open_paths)
    if k.dim == 3 and d == 2:
        out += _descend_branching(faces, pair, dims, c, limit)
    return out


def _critical_cell(k, c, d):
    o = int(k.owner[c])
    return CriticalCell(int(c), int(d), o, float(k.vertex_values[o]),
                        tuple(float(x) for x in k.cell_center(c)))


def _make_separatrix(k, path, dims, upper=None):
    up, lo = path[0], path[-1]
    if upper is None:
        upper = up
    return Separatrix(int(upper), int(lo), tuple(int(p) for p in path),
                      (int(k.owner[upper]) if upper >= 0 else -1, int(k.owner[lo])),
                      k.cell_centers(path), int(dims[lo]) + 1)


def extract(k: CellComplex, g: GradientField, check: bool = False, limit: int = 100000) -> MSComplex:
    """Critical cells, separatrices and boundary-exiting paths of a gradient field.

    Raises
    ------
    ValueError
        If ``g`` lives on another complex, or ``check`` is set and ``g`` fails
        validation.
    """
    if g.complex is not k and g.complex.fingerprint != k.fingerprint:
        raise ValueError("gradient field belongs to a different complex")
    if check:
        from .gradient import validate
        rep = validate(g)
        if not rep.ok:
            raise ValueError(f"invalid gradient field: {rep}")
    pair = g.pair.tolist()
    dims = k.cell_dims()
    crit = np.nonzero(g.pair < 0)[0]
    criticals = [_critical_cell(k, c, dims[c]) for c in crit.tolist()]
    seps = []
    opened = []
    for c in crit.tolist():
        for path in trace_from(k, pair, c, limit, opened):
            seps.append(_make_separatrix(k, path, dims))
    seps.sort(key=lambda s: (s.index, s.upper, s.lower, s.path))
    opens = [_make_separatrix(k, p, dims, upper=-1) for p in opened]
    opens.sort(key=lambda s: (s.lower, s.path))
    return MSComplex(k.dim, criticals, seps, k.fingerprint, k, opens)


# ---------------------------------------------------------------------------
# simplification


class _Graph:
    """Critical cells with V-path multiplicities, updated per cancellation."""

    def __init__(self, k, pair):
        self.k = k
        self.pair = pair
        self.dims = k.cell_dims()
        self.rebuild()

    def rebuild(self):
        self.down = {}
        self.up = {}
        for c in [i for i, p in enumerate(self.pair) if p < 0]:
            self.down.setdefault(c, Counter())
            self.up.setdefault(c, Counter())
        for c in list(self.down):
            for path in trace_from(self.k, self.pair, c):
                hi, lo = path[0], path[-1]
                self.down[hi][lo] += 1
                self.up[lo][hi] += 1

    def alive(self, c):
        return c in self.down

    def height(self, lo, hi):
        k = self.k
        return abs(k.cell_value(hi) - k.cell_value(lo))

    def candidates(self):
        out = []
        for hi, lows in self.down.items():
            for lo, m in lows.items():
                if m == 1:
                    out.append((self.height(lo, hi), lo, hi))
        out.sort()
        return out

    def unique_path(self, lo, hi):
        paths = [p for c in (hi, lo) for p in trace_from(self.k, self.pair, c)
                 if p[0] == hi and p[-1] == lo]
        if len(paths) != 1:
            raise RuntimeError(f"expected one V-path between {hi} and {lo}, got {len(paths)}")
        return paths[0]

    def cancel(self, lo, hi):
        path = self.unique_path(lo, hi)
        pair = self.pair
        for i in range(0, len(path) - 1, 2):
            a, b = path[i], path[i + 1]
            pair[a] = b
            pair[b] = a
        if self.k.dim == 3 and self.dims[hi] == 2:
            # branching layer: counts do not compose, re-trace everything
            self.rebuild()
            return []
        uppers = {m: n for m, n in self.up[lo].items() if m != hi}
        lowers = {s: n for s, n in self.down[hi].items() if s != lo}
        for c in (lo, hi):
            for m in self.up[c]:
                if m in self.down:
                    self.down[m].pop(c, None)
            for s in self.down[c]:
                if s in self.up:
                    self.up[s].pop(c, None)
            del self.down[c]
            del self.up[c]
        fresh = []
        for m, a in uppers.items():
            for s, b in lowers.items():
                self.down[m][s] += a * b
                self.up[s][m] += a * b
                if self.down[m][s] == 1:
                    fresh.append((self.height(s, m), s, m))
        return fresh


def persistence_pairs(ms: MSComplex, g: GradientField) -> list:
    """Cancellable (lower, upper) pairs joined by exactly one V-path,
    with their height differences, ascending."""
    k = g.complex
    out = []
    for (hi, lo), m in ms.arcs().items():
        if m == 1:
            out.append(((lo, hi), abs(k.cell_value(hi) - k.cell_value(lo))))
    out.sort(key=lambda t: (t[1], t[0]))
    return out


def simplify(ms: MSComplex, g: GradientField, threshold: float, on_cancel=None):
    """Cancel critical pairs by gradient-path reversal, lowest height first.

    Only pairs joined by a unique V-path with height difference at most
    ``threshold`` are cancelled.  ``on_cancel(g, lower, upper)`` is called
    after every reversal.  Returns the simplified complex and field.
    """
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    k = g.complex
    pair = g.pair.tolist()
    graph = _Graph(k, pair)
    heap = graph.candidates()
    heapq.heapify(heap)
    while heap:
        h, lo, hi = heapq.heappop(heap)
        if h > threshold:
            break
        if not (graph.alive(lo) and graph.alive(hi)) or graph.down[hi].get(lo) != 1:
            continue
        fresh = graph.cancel(lo, hi)
        if not fresh and k.dim == 3 and graph.dims[hi] == 2:
            heap = [c for c in graph.candidates() if c[0] <= threshold]
            heapq.heapify(heap)
        for item in fresh:
            heapq.heappush(heap, item)
        if on_cancel is not None:
            on_cancel(GradientField(k, np.array(pair, dtype=np.int64)), lo, hi)
    g2 = GradientField(k, np.array(pair, dtype=np.int64))
    return extract(k, g2), g2
