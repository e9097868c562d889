"""Discrete gradient fields built lower star by lower star.

Each vertex's lower star is processed independently: the first vector pairs
the vertex with one of its descending edges (chosen by a
:class:`FirstVectorPolicy`), then simple homotopy expansion pairs every cell
that has exactly one uncovered face, always taking the minimum under the
cell order.  When the expansion stalls, the minimal uncovered cell becomes
critical and expansion resumes from it.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .complex import CellComplex
from .fields import Rng

_FIRST_VECTOR_STREAM = 0xF1257


@dataclass(frozen=True)
class FirstVectorPolicy:
    kind: str = "steepest"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("steepest", "probabilistic"):
            raise ValueError(f"unknown policy {self.kind!r}")


STEEPEST = FirstVectorPolicy("steepest")


def probabilistic(seed: int) -> FirstVectorPolicy:
    return FirstVectorPolicy("probabilistic", int(seed))


class GradientField:
    """Acyclic matching of cells into discrete vectors.

    ``pair[c]`` is the partner of ``c`` or -1 when ``c`` is critical.  The
    lower-dimensional cell of a vector is its tail, the other its head.
    """

    def __init__(self, complex: CellComplex, pair: np.ndarray, conflicts=()):
        self.complex = complex
        self.pair = np.asarray(pair, dtype=np.int64)
        # cells that were put into more than one vector (only via from_vectors)
        self.conflicts = list(conflicts)

    @classmethod
    def from_vectors(cls, complex: CellComplex, vectors) -> "GradientField":
        pair = np.full(complex.n_cells, -1, dtype=np.int64)
        seen = {}
        conflicts = []
        for a, b in vectors:
            for c in (a, b):
                if c in seen:
                    conflicts.append((c, seen[c], (a, b)))
                seen[c] = (a, b)
            pair[a] = b
            pair[b] = a
        return cls(complex, pair, conflicts)

    @property
    def critical(self) -> np.ndarray:
        return np.nonzero(self.pair < 0)[0]

    def is_critical(self, c: int) -> bool:
        return self.pair[c] < 0

    def vectors(self) -> np.ndarray:
        """Array of (tail, head) rows."""
        c = np.nonzero(self.pair >= 0)[0]
        tails = c[self.pair[c] > c]
        return np.stack([tails, self.pair[tails]], axis=1)

    def critical_counts(self) -> list:
        dims = self.complex.cell_dims()[self.critical]
        return np.bincount(dims, minlength=self.complex.dim + 1).tolist()

    def critical_by_dim(self, d: int) -> np.ndarray:
        k = self.complex
        crit = self.critical
        return crit[(crit >= k.offsets[d]) & (crit < k.offsets[d + 1])]

    def copy(self) -> "GradientField":
        return GradientField(self.complex, self.pair.copy())

    def __eq__(self, other):
        return isinstance(other, GradientField) and np.array_equal(self.pair, other.pair)


# ---------------------------------------------------------------------------
# first vector


def _edge_drops(k: CellComplex, v: int, edges):
    """Value drop per unit length along each lower-star edge of ``v``."""
    vals = k.vertex_values
    coords = k.vertex_coords
    out = []
    for e in edges:
        a, b = k.cell_vertices(1)[e - k.offsets[1]]
        u = b if a == v else a
        length = float(np.linalg.norm(coords[v] - coords[u]))
        out.append(max(vals[v] - vals[u], 0.0) / length)
    return out


def first_vector(k: CellComplex, v: int, policy: FirstVectorPolicy = STEEPEST,
                 u: Optional[float] = None) -> int:
    """Edge that the vertex ``v`` is paired with.

    Steepest descent takes the edge toward the lowest neighbour.  The
    probabilistic policy draws an edge with probability proportional to its
    value drop per unit length; ``u`` overrides the per-vertex uniform draw.
    """
    star = k.lower_star(v)
    edges = [c for c in star.tolist() if k.offsets[1] <= c < k.offsets[2]]
    if not edges:
        raise ValueError(f"vertex {v} has an empty lower star")
    edges.sort(key=lambda e: k.order_rank[e])
    if policy.kind == "steepest" or len(edges) == 1:
        return edges[0]
    if u is None:
        u = float(Rng(policy.seed).uniform([v], stream=_FIRST_VECTOR_STREAM)[0])
    return _draw(edges, _edge_drops(k, v, edges), u)


def first_vector_probabilities(k: CellComplex, v: int) -> dict:
    star = k.lower_star(v)
    edges = sorted((c for c in star.tolist() if k.offsets[1] <= c < k.offsets[2]),
                   key=lambda e: k.order_rank[e])
    w = _edge_drops(k, v, edges)
    total = sum(w)
    if total <= 0:
        return {edges[0]: 1.0}
    return {e: wi / total for e, wi in zip(edges, w)}


def _draw(edges, weights, u):
    total = sum(weights)
    if total <= 0:
        return edges[0]
    target = u * total
    acc = 0.0
    for e, w in zip(edges, weights):
        acc += w
        if target < acc:
            return e
    # u * total rounding onto the last boundary
    return next(e for e, w in zip(reversed(edges), reversed(weights)) if w > 0)


# ---------------------------------------------------------------------------
# lower-star processing


@dataclass
class StarResult:
    vertex: int
    pairs: list = field(default_factory=list)
    critical: list = field(default_factory=list)


def _expand_star(v, star, first, faces, owner, orank, off2, pair, crit):
    """Homotopy expansion of one lower star; writes into ``pair``/``crit``."""
    infaces = {}
    nunp = {}
    cof = {}
    edges = []
    for c in star:
        if c < off2:
            edges.append(c)
            continue
        fs = [f for f in faces[c] if owner[f] == v]
        infaces[c] = fs
        nunp[c] = len(fs)
        for f in fs:
            if f in cof:
                cof[f].append(c)
            else:
                cof[f] = [c]

    done = set()
    pqone = []

    def cover(c):
        done.add(c)
        for b in cof.get(c, ()):
            n = nunp[b] - 1
            nunp[b] = n
            if n == 1:
                heapq.heappush(pqone, (orank[b], b))

    pair[v] = first
    pair[first] = v
    cover(first)
    pqzero = [(orank[e], e) for e in edges if e != first]
    heapq.heapify(pqzero)

    while pqone or pqzero:
        while pqone:
            _, a = heapq.heappop(pqone)
            if a in done:
                continue
            if nunp[a] == 0:
                heapq.heappush(pqzero, (orank[a], a))
                continue
            for f in infaces[a]:
                if f not in done:
                    break
            pair[f] = a
            pair[a] = f
            cover(a)
            cover(f)
        while pqzero:
            _, g = heapq.heappop(pqzero)
            if g in done:
                continue
            crit.append(g)
            cover(g)
            break


def process_lower_star(k: CellComplex, v: int, policy: FirstVectorPolicy = STEEPEST,
                       first: Optional[int] = None) -> StarResult:
    """Pairings and critical cells of one lower star.

    ``first`` forces the first vector's edge (any edge of the lower star).
    """
    star = k.lower_star(v).tolist()
    res = StarResult(v)
    if not star:
        res.critical.append(v)
        return res
    if first is None:
        first = first_vector(k, v, policy)
    elif first not in star or not k.offsets[1] <= first < k.offsets[2]:
        raise ValueError(f"{first} is not an edge of the lower star of {v}")
    faces, _ = k._topo_lists
    owner, orank = k._lists
    pair = {}
    _expand_star(v, star, first, faces, owner, orank, int(k.offsets[2]), pair, res.critical)
    res.pairs = sorted((a, b) for a, b in pair.items() if a < b)
    return res


def compute_gradient(k: CellComplex, policy: FirstVectorPolicy = STEEPEST,
                     first: Optional[dict] = None) -> GradientField:
    """Discrete gradient of ``k`` as the union of all lower-star results.

    ``first`` optionally maps vertices to forced first-vector edges.
    """
    faces, _ = k._topo_lists
    owner, orank = k._lists
    n0 = k.count(0)
    off1, off2 = int(k.offsets[1]), int(k.offsets[2])
    ptr = k._star_ptr.tolist()
    cells = k._star_cells.tolist()
    pair = [-1] * k.n_cells
    crit = []

    draws = None
    if policy.kind == "probabilistic":
        draws = Rng(policy.seed).uniform(np.arange(n0), stream=_FIRST_VECTOR_STREAM).tolist()
        vals = k.vertex_values.tolist()
        coords = k.vertex_coords
        ev = k.cell_vertices(1)

    for v in range(n0):
        s, e = ptr[v], ptr[v + 1]
        if s == e:
            continue
        star = cells[s:e]
        if first is not None and v in first:
            f = first[v]
        else:
            # star is sorted by cell order, so the first edge is the steepest
            edges = [c for c in star if c < off2]
            f = edges[0]
            if draws is not None and len(edges) > 1:
                w = []
                for ed in edges:
                    a, b = ev[ed - off1]
                    u = b if a == v else a
                    d = coords[v] - coords[u]
                    w.append(max(vals[v] - vals[u], 0.0) / float(np.sqrt(d @ d)))
                f = _draw(edges, w, draws[v])
        _expand_star(v, star, f, faces, owner, orank, off2, pair, crit)
    return GradientField(k, np.array(pair, dtype=np.int64))


# ---------------------------------------------------------------------------
# reduced lower star expansion (used to check the order-independence results)


def expand_skeleton(rls, start, rng: Optional[np.random.Generator] = None,
                    order: Optional[dict] = None):
    """Homotopy expansion of the 1-skeleton of a reduced lower star.

    Starting from the 0-simplex ``start``, repeatedly pair the minimal
    1-simplex (under ``order``) that has exactly one uncovered face.  When
    stuck, an uncovered 0-simplex is made critical: the minimal one, or a
    random one if ``rng`` is given.  Returns ``(pairs, critical)`` where
    pairs maps covered 0-simplices to their 1-simplices.
    """
    verts = [c for c in rls.cells if rls.dim[c] == 0]
    edges = [c for c in rls.cells if rls.dim[c] == 1]
    if order is None:
        order = {c: i for i, c in enumerate(rls.cells)}
    inc = {u: [] for u in verts}
    for e in edges:
        for u in rls.faces[e]:
            inc[u].append(e)
    covered = {start}
    pairs = {}
    critical = []
    frontier = [(order[e], e) for e in inc[start]]
    heapq.heapify(frontier)
    remaining = set(verts) - covered
    while True:
        while frontier:
            _, e = heapq.heappop(frontier)
            if e in pairs.values() or e in critical:
                continue
            open_faces = [u for u in rls.faces[e] if u not in covered]
            if len(open_faces) != 1:
                continue
            u = open_faces[0]
            pairs[u] = e
            covered.add(u)
            remaining.discard(u)
            for e2 in inc[u]:
                heapq.heappush(frontier, (order[e2], e2))
        if not remaining:
            break
        pool = sorted(remaining, key=order.get)
        u = pool[int(rng.integers(len(pool)))] if rng is not None else pool[0]
        critical.append(u)
        covered.add(u)
        remaining.discard(u)
        for e2 in inc[u]:
            heapq.heappush(frontier, (order[e2], e2))
    paired_edges = set(pairs.values())
    critical.extend(e for e in edges if e not in paired_edges)
    return pairs, critical


# ---------------------------------------------------------------------------
# validation


@dataclass
class ValidationReport:
    ok: bool
    matching_violations: list = field(default_factory=list)
    coface_violations: list = field(default_factory=list)
    cycles: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def _find_cycle(succ: dict):
    """One directed cycle in ``succ`` (node -> list of nodes) or None."""
    WHITE, GREY, BLACK = 0, 1, 2
    color = {}
    for root in succ:
        if color.get(root, WHITE) != WHITE:
            continue
        stack = [(root, iter(succ.get(root, ())))]
        path = [root]
        color[root] = GREY
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = BLACK
                stack.pop()
                path.pop()
                continue
            c = color.get(nxt, WHITE)
            if c == GREY:
                return path[path.index(nxt):] + [nxt]
            if c == WHITE:
                color[nxt] = GREY
                path.append(nxt)
                stack.append((nxt, iter(succ.get(nxt, ()))))
    return None


def validate(g: GradientField) -> ValidationReport:
    """Check matching, face/coface relation and absence of closed V-paths."""
    k = g.complex
    pair = g.pair
    rep = ValidationReport(True)
    for c, first, second in g.conflicts:
        rep.matching_violations.append((c, first, second))
    idx = np.nonzero(pair >= 0)[0]
    bad = idx[pair[pair[idx]] != idx]
    rep.matching_violations.extend(int(c) for c in bad)

    dims = k.cell_dims()
    tails = idx[dims[pair[idx]] == dims[idx] + 1]
    odd = idx[np.abs(dims[pair[idx]] - dims[idx]) != 1]
    rep.coface_violations.extend(int(c) for c in odd)
    for t in tails.tolist():
        if t not in k.faces(int(pair[t])).tolist():
            rep.coface_violations.append(t)

    # V-path graph per layer: tail alpha -> other faces of pair(alpha)
    succ = {}
    for t in tails.tolist():
        h = int(pair[t])
        succ[t] = [f for f in k.faces(h).tolist() if f != t]
    cyc = _find_cycle(succ)
    if cyc is not None:
        witness = []
        for a in cyc[:-1]:
            witness.extend([a, int(pair[a])])
        witness.append(cyc[-1])
        rep.cycles.append(witness)
    rep.ok = not (rep.matching_violations or rep.coface_violations or rep.cycles)
    return rep
