"""Cell complexes with a total cell order induced by vertex values.

Cells carry dense global ids: all vertices first, then all edges, then
2-cells, then 3-cells.  Every cell stores its vertices and its codimension-one
faces; cofaces are kept in CSR form.  Vertices are totally ordered by
``(value, index)`` and a cell's key is the descending sequence of its vertex
ranks, compared lexicographically (shorter prefix first).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product

import numpy as np

from .fields import ScalarGrid


class CellComplex:
    """Immutable 2D/3D cell complex over vertex values.

    Parameters
    ----------
    kind : {"cubical", "simplicial"}
    cell_vertices : list of ndarray
        ``cell_vertices[d]`` has shape ``(n_d, k_d)``, vertex ids per d-cell.
    cell_faces : list of ndarray
        ``cell_faces[d]`` has shape ``(n_d, f_d)``, global ids of the
        (d-1)-faces of every d-cell; entry 0 is unused.
    values : ndarray, (n_0,)
    coords : ndarray, (n_0, 2 or 3)
    """

    def __init__(self, kind, cell_vertices, cell_faces, values, coords, shape=None):
        self.kind = kind
        self.dim = len(cell_vertices) - 1
        self.shape = shape
        self._cell_vertices = [np.asarray(cv, dtype=np.int64) for cv in cell_vertices]
        self._cell_faces = [None] + [np.asarray(cf, dtype=np.int64) for cf in cell_faces[1:]]
        counts = [len(cv) for cv in self._cell_vertices]
        self.offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        self.n_cells = int(self.offsets[-1])
        self.vertex_coords = np.asarray(coords, dtype=np.float64)
        self._set_values(values)

    # -- construction helpers ------------------------------------------------

    def _set_values(self, values):
        values = np.asarray(values, dtype=np.float64).ravel()
        if len(values) != self.count(0):
            raise ValueError("one value per vertex required")
        self.vertex_values = values
        n0 = len(values)
        order = np.lexsort((np.arange(n0), values))
        rank = np.empty(n0, dtype=np.int64)
        rank[order] = np.arange(n0)
        self.vertex_rank = rank

        width = max(cv.shape[1] for cv in self._cell_vertices)
        keys = np.full((self.n_cells, width), -1, dtype=np.int64)
        owner = np.empty(self.n_cells, dtype=np.int64)
        for d, cv in enumerate(self._cell_vertices):
            r = rank[cv]
            s, e = self.offsets[d], self.offsets[d + 1]
            keys[s:e, :cv.shape[1]] = -np.sort(-r, axis=1)
            owner[s:e] = cv[np.arange(len(cv)), np.argmax(r, axis=1)]
        self._keys = keys
        self.owner = owner
        order_keys = [keys[:, c] for c in range(width - 1, -1, -1)]
        corder = np.lexsort(order_keys)
        orank = np.empty(self.n_cells, dtype=np.int64)
        orank[corder] = np.arange(self.n_cells)
        self.order_rank = orank

        # lower stars: cells of dim >= 1 grouped by owner, sorted by cell order
        hi = np.arange(self.offsets[1], self.n_cells)
        srt = np.lexsort((orank[hi], owner[hi]))
        self._star_cells = hi[srt]
        self._star_ptr = np.searchsorted(owner[hi][srt], np.arange(n0 + 1))
        self.__dict__.pop("_lists", None)

    def with_values(self, values) -> "CellComplex":
        """Same topology and geometry with new vertex values."""
        new = object.__new__(CellComplex)
        new.__dict__.update({k: v for k, v in self.__dict__.items()
                             if k not in ("_lists", "fingerprint")})
        new._set_values(values)
        return new

    # -- basic queries ---------------------------------------------------------

    def count(self, d: int) -> int:
        return len(self._cell_vertices[d])

    def counts(self) -> list:
        return [self.count(d) for d in range(self.dim + 1)]

    def cell_dim(self, c: int) -> int:
        return int(np.searchsorted(self.offsets, c, side="right") - 1)

    def cell_dims(self) -> np.ndarray:
        return np.repeat(np.arange(self.dim + 1), self.counts())

    def cells(self, d: int) -> range:
        return range(int(self.offsets[d]), int(self.offsets[d + 1]))

    def vertices(self, c: int) -> np.ndarray:
        d = self.cell_dim(c)
        return self._cell_vertices[d][c - self.offsets[d]]

    def cell_vertices(self, d: int) -> np.ndarray:
        return self._cell_vertices[d]

    def faces(self, c: int) -> np.ndarray:
        d = self.cell_dim(c)
        if d == 0:
            return np.empty(0, dtype=np.int64)
        return self._cell_faces[d][c - self.offsets[d]]

    def cell_faces(self, d: int) -> np.ndarray:
        return self._cell_faces[d]

    @cached_property
    def cofaces_csr(self):
        src, dst = [], []
        for d in range(1, self.dim + 1):
            cf = self._cell_faces[d]
            ids = np.arange(self.offsets[d], self.offsets[d + 1])
            src.append(cf.ravel())
            dst.append(np.repeat(ids, cf.shape[1]))
        src = np.concatenate(src)
        dst = np.concatenate(dst)
        srt = np.lexsort((dst, src))
        ptr = np.searchsorted(src[srt], np.arange(self.n_cells + 1))
        return ptr, dst[srt]

    def cofaces(self, c: int) -> np.ndarray:
        ptr, idx = self.cofaces_csr
        return idx[ptr[c]:ptr[c + 1]]

    @cached_property
    def _topo_lists(self):
        """Python-list views used by the tight loops (faces, cofaces)."""
        faces = [()] * int(self.offsets[1])
        for d in range(1, self.dim + 1):
            faces.extend(map(tuple, self._cell_faces[d].tolist()))
        ptr, idx = self.cofaces_csr
        ptr = ptr.tolist()
        idx = idx.tolist()
        cofaces = [tuple(idx[ptr[c]:ptr[c + 1]]) for c in range(self.n_cells)]
        return faces, cofaces

    @cached_property
    def _lists(self):
        return self.owner.tolist(), self.order_rank.tolist()

    def cell_center(self, c) -> np.ndarray:
        return self.vertex_coords[self.vertices(c)].mean(axis=0)

    def cell_centers(self, cells) -> np.ndarray:
        cells = np.asarray(cells, dtype=np.int64)
        out = np.empty((len(cells), self.vertex_coords.shape[1]))
        dims = np.searchsorted(self.offsets, cells, side="right") - 1
        for d in np.unique(dims):
            m = dims == d
            cv = self._cell_vertices[d][cells[m] - self.offsets[d]]
            out[m] = self.vertex_coords[cv].mean(axis=1)
        return out

    def cell_value(self, c: int) -> float:
        """Value of the cell's maximal vertex."""
        return float(self.vertex_values[self.owner[c]])

    # -- order -------------------------------------------------------------------

    def cell_key(self, c: int) -> "CellKey":
        vs = self.vertices(c)
        srt = sorted(vs.tolist(), key=lambda v: self.vertex_rank[v], reverse=True)
        return CellKey(tuple(float(self.vertex_values[v]) for v in srt), tuple(srt))

    def cell_order(self, a: int, b: int) -> int:
        """-1, 0 or 1 as cell ``a`` sorts before, equal to, or after ``b``."""
        ra, rb = self.order_rank[a], self.order_rank[b]
        return int(ra > rb) - int(ra < rb)

    # -- lower stars ---------------------------------------------------------------

    def lower_star(self, v: int) -> np.ndarray:
        """Cells of dimension >= 1 whose maximal vertex is ``v`` (``v`` excluded)."""
        if not 0 <= v < self.count(0):
            raise ValueError(f"{v} is not a vertex")
        return self._star_cells[self._star_ptr[v]:self._star_ptr[v + 1]]

    def reduced_lower_star(self, v: int) -> "ReducedLowerStar":
        star = self.lower_star(v)
        members = set(star.tolist())
        cells, rdim, faces = [], {}, {}
        for c in star.tolist():
            d = self.cell_dim(c)
            cells.append(c)
            rdim[c] = d - 1
            faces[c] = tuple(f for f in self.faces(c).tolist() if f in members)
        return ReducedLowerStar(v, cells, rdim, faces)

    # -- identity -----------------------------------------------------------------------

    @cached_property
    def fingerprint(self) -> str:
        import hashlib
        h = hashlib.sha1(self.kind.encode())
        h.update(np.asarray(self.counts(), dtype=np.int64).tobytes())
        for cv in self._cell_vertices[1:]:
            h.update(np.ascontiguousarray(cv).tobytes())
        h.update(self.vertex_values.tobytes())
        h.update(self.vertex_coords.tobytes())
        return h.hexdigest()[:16]

    def is_boundary_vertex(self) -> np.ndarray:
        """Vertices on the domain boundary (faces of cells with < 2 cofaces)."""
        ptr, _ = self.cofaces_csr
        ncof = np.diff(ptr)
        d = self.dim - 1
        s, e = self.offsets[d], self.offsets[d + 1]
        bcells = np.nonzero(ncof[s:e] < 2)[0]
        flags = np.zeros(self.count(0), dtype=bool)
        flags[self._cell_vertices[d][bcells].ravel()] = True
        return flags

    def __repr__(self):
        return f"CellComplex(kind={self.kind!r}, dim={self.dim}, counts={self.counts()})"


@dataclass(frozen=True)
class CellKey:
    vals: tuple
    tiebreak: tuple


@dataclass
class ReducedLowerStar:
    """Link-like view of a lower star: each d-cell acts as a (d-1)-cell.

    ``faces[c]`` lists the faces of ``c`` that are themselves in the star.
    """

    vertex: int
    cells: list
    dim: dict
    faces: dict

    def count(self, d: int) -> int:
        return sum(1 for c in self.cells if self.dim[c] == d)

    def counts(self) -> list:
        top = max(self.dim.values(), default=-1)
        return [self.count(d) for d in range(top + 1)]

    def skeleton(self, d: int) -> list:
        return [c for c in self.cells if self.dim[c] <= d]

    def is_closed(self) -> bool:
        members = set(self.cells)
        return all(f in members for c in self.cells for f in self.faces[c])


def euler_characteristic(k) -> int:
    return int(sum((-1) ** d * n for d, n in enumerate(k.counts())))


# ---------------------------------------------------------------------------
# builders


def _cubical_blocks(shape):
    D = len(shape)
    blocks = {}
    start = 0
    for d in range(D + 1):
        for S in combinations(range(D), d):
            bshape = tuple(n - 1 if a in S else n for a, n in enumerate(shape))
            blocks[S] = (start, bshape)
            start += int(np.prod(bshape))
    return blocks


def cubical_cell_id(shape, axes, base) -> int:
    """Global id of the cubical cell spanning ``axes`` at lattice index ``base``."""
    start, bshape = _cubical_blocks(tuple(shape))[tuple(sorted(axes))]
    return start + int(np.ravel_multi_index(tuple(base), bshape))


def _build_cubical(grid: ScalarGrid) -> CellComplex:
    shape = grid.dims
    if any(n < 2 for n in shape):
        raise ValueError(f"every axis needs >= 2 samples, got {shape}")
    D = len(shape)
    blocks = _cubical_blocks(shape)
    cell_vertices = [[] for _ in range(D + 1)]
    cell_faces = [[] for _ in range(D + 1)]
    for S, (start, bshape) in blocks.items():
        d = len(S)
        base = np.indices(bshape).reshape(D, -1)
        verts = []
        for offs in product((0, 1), repeat=d):
            idx = base.copy()
            for a, o in zip(S, offs):
                idx[a] += o
            verts.append(np.ravel_multi_index(tuple(idx), shape))
        cell_vertices[d].append(np.stack(verts, axis=1))
        if d == 0:
            continue
        faces = []
        for a in S:
            T = tuple(b for b in S if b != a)
            fstart, fshape = blocks[T]
            for o in (0, 1):
                idx = base.copy()
                idx[a] += o
                faces.append(fstart + np.ravel_multi_index(tuple(idx), fshape))
        cell_faces[d].append(np.stack(faces, axis=1))
    cv = [np.concatenate(c) for c in cell_vertices]
    cf = [None] + [np.concatenate(c) for c in cell_faces[1:]]
    return CellComplex("cubical", cv, cf, grid.values.ravel(), grid.coords(), shape=shape)


def build_cubical_2d(grid: ScalarGrid) -> CellComplex:
    if grid.ndim != 2:
        raise ValueError("expected a 2D grid")
    return _build_cubical(grid)


def build_cubical_3d(grid: ScalarGrid) -> CellComplex:
    if grid.ndim != 3:
        raise ValueError("expected a 3D grid")
    return _build_cubical(grid)


def build_cubical(grid: ScalarGrid) -> CellComplex:
    return _build_cubical(grid)


def build_simplicial(mesh) -> CellComplex:
    """2D simplicial complex from a triangle mesh (anything with
    ``points``, ``triangles`` and ``values``)."""
    tris = np.asarray(mesh.triangles, dtype=np.int64).reshape(-1, 3)
    n = len(mesh.points)
    if tris.size and (tris.min() < 0 or tris.max() >= n):
        raise ValueError("triangle references a missing vertex")
    st = np.sort(tris, axis=1)
    if len(np.unique(st, axis=0)) != len(st):
        raise ValueError("duplicate triangles")
    if np.any(st[:, 0] == st[:, 1]) or np.any(st[:, 1] == st[:, 2]):
        raise ValueError("degenerate triangle")
    pairs = np.concatenate([st[:, [0, 1]], st[:, [1, 2]], st[:, [0, 2]]])
    edges, inv, cnt = np.unique(pairs, axis=0, return_inverse=True, return_counts=True)
    inv = inv.ravel()
    if np.any(cnt > 2):
        raise ValueError("non-manifold edge shared by more than two triangles")
    m = len(tris)
    tri_faces = n + np.stack([inv[:m], inv[m:2 * m], inv[2 * m:]], axis=1)
    cv = [np.arange(n)[:, None], edges, tris]
    cf = [None, edges, tri_faces]
    return CellComplex("simplicial", cv, cf, mesh.values, np.asarray(mesh.points)[:, :2])
