"""Comparison of Morse-Smale complexes built with different first-vector policies.

Saddles are matched by the lower star that produced them; separatrices by
the lower stars of their two endpoints.  Also holds the random-field
experiment runner, the circle-deviation accuracy proxy, the exhaustive
first-vector enumeration for small fields, and the mapping of a subdivided
mesh back onto its uniform grid.
"""

from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .complex import CellComplex, build_cubical
from .fields import Rng, ScalarGrid, random_field, resample
from .gradient import (STEEPEST, GradientField, compute_gradient, probabilistic,
                       process_lower_star)
from .morse import MSComplex, extract


@dataclass
class DiffReport:
    """Differences between two complexes over the same cell complex.

    ``moved_saddles`` holds ``(owner_star, cell_a, cell_b)``;
    ``changed_separatrices`` holds ``(side, separatrix)`` with side ``"a"`` or
    ``"b"`` naming the complex the unmatched separatrix belongs to.
    """

    moved_saddles: list = field(default_factory=list)
    changed_separatrices: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    @property
    def totals(self) -> dict:
        sides = Counter(side for side, _ in self.changed_separatrices)
        return {"moved_saddles": len(self.moved_saddles),
                "changed_separatrices": len(self.changed_separatrices),
                "changed_in_a": sides.get("a", 0), "changed_in_b": sides.get("b", 0),
                "errors": len(self.errors)}

    @property
    def positional(self) -> bool:
        return bool(self.moved_saddles)

    @property
    def connectivity(self) -> bool:
        return bool(self.changed_separatrices)

    def to_dict(self) -> dict:
        return {"totals": self.totals,
                "moved_saddles": [list(m) for m in self.moved_saddles],
                "changed_separatrices": [
                    {"side": side, "index": s.index, "upper": s.upper, "lower": s.lower,
                     "endpoint_stars": list(s.endpoint_stars), "path": list(s.path)}
                    for side, s in self.changed_separatrices],
                "errors": list(self.errors)}


def _check_same(a: MSComplex, b: MSComplex):
    if a.fingerprint != b.fingerprint or a.dim != b.dim:
        raise ValueError("complexes were built over different cell complexes")


def diff_saddles(a: MSComplex, b: MSComplex, errors: Optional[list] = None) -> list:
    """Saddles whose cell differs between ``a`` and ``b`` within the same lower star.

    Saddles sharing an owner star are paired in cell-id order after removing
    the cells common to both.  Owner stars with different saddle counts are
    appended to ``errors``.
    """
    _check_same(a, b)
    ga, gb = defaultdict(list), defaultdict(list)
    for cp in a.saddles():
        ga[(cp.index, cp.owner_star)].append(cp.cell)
    for cp in b.saddles():
        gb[(cp.index, cp.owner_star)].append(cp.cell)
    moved = []
    for key in sorted(set(ga) | set(gb)):
        ca, cb = set(ga.get(key, ())), set(gb.get(key, ()))
        only_a, only_b = sorted(ca - cb), sorted(cb - ca)
        if len(only_a) != len(only_b) and errors is not None:
            errors.append({"index": key[0], "owner_star": key[1],
                           "cells_a": sorted(ca), "cells_b": sorted(cb)})
        for x, y in zip(only_a, only_b):
            moved.append((key[1], x, y))
    return moved


def connectivity_keys(ms: MSComplex) -> Counter:
    return Counter(s.key for s in ms.separatrices)


def diff_connectivity(a: MSComplex, b: MSComplex) -> list:
    """Separatrices without a partner joining the same pair of lower stars.

    Keys are ``(index, owner_star(upper), owner_star(lower))`` counted with
    multiplicity; the result lists the surplus of each side.
    """
    _check_same(a, b)
    ka, kb = connectivity_keys(a), connectivity_keys(b)
    extra_a = ka - kb
    extra_b = kb - ka
    out = []
    for side, ms, extra in (("a", a, extra_a), ("b", b, extra_b)):
        left = Counter(extra)
        for s in ms.separatrices:
            if left[s.key] > 0:
                left[s.key] -= 1
                out.append((side, s))
    return out


def diff(a: MSComplex, b: MSComplex) -> DiffReport:
    errors = []
    moved = diff_saddles(a, b, errors)
    return DiffReport(moved, diff_connectivity(a, b), errors)


# ---------------------------------------------------------------------------
# experiments


@dataclass
class ExperimentResult:
    size: tuple
    n_trials: int
    n_positional: int
    n_connectivity: int
    seed: int
    factor: int = 0  # 0: plain random fields, k: random base fields resampled k-fold
    base_size: Optional[tuple] = None
    seeds: list = field(default_factory=list, repr=False)

    @property
    def positional_fraction(self) -> float:
        return self.n_positional / self.n_trials if self.n_trials else 0.0

    @property
    def connectivity_fraction(self) -> float:
        return self.n_connectivity / self.n_trials if self.n_trials else 0.0

    def csv_row(self) -> str:
        size = "x".join(str(s) for s in self.size)
        return f"{size},{self.n_trials},{self.n_positional},{self.n_connectivity},{self.seed}"

    CSV_HEADER = "size,trials,positional,connectivity,seed"


def compare_policies(grid: ScalarGrid, seed: int, k: Optional[CellComplex] = None) -> DiffReport:
    """Diff of steepest descent against the probabilistic policy with ``seed``."""
    k = build_cubical(grid) if k is None else k
    a = extract(k, compute_gradient(k, STEEPEST))
    b = extract(k, compute_gradient(k, probabilistic(seed)))
    return diff(a, b)


def _trial_seeds(rng: Rng, i: int):
    return rng.spawn(i, 0), int(rng.spawn(i, 1).seed % (1 << 63))


def run_experiment(size, n_trials: int, seed: int = 0) -> ExperimentResult:
    """Count random fields whose steepest and probabilistic complexes differ.

    Each trial draws one random permutation field and one probabilistic
    seed, both derived from ``(seed, trial)``.
    """
    size = (size, size) if np.isscalar(size) else tuple(size)
    return _run(size, None, n_trials, seed, 0)


def run_experiment_interpolated(base_size, factor: int, n_trials: int, seed: int = 0) -> ExperimentResult:
    """As :func:`run_experiment`, on random ``base_size`` fields bilinearly
    resampled to ``factor * base_size`` samples per axis.

    ``factor=1`` reproduces :func:`run_experiment` on ``base_size`` exactly.
    """
    base = (base_size, base_size) if np.isscalar(base_size) else tuple(base_size)
    factor = int(factor)
    if factor < 1:
        raise ValueError("factor must be >= 1")
    size = tuple(factor * b for b in base)
    return _run(base, size, n_trials, seed, factor)


def _run(base, size, n_trials, seed, factor):
    rng = Rng(seed)
    n_pos = n_con = 0
    seeds = []
    k = None
    for i in range(n_trials):
        field_rng, pseed = _trial_seeds(rng, i)
        grid = random_field(base, field_rng)
        if size is not None and size != tuple(base):
            grid = resample(grid, size)
        k = build_cubical(grid) if k is None else k.with_values(grid.values.ravel())
        rep = compare_policies(grid, pseed, k)
        n_pos += rep.positional
        n_con += rep.connectivity
        seeds.append(pseed)
    out_size = tuple(size) if size is not None else tuple(base)
    return ExperimentResult(out_size, n_trials, n_pos, n_con, seed, factor,
                            tuple(base) if factor else None, seeds)


# ---------------------------------------------------------------------------
# geometric accuracy proxy


def path_values(k: CellComplex, path) -> np.ndarray:
    """Mean vertex value of each cell on a path (value at its centre for
    bilinear or linear interpolation)."""
    vals = np.empty(len(path))
    for i, c in enumerate(path):
        vals[i] = k.vertex_values[k.vertices(c)].mean()
    return vals


def circle_deviation(ms: MSComplex, center, radius: Optional[float], quantile: float = 0.75,
                     include_open: bool = True, points=None) -> float:
    """Mean distance to a circle of separatrix points that lie on high ground.

    Separatrices are sampled at the centres of their cells.  Only points whose
    value is at or above the ``quantile`` of all sampled values are kept,
    which selects the ridge.  ``points`` may pass ``(coords, values)``
    directly instead of a complex.  With ``radius=None`` the circle radius is
    the mean distance of the kept points from ``center``.
    """
    if points is None:
        seps = list(ms.separatrices) + (list(ms.open_paths) if include_open else [])
        if not seps:
            return float("nan")
        k = ms.complex
        coords = np.concatenate([s.polyline for s in seps])
        values = np.concatenate([path_values(k, s.path) for s in seps])
    else:
        coords, values = (np.asarray(p, dtype=float) for p in points)
    if len(coords) == 0:
        return float("nan")
    keep = values >= np.quantile(values, quantile)
    d = np.hypot(coords[keep, 0] - center[0], coords[keep, 1] - center[1])
    if radius is None:
        radius = d.mean()
    return float(np.mean(np.abs(d - radius)))


# ---------------------------------------------------------------------------
# exhaustive first-vector enumeration


def star_outcomes(k: CellComplex, v: int) -> dict:
    """Distinct lower-star results over every admissible first vector of ``v``.

    Maps a canonical ``(pairs, critical)`` outcome to the first edges that
    produce it.  Vertices with no lower edge have the single outcome of
    being a minimum.
    """
    edges = [c for c in k.lower_star(v).tolist() if k.cell_dim(c) == 1]
    out = defaultdict(list)
    if not edges:
        r = process_lower_star(k, v)
        out[(tuple(sorted(r.pairs)), tuple(sorted(r.critical)))].append(None)
        return dict(out)
    for e in edges:
        r = process_lower_star(k, v, first=e)
        out[(tuple(sorted(r.pairs)), tuple(sorted(r.critical)))].append(e)
    return dict(out)


def enumerate_gradients(k: CellComplex):
    """Yield ``(first_edges, GradientField)`` for every combination of
    distinct lower-star outcomes (one representative first edge each)."""
    choices = []
    for v in range(k.count(0)):
        outs = star_outcomes(k, v)
        choices.append([(firsts[0], outcome) for outcome, firsts in sorted(outs.items())])
    for combo in itertools.product(*choices):
        pair = np.full(k.n_cells, -1, dtype=np.int64)
        firsts = {}
        for v, (e, (pairs, _)) in enumerate(combo):
            if e is not None:
                firsts[v] = e
            for a, b in pairs:
                pair[a] = b
                pair[b] = a
        yield firsts, GradientField(k, pair)


def movable_saddles(k: CellComplex) -> dict:
    """Owner stars whose saddle cells depend on the first-vector choice,
    mapped to every saddle cell set they can produce."""
    dims = k.cell_dims()
    out = {}
    for v in range(k.count(0)):
        sets = set()
        for _, crit in star_outcomes(k, v):
            sets.add(tuple(c for c in crit if 0 < dims[c] < k.dim))
        if len(sets) > 1:
            out[v] = sorted(sets)
    return out


# ---------------------------------------------------------------------------
# subdivided mesh -> uniform grid


def anchor_cells(mesh, sub: CellComplex, uniform: CellComplex) -> np.ndarray:
    """Uniform cubical cell that anchors each cell of a refined mesh.

    Needs the vertex provenance written by
    :func:`morsegrid.grids.subdivide_suggested`.  A refined cell is anchored
    at the lowest-dimensional uniform cell among its vertices' parents
    (a grid vertex before an edge midpoint before a cell interior point);
    ties go to the highest-ranked vertex.
    """
    if mesh.parent is None:
        raise ValueError("mesh carries no provenance")
    parent = np.asarray(mesh.parent, dtype=np.int64)
    pdim = uniform.cell_dims()[parent]
    # smaller key wins: dimension first, then higher rank
    key = pdim * (sub.count(0) + 1) - sub.vertex_rank
    out = np.empty(sub.n_cells, dtype=np.int64)
    for d in range(sub.dim + 1):
        cv = sub.cell_vertices(d)
        best = cv[np.arange(len(cv)), np.argmin(key[cv], axis=1)]
        out[sub.offsets[d]:sub.offsets[d + 1]] = parent[best]
    return out


def interior_summary(ms: MSComplex, uniform: CellComplex, anchor: Optional[np.ndarray] = None):
    """Per-index counts of interior criticals and the multiset of interior
    separatrix keys, expressed on the uniform grid.

    For a refined mesh pass ``anchor`` from :func:`anchor_cells`.  A critical
    cell is interior when its (anchor) uniform cell has no boundary vertex;
    its owner star is that uniform cell's owner.
    """
    bnd = uniform.is_boundary_vertex()
    cell = (lambda c: c) if anchor is None else (lambda c: int(anchor[c]))

    def interior(c):
        return not bnd[uniform.vertices(cell(c))].any()

    def owner(c):
        return int(uniform.owner[cell(c)])

    counts = [0] * (ms.dim + 1)
    for cp in ms.criticals:
        if interior(cp.cell):
            counts[cp.index] += 1
    keys = Counter()
    for s in ms.separatrices:
        if interior(s.upper) and interior(s.lower):
            keys[(s.index, owner(s.upper), owner(s.lower))] += 1
    return counts, keys
