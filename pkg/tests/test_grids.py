from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from morsegrid.complex import build_cubical, build_simplicial
from morsegrid.fields import Rng, ScalarGrid, builtin, eval_ring, sample
from morsegrid.grids import (TriMesh, boundary_ring, delaunay, diagonal_triangulate,
                             edge_direction_histogram, incircle, orient, poisson_delaunay,
                             poisson_disc, subdivide_suggested, vertex_degree_histogram,
                             vertex_degrees)
from oracles import bilinear_ref, empty_circle_violations, in_circle_exact

A = builtin("matrixA")


def hull_area(pts):
    """Convex hull area by monotone chain, written out here as a reference."""
    p = sorted(map(tuple, np.asarray(pts).tolist()))

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for q in p:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], q) <= 0:
            lower.pop()
        lower.append(q)
    for q in reversed(p):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], q) <= 0:
            upper.pop()
        upper.append(q)
    h = lower[:-1] + upper[:-1]
    return 0.5 * abs(sum(h[i][0] * h[(i + 1) % len(h)][1] - h[(i + 1) % len(h)][0] * h[i][1]
                         for i in range(len(h))))


def check_triangulation(mesh, pts=None):
    pts = mesh.points if pts is None else pts
    areas = mesh.signed_areas()
    assert np.all(areas > 0)
    assert mesh.euler() == 1
    assert np.isclose(areas.sum(), hull_area(pts), rtol=1e-9, atol=1e-12)
    e = np.sort(np.concatenate([mesh.triangles[:, [0, 1]], mesh.triangles[:, [1, 2]],
                                mesh.triangles[:, [2, 0]]]), axis=1)
    _, cnt = np.unique(e, axis=0, return_counts=True)
    assert cnt.max() <= 2


# -- predicates -------------------------------------------------------------------------------------


def test_orient_exact_on_near_collinear():
    # classic example where naive float evaluation gets the sign wrong
    for i in range(64):
        ax, ay = 0.5 + i * 2.0 ** -53, 0.5
        b = (12.0, 12.0)
        c = (24.0, 24.0)
        exact = (Fraction(ax) - Fraction(c[0])) * (Fraction(b[1]) - Fraction(c[1])) \
            - (Fraction(ay) - Fraction(c[1])) * (Fraction(b[0]) - Fraction(c[0]))
        assert orient(ax, ay, *b, *c) == (exact > 0) - (exact < 0)


@settings(max_examples=200)
@given(st.lists(st.tuples(st.integers(-4, 4), st.integers(-4, 4)), min_size=4, max_size=4, unique=True))
def test_incircle_matches_exact(pts):
    (a, b, c, d) = [(x / 3.0, y / 7.0) for x, y in pts]
    o = orient(*a, *b, *c)
    if o == 0:
        return
    if o < 0:
        b, c = c, b
    ref = in_circle_exact(a, b, c, d)
    assert incircle(*a, *b, *c, *d) == (ref > 0) - (ref < 0)


# -- delaunay ------------------------------------------------------------------------------------------


def test_delaunay_square_with_center():
    m = delaunay([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5]])
    assert len(m.triangles) == 4
    assert all(4 in t for t in m.triangles.tolist())
    check_triangulation(m)


def test_delaunay_three_points():
    m = delaunay([[0, 0], [1, 0], [0, 1]])
    assert m.triangles.tolist() == [[0, 1, 2]]


def test_delaunay_errors():
    with pytest.raises(ValueError):
        delaunay([[0, 0], [1, 1], [2, 2], [3, 3]])
    with pytest.raises(ValueError):
        delaunay([[0, 0], [1, 0], [0, 1], [1, 0]])
    with pytest.raises(ValueError):
        delaunay([[0, 0], [1, 0]])


@pytest.mark.parametrize("n", [10, 200, 500])
def test_delaunay_random_points_empty_circles(n):
    pts = Rng(n).generator().random((n, 2))
    m = delaunay(pts)
    check_triangulation(m)
    assert empty_circle_violations(pts, m.triangles) == 0


def test_delaunay_matches_scipy_on_general_position():
    spatial = pytest.importorskip("scipy.spatial")
    pts = Rng(77).generator().random((300, 2))
    ours = {tuple(sorted(t)) for t in delaunay(pts).triangles.tolist()}
    theirs = {tuple(sorted(t)) for t in spatial.Delaunay(pts).simplices.tolist()}
    assert ours == theirs


def test_delaunay_lattice_cocircular():
    g = np.stack(np.meshgrid(np.arange(10.0), np.arange(10.0), indexing="ij"), -1).reshape(-1, 2)
    m = delaunay(g)
    check_triangulation(m)
    assert len(m.triangles) == 2 * 81
    assert empty_circle_violations(g, m.triangles) == 0
    assert delaunay(g) == m  # deterministic


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30)), min_size=3, max_size=40, unique=True))
def test_delaunay_property_on_integer_points(pts):
    p = np.array(pts, dtype=float)
    if np.linalg.matrix_rank(p[1:] - p[0]) < 2:
        with pytest.raises(ValueError):
            delaunay(p)
        return
    m = delaunay(p)
    check_triangulation(m)
    assert empty_circle_violations(p, m.triangles) == 0
    used = np.unique(m.triangles)
    assert len(used) == len(p)


def test_delaunay_keeps_values():
    pts = Rng(1).generator().random((20, 2))
    m = delaunay(pts, np.arange(20.0))
    assert np.array_equal(m.values, np.arange(20.0))
    assert np.array_equal(m.points, pts)


# -- diagonal split ---------------------------------------------------------------------------------------


def test_diagonal_triangulate():
    m = diagonal_triangulate(A)
    assert len(m.triangles) == 18
    check_triangulation(m)
    deg = vertex_degrees(m)
    assert set(deg[~m.boundary].tolist()) == {6}
    h = edge_direction_histogram(m)
    assert h.nonzero_bins() == 3
    assert set(np.nonzero(h.counts)[0].tolist()) == {0, 9, 18}  # 0, 45 and 90 degrees


# -- poisson disc ---------------------------------------------------------------------------------------------


def test_boundary_ring_spacing():
    ring = boundary_ring((0, 2, 0, 1), 12)
    steps = np.linalg.norm(np.diff(np.vstack([ring, ring[:1]]), axis=0), axis=1)
    # spacing along the perimeter; chords at corners are shorter
    per = 6.0
    straight = [s for s, a, b in zip(steps, ring, np.roll(ring, -1, axis=0))
                if a[0] == b[0] or a[1] == b[1]]
    assert np.allclose(straight, per / 12)
    assert ring[0].tolist() == [0.0, 0.0]


def test_poisson_disc_min_distance():
    pts = poisson_disc((0, 1, 0, 1), 300, 0.04, Rng(2))
    d = np.linalg.norm(pts[:, None] - pts[None], axis=2)
    np.fill_diagonal(d, np.inf)
    assert d.min() >= 0.04
    assert len(pts) == 300
    assert np.all((pts > 0) & (pts < 1))
    with pytest.raises(ValueError):
        poisson_disc((0, 1, 0, 1), 3, 0.0, Rng(0))


def test_poisson_disc_respects_fixed_points():
    ring = boundary_ring((0, 1, 0, 1), 40)
    pts = poisson_disc((0, 1, 0, 1), 100, 0.05, Rng(3), fixed=ring)
    d = np.linalg.norm(pts[:, None] - ring[None], axis=2)
    assert d.min() >= 0.05


def test_poisson_delaunay_mesh():
    m = poisson_delaunay((0, 2, 0, 2), 900, None, Rng(4), eval_ring)
    assert m.n_vertices == 900
    check_triangulation(m)
    assert np.allclose(m.values, eval_ring(m.points[:, 0], m.points[:, 1]))
    n_b = 4 * 29
    inner = m.points[n_b:]
    d = np.linalg.norm(inner[:, None] - inner[None], axis=2)
    np.fill_diagonal(d, np.inf)
    assert d.min() >= 0.7 * np.sqrt(4 / 900)
    # boundary ring first, equally spaced along the perimeter of length 8
    ring = m.points[:n_b]
    assert np.allclose(np.abs(np.diff(ring[:10, 0])), 8 / n_b)
    assert m.boundary[:n_b].all()
    assert m == poisson_delaunay((0, 2, 0, 2), 900, None, Rng(4), eval_ring)
    assert m != poisson_delaunay((0, 2, 0, 2), 900, None, Rng(5), eval_ring)


def test_poisson_delaunay_degrees():
    m = poisson_delaunay((0, 1, 0, 1), 2500, None, Rng(6), lambda x, y: x + y)
    deg = vertex_degrees(m)[~m.boundary]
    assert abs(deg.mean() - 6) < 0.3
    assert len(np.unique(deg)) >= 4


def test_poisson_delaunay_too_small():
    with pytest.raises(ValueError):
        poisson_delaunay((0, 1, 0, 1), 5, None, Rng(0), eval_ring, n_boundary=8)


# -- suggested subdivision ----------------------------------------------------------------------------------


def test_subdivide_4x4():
    m = subdivide_suggested(A, Rng(0))
    assert m.n_vertices == 49
    assert m.n_vertices - 16 == 3 * (12 - 1)
    assert len(m.triangles) == 8 * 9
    check_triangulation(m)


@pytest.mark.parametrize("n", [2, 4, 16, 33])
def test_subdivide_point_count_formula(n):
    g = ScalarGrid(np.arange(n * n, dtype=float).reshape(n, n))
    m = subdivide_suggested(g, Rng(n))
    assert m.n_vertices - n * n == (n - 1) * (3 * n - 1)
    check_triangulation(m)


def test_subdivide_count_for_1024_by_formula():
    # counting only; the mesh itself is not built at this size
    n = 1024
    assert (n - 1) * (3 * n - 1) == 1023 * 3071 == 3141633


def test_subdivide_values_and_positions():
    g = sample(eval_ring, (9, 7), (0, 2, 0, 1.5))
    m = subdivide_suggested(g, Rng(3))
    n0 = 63
    assert np.array_equal(m.points[:n0], g.coords())
    assert np.array_equal(m.values[:n0], g.values.ravel())
    k = build_cubical(g)
    for c in range(n0, m.n_vertices):
        corners = k.vertices(c)
        lo, hi = g.values.ravel()[corners].min(), g.values.ravel()[corners].max()
        assert lo - 1e-12 <= m.values[c] <= hi + 1e-12
        x, y = m.points[c]
        assert m.values[c] == pytest.approx(bilinear_ref(g.values, g.spacing, g.origin, x, y), abs=1e-12)
        cpts = k.vertex_coords[corners]
        c_lo, c_hi = cpts.min(axis=0), cpts.max(axis=0)
        if k.cell_dim(c) == 2:
            rel = (m.points[c] - c_lo) / (c_hi - c_lo)
            assert np.all((rel >= 0.25) & (rel <= 0.75))
        else:
            assert np.allclose(m.points[c], cpts.mean(axis=0))


def test_subdivide_cells_are_delaunay():
    g = ScalarGrid(np.zeros((6, 6)))
    m = subdivide_suggested(g, Rng(9))
    k = build_cubical(g)
    by_cell = {}
    for t, q in zip(m.triangles.tolist(), m.tri_cell.tolist()):
        by_cell.setdefault(q, []).append(t)
    for q, tris in by_cell.items():
        assert len(tris) == 8
        ids = sorted({q} | set(k.vertices(q).tolist()) | set(k.faces(q).tolist()))
        assert set(np.unique(tris).tolist()) == set(ids)
        local = {v: i for i, v in enumerate(ids)}
        lt = [[local[v] for v in t] for t in tris]
        assert empty_circle_violations(m.points[ids], lt) == 0


def test_subdivide_is_deterministic_per_seed():
    a = subdivide_suggested(A, Rng(1))
    assert a == subdivide_suggested(A, Rng(1))
    assert a != subdivide_suggested(A, Rng(2))
    assert np.array_equal(a.parent, np.arange(49))


def test_subdivide_builds_valid_complex():
    m = subdivide_suggested(A, Rng(0))
    k = build_simplicial(m)
    assert k.counts() == [49, 49 + 72 - 1, 72]


# -- statistics -----------------------------------------------------------------------------------------------


def test_uniform_grid_statistics():
    k = build_cubical(sample(eval_ring, (16, 16), (0, 2, 0, 2)))
    h = edge_direction_histogram(k)
    assert h.nonzero_bins() == 2
    assert h.counts[0] == h.counts[18] == 15 * 16
    assert h.total == k.count(1)
    assert len(h.bin_edges) == 37
    d = vertex_degree_histogram(k, interior_only=True)
    assert np.nonzero(d.counts)[0].tolist() == [4]


def test_direction_histogram_against_reference():
    m = poisson_delaunay((0, 1, 0, 1), 400, None, Rng(1), lambda x, y: x)
    h = edge_direction_histogram(m)
    e = m.edges()
    d = m.points[e[:, 1]] - m.points[e[:, 0]]
    # exact diagonals come out as 44.99999999..., so snap before binning
    ang = np.round(np.degrees(np.arctan2(d[:, 1], d[:, 0])), 9)
    ang = np.where(ang < 0, ang + 180, ang)
    ang = np.where(ang >= 180, ang - 180, ang)
    ref, _ = np.histogram(ang, bins=np.linspace(0, 180, 37))
    assert np.array_equal(h.counts, ref)
    assert h.total == len(e)


def test_direction_histogram_bin_width():
    h = edge_direction_histogram(diagonal_triangulate(A), bin_width_deg=45)
    assert h.counts.tolist() == [12, 9, 12, 0]  # horizontal, diagonal, vertical
    with pytest.raises(ValueError):
        edge_direction_histogram(diagonal_triangulate(A), bin_width_deg=7)


def test_degree_histogram_total():
    m = diagonal_triangulate(A)
    h = vertex_degree_histogram(m)
    assert h.total == 16
    assert h.counts[6] == 4  # the four interior vertices
    assert vertex_degree_histogram(TriMesh([[0, 0], [1, 0], [0, 1]], None, [[0, 1, 2]])).counts.tolist() == [0, 0, 3]


def test_suggested_mesh_covers_all_directions():
    m = subdivide_suggested(sample(eval_ring, (64, 64), (0, 2, 0, 2)), Rng(0))
    assert edge_direction_histogram(m).nonzero_bins() == 36
