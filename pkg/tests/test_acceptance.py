"""Acceptance gate.

Each test records one pass/fail line per criterion; the lines are printed in
the "acceptance criteria" section of the pytest terminal summary.
"""

import time
from collections import Counter

import numpy as np
import pytest

from morsegrid.analysis import (anchor_cells, circle_deviation, diff, diff_connectivity,
                                enumerate_gradients, interior_summary, movable_saddles,
                                run_experiment, run_experiment_interpolated)
from morsegrid.complex import build_cubical, build_simplicial
from morsegrid.fields import (Rng, add_noise, builtin, eval_ring, eval_trig,
                              random_field, sample, upsample)
from morsegrid.gradient import (STEEPEST, compute_gradient, expand_skeleton, probabilistic,
                                process_lower_star, validate)
from morsegrid.grids import (diagonal_triangulate, edge_direction_histogram, poisson_delaunay,
                             subdivide_suggested, vertex_degrees)
from morsegrid.morse import extract, simplify

A = builtin("matrixA")
B = builtin("tensorB")


def ms_for(k, policy=STEEPEST):
    return extract(k, compute_gradient(k, policy))


# -- 1: gradient validity --------------------------------------------------------------------------------


def test_c01_gradient_validity(accept):
    t0 = time.perf_counter()
    grids = [A, B] + [random_field((8, 8), Rng(100 + i)) for i in range(100)]
    grids += [sample(eval_ring, (64, 64), (0, 2, 0, 2)), sample(eval_trig, (64, 64), (-2, 2, -2, 2))]
    bad = 0
    for i, grid in enumerate(grids):
        k = build_cubical(grid)
        for policy in (STEEPEST, probabilistic(i)):
            bad += not validate(compute_gradient(k, policy)).ok
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 10
    accept(1, "gradient validity", ok, f"invalid={bad} of {2 * len(grids)}, {dt:.1f}s (< 10s)")
    assert bad == 0
    assert dt < 10


# -- 2: parts that do not depend on the first vector ---------------------------------------------------------


def fixed_parts(k, policy):
    g = compute_gradient(k, policy)
    dims = k.cell_dims()
    crit = g.critical
    out = {"minima": sorted(c for c in crit if dims[c] == 0),
           "counts": g.critical_counts(),
           "top": sorted(c for c in crit if dims[c] >= 2)}
    if k.dim == 3:
        ms = extract(k, g)
        out["saddle2_max"] = Counter((s.upper, s.lower) for s in ms.separatrices if s.index == 3)
    return out


def test_c02_fixed_parts(accept):
    grids = [A, B] + [random_field((8, 8), Rng(200 + i)) for i in range(20)] \
        + [random_field((3, 3, 3), Rng(300 + i)) for i in range(20)]
    violations = 0
    for grid in grids:
        k = build_cubical(grid)
        ref = fixed_parts(k, STEEPEST)
        for s in range(25):
            got = fixed_parts(k, probabilistic(s))
            violations += sum(got[key] != ref[key] for key in ref)
    accept(2, "fixed minima/max/2-saddles and 2-saddle-max arcs", violations == 0,
           f"violations={violations} over {len(grids)} fields x 25 seeds")
    assert violations == 0


# -- 3: expansion-order independence inside a lower star ------------------------------------------------------


def skeleton_checks(k, rng, n_orders=50):
    """Violations of full 0-simplex coverage and of a fixed paired 1-simplex set."""
    cover = same = 0
    for v in range(k.count(0)):
        r = k.reduced_lower_star(v)
        verts = [c for c in r.cells if r.dim[c] == 0]
        if not verts:
            continue
        seen = set()
        for _ in range(n_orders):
            start = verts[int(rng.integers(len(verts)))]
            pairs, critical = expand_skeleton(r, start, rng)
            # the start simplex is covered by the vector pairing it with v
            covered = {start} | set(pairs) | {c for c in critical if r.dim[c] == 0}
            cover += covered != set(verts)
            seen.add(frozenset(pairs.values()))
        same += len(seen) > 1
    return cover, same


def test_c03_skeleton_expansion_2d(accept):
    rng = np.random.default_rng(3)
    cover = same = 0
    for grid in [A] + [random_field((8, 8), Rng(400 + i)) for i in range(10)]:
        c, s = skeleton_checks(build_cubical(grid), rng)
        cover += c
        same += s
    accept(3, "1-skeleton expansion: full cover, fixed paired set", cover == same == 0,
           f"uncovered={cover} differing-stars={same}")
    assert cover == 0 and same == 0


def test_c03_fixed_top_pairs_3d(accept):
    rng = np.random.default_rng(33)
    grids = [B] + [random_field((3, 3, 3), Rng(500 + i)) for i in range(10)]
    violations = cover = same = 0
    for grid in grids:
        k = build_cubical(grid)
        dims = k.cell_dims()
        c, s = skeleton_checks(k, rng)
        cover += c
        same += s
        for v in range(k.count(0)):
            edges = [e for e in k.lower_star(v).tolist() if dims[e] == 1]
            outs = set()
            for e in edges:
                r = process_lower_star(k, v, first=e)
                outs.add(frozenset((a, b) for a, b in r.pairs if dims[a] == 2))
            violations += len(outs) > 1
    ok = violations == cover == same == 0
    accept(3, "3D 2-3 pairings fixed per lower star", ok,
           f"stars with differing 2-3 pairs={violations} uncovered={cover} differing-skeleton={same}")
    assert ok


# -- 4: saddles only move inside their lower star -------------------------------------------------------------


def containment_violations(k, a, b):
    bad = 0
    rep = diff(a, b)
    bad += len(rep.errors)
    for owner, ca, cb in rep.moved_saddles:
        bad += not (k.owner[ca] == k.owner[cb] == owner)
    # reference: saddle counts per owner star agree
    ca = Counter((cp.index, int(k.owner[cp.cell])) for cp in a.saddles())
    cb = Counter((cp.index, int(k.owner[cp.cell])) for cp in b.saddles())
    bad += ca != cb
    return bad


def test_c04_saddle_containment(accept):
    bad = moved = 0
    k = build_cubical(A)
    a = ms_for(k)
    for s in range(100):
        b = ms_for(k, probabilistic(s))
        bad += containment_violations(k, a, b)
        moved += len(diff(a, b).moved_saddles)
    for i in range(100):
        k = build_cubical(random_field((8, 8), Rng(600 + i)))
        a, b = ms_for(k), ms_for(k, probabilistic(i))
        bad += containment_violations(k, a, b)
        moved += len(diff(a, b).moved_saddles)
    accept(4, "moved saddles stay in their lower star", bad == 0 and moved > 0,
           f"violations={bad}, moved saddles seen={moved}")
    assert bad == 0 and moved > 0


# -- 5: exhaustive enumeration on the 4x4 fixture ---------------------------------------------------------------


def test_c05_movable_saddle_count(accept):
    k = build_cubical(A)
    mov = movable_saddles(k)
    n = len(mov)
    owners = sorted(int(A.values.ravel()[v]) for v in mov)
    accept(5, "movable saddles on matrixA == 3", n == 3, f"found {n} (lower stars of values {owners})")
    assert n == 3


def test_c05_connectivity_change_exists(accept):
    k = build_cubical(A)
    ref = ms_for(k)
    changes = total = 0
    for _, g in enumerate_gradients(k):
        total += 1
        changes += bool(diff_connectivity(ref, extract(k, g)))
    accept(5, "some first-vector combination changes connectivity", changes > 0,
           f"{changes} of {total} combinations")
    assert changes > 0


# -- 6: random-field experiment -----------------------------------------------------------------------------------

_C6_START = []


def _c6_clock():
    if not _C6_START:
        _C6_START.append(time.perf_counter())
    return time.perf_counter() - _C6_START[0]


_C6 = {}


def c6_result(key):
    _c6_clock()
    if key not in _C6:
        if key[0] == "plain":
            _C6[key] = run_experiment(key[1], 1000, seed=0)
        else:
            _C6[key] = run_experiment_interpolated(4, key[1] // 4, 1000, seed=0)
    return _C6[key]


@pytest.mark.parametrize("size,pos,con", [(4, (0.603, 0.15), (0.235, 0.15)),
                                          (8, (0.90, None), (0.80, None)),
                                          (16, (0.99, None), (0.99, None))])
def test_c06_random_fields(accept, size, pos, con):
    r = c6_result(("plain", size))

    def check(x, bound):
        mid, tol = bound
        return abs(x - mid) <= tol if tol is not None else x >= mid

    ok = check(r.positional_fraction, pos) and check(r.connectivity_fraction, con)
    accept(6, f"{size}x{size} fractions", ok,
           f"positional={r.positional_fraction:.3f} connectivity={r.connectivity_fraction:.3f}")
    assert ok


@pytest.mark.parametrize("size,pos,con", [(8, 0.567, 0.533), (16, 0.581, 0.555)])
def test_c06_interpolated_fields(accept, size, pos, con):
    r = c6_result(("interp", size))
    plain = c6_result(("plain", size))
    ok = (abs(r.positional_fraction - pos) <= 0.20 and abs(r.connectivity_fraction - con) <= 0.20
          and r.positional_fraction < plain.positional_fraction
          and r.connectivity_fraction < plain.connectivity_fraction)
    accept(6, f"interpolated {size}x{size} fractions", ok,
           f"positional={r.positional_fraction:.3f} connectivity={r.connectivity_fraction:.3f} "
           f"(plain {plain.positional_fraction:.3f}/{plain.connectivity_fraction:.3f})")
    assert ok


def test_c06_runtime(accept):
    for key in [("plain", 4), ("plain", 8), ("plain", 16), ("interp", 8), ("interp", 16)]:
        c6_result(key)
    dt = _c6_clock()
    accept(6, "experiment runtime", dt < 300, f"{dt:.0f}s (< 300s)")
    assert dt < 300


# -- 7: subdivision counts -----------------------------------------------------------------------------------------


@pytest.mark.parametrize("n", [4, 16, 64])
def test_c07_subdivision_formula(accept, n):
    g = random_field((n, n), Rng(n))
    m = subdivide_suggested(g, Rng(n))
    added = m.n_vertices - n * n
    k = build_cubical(g)
    vals = g.values.ravel()
    out_of_range = 0
    for c in range(n * n, m.n_vertices):
        corners = vals[k.vertices(c)]
        out_of_range += not (corners.min() <= m.values[c] <= corners.max())
    ok = added == (n - 1) * (3 * n - 1) and out_of_range == 0
    accept(7, f"suggested subdivision {n}x{n}", ok,
           f"added={added} expected={(n - 1) * (3 * n - 1)} out-of-range={out_of_range}")
    assert ok


# -- 8: grid statistics --------------------------------------------------------------------------------------------


def test_c08_grid_statistics(accept):
    g128 = sample(eval_ring, (128, 128), (0, 2, 0, 2))
    uni = edge_direction_histogram(build_cubical(g128)).nonzero_bins()
    diag_mesh = diagonal_triangulate(g128)
    diag = edge_direction_histogram(diag_mesh).nonzero_bins()
    deg = set(vertex_degrees(diag_mesh)[~diag_mesh.boundary].tolist())
    poi = edge_direction_histogram(
        poisson_delaunay((0, 2, 0, 2), 128 * 128, None, Rng(0), eval_ring)).nonzero_bins()
    sug = edge_direction_histogram(subdivide_suggested(g128, Rng(0))).nonzero_bins()
    ok = uni == 2 and diag == 3 and poi == 36 and sug == 36 and deg == {6}
    accept(8, "direction bins and degrees", ok,
           f"uniform={uni} diagonal={diag} poisson={poi} suggested={sug} diag-interior-degree={sorted(deg)}")
    assert ok


# -- 9: subdivision keeps the uniform topology -----------------------------------------------------------------


def test_c09_suggestion_preserves_topology(accept):
    g = upsample(A, 13)
    assert g.dims == (40, 40)
    ku = build_cubical(g)
    ref_counts, ref_keys = interior_summary(ms_for(ku), ku)
    m = subdivide_suggested(g, Rng(0))
    ks = build_simplicial(m)
    gs = compute_gradient(ks)
    ms, _ = simplify(extract(ks, gs), gs, 1e-5 * g.value_range())
    counts, keys = interior_summary(ms, ku, anchor_cells(m, ks, ku))
    extra = sum(((keys - ref_keys) + (ref_keys - keys)).values())
    accept(9, "interior counts and separatrix stars after subdivision", counts == ref_counts and extra == 0,
           f"counts {counts} vs {ref_counts}; unmatched separatrix keys={extra}")
    assert counts == ref_counts
    assert keys == ref_keys


# -- 10: geometric accuracy ------------------------------------------------------------------------------------------


def ridge_radius():
    """Radius where the ring function peaks, averaged over the sampled quadrant."""
    r = np.linspace(0.5, 1.5, 20001)
    out = []
    for t in np.linspace(0, np.pi / 2, 91):
        out.append(r[np.argmax(eval_ring(r * np.cos(t), r * np.sin(t)))])
    return float(np.mean(out))


def test_c10_geometric_accuracy(accept):
    t0 = time.perf_counter()
    dom = (0, 2, 0, 2)
    g = sample(eval_ring, (256, 256), dom)
    radius = ridge_radius()
    ku = build_cubical(g)
    d_uni = circle_deviation(ms_for(ku), (0, 0), radius)
    ks = build_simplicial(subdivide_suggested(g, Rng(0)))
    d_sug = circle_deviation(ms_for(ks), (0, 0), radius)
    kp = build_simplicial(poisson_delaunay(dom, 256 * 256, None, Rng(0), eval_ring))
    d_poi = circle_deviation(ms_for(kp), (0, 0), radius)
    dt = time.perf_counter() - t0
    ok = d_uni > 2 * d_sug and d_uni > 2 * d_poi and dt < 120
    accept(10, "uniform ridge deviation > 2x suggested and poisson", ok,
           f"uniform={d_uni:.5f} suggested={d_sug:.5f} poisson={d_poi:.5f} "
           f"ratios={d_uni / d_sug:.2f}/{d_uni / d_poi:.2f}, {dt:.0f}s (< 120s)")
    assert ok


# -- 11: simplification ------------------------------------------------------------------------------------------------


def test_c11_cancellation_invariants(accept):
    bad = steps = 0
    for i in range(50):
        grid = random_field((8, 8), Rng(700 + i))
        k = build_cubical(grid)
        g = compute_gradient(k, probabilistic(i) if i % 2 else STEEPEST)
        ms = extract(k, g)
        bad += ms.euler() != 1
        prev = [sum(ms.critical_counts())]

        def step(gf, lo, hi):
            nonlocal bad, steps
            c = gf.critical_counts()
            bad += sum((-1) ** d * n for d, n in enumerate(c)) != 1
            bad += sum(c) != prev[0] - 2
            prev[0] = sum(c)
            steps += 1

        ms2, _ = simplify(ms, g, grid.value_range(), on_cancel=step)
        bad += ms2.euler() != 1
    accept(11, "Euler sum kept and count drops by 2 per cancellation", bad == 0 and steps > 0,
           f"violations={bad} over {steps} cancellations")
    assert bad == 0 and steps > 0


def test_c11_high_simplification_differences(accept):
    base = upsample(A, 13)
    pairs = equal = changed = 0
    for ns in range(10):
        g = add_noise(base, 2.0, Rng(ns))
        k = build_cubical(g)
        th = 0.45 * g.value_range()
        ga = compute_gradient(k)
        a, _ = simplify(extract(k, ga), ga, th)
        for ps in range(5):
            gb = compute_gradient(k, probabilistic(ps))
            b, _ = simplify(extract(k, gb), gb, th)
            pairs += 1
            equal += a.critical_counts() == b.critical_counts()
            changed += bool(diff_connectivity(a, b))
    ok = equal == pairs and changed > 0
    accept(11, "45% simplification: equal counts, connectivity differs", ok,
           f"equal counts {equal}/{pairs}, connectivity differences in {changed}/{pairs}")
    assert equal == pairs
    assert changed > 0
