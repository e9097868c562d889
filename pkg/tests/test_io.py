import json

import numpy as np
import pytest

from morsegrid import io
from morsegrid.analysis import diff
from morsegrid.complex import build_cubical
from morsegrid.fields import Rng, ScalarGrid, builtin, random_field
from morsegrid.gradient import STEEPEST, compute_gradient, probabilistic
from morsegrid.grids import poisson_delaunay, subdivide_suggested
from morsegrid.morse import extract


def test_grid_round_trip(tmp_path):
    g = ScalarGrid(Rng(1).generator().random((5, 7)) / 3, (0.1, -2.0), (0.25, 1 / 3))
    p = tmp_path / "g.txt"
    io.write_grid(p, g, {"seed": 4})
    back = io.read_grid(p)
    assert np.array_equal(back.values, g.values)
    assert back.origin == g.origin and back.spacing == g.spacing
    assert io.read_manifest(p) == {"seed": 4}


def test_grid_3d_round_trip():
    g = builtin("tensorB")
    back = io.parse_grid(io.format_grid(g))
    assert np.array_equal(back.values, g.values)


def test_grid_parse_errors():
    with pytest.raises(ValueError):
        io.parse_grid("dims 2 2\nvalues\n1\n2\n3\n")
    with pytest.raises(ValueError):
        io.parse_grid("hello\n")


def test_mesh_round_trip(tmp_path):
    m = poisson_delaunay((0, 1, 0, 1), 60, None, Rng(2), lambda x, y: x * y)
    p = tmp_path / "m.off"
    io.write_mesh(p, m)
    back = io.read_mesh(p)
    assert back == m
    assert np.array_equal(back.boundary, m.boundary)
    assert io.read_manifest(p) is None


def test_mesh_parse_errors():
    with pytest.raises(ValueError):
        io.parse_mesh("PLY\n")
    with pytest.raises(ValueError):
        io.parse_mesh("OFF\n3 1 0\n0 0 0 1\n")


@pytest.mark.parametrize("grid", [builtin("matrixA"), builtin("tensorB"), random_field((8, 8), Rng(3))],
                         ids=["matrixA", "tensorB", "rand"])
def test_ms_round_trip(tmp_path, grid):
    k = build_cubical(grid)
    ms = extract(k, compute_gradient(k, probabilistic(1)))
    p = tmp_path / "ms.json"
    io.write_ms(p, ms, {"policy": "probabilistic"})
    back = io.read_ms(p)
    assert back == ms
    assert back.critical_counts() == ms.critical_counts()
    assert io.read_manifest(p) == {"policy": "probabilistic"}
    # a reloaded complex still diffs against a live one
    assert not diff(back, ms).positional


def test_diff_format():
    k = build_cubical(builtin("matrixA"))
    a = extract(k, compute_gradient(k, STEEPEST))
    d = json.loads(io.format_diff(diff(a, a), {"command": "diff"}))
    assert d["manifest"] == {"command": "diff"}
    assert d["totals"]["moved_saddles"] == 0


def test_detect_and_load(tmp_path):
    k = build_cubical(builtin("matrixA"))
    a = extract(k, compute_gradient(k))
    m = subdivide_suggested(builtin("matrixA"), Rng(0))
    files = {"grid": io.format_grid(builtin("matrixA"), {"x": 1}),
             "mesh": io.format_mesh(m),
             "msc": io.format_ms(a),
             "diff": io.format_diff(diff(a, a))}
    for kind, text in files.items():
        assert io.detect(text) == kind
        p = tmp_path / kind
        p.write_text(text)
        assert io.load(p)[0] == kind
    with pytest.raises(ValueError):
        io.detect("nothing here\n")


def test_floats_survive_exactly():
    vals = np.array([[0.1, 1 / 3], [np.pi, -1e-300]])
    assert np.array_equal(io.parse_grid(io.format_grid(ScalarGrid(vals))).values, vals)
