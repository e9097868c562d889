"""Text file formats for grids, meshes, complexes and diff reports.

Every writer takes an optional manifest dict, stored as a ``# manifest``
line in text formats and as a ``manifest`` key in JSON formats.  Floats are
written with ``repr`` so reading gives back the exact values.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .fields import ScalarGrid
from .grids import TriMesh
from .morse import CriticalCell, MSComplex, Separatrix

MANIFEST_PREFIX = "# manifest "


def _manifest_line(manifest) -> str:
    return MANIFEST_PREFIX + json.dumps(manifest, sort_keys=True) + "\n" if manifest else ""


def _fmt(x) -> str:
    return repr(float(x))


def read_manifest(path):
    """Manifest of any file written by this module, or None."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return json.loads(text).get("manifest")
    for line in text.splitlines():
        if line.startswith(MANIFEST_PREFIX):
            return json.loads(line[len(MANIFEST_PREFIX):])
        if not line.startswith("#"):
            break
    return None


def _content_lines(text):
    return [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]


# -- scalar grids ----------------------------------------------------------------


def format_grid(grid: ScalarGrid, manifest=None) -> str:
    out = [_manifest_line(manifest),
           "dims " + " ".join(str(d) for d in grid.dims) + "\n",
           "origin " + " ".join(_fmt(o) for o in grid.origin) + "\n",
           "spacing " + " ".join(_fmt(s) for s in grid.spacing) + "\n",
           "values\n"]
    out.extend(_fmt(v) + "\n" for v in grid.values.ravel().tolist())
    return "".join(out)


def parse_grid(text: str) -> ScalarGrid:
    lines = _content_lines(text)
    head = {}
    i = 0
    while i < len(lines) and lines[i].strip() != "values":
        key, *rest = lines[i].split()
        head[key] = rest
        i += 1
    if "dims" not in head or i == len(lines):
        raise ValueError("not a scalar grid file")
    dims = tuple(int(d) for d in head["dims"])
    vals = np.array([float(v) for v in lines[i + 1:]], dtype=np.float64)
    if vals.size != int(np.prod(dims)):
        raise ValueError(f"expected {int(np.prod(dims))} values, found {vals.size}")
    origin = tuple(float(o) for o in head.get("origin", [0.0] * len(dims)))
    spacing = tuple(float(s) for s in head.get("spacing", [1.0] * len(dims)))
    return ScalarGrid(vals.reshape(dims), origin, spacing)


# -- triangle meshes ---------------------------------------------------------------


def format_mesh(mesh: TriMesh, manifest=None) -> str:
    out = [_manifest_line(manifest), "OFF\n", f"{mesh.n_vertices} {len(mesh.triangles)} 0\n"]
    for (x, y), v, b in zip(mesh.points.tolist(), mesh.values.tolist(), mesh.boundary.tolist()):
        out.append(f"{_fmt(x)} {_fmt(y)} {_fmt(v)} {int(b)}\n")
    for a, b, c in mesh.triangles.tolist():
        out.append(f"3 {a} {b} {c}\n")
    return "".join(out)


def parse_mesh(text: str) -> TriMesh:
    lines = _content_lines(text)
    if not lines or lines[0].strip() != "OFF":
        raise ValueError("not an OFF mesh file")
    nv, nt = (int(x) for x in lines[1].split()[:2])
    if len(lines) < 2 + nv + nt:
        raise ValueError("truncated mesh file")
    rows = [ln.split() for ln in lines[2:2 + nv]]
    pts = np.array([[float(r[0]), float(r[1])] for r in rows]).reshape(-1, 2)
    vals = np.array([float(r[2]) for r in rows])
    bnd = np.array([bool(int(r[3])) for r in rows], dtype=bool)
    tris = np.array([[int(x) for x in ln.split()[1:4]] for ln in lines[2 + nv:2 + nv + nt]],
                    dtype=np.int64).reshape(-1, 3)
    return TriMesh(pts, vals, tris, bnd)


# -- complexes and reports -----------------------------------------------------------


def ms_to_dict(ms: MSComplex, manifest=None) -> dict:
    def sep(s: Separatrix):
        return {"upper": s.upper, "lower": s.lower, "index": s.index,
                "endpoint_stars": list(s.endpoint_stars), "path": list(s.path),
                "polyline": np.asarray(s.polyline).tolist()}

    return {"manifest": manifest or {},
            "dim": ms.dim,
            "fingerprint": ms.fingerprint,
            "critical_counts": ms.critical_counts(),
            "criticals": [cp.to_dict() for cp in ms.criticals],
            "separatrices": [sep(s) for s in ms.separatrices],
            "open_paths": [sep(s) for s in ms.open_paths]}


def ms_from_dict(d: dict) -> MSComplex:
    def sep(e):
        return Separatrix(int(e["upper"]), int(e["lower"]), tuple(e["path"]),
                          tuple(e["endpoint_stars"]),
                          np.asarray(e["polyline"], dtype=np.float64).reshape(len(e["path"]), -1),
                          int(e["index"]))

    crit = [CriticalCell(int(c["cell"]), int(c["index"]), int(c["owner_star"]), float(c["value"]),
                         tuple(float(x) for x in c["coords"])) for c in d["criticals"]]
    return MSComplex(int(d["dim"]), crit, [sep(e) for e in d["separatrices"]], d["fingerprint"],
                     None, [sep(e) for e in d.get("open_paths", [])])


def format_ms(ms: MSComplex, manifest=None) -> str:
    return json.dumps(ms_to_dict(ms, manifest), indent=1, sort_keys=True) + "\n"


def parse_ms(text: str) -> MSComplex:
    return ms_from_dict(json.loads(text))


def format_diff(report, manifest=None) -> str:
    d = {"manifest": manifest or {}}
    d.update(report.to_dict())
    return json.dumps(d, indent=1, sort_keys=True) + "\n"


# -- file helpers ------------------------------------------------------------------


def detect(text: str) -> str:
    """Format name of a file's contents: grid, mesh, msc or diff."""
    s = text.lstrip()
    if s.startswith("{"):
        d = json.loads(s)
        return "msc" if "criticals" in d else "diff"
    lines = _content_lines(text)
    if lines and lines[0].strip() == "OFF":
        return "mesh"
    if lines and lines[0].startswith("dims"):
        return "grid"
    raise ValueError("unrecognised file format")


def load(path):
    """Read any supported file; returns ``(kind, object)``."""
    text = Path(path).read_text()
    kind = detect(text)
    if kind == "grid":
        return kind, parse_grid(text)
    if kind == "mesh":
        return kind, parse_mesh(text)
    if kind == "msc":
        return kind, parse_ms(text)
    return kind, json.loads(text)


def write_grid(path, grid, manifest=None):
    Path(path).write_text(format_grid(grid, manifest))


def write_mesh(path, mesh, manifest=None):
    Path(path).write_text(format_mesh(mesh, manifest))


def write_ms(path, ms, manifest=None):
    Path(path).write_text(format_ms(ms, manifest))


def read_grid(path) -> ScalarGrid:
    return parse_grid(Path(path).read_text())


def read_mesh(path) -> TriMesh:
    return parse_mesh(Path(path).read_text())


def read_ms(path) -> MSComplex:
    return parse_ms(Path(path).read_text())
