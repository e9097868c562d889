"""Scalar-field sources: analytic test functions, fixed fixtures, interpolation,
noise and random permutation fields.

All randomness goes through :class:`Rng`, which derives every draw from
``(seed, stream, site)`` so results never depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

_MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    x = (x + np.uint64(0x9E3779B97F4A7C15)) & _MASK64
    x = ((x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _MASK64
    x = ((x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _MASK64
    return x ^ (x >> np.uint64(31))


def _mix(*parts: int) -> int:
    h = np.uint64(0)
    with np.errstate(over="ignore"):
        for p in parts:
            h = _splitmix64(np.asarray(h ^ np.uint64(p & 0xFFFFFFFFFFFFFFFF), dtype=np.uint64))
    return int(h)


@dataclass(frozen=True)
class Rng:
    """Counter-based random source.

    ``uniform(sites)`` hashes ``(seed, stream, site)`` with splitmix64, so a
    draw for a given site is the same no matter which other sites are drawn or
    in which order.  ``generator`` hands out a numpy Philox generator for the
    few places that need sequential draws (permutations, dart throwing).
    """

    seed: int = 0

    def spawn(self, *keys: int) -> "Rng":
        return Rng(_mix(self.seed, 0x5EED, *keys))

    def uniform(self, sites, stream: int = 0) -> np.ndarray:
        sites = np.asarray(sites, dtype=np.uint64)
        key = np.uint64(_mix(self.seed, stream))
        with np.errstate(over="ignore"):
            h = _splitmix64(_splitmix64(sites ^ key) + key)
        # top 53 bits -> [0, 1)
        return (h >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))

    def generator(self, stream: int = 0) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=_mix(self.seed, stream)))


@dataclass
class ScalarGrid:
    """Vertex samples on an axis-aligned 2D or 3D lattice.

    ``values[i, j(, k)]`` is the sample at ``origin + (i, j(, k)) * spacing``;
    axis ``a`` of the array is coordinate ``a``.
    """

    values: np.ndarray
    origin: tuple = None
    spacing: tuple = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        nd = self.values.ndim
        if nd not in (2, 3):
            raise ValueError(f"grid must be 2D or 3D, got {nd}D")
        if self.origin is None:
            self.origin = (0.0,) * nd
        if self.spacing is None:
            self.spacing = (1.0,) * nd
        self.origin = tuple(float(o) for o in self.origin)
        self.spacing = tuple(float(s) for s in self.spacing)
        if len(self.origin) != nd or len(self.spacing) != nd:
            raise ValueError("origin/spacing must match grid dimension")
        if any(s <= 0 for s in self.spacing):
            raise ValueError("spacing must be positive")

    @property
    def dims(self) -> tuple:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    def coords(self) -> np.ndarray:
        """Vertex coordinates in row-major vertex order, shape (N, ndim)."""
        axes = [o + s * np.arange(n) for o, s, n in zip(self.origin, self.spacing, self.dims)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def upper(self) -> tuple:
        return tuple(o + s * (n - 1) for o, s, n in zip(self.origin, self.spacing, self.dims))

    def value_range(self) -> float:
        return float(self.values.max() - self.values.min())

    def __eq__(self, other):
        if not isinstance(other, ScalarGrid):
            return NotImplemented
        return (self.origin == other.origin and self.spacing == other.spacing
                and self.values.shape == other.values.shape
                and np.array_equal(self.values, other.values))


# ---------------------------------------------------------------------------
# analytic functions


def eval_ring(x, y):
    """Circular ridge of radius 1 around the origin on a tilted plane."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.exp(-2.0 * (np.sqrt(x * x + y * y) - 1.0) ** 2) - 0.3 * (x + y)


def eval_trig(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.sin(x * y) * np.cos(x + y)


ANALYTIC = {"ring": (eval_ring, (0.0, 2.0, 0.0, 2.0)),
            "trig": (eval_trig, (-2.0, 2.0, -2.0, 2.0))}


def sample(fn: Callable, dims: Sequence[int], domain: Sequence[float]) -> ScalarGrid:
    """Sample a 2D function on a lattice whose corners hit the domain bounds.

    ``domain`` is ``(x0, x1, y0, y1)``.
    """
    nx, ny = (int(d) for d in dims)
    if nx < 2 or ny < 2:
        raise ValueError("need at least 2 samples per axis")
    x0, x1, y0, y1 = (float(d) for d in domain)
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return ScalarGrid(fn(X, Y), origin=(x0, y0),
                      spacing=((x1 - x0) / (nx - 1), (y1 - y0) / (ny - 1)))


MATRIX_A = np.array([[9, 8, 7, 13],
                     [1, 6, 10, 0],
                     [12, 14, 2, 4],
                     [3, 11, 5, 15]], dtype=float)

TENSOR_B = np.array([[[14, 18, 9], [6, 24, 15], [23, 4, 7]],
                     [[10, 20, 0], [21, 1, 11], [2, 26, 25]],
                     [[12, 13, 8], [19, 22, 3], [17, 5, 16]]], dtype=float)


def builtin(name: str) -> ScalarGrid:
    if name == "matrixA":
        return ScalarGrid(MATRIX_A.copy())
    if name == "tensorB":
        return ScalarGrid(TENSOR_B.copy())
    raise KeyError(f"unknown builtin field {name!r}")


# ---------------------------------------------------------------------------
# interpolation


def bilinear(grid: ScalarGrid, x: float, y: float) -> float:
    """Bilinear interpolation of a 2D grid at domain point (x, y)."""
    if grid.ndim != 2:
        raise ValueError("bilinear needs a 2D grid")
    (ox, oy), (sx, sy) = grid.origin, grid.spacing
    nx, ny = grid.dims
    u = (x - ox) / sx
    v = (y - oy) / sy
    eps = 1e-9
    if not (-eps <= u <= nx - 1 + eps and -eps <= v <= ny - 1 + eps):
        raise ValueError(f"point ({x}, {y}) outside grid domain")
    return float(_bilinear_index(grid.values, np.array([u]), np.array([v]))[0])


def _bilinear_index(vals: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    nx, ny = vals.shape
    u = np.clip(u, 0, nx - 1)
    v = np.clip(v, 0, ny - 1)
    i = np.minimum(np.floor(u).astype(int), nx - 2)
    j = np.minimum(np.floor(v).astype(int), ny - 2)
    a = u - i
    b = v - j
    return ((1 - a) * (1 - b) * vals[i, j] + a * (1 - b) * vals[i + 1, j]
            + (1 - a) * b * vals[i, j + 1] + a * b * vals[i + 1, j + 1])


def resample(grid: ScalarGrid, dims: Sequence[int]) -> ScalarGrid:
    """Bilinearly resample a 2D grid onto ``dims`` samples over the same extent."""
    if grid.ndim != 2:
        raise ValueError("resample needs a 2D grid")
    nx, ny = grid.dims
    mx, my = (int(d) for d in dims)
    if mx < 2 or my < 2:
        raise ValueError("need at least 2 samples per axis")
    u = np.linspace(0.0, nx - 1, mx)
    v = np.linspace(0.0, ny - 1, my)
    U, V = np.meshgrid(u, v, indexing="ij")
    out = _bilinear_index(grid.values, U.ravel(), V.ravel()).reshape(mx, my)
    spacing = tuple(s * (n - 1) / (m - 1) for s, n, m in zip(grid.spacing, (nx, ny), (mx, my)))
    return ScalarGrid(out, origin=grid.origin, spacing=spacing)


def upsample(grid: ScalarGrid, factor: int) -> ScalarGrid:
    """Refine every cell into ``factor`` x ``factor`` cells.

    Output dims are ``factor * (dims - 1) + 1`` so the original samples sit at
    indices ``0, factor, 2 * factor, ...``; a 4x4 grid with factor 13 gives 40x40.
    """
    factor = int(factor)
    if factor < 1:
        raise ValueError("factor must be >= 1")
    if factor == 1:
        return ScalarGrid(grid.values.copy(), grid.origin, grid.spacing)
    out = resample(grid, [factor * (n - 1) + 1 for n in grid.dims])
    # exact copies of the coarse samples (linspace positions are exact anyway)
    out.values[::factor, ::factor] = grid.values
    return out


# ---------------------------------------------------------------------------
# randomness


def add_noise(grid: ScalarGrid, amplitude: float, rng: Rng, relative: bool = False) -> ScalarGrid:
    """Perturb every sample by uniform noise in ``[-amplitude, amplitude]``.

    With ``relative=True`` the amplitude is a fraction of the data range.
    """
    amp = float(amplitude) * (grid.value_range() if relative else 1.0)
    if amp == 0:
        return ScalarGrid(grid.values.copy(), grid.origin, grid.spacing)
    u = rng.uniform(np.arange(grid.values.size), stream=0x401)
    noise = (2.0 * u - 1.0) * amp
    return ScalarGrid(grid.values + noise.reshape(grid.dims), grid.origin, grid.spacing)


def random_field(dims: Sequence[int], rng: Rng) -> ScalarGrid:
    """Uniformly random permutation of ``0..N-1`` laid out on a grid."""
    dims = tuple(int(d) for d in dims)
    n = int(np.prod(dims))
    perm = rng.generator(stream=0xF1E1D).permutation(n)
    return ScalarGrid(perm.astype(float).reshape(dims))
