"""Hörmander vector-field families, subelliptic gradients and graph CC distances.

The Carnot-Carathéodory distance is approximated by shortest paths on a grid
graph.  Two kinds of edges are used:

* straight stencil edges (axis neighbours and face diagonals) whose
  displacement lies in the span of the fields at the edge midpoint; the cost
  is the norm of the minimal coefficient vector ``pinv(Y) @ d``;
* flow edges obtained by integrating a unit control for a short time and
  keeping the endpoint when it lands on a grid node; their cost is the
  integration time, so they are admissible curves.

Flow edges are what make grids of step-2 geometries such as the Heisenberg
group connected: no straight grid edge in the ``t`` direction is horizontal.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import shortest_path

from .errors import (CapacityError, DisconnectedGraphError, InputError,
                     ParameterError)
from .grid import GridSpec, grid_gradient
from .space import MAX_POINTS, DiscreteSpace

SPAN_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class FieldFamily:
    """``eval(points)`` maps (N, n) points to an (N, M, n) array of field vectors."""

    name: str
    ambient_dim: int
    count: int
    eval: Callable[[np.ndarray], np.ndarray]
    hormander_step: int = 1

    def __call__(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[1] != self.ambient_dim:
            raise InputError(f"{self.name} fields act on R^{self.ambient_dim}, "
                             f"got points of dimension {pts.shape[1]}")
        out = np.asarray(self.eval(pts), dtype=float)
        return out.reshape(len(pts), self.count, self.ambient_dim)


def euclidean_fields(n: int) -> FieldFamily:
    if n < 1:
        raise ParameterError("dimension must be positive")
    eye = np.eye(n)
    return FieldFamily(f"euclidean:{n}", n, n,
                       lambda p: np.broadcast_to(eye, (len(p), n, n)).copy(), 1)


def _grushin(p):
    out = np.zeros((len(p), 2, 2))
    out[:, 0, 0] = 1.0
    out[:, 1, 1] = p[:, 0]
    return out


def _heisenberg(p):
    out = np.zeros((len(p), 2, 3))
    out[:, 0, 0] = 1.0
    out[:, 0, 2] = -p[:, 1] / 2
    out[:, 1, 1] = 1.0
    out[:, 1, 2] = p[:, 0] / 2
    return out


def grushin_fields() -> FieldFamily:
    return FieldFamily("grushin", 2, 2, _grushin, 2)


def heisenberg_fields() -> FieldFamily:
    return FieldFamily("heisenberg", 3, 2, _heisenberg, 2)


def custom_fields(table: dict, name: str = "custom", hormander_step: int = 1) -> FieldFamily:
    """Fields interpolated multilinearly from samples on a rectangular lattice.

    ``table = {n, M, samples: [{point, vectors}]}``; every lattice node
    spanned by the distinct sample coordinates must be present.
    """
    try:
        n, M = int(table["n"]), int(table["M"])
        samples = table["samples"]
        pts = np.array([s["point"] for s in samples], dtype=float)
        vecs = np.array([s["vectors"] for s in samples], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed field table: {exc}") from exc
    if pts.shape != (len(samples), n) or vecs.shape != (len(samples), M, n):
        raise InputError("field table sample shapes disagree with n and M")
    axes = [np.unique(pts[:, k]) for k in range(n)]
    if any(len(a) < 2 for a in axes):
        raise InputError("field table needs at least two sample values per axis")
    shape = tuple(len(a) for a in axes)
    data = np.full(shape + (M, n), np.nan)
    idx = tuple(np.searchsorted(axes[k], pts[:, k]) for k in range(n))
    data[idx] = vecs
    if np.isnan(data).any():
        raise InputError("field table samples do not fill a rectangular lattice")
    interp = RegularGridInterpolator(axes, data, method="linear",
                                     bounds_error=False, fill_value=None)
    return FieldFamily(name, n, M, lambda p: interp(p), hormander_step)


def get_field_family(spec: str, table_path: str | None = None) -> FieldFamily:
    """Look up a family by id: ``euclidean:<n>``, ``grushin``, ``heisenberg``, ``custom``."""
    if spec.startswith("euclidean:"):
        try:
            return euclidean_fields(int(spec.split(":", 1)[1]))
        except ValueError as exc:
            raise InputError(f"bad field id {spec!r}") from exc
    if spec == "grushin":
        return grushin_fields()
    if spec == "heisenberg":
        return heisenberg_fields()
    if spec == "custom" or spec.startswith("custom:"):
        path = table_path or (spec.split(":", 1)[1] if ":" in spec else None)
        if not path:
            raise InputError("custom fields need a coefficient table file")
        try:
            table = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read field table {path}: {exc}") from exc
        return custom_fields(table)
    raise InputError(f"unknown field family {spec!r}")


# gradients -----------------------------------------------------------------

def subelliptic_gradient(field: FieldFamily, grid: GridSpec, values, index=None):
    """Yf at grid points: ``Y_k f(x) = Y_k(x) . grad f(x)``.

    Returns ``(Yf, one_sided)``: Yf has shape (N, M) (or (M,) for a single
    index) and ``one_sided`` flags points on the grid boundary, where the
    gradient uses one-sided differences.
    """
    if field.ambient_dim != grid.ndim:
        raise InputError("field and grid dimensions differ")
    grad = grid_gradient(grid, values)
    pts = grid.points()
    one_sided = grid.boundary_mask()
    if index is not None:
        Y = field(pts[index:index + 1])[0]
        return Y @ grad[index], bool(one_sided[index])
    Y = field(pts)
    return np.einsum("nkd,nd->nk", Y, grad), one_sided


def gradient_norm(field: FieldFamily, grid: GridSpec, values, index=None):
    Yf, flag = subelliptic_gradient(field, grid, values, index)
    return np.linalg.norm(Yf, axis=-1), flag


# CC graph -----------------------------------------------------------------

def heisenberg_grid(h: float, xy_half: float = 1.0, t_half: float = 0.5) -> GridSpec:
    """Node grid for the Heisenberg fields with t-spacing h^2/2.

    With this spacing, unit-speed horizontal moves of duration h (and the
    diagonal ones of duration sqrt(2) h) end exactly on grid nodes.
    """
    nxy = int(round(2 * xy_half / h)) + 1
    ht = h * h / 2
    nt = int(round(2 * t_half / ht)) + 1
    if nxy * nxy * nt > MAX_POINTS:
        raise CapacityError(f"Heisenberg grid with {nxy * nxy * nt} nodes exceeds the cap")
    tt = (nt - 1) * ht / 2
    return GridSpec((-xy_half, -xy_half, -tt), (xy_half, xy_half, tt), (nxy, nxy, nt))


def _stencil(n: int) -> np.ndarray:
    """Half of the axis plus face-diagonal neighbour offsets (one per +/- pair)."""
    offs = []
    for k in range(n):
        e = np.zeros(n, dtype=int)
        e[k] = 1
        offs.append(e)
    for k, l in itertools.combinations(range(n), 2):
        for s in (1, -1):
            e = np.zeros(n, dtype=int)
            e[k], e[l] = 1, s
            offs.append(e)
    return np.array(offs)


@dataclass
class CCGraph:
    nodes: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    costs: np.ndarray
    spacing: np.ndarray

    def matrix(self):
        n = len(self.nodes)
        # duplicate edges are reduced by taking the cheapest one
        order = np.lexsort((self.costs, self.cols, self.rows))
        r, c, w = self.rows[order], self.cols[order], self.costs[order]
        first = np.ones(len(r), dtype=bool)
        first[1:] = (r[1:] != r[:-1]) | (c[1:] != c[:-1])
        return coo_matrix((w[first], (r[first], c[first])), shape=(n, n)).tocsr()


def _stencil_edges(field: FieldFamily, grid: GridSpec):
    idx = grid.multi_index()
    shape = np.array(grid.shape)
    h = grid.spacing
    pts = grid.points()
    rows, cols, costs = [], [], []
    for off in _stencil(grid.ndim):
        nb = idx + off
        ok = np.all((nb >= 0) & (nb < shape), axis=1)
        src = np.flatnonzero(ok)
        if src.size == 0:
            continue
        dst = np.ravel_multi_index(tuple(nb[ok].T), grid.shape)
        disp = off * h
        mid = 0.5 * (pts[src] + pts[dst])
        Y = field(mid)                       # (E, M, n)
        A = np.transpose(Y, (0, 2, 1))       # (E, n, M): columns are fields
        coef = np.linalg.pinv(A) @ disp      # minimal-norm coefficients
        resid = np.linalg.norm(A @ coef[..., None] - disp[:, None], axis=(1, 2))
        keep = resid <= SPAN_TOL * np.linalg.norm(disp)
        rows.append(src[keep])
        cols.append(dst[keep])
        costs.append(np.linalg.norm(coef[keep], axis=1))
    return rows, cols, costs


def _flow(field: FieldFamily, x0: np.ndarray, control: np.ndarray, tau: float,
          steps: int = 8) -> np.ndarray:
    """RK4 integration of x' = sum_j c_j Y_j(x) for time tau."""
    dt = tau / steps
    x = x0.copy()

    def rhs(p):
        return np.einsum("k,nkd->nd", control, field(p))

    for _ in range(steps):
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * dt * k1)
        k3 = rhs(x + 0.5 * dt * k2)
        k4 = rhs(x + dt * k3)
        x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


def _controls(M: int) -> np.ndarray:
    out = []
    for j in range(M):
        for s in (1, -1):
            c = np.zeros(M)
            c[j] = s
            out.append(c)
    for j, l in itertools.combinations(range(M), 2):
        for s1, s2 in itertools.product((1, -1), repeat=2):
            c = np.zeros(M)
            c[j], c[l] = s1, s2
            out.append(c / np.sqrt(2))
    return np.array(out)


def _flow_edges(field: FieldFamily, grid: GridSpec):
    pts = grid.points()
    h = grid.spacing
    lo, hi = np.array(grid.lo), np.array(grid.hi)
    tol = 1e-8 * h
    base = float(h[: min(field.count, grid.ndim)].min())
    rows, cols, costs = [], [], []
    for c in _controls(field.count):
        for tau in (base, np.sqrt(2) * base):
            end = _flow(field, pts, c, tau)
            k = (end - lo) / h
            kr = np.rint(k)
            inside = np.all((end >= lo - tol) & (end <= hi + tol), axis=1)
            on_node = np.all(np.abs(k - kr) * h <= tol, axis=1) & inside
            src = np.flatnonzero(on_node)
            if src.size == 0:
                continue
            dst = np.ravel_multi_index(tuple(kr[on_node].astype(int).T), grid.shape)
            moved = dst != src
            rows.append(src[moved])
            cols.append(dst[moved])
            costs.append(np.full(moved.sum(), tau))
    return rows, cols, costs


def build_cc_graph(field: FieldFamily, grid: GridSpec) -> CCGraph:
    if field.ambient_dim != grid.ndim:
        raise InputError("field and grid dimensions differ")
    if grid.cell_centered:
        raise InputError("CC graphs are built on node grids")
    if grid.size > MAX_POINTS:
        raise CapacityError(f"{grid.size} nodes exceeds the cap of {MAX_POINTS}")
    r1, c1, w1 = _stencil_edges(field, grid)
    r2, c2, w2 = _flow_edges(field, grid)
    rows = np.concatenate(r1 + r2) if r1 + r2 else np.zeros(0, int)
    cols = np.concatenate(c1 + c2) if c1 + c2 else np.zeros(0, int)
    costs = np.concatenate(w1 + w2) if w1 + w2 else np.zeros(0)
    if rows.size == 0:
        raise DisconnectedGraphError("field span is degenerate on every grid edge; no edges")
    # symmetrize
    return CCGraph(grid.points(), np.concatenate([rows, cols]),
                   np.concatenate([cols, rows]), np.concatenate([costs, costs]),
                   grid.spacing)


def _cache_path(field: FieldFamily, grid: GridSpec) -> Path | None:
    root = os.environ.get("CCPOINCARE_CACHE_DIR")
    if not root or field.name.startswith("custom"):
        return None
    key = hashlib.sha256(repr((field.name, grid)).encode()).hexdigest()[:20]
    return Path(root) / f"cc_{key}.npz"


def cc_distance_matrix(field: FieldFamily, grid: GridSpec) -> DiscreteSpace:
    """Graph approximation of the CC metric on a node grid, with mu_i = cell volume."""
    cache = _cache_path(field, grid)
    if cache is not None and cache.exists():
        dist = np.load(cache)["dist"]
    else:
        graph = build_cc_graph(field, grid)
        dist = shortest_path(graph.matrix(), method="D", directed=False)
        bad = np.flatnonzero(~np.isfinite(dist[0]))
        if bad.size:
            x = grid.points()[bad[0]]
            raise DisconnectedGraphError(
                f"node {int(bad[0])} at {x.tolist()} is unreachable from node 0")
        if cache is not None:
            cache.parent.mkdir(parents=True, exist_ok=True)
            np.savez_compressed(cache, dist=dist)
    mu = np.full(grid.size, grid.cell_volume)
    return DiscreteSpace(grid.points(), mu, dist, 1.0, grid, f"cc:{field.name}")


@dataclass
class Comparability:
    C1: float
    C2: float
    witness_lower: tuple[int, int]
    witness_upper: tuple[int, int]
    finite: bool


def comparability_check(space: DiscreteSpace, M0: int) -> Comparability:
    """Tightest C1, C2 with C1|x-y| <= rho(x,y) <= C2|x-y|^(1/M0) over all pairs."""
    if M0 < 1:
        raise ParameterError("M0 must be a positive integer")
    n = space.n
    iu = np.triu_indices(n, 1)
    if iu[0].size == 0:
        return Comparability(1.0, 1.0, (0, 0), (0, 0), True)
    diff = space.points[iu[0]] - space.points[iu[1]]
    e = np.linalg.norm(diff, axis=1)
    rho = space.dist[iu]
    pos = e > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        low = np.where(pos, rho / np.where(pos, e, 1), np.inf)
        up = np.where(pos, rho / np.where(pos, e, 1) ** (1.0 / M0),
                      np.where(rho > 0, np.inf, 0.0))
    i, j = int(np.argmin(low)), int(np.argmax(up))
    C1, C2 = float(low[i]), float(up[j])
    finite = np.isfinite(C2) and C1 > 0
    return Comparability(C1, C2, (int(iu[0][i]), int(iu[1][i])),
                         (int(iu[0][j]), int(iu[1][j])), bool(finite))


def product_metric(d1: DiscreteSpace, d2: DiscreteSpace) -> DiscreteSpace:
    """Product space with mu = mu1 x mu2 and the max metric; point (i, j) -> i*n2 + j."""
    n1, n2 = d1.n, d2.n
    if n1 * n2 > MAX_POINTS:
        raise CapacityError(f"product has {n1 * n2} points, above the cap of {MAX_POINTS}")
    pts = np.concatenate([np.repeat(d1.points, n2, axis=0),
                          np.tile(d2.points, (n1, 1))], axis=1)
    mu = np.outer(d1.measure, d2.measure).ravel()
    dist = np.maximum(np.repeat(np.repeat(d1.dist, n2, axis=0), n2, axis=1),
                      np.tile(d2.dist, (n1, n1)))
    kappa = max(d1.kappa, d2.kappa)
    return DiscreteSpace(pts, mu, dist, kappa, None, f"({d1.label})x({d2.label})")
