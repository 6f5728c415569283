"""Dyadic cube hierarchies on finite quasi-metric spaces.

Construction: nested greedy nets, top-down.  The net at level k extends the
net at level k+1 by scanning points in order of decreasing mass (index
breaks ties) and accepting every point at distance >= A^k from all current
centers.  Cubes are then formed bottom-up: singletons at the lowest level,
and at each higher level every child cube is attached wholesale to the
level-k center nearest to the child's center (lowest index on ties).  The
whole-child attachment makes the hierarchy nested by construction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .space import Ball, DiscreteSpace


@dataclass
class Cube:
    level: int
    center: int
    members: np.ndarray
    parent: int | None = None   # index of the parent cube in the level above


@dataclass
class DyadicTree:
    A: float
    kappa: float
    levels: dict[int, list[Cube]]
    a0: float
    a1: float
    k_min: int
    k_max: int
    a1_measured: float = 0.0

    @property
    def level_indices(self) -> list[int]:
        """Levels from the top (k_max) down to k_min."""
        return list(range(self.k_max, self.k_min - 1, -1))

    def cubes(self):
        for k in self.level_indices:
            for j, q in enumerate(self.levels[k]):
                yield k, j, q

    def labels(self, k: int, n: int) -> np.ndarray:
        """Cube index of every point at level k (-1 where uncovered)."""
        out = np.full(n, -1, dtype=int)
        for j, q in enumerate(self.levels[k]):
            out[q.members] = j
        return out

    def scale(self, k: int) -> float:
        return self.A ** k

    def to_dict(self) -> dict:
        return {
            "A": self.A,
            "kappa": self.kappa,
            "levels": [{"k": k, "cubes": [{"center": int(q.center),
                                           "members": [int(i) for i in q.members],
                                           "parent": q.parent}
                                          for q in self.levels[k]]}
                       for k in self.level_indices],
            "a0": self.a0,
            "a1": self.a1,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def default_base(kappa: float) -> float:
    return max(4.0 * kappa, 4.0)


def _greedy_net(space: DiscreteSpace, start: list[int], scale: float,
                scan: np.ndarray) -> list[int]:
    centers = list(start)
    if centers:
        near = np.min(space.dist[centers], axis=0)
    else:
        near = np.full(space.n, np.inf)
    for p in scan:
        if near[p] >= scale:
            centers.append(int(p))
            np.minimum(near, space.dist[p], out=near)
    return centers


def build_dyadic(space: DiscreteSpace, A: float | None = None) -> DyadicTree:
    kappa = space.kappa
    if A is None:
        A = default_base(kappa)
    if A <= 2 * kappa:
        raise ParameterError(f"A = {A} must exceed 2*kappa = {2 * kappa}")
    n = space.n
    scan = np.lexsort((np.arange(n), -space.measure))
    diam = space.diam
    k_max = 0 if diam == 0 else math.floor(math.log(diam) / math.log(A)) + 1
    while diam > 0 and A ** (k_max - 1) > diam:
        k_max -= 1
    while A ** k_max <= diam:
        k_max += 1

    nets: dict[int, list[int]] = {k_max: [int(scan[0])]}
    k = k_max
    while len(nets[k]) < n:
        k -= 1
        nets[k] = _greedy_net(space, nets[k + 1], A ** k, scan)
    k_min = k

    levels: dict[int, list[Cube]] = {}
    levels[k_min] = [Cube(k_min, c, np.array([c])) for c in nets[k_min]]
    for k in range(k_min + 1, k_max + 1):
        centers = np.array(nets[k])
        groups: list[list[int]] = [[] for _ in centers]
        for ci, child in enumerate(levels[k - 1]):
            d = space.dist[child.center, centers]
            owner = int(np.flatnonzero(d == d.min())[0])
            groups[owner].append(ci)
            child.parent = owner
        cubes = []
        for owner, c in enumerate(centers):
            members = np.sort(np.concatenate([levels[k - 1][ci].members for ci in groups[owner]]))
            cubes.append(Cube(k, int(c), members))
        levels[k] = cubes

    tree = DyadicTree(float(A), float(kappa), levels, 0.0, 1.0, k_min, k_max)
    a0, a1m = _measure_constants(tree, space)
    tree.a0 = a0
    tree.a1_measured = a1m
    tree.a1 = max(a1m * (1 + 1e-12), 1.0)
    return tree


def _cube_diam(space: DiscreteSpace, members: np.ndarray) -> tuple[float, tuple[int, int]]:
    if len(members) < 2:
        return 0.0, (int(members[0]), int(members[0]))
    sub = space.dist[np.ix_(members, members)]
    i, j = np.unravel_index(np.argmax(sub), sub.shape)
    return float(sub[i, j]), (int(members[i]), int(members[j]))


def _inner_radius(space: DiscreteSpace, cube: Cube) -> tuple[float, int | None]:
    """dist(x_Q, X minus Q) and the nearest outside point."""
    outside = np.ones(space.n, dtype=bool)
    outside[cube.members] = False
    if not outside.any():
        return math.inf, None
    d = np.where(outside, space.dist[cube.center], np.inf)
    j = int(np.argmin(d))
    return float(d[j]), j


def _measure_constants(tree: DyadicTree, space: DiscreteSpace) -> tuple[float, float]:
    a0, a1 = math.inf, 0.0
    for k, _, q in tree.cubes():
        dq, _ = _cube_diam(space, q.members)
        a1 = max(a1, dq / tree.scale(k))
        r, _ = _inner_radius(space, q)
        a0 = min(a0, r / tree.scale(k))
    if not math.isfinite(a0):
        a0 = 1.0    # only the single-point space has no outside points
    return a0, a1


def cube_ball(tree: DyadicTree, cube: Cube) -> Ball:
    """B(Q) = B(x_Q, 2 kappa a1 A^k)."""
    return Ball(cube.center, 2 * tree.kappa * tree.a1 * tree.scale(cube.level))


@dataclass
class PropertyResult:
    name: str
    passed: bool
    witness: dict | None = None


@dataclass
class DyadicReport:
    a0: float
    a1: float
    results: list[PropertyResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def __getitem__(self, name: str) -> PropertyResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


def verify_properties(tree: DyadicTree, space: DiscreteSpace) -> DyadicReport:
    """Exhaustive check of the five cube properties.

    (i) each level partitions X; (ii) cubes at different levels are nested or
    disjoint; (iii) each cube lies in exactly one cube of every coarser level,
    and its recorded parent contains it; (iv) diam(Q) <= a1 A^k; (v) Q contains
    B(x_Q, a0 A^k) with a0 > 0.  Labels are recomputed from member lists so
    that edits to a built tree are detected.
    """
    n = space.n
    rep = DyadicReport(0.0, 0.0)
    ks = tree.level_indices

    # (i)
    res = PropertyResult("coverage", True)
    for k in ks:
        count = np.zeros(n, dtype=int)
        for q in tree.levels[k]:
            count[q.members] += 1
        if np.any(count != 1):
            p = int(np.flatnonzero(count != 1)[0])
            res = PropertyResult("coverage", False,
                                 {"level": k, "point": p, "covered": int(count[p])})
            break
    rep.results.append(res)

    labels = {k: tree.labels(k, n) for k in ks}

    # (ii) every finer cube sees a single label at each coarser level
    res = PropertyResult("nested", True)
    for l in reversed(ks):
        for j, q in enumerate(tree.levels[l]):
            for k in ks:
                if k <= l:
                    continue
                lab = labels[k][q.members]
                if np.any(lab != lab[0]):
                    bad = int(np.flatnonzero(lab != lab[0])[0])
                    res = PropertyResult("nested", False, {
                        "level": l, "cube": j, "coarse_level": k,
                        "points": [int(q.members[0]), int(q.members[bad])]})
                    break
            if not res.passed:
                break
        if not res.passed:
            break
    rep.results.append(res)

    # (iii)
    res = PropertyResult("unique_ancestor", True)
    for k in ks[1:]:
        for j, q in enumerate(tree.levels[k]):
            par = tree.levels[k + 1][q.parent] if q.parent is not None else None
            if par is None or not np.all(np.isin(q.members, par.members)):
                miss = None if par is None else int(q.members[~np.isin(q.members, par.members)][0])
                res = PropertyResult("unique_ancestor", False,
                                     {"level": k, "cube": j, "point": miss})
                break
        if not res.passed:
            break
    rep.results.append(res)

    # (iv)
    a1, wit = 0.0, None
    for k, j, q in tree.cubes():
        dq, pair = _cube_diam(space, q.members)
        if dq / tree.scale(k) > a1:
            a1, wit = dq / tree.scale(k), {"level": k, "cube": j, "points": list(pair)}
    rep.a1 = a1
    rep.results.append(PropertyResult("diameter", a1 <= tree.a1 * (1 + 1e-12),
                                      None if a1 <= tree.a1 * (1 + 1e-12) else wit))

    # (v)
    a0, wit = math.inf, None
    for k, j, q in tree.cubes():
        r, out = _inner_radius(space, q)
        if r / tree.scale(k) < a0:
            a0, wit = r / tree.scale(k), {"level": k, "cube": j,
                                          "points": [int(q.center), out]}
    if not math.isfinite(a0):
        a0 = tree.a0
    rep.a0 = a0
    ok = a0 > 0 and q_contains_center(tree)
    rep.results.append(PropertyResult("inner_ball", ok, None if ok else wit))
    return rep


def q_contains_center(tree: DyadicTree) -> bool:
    return all(q.center in set(q.members.tolist()) for _, _, q in tree.cubes())


def ancestors(tree: DyadicTree, k: int, j: int) -> list[tuple[int, int]]:
    out = []
    q = tree.levels[k][j]
    while q.parent is not None:
        k += 1
        j = q.parent
        q = tree.levels[k][j]
        out.append((k, j))
    return out


def cubes_containing(tree: DyadicTree, x: int) -> list[tuple[int, int]]:
    out = []
    for k in tree.level_indices:
        for j, q in enumerate(tree.levels[k]):
            if x in q.members:
                out.append((k, j))
                break
    return out
