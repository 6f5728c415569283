"""Space and weight specifications, a small expression evaluator and report writers."""

from __future__ import annotations

import ast
import json
import operator
import re
from pathlib import Path

import numpy as np

from .errors import InputError
from .fields import cc_distance_matrix, get_field_family, heisenberg_grid
from .grid import GridSpec
from .orlicz import parse_young
from .space import DiscreteSpace
from .weights import WeightSystem

# expressions -------------------------------------------------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_FUNCS = {"abs": np.abs, "sqrt": np.sqrt, "exp": np.exp, "log": np.log, "sin": np.sin,
          "cos": np.cos, "tanh": np.tanh, "min": np.minimum, "max": np.maximum}
_COORDS = ("x", "y", "z")


def eval_expression(expr: str, points: np.ndarray) -> np.ndarray:
    """Evaluate an arithmetic expression in the coordinates x, y, z (t for the
    third coordinate as well) at every point; ``^`` means power."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    names = {c: points[:, i] for i, c in enumerate(_COORDS[: points.shape[1]])}
    if points.shape[1] >= 3:
        names["t"] = points[:, 2]
    names["pi"] = np.pi
    names["e"] = np.e
    try:
        tree = ast.parse(expr.strip().replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise InputError(f"cannot parse expression {expr!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise InputError(f"unknown name {node.id!r} in {expr!r}")
            return names[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and not node.keywords):
            return _FUNCS[node.func.id](*[ev(a) for a in node.args])
        raise InputError(f"unsupported syntax in {expr!r}")

    with np.errstate(divide="ignore", invalid="ignore"):
        out = ev(tree)
    return np.broadcast_to(np.asarray(out, dtype=float), (len(points),)).copy()


# spaces -------------------------------------------------------------------------

_GRID = re.compile(r"^grid:(\d)d:(\d+)$")
_CC = re.compile(r"^cc:(grushin|heisenberg|euclidean):([0-9.]+)$")
_RANDOM = re.compile(r"^random:(\d)d:(\d+)(?::(\d+))?$")


def build_space(spec: str, fields: str | None = None) -> tuple[DiscreteSpace, GridSpec | None]:
    """Space from a generator string or a JSON file.

    ``grid:<d>d:<n>``     Euclidean metric on n^d nodes of [0, 1]^d
                          (CC metric of ``fields`` instead when given).
    ``cc:grushin:<n>``    Grushin CC metric on n x n nodes of [-1, 1]^2.
    ``cc:heisenberg:<h>`` Heisenberg CC metric on the anisotropic grid of step h.
    ``cc:euclidean:<n>``  graph metric of the coordinate fields on n x n nodes.
    ``random:<d>d:<n>[:seed]`` n uniform random points of [0, 1]^d.
    A ``.json`` path loads {points, measure, dist?, kappa?}.
    """
    if m := _GRID.match(spec):
        d, n = int(m.group(1)), int(m.group(2))
        grid = GridSpec.uniform(n, d)
        if fields and not fields.startswith("euclidean"):
            return cc_distance_matrix(get_field_family(fields), grid), grid
        return DiscreteSpace.from_grid(grid, label=spec), grid
    if m := _CC.match(spec):
        kind, val = m.group(1), m.group(2)
        if kind == "heisenberg":
            grid = heisenberg_grid(float(val))
            fam = get_field_family("heisenberg")
        else:
            n = int(float(val))
            grid = GridSpec((-1.0, -1.0), (1.0, 1.0), (n, n))
            fam = get_field_family("grushin" if kind == "grushin" else "euclidean:2")
        return cc_distance_matrix(fam, grid), grid
    if m := _RANDOM.match(spec):
        d, n, seed = int(m.group(1)), int(m.group(2)), int(m.group(3) or 0)
        pts = np.random.default_rng(seed).random((n, d))
        return DiscreteSpace.euclidean(pts, label=spec), None
    path = Path(spec)
    if path.suffix == ".json":
        if not path.exists():
            raise InputError(f"space file {spec} does not exist")
        return load_space(path), None
    raise InputError(f"bad space spec {spec!r}")


def space_to_dict(space: DiscreteSpace) -> dict:
    return {"label": space.label, "points": space.points.tolist(),
            "measure": space.measure.tolist(), "dist": space.dist.tolist(),
            "kappa": space.kappa, "digest": space.digest()}


def load_space(path) -> DiscreteSpace:
    data = json.loads(Path(path).read_text())
    try:
        pts = np.asarray(data["points"], dtype=float)
    except KeyError as exc:
        raise InputError("space file needs 'points'") from exc
    if pts.ndim == 1:
        pts = pts[:, None]
    mu = np.asarray(data.get("measure", np.full(len(pts), 1.0 / len(pts))), dtype=float)
    if "dist" in data:
        return DiscreteSpace.from_metric(pts, mu, np.asarray(data["dist"], dtype=float),
                                         kappa=data.get("kappa"), label=data.get("label", str(path)))
    return DiscreteSpace.euclidean(pts, mu, label=data.get("label", str(path)))


# weights ----------------------------------------------------------------------------

def _weight_values(entry, points: np.ndarray) -> np.ndarray:
    if isinstance(entry, str):
        return eval_expression(entry, points)
    if isinstance(entry, (int, float)):
        return np.full(len(points), float(entry))
    arr = np.asarray(entry, dtype=float).ravel()
    if arr.shape != (len(points),):
        raise InputError("weight arrays need one value per point")
    return arr


def weights_from_dict(data: dict, points: np.ndarray) -> WeightSystem:
    """{u, v: [...], p?, q, p_i: [...], t?, young?: {Psi, Phi: [...]}}."""
    try:
        u = _weight_values(data.get("u", 1.0), points)
        v_entries = data["v"] if "v" in data else [1.0] * len(data["p_i"])
        v = [_weight_values(e, points) for e in v_entries]
        p_i = [float(x) for x in data["p_i"]]
        q = float(data["q"])
    except KeyError as exc:
        raise InputError(f"weight spec is missing {exc}") from exc
    p = float(data["p"]) if "p" in data else 1.0 / sum(1.0 / x for x in p_i)
    psi = phis = None
    if "young" in data:
        y = data["young"]
        psi = parse_young(y["Psi"]) if "Psi" in y else None
        phis = tuple(parse_young(s) for s in y.get("Phi", []))
    return WeightSystem(u, tuple(v), p, q, tuple(p_i), data.get("t"), psi, phis)


def load_weights(path, points: np.ndarray) -> WeightSystem:
    path = Path(path)
    if not path.exists():
        raise InputError(f"weights file {path} does not exist")
    return weights_from_dict(json.loads(path.read_text()), points)


# schedules ----------------------------------------------------------------------------

def parse_schedule(text: str) -> list[float]:
    """"2^-3..2^-10" (unit steps in the exponent) or a comma list of numbers."""
    if ".." in text:
        a, b = text.split("..")
        ma, mb = (re.fullmatch(r"\s*([0-9.]+)\^(-?\d+)\s*", s) for s in (a, b))
        if not ma or not mb or float(ma.group(1)) != float(mb.group(1)):
            raise InputError(f"bad range {text!r}; use base^k..base^l")
        base, ka, kb = float(ma.group(1)), int(ma.group(2)), int(mb.group(2))
        step = 1 if kb >= ka else -1
        return [base ** k for k in range(ka, kb + step, step)]
    try:
        return [float(eval_expression(s, np.zeros((1, 1)))[0]) for s in text.split(",")]
    except InputError as exc:
        raise InputError(f"bad schedule {text!r}") from exc


def write_report(data: dict, path: str | None) -> str:
    text = json.dumps(data, indent=2, sort_keys=True, default=_jsonable) + "\n"
    if path:
        Path(path).write_text(text)
    return text


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")
