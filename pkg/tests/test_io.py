import json

import numpy as np
import pytest

from ccpoincare import io as cio
from ccpoincare.errors import InputError


def test_expressions():
    pts = np.array([[0.0, 1.0], [2.0, -1.0]])
    assert np.allclose(cio.eval_expression("1 + x^2 - abs(y)", pts), [0.0, 4.0])
    assert np.allclose(cio.eval_expression("max(x, y) * pi", pts), [np.pi, 2 * np.pi])
    assert np.allclose(cio.eval_expression("3", pts), [3.0, 3.0])
    assert np.allclose(cio.eval_expression("t + z", np.ones((1, 3))), [2.0])
    for bad in ("x +", "__import__('os')", "w + 1", "x.real", "sqrt(x, base=2)"):
        with pytest.raises(InputError):
            cio.eval_expression(bad, pts)


def test_build_space_generators():
    sp, g = cio.build_space("grid:2d:5")
    assert sp.n == 25 and g.shape == (5, 5)
    sp, g = cio.build_space("grid:2d:5", "grushin")
    assert g is not None and sp.n == 25 and sp.kappa >= 1
    with pytest.raises(InputError):
        cio.build_space("grid:1d:9", "grushin")
    sp, g = cio.build_space("cc:grushin:7")
    assert sp.n == 49 and g.lo == (-1.0, -1.0)
    sp, _ = cio.build_space("random:3d:20:4")
    assert sp.points.shape == (20, 3)
    assert cio.build_space("random:3d:20:4")[0].digest() == sp.digest()
    for bad in ("grid:2d", "cc:other:3", "nope", "missing.json"):
        with pytest.raises(InputError):
            cio.build_space(bad)


def test_space_json_round_trip(tmp_path):
    sp, _ = cio.build_space("random:2d:12:1")
    path = tmp_path / "s.json"
    path.write_text(json.dumps(cio.space_to_dict(sp)))
    back, grid = cio.build_space(str(path))
    assert grid is None and back.digest() == sp.digest()
    path.write_text(json.dumps({"points": [0.0, 1.0, 3.0]}))
    line = cio.load_space(path)
    assert line.n == 3 and line.dist[0, 2] == 3.0
    path.write_text(json.dumps({"measure": [1.0]}))
    with pytest.raises(InputError):
        cio.load_space(path)


def test_weights_from_dict(tmp_path):
    pts = np.linspace(0, 1, 5)[:, None]
    ws = cio.weights_from_dict({"u": "1 + x", "v": [1, [1, 2, 3, 4, 5]], "p_i": [4, 4], "q": 2,
                                "t": 2, "young": {"Psi": "power:4", "Phi": ["power:3", "power:3"]}},
                               pts)
    assert ws.p == pytest.approx(2.0) and ws.m == 2
    assert np.allclose(ws.u, 1 + pts[:, 0]) and np.allclose(ws.v[1], np.arange(1, 6))
    assert ws.psi.r == 4 and len(ws.phis) == 2
    with pytest.raises(InputError):
        cio.weights_from_dict({"p_i": [2]}, pts)
    with pytest.raises(InputError):
        cio.weights_from_dict({"v": [[1, 2]], "p_i": [2], "q": 2}, pts)
    with pytest.raises(InputError):
        cio.load_weights(tmp_path / "none.json", pts)


def test_schedules():
    assert cio.parse_schedule("2^-3..2^-5") == [0.125, 0.0625, 0.03125]
    assert cio.parse_schedule("0.5, 2^-2") == [0.5, 0.25]
    for bad in ("2^-3..3^-5", "a..b", "x,,"):
        with pytest.raises(InputError):
            cio.parse_schedule(bad)


def test_write_report(tmp_path):
    path = tmp_path / "r.json"
    text = cio.write_report({"b": np.float64(1.5), "a": np.arange(2), "c": np.bool_(True)}, str(path))
    assert path.read_text() == text
    assert json.loads(text) == {"a": [0, 1], "b": 1.5, "c": True}
    with pytest.raises(TypeError):
        cio.write_report({"x": object()}, None)
