import numpy as np
import pytest

from ccpoincare import fields as fields_mod
from ccpoincare.errors import CapacityError, DisconnectedGraphError, InputError
from ccpoincare.fields import (FieldFamily, build_cc_graph, cc_distance_matrix,
                               comparability_check, custom_fields, euclidean_fields,
                               get_field_family, gradient_norm, grushin_fields,
                               heisenberg_fields, heisenberg_grid, product_metric,
                               subelliptic_gradient)
from ccpoincare.grid import GridSpec, grid_gradient
from ccpoincare.space import Ball, DiscreteSpace


def test_builtin_field_values():
    p = np.array([[0.5, -2.0, 3.0]])
    H = heisenberg_fields()(p)[0]
    assert np.allclose(H, [[1, 0, 1.0], [0, 1, 0.25]])
    G = grushin_fields()(np.array([[0.3, 7.0]]))[0]
    assert np.allclose(G, [[1, 0], [0, 0.3]])
    E = euclidean_fields(3)(np.zeros((4, 3)))
    assert E.shape == (4, 3, 3) and np.allclose(E[2], np.eye(3))


def test_field_dimension_mismatch():
    with pytest.raises(InputError):
        grushin_fields()(np.zeros((2, 3)))


def test_lookup():
    assert get_field_family("grushin").name == "grushin"
    assert get_field_family("euclidean:2").ambient_dim == 2
    with pytest.raises(InputError):
        get_field_family("nope")
    with pytest.raises(InputError):
        get_field_family("euclidean:x")


def _table(drop_last=False):
    samples = [{"point": [x, y], "vectors": [[1, 0], [0, x]]}
               for x in (-1.0, 0.0, 1.0) for y in (-1.0, 1.0)]
    if drop_last:
        samples = samples[:-1]
    return {"n": 2, "M": 2, "samples": samples}


def test_custom_fields_interpolate_grushin():
    fam = custom_fields(_table())
    pts = np.random.default_rng(0).uniform(-1, 1, (20, 2))
    assert np.allclose(fam(pts), grushin_fields()(pts))


@pytest.mark.parametrize("table", [
    _table(drop_last=True),
    {"n": 2, "M": 2},
    {"n": 2, "M": 1, "samples": _table()["samples"]},
])
def test_custom_fields_malformed(table):
    with pytest.raises(InputError):
        custom_fields(table)


def test_custom_fields_from_file(tmp_path):
    import json
    path = tmp_path / "t.json"
    path.write_text(json.dumps(_table()))
    fam = get_field_family(f"custom:{path}")
    assert fam.count == 2
    with pytest.raises(InputError):
        get_field_family("custom")


def test_grid_gradient_exact_on_quadratics():
    g = GridSpec.uniform(9, 2, -1, 1)
    f = g.evaluate(lambda p: p[:, 0] ** 2 - 3 * p[:, 0] * p[:, 1] + p[:, 1])
    grad = grid_gradient(g, f)
    x, y = g.points().T
    assert np.allclose(grad[:, 0], 2 * x - 3 * y, atol=1e-12)
    assert np.allclose(grad[:, 1], -3 * x + 1, atol=1e-12)


def test_subelliptic_gradient_grushin():
    g = GridSpec.uniform(11, 2, -1, 1)
    f = g.evaluate(lambda p: p[:, 0] * p[:, 1])
    Yf, one_sided = subelliptic_gradient(grushin_fields(), g, f)
    x, y = g.points().T
    assert np.allclose(Yf[:, 0], y, atol=1e-12)
    assert np.allclose(Yf[:, 1], x * x, atol=1e-12)
    assert one_sided.sum() == 40
    single, flag = subelliptic_gradient(grushin_fields(), g, f, index=60)
    assert np.allclose(single, Yf[60]) and flag == one_sided[60]
    norm, _ = gradient_norm(grushin_fields(), g, f)
    assert np.allclose(norm, np.hypot(y, x * x))


def test_heisenberg_grid_shape():
    g = heisenberg_grid(0.25)
    assert g.shape == (9, 9, 33)
    assert g.spacing[2] == pytest.approx(0.25 ** 2 / 2)


def test_heisenberg_horizontal_distance_exact():
    g = heisenberg_grid(0.5)
    sp = cc_distance_matrix(heisenberg_fields(), g)
    a = g.nearest_index([-1, 0, 0])
    b = g.nearest_index([1, 0, 0])
    assert sp.dist[a, b] == pytest.approx(2.0)
    # vertical moves are possible but cost more than their Euclidean length
    o, t = g.nearest_index([0, 0, 0]), g.nearest_index([0, 0, 0.25])
    assert np.isfinite(sp.dist[o, t]) and sp.dist[o, t] > 0.25


def test_grushin_distances():
    g = GridSpec.uniform(17, 2, -1, 1)
    sp = cc_distance_matrix(grushin_fields(), g)
    a, b = g.nearest_index([-1, 0]), g.nearest_index([0.5, 0])
    assert sp.dist[a, b] == pytest.approx(1.5)
    comp = comparability_check(sp, 2)
    assert comp.finite and comp.C1 > 0
    # the degenerate direction is expensive near x = 0
    c, d = g.nearest_index([0, -0.125]), g.nearest_index([0, 0.125])
    assert sp.dist[c, d] > 0.25


def test_euclidean_graph_distance_close_to_straight_line():
    g = GridSpec.uniform(21, 2)
    sp = cc_distance_matrix(euclidean_fields(2), g)
    e = np.linalg.norm(g.points()[:, None] - g.points()[None], axis=2)
    off = e > 0
    ratio = sp.dist[off] / e[off]
    assert ratio.min() >= 1 - 1e-12 and ratio.max() <= 1.1


def test_single_field_graph_is_disconnected():
    fam = FieldFamily("x-only", 2, 1, lambda p: np.tile([[1.0, 0.0]], (len(p), 1, 1)))
    with pytest.raises(DisconnectedGraphError):
        cc_distance_matrix(fam, GridSpec.uniform(5, 2))


def test_zero_fields_have_no_edges():
    fam = FieldFamily("zero", 2, 2, lambda p: np.zeros((len(p), 2, 2)))
    with pytest.raises(DisconnectedGraphError):
        build_cc_graph(fam, GridSpec.uniform(4, 2))


def test_graph_rejects_cell_centred_grid():
    with pytest.raises(InputError):
        build_cc_graph(grushin_fields(), GridSpec.uniform(4, 2, cell_centered=True))


def test_distance_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("CCPOINCARE_CACHE_DIR", str(tmp_path))
    g = GridSpec.uniform(7, 2, -1, 1)
    first = cc_distance_matrix(grushin_fields(), g)
    files = list(tmp_path.glob("*.npz"))
    assert len(files) == 1
    second = cc_distance_matrix(grushin_fields(), g)
    assert np.array_equal(first.dist, second.dist)


def test_comparability_on_euclidean_points():
    sp = DiscreteSpace.euclidean(np.random.default_rng(1).random((20, 2)))
    comp = comparability_check(sp, 1)
    assert comp.C1 == pytest.approx(1.0) and comp.C2 == pytest.approx(1.0)


def test_product_metric_membership():
    r = np.random.default_rng(2)
    d1 = DiscreteSpace.euclidean(r.random((5, 1)), r.uniform(0.5, 1, 5))
    d2 = DiscreteSpace.euclidean(r.random((4, 2)), r.uniform(0.5, 1, 4))
    prod = product_metric(d1, d2)
    assert prod.n == 20
    assert prod.measure.sum() == pytest.approx(d1.measure.sum() * d2.measure.sum())
    for c in range(prod.n):
        for rad in (0.1, 0.3, 0.7):
            i, j = divmod(c, d2.n)
            want = np.outer(d1.ball_mask(Ball(i, rad)), d2.ball_mask(Ball(j, rad))).ravel()
            assert np.array_equal(prod.ball_mask(Ball(c, rad)), want)


def test_product_metric_capacity(monkeypatch):
    monkeypatch.setattr(fields_mod, "MAX_POINTS", 10)
    d = DiscreteSpace.euclidean(np.arange(4.0)[:, None])
    with pytest.raises(CapacityError):
        product_metric(d, d)
