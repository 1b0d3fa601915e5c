import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from trasdim.spaces import (
    TowerPoint,
    Window,
    WindowSpec,
    level_gap,
    make_window,
    neighborhood,
    point_from_json,
    point_to_json,
    profile_diameter,
    profile_of,
    set_metrics,
    sup_dist,
    tower_dist,
)


@st.composite
def tower_points(draw, max_level=6, bound=100):
    level = draw(st.integers(1, max_level))
    return TowerPoint(level, tuple(draw(st.lists(st.integers(-bound, bound), min_size=level, max_size=level))))


def test_level_gap_values():
    assert level_gap(1, 1) == 0
    assert level_gap(1, 2) == 1
    assert level_gap(1, 3) == 3
    assert level_gap(2, 4) == 5
    assert level_gap(4, 2) == 5


def test_tower_dist_examples():
    a = TowerPoint(1, (3,))
    b = TowerPoint(2, (3, 0))
    assert tower_dist(a, b) == 1
    assert tower_dist(a, TowerPoint(3, (3, 0, 0))) == 3
    assert tower_dist(TowerPoint(2, (0, 7)), TowerPoint(2, (1, 1))) == 6


def test_sup_dist_dimension_mismatch():
    with pytest.raises(ValueError):
        sup_dist((1, 2), (1,))


@given(tower_points(), tower_points(), tower_points())
def test_tower_metric_axioms(a, b, c):
    assert (tower_dist(a, b) == 0) == (a == b)
    assert tower_dist(a, b) == tower_dist(b, a)
    assert tower_dist(a, c) <= tower_dist(a, b) + tower_dist(b, c)


@given(tower_points(), tower_points())
def test_same_level_is_sup(a, b):
    if a.level == b.level:
        assert tower_dist(a, b) == sup_dist(a.coords, b.coords)
    else:
        assert tower_dist(a, b) >= level_gap(a.level, b.level) > 0


@pytest.mark.parametrize("spec,count", [
    (WindowSpec("zn", 3), 7),
    (WindowSpec("zn", 2, dims=2), 25),
    (WindowSpec("kzn", 5, dims=2, scale=2), 25),
    (WindowSpec("lomega", 4, level_cap=2), 9 + 25),
    (WindowSpec("linf", 1, level_cap=3), 3 + 9 + 27),
    (WindowSpec("zn", 0, dims=3), 1),
])
def test_window_sizes(spec, count):
    assert len(make_window(spec)) == count


def test_window_order_level_major():
    W = make_window(WindowSpec("lomega", 2, level_cap=2))
    levels = [p.level for p in W.points]
    assert levels == sorted(levels)
    assert W.points[0] == TowerPoint(1, (-2,))
    assert all(c % 2 == 0 for p in W.points if p.level == 2 for c in p.coords)


@pytest.mark.parametrize("spec", [WindowSpec("zn", 2, dims=2), WindowSpec("lomega", 4, level_cap=3),
                                  WindowSpec("linf", 1, level_cap=3)])
def test_matrix_matches_pointwise(spec):
    W = make_window(spec)
    M = W.matrix()
    for i, p in enumerate(W.points):
        for j, q in enumerate(W.points):
            assert M[i, j] == W.distance(p, q)


@given(st.sampled_from([WindowSpec("zn", 3, dims=2), WindowSpec("lomega", 4, level_cap=3)]),
       st.data())
def test_profile_diameter_is_exact(spec, data):
    W = make_window(spec)
    idx = data.draw(st.lists(st.integers(0, len(W) - 1), min_size=1, max_size=12, unique=True))
    assert profile_diameter(profile_of(W, idx)) == int(W.cross(idx, idx).max())


def test_window_spec_validation_and_json():
    with pytest.raises(ValueError):
        WindowSpec("hyperbolic", 3)
    with pytest.raises(ValueError):
        WindowSpec("zn", -1)
    with pytest.raises(ValueError):
        WindowSpec.from_json({"family": "zn", "side": 2, "colour": 1})
    spec = WindowSpec("lomega", 6, level_cap=3)
    assert WindowSpec.from_json(json.loads(json.dumps(spec.to_json()))) == spec


def test_window_rejects_bad_input():
    with pytest.raises(ValueError):
        Window([])
    with pytest.raises(ValueError):
        Window([(0,), (0,)])
    with pytest.raises(ValueError):
        Window([(0,), (0, 1)])
    with pytest.raises(ValueError):
        Window([TowerPoint(2, (0,))], "tower")


def test_point_json_roundtrip():
    for p in [(1, -2), TowerPoint(2, (4, -6))]:
        assert point_from_json(json.loads(json.dumps(point_to_json(p)))) == p


def test_neighborhood_and_set_metrics():
    W = make_window(WindowSpec("zn", 5))
    N = neighborhood([(0,)], 2, W)
    assert N == frozenset((x,) for x in range(-2, 3))
    assert set_metrics([(0,), (1,)], [(4,)], W) == (3, 1)


def test_csv_export():
    W = make_window(WindowSpec("zn", 1))
    text = W.to_csv(with_distances=True)
    rows = [r.split(",") for r in text.strip().splitlines()]
    assert len(rows) == 4
    assert rows[1][1:] == ["0", "1", "2"]
    assert W.to_json()["spec"] == {"family": "zn", "side": 1, "dims": 1}


def test_subwindow_keeps_distances():
    W = make_window(WindowSpec("lomega", 4, level_cap=2))
    sub = W.subwindow(W.points[::3])
    idx = [W.index[p] for p in sub.points]
    assert np.array_equal(sub.matrix(), W.cross(idx, idx))


@pytest.mark.parametrize("a,b,d", [((0, 0), (0, 0), 0), ((3, 4), (5, 1), 3), ((-2, 7, 0), (4, 7, -1), 6)])
def test_sup_examples(a, b, d):
    assert sup_dist(a, b) == d


@pytest.mark.parametrize("a,b,d", [
    (TowerPoint(2, (3, 4)), TowerPoint(2, (5, 1)), 3),
    (TowerPoint(1, (0,)), TowerPoint(3, (0, 0, 0)), 3),
    (TowerPoint(1, (6,)), TowerPoint(3, (1, 7, 0)), 7),
])
def test_tower_examples(a, b, d):
    assert tower_dist(a, b) == d == tower_dist(b, a)


def test_small_window_contents():
    assert make_window(WindowSpec("zn", 2)).points == tuple((x,) for x in range(-2, 3))
    assert set(make_window(WindowSpec("kzn", 2, dims=2, scale=2)).points) == {
        (x, y) for x in (-2, 0, 2) for y in (-2, 0, 2)}
    W = make_window(WindowSpec("lomega", 2, level_cap=2))
    assert len(W) == 14
    assert {p.coords for p in W.points if p.level == 1} == {(x,) for x in range(-2, 3)}


def test_neighborhood_and_metric_examples():
    W = make_window(WindowSpec("zn", 2))
    assert neighborhood([(0,)], 0, W) == {(0,)}
    assert neighborhood([(0,)], 1, W) == {(-1,), (0,), (1,)}
    L = make_window(WindowSpec("zn", 6))
    assert set_metrics([(0,), (1,)], [(4,), (5,)], L)[0] == 3
    assert set_metrics([(0,), (1,), (2,)], [(5,)], L)[1] == 2
    assert set_metrics([(3,)], [(3,)], L) == (0, 0)
