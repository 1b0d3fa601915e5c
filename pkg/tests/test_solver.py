import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trasdim.covers import Family, validate_cover
from trasdim.solver import (
    BudgetExhausted,
    Certificate,
    DecisionInstance,
    ResultCache,
    Verdict,
    brute_force_decide,
    decide_cover,
    greedy_upper,
    min_diameter,
)
from trasdim.spaces import Window, WindowSpec, make_window

LINE = make_window(WindowSpec("zn", 4))  # 9 points, -4..4


def line10():
    return Window([(x,) for x in range(10)])


WORKED = [
    ((3,), 9, Verdict.SAT),
    ((3,), 2, Verdict.UNSAT),
    ((3, 3), 1, Verdict.SAT),
    ((2, 2), 0, Verdict.SAT),
    ((3, 3), 0, Verdict.UNSAT),
]


@pytest.mark.parametrize("radii,D,expected", WORKED)
def test_worked_examples(radii, D, expected):
    inst = DecisionInstance(line10(), radii, D)
    cert = decide_cover(inst)
    assert cert.verdict is expected
    assert brute_force_decide(inst).verdict is expected
    if expected is Verdict.SAT:
        assert validate_cover(cert.witness, inst.window, D).accepted


def test_canonical_witness_is_stable():
    inst = DecisionInstance(line10(), (3, 3), 1)
    a = decide_cover(inst)
    b = decide_cover(inst)
    assert a.witness == b.witness
    blocks = [f.sorted_blocks() for f in a.witness.families()]
    assert blocks == [[[(0,), (1,)], [(4,), (5,)], [(8,), (9,)]], [[(2,), (3,)], [(6,), (7,)]]]


def test_instance_validation():
    with pytest.raises(ValueError):
        DecisionInstance(LINE, (), 1)
    with pytest.raises(ValueError):
        DecisionInstance(LINE, (0, 2), 1)
    with pytest.raises(ValueError):
        DecisionInstance(LINE, (2,), -1)


def test_digest_depends_on_every_field():
    base = DecisionInstance(LINE, (2, 3), 2).digest()
    assert base == DecisionInstance(make_window(WindowSpec("zn", 4)), [2, 3], 2).digest()
    assert base != DecisionInstance(LINE, (3, 2), 2).digest()
    assert base != DecisionInstance(LINE, (2, 3), 3).digest()
    assert base != DecisionInstance(make_window(WindowSpec("zn", 5)), (2, 3), 2).digest()


@st.composite
def small_instances(draw):
    kind = draw(st.sampled_from(["line", "grid", "tower"]))
    if kind == "line":
        W = make_window(WindowSpec("zn", draw(st.integers(1, 6))))
    elif kind == "grid":
        W = make_window(WindowSpec("zn", 1, dims=2))
    else:
        W = make_window(WindowSpec("lomega", draw(st.integers(1, 2)), level_cap=2))
        if len(W) > 14:
            W = W.subwindow(W.points[:14])
    m = draw(st.integers(1, 2))
    radii = draw(st.lists(st.integers(1, 4), min_size=m, max_size=m))
    D = draw(st.integers(0, W.diameter()))
    return DecisionInstance(W, radii, D)


@settings(max_examples=80)
@given(small_instances())
def test_solver_agrees_with_brute_force(inst):
    cert = decide_cover(inst)
    assert cert.verdict is brute_force_decide(inst).verdict
    if cert.verdict is Verdict.SAT:
        assert validate_cover(cert.witness, inst.window, inst.diameter).accepted


@settings(max_examples=30)
@given(small_instances())
def test_fast_mode_same_verdict(inst):
    a = decide_cover(inst, canonical=True)
    b = decide_cover(inst, canonical=False)
    assert a.verdict is b.verdict
    assert b.config.endswith("fast")


def test_budget_gives_unknown_and_min_diameter_raises():
    W = make_window(WindowSpec("zn", 3, dims=2))
    cert = decide_cover(DecisionInstance(W, (2, 2), 3), budget=50)
    assert cert.verdict is Verdict.UNKNOWN and cert.witness is None
    with pytest.raises(BudgetExhausted) as info:
        min_diameter(W, (2, 2), budget=50)
    assert info.value.upper is not None


def test_min_diameter_on_a_line():
    assert min_diameter(line10(), (2, 2))[0] == 0
    assert min_diameter(line10(), (3, 3))[0] == 1
    assert min_diameter(line10(), (3,))[0] == 9


def test_singleton_window():
    W = Window([(4, 4)])
    cert = decide_cover(DecisionInstance(W, (7, 2), 0))
    assert cert.verdict is Verdict.SAT
    assert greedy_upper(W, (7, 2)).families()[0] == Family([[(4, 4)]])


def test_greedy_below_min_diameter_is_none():
    assert greedy_upper(line10(), (3, 3), 0) is None
    assert greedy_upper(line10(), (3,), 8) is None


def test_greedy_upper_is_valid():
    W = make_window(WindowSpec("zn", 4, dims=2))
    cover = greedy_upper(W, (2, 3, 4))
    D = cover.max_diameter(W)
    assert validate_cover(cover, W, D).accepted
    assert greedy_upper(W, (2,), 3) is None


def test_certificate_json_roundtrip():
    cert = decide_cover(DecisionInstance(line10(), (3, 3), 1))
    back = Certificate.from_json(json.loads(json.dumps(cert.to_json())))
    assert back == cert


def test_cache_reuse_and_corrupt_tail(tmp_path, caplog):
    cache = ResultCache(tmp_path)
    inst = DecisionInstance(line10(), (3, 3), 1)
    first = decide_cover(inst, cache=cache)
    decide_cover(DecisionInstance(line10(), (3, 3), 0), cache=cache)
    decide_cover(DecisionInstance(make_window(WindowSpec("zn", 3, dims=2)), (2, 2), 3), budget=50, cache=cache)
    lines = cache.path.read_text().splitlines()
    assert len(lines) == 2  # UNKNOWN is never stored
    with open(cache.path, "a") as fh:
        fh.write('{"verdict": "SAT", "instan')
    again = ResultCache(tmp_path)
    assert "corrupt" in caplog.text
    assert again.path.read_text().splitlines() == lines
    assert again.get(inst.digest()) == first
    assert decide_cover(inst, cache=again) == first


def test_seeded_restriction_property():
    rng = random.Random(11)
    W = make_window(WindowSpec("zn", 3, dims=2))
    cert = decide_cover(DecisionInstance(W, (2, 3, 4), 3))
    assert cert.verdict is Verdict.SAT
    for _ in range(10):
        keep = [p for p in W.points if rng.random() < 0.5] or [W.points[0]]
        sub = W.subwindow(keep)
        assert validate_cover(cert.witness.restrict(sub.points), sub, 3).accepted
