"""Seeded verification suites for the combinatorial statements the package
checks at desk scale. Each suite returns a list of :class:`Check` results.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field

from .borst import (
    ExplicitSystem,
    derivative,
    max_cardinality,
    ord_of_system,
    relabel,
    subsets,
)
from .covers import (
    build_lomega_cover,
    build_zn_cover,
    containment_radius,
    expand_cover,
    level_part,
    tower_offset,
    validate_cover,
)
from .solver import (
    BRUTE_FORCE_LIMIT,
    DEFAULT_BUDGET,
    DecisionInstance,
    ResultCache,
    Verdict,
    brute_force_decide,
    decide_cover,
    greedy_upper,
)
from .spaces import TowerPoint, Window, WindowSpec, make_window, neighborhood, sup_dist, tower_dist

SUITES = ("metric", "ord-rank", "relabel", "intermediate", "oracle", "obstruction", "zn-cover",
          "expansion", "tower-cover", "plane-pair", "restriction")
# short names accepted by the command line
ALIASES = {"lemmaD": "ord-rank", "lemmaF": "relabel", "lemma5": "intermediate", "lemma3": "obstruction",
           "lemma4": "expansion", "thm2": "tower-cover", "thm3": "plane-pair"}


@dataclass
class Check:
    name: str
    passed: int = 0
    total: int = 0
    details: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.total > 0 and self.passed == self.total

    def record(self, good: bool, detail=None):
        self.total += 1
        self.passed += bool(good)
        if not good and detail is not None and len(self.details) < 10:
            self.details.append(detail)

    def to_json(self) -> dict:
        return {"name": self.name, "ok": self.ok, "passed": self.passed, "total": self.total,
                "seconds": round(self.seconds, 3), "details": self.details}


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        checks = fn(*args, **kwargs)
        spent = time.perf_counter() - t0
        for c in checks:
            c.seconds = spent
        return checks
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def random_tower_point(rng: random.Random, max_level: int = 6, bound: int = 100) -> TowerPoint:
    level = rng.randint(1, max_level)
    return TowerPoint(level, tuple(rng.randint(-bound, bound) for _ in range(level)))


@_timed
def metric_suite(trials: int = 10_000, seed: int = 7) -> list[Check]:
    """Identity, symmetry and triangle inequality of the tower metric on random triples."""
    rng = random.Random(seed)
    ident, symm, tri, flat = Check("identity"), Check("symmetry"), Check("triangle"), Check("single-level")
    for _ in range(trials):
        a, b, c = (random_tower_point(rng) for _ in range(3))
        # draw some repeated points so the identity case is exercised both ways
        if rng.random() < 0.1:
            b = a
        dab, dba = tower_dist(a, b), tower_dist(b, a)
        ident.record((dab == 0) == (a == b), [a, b])
        symm.record(dab == dba, [a, b])
        tri.record(tower_dist(a, c) <= dab + tower_dist(b, c), [a, b, c])
        if a.level == c.level:
            flat.record(tower_dist(a, c) == sup_dist(a.coords, c.coords), [a, c])
    return [ident, symm, tri, flat]


def random_system(rng: random.Random, max_universe: int = 8, max_members: int = 40) -> ExplicitSystem:
    size = rng.randint(0, max_universe)
    universe = list(range(1, size + 1))
    members = set()
    if universe:
        for _ in range(rng.randint(0, max_members)):
            k = rng.randint(1, size)
            members.add(frozenset(rng.sample(universe, k)))
    return ExplicitSystem(universe, members)


@_timed
def ord_rank_suite(trials: int = 200, seed: int = 7) -> list[Check]:
    """Ord by recursion equals the largest member size."""
    rng = random.Random(seed)
    check = Check("ord-equals-max-size")
    comp = Check("derivative-composition")
    for _ in range(trials):
        M = random_system(rng)
        rec, size = ord_of_system(M), max_cardinality(M)
        check.record(rec == size, {"system": M.to_json(), "recursion": str(rec), "size": str(size)})
        labels = sorted(M.universe)
        if len(labels) >= 2:
            s = set(rng.sample(labels, rng.randint(1, len(labels) - 1)))
            rest = [a for a in labels if a not in s]
            t = set(rng.sample(rest, rng.randint(1, len(rest))))
            comp.record(derivative(derivative(M, s), t) == derivative(M, s | t), [sorted(s), sorted(t)])
    return [check, comp]


@_timed
def relabel_suite(trials: int = 100, seed: int = 7) -> list[Check]:
    """Ord does not drop under injective relabelings, even with extra members added."""
    rng = random.Random(seed)
    check = Check("relabel-monotone")
    for _ in range(trials):
        M = random_system(rng, max_universe=7, max_members=25)
        target = list(range(1, 2 * len(M.universe) + 3))
        phi = dict(zip(sorted(M.universe), rng.sample(target, len(M.universe))))
        image = relabel(M, phi, target)
        extra = [frozenset(rng.sample(target, rng.randint(1, min(3, len(target))))) for _ in range(rng.randint(0, 5))]
        bigger = ExplicitSystem(target, list(image.members()) + extra)
        check.record(ord_of_system(M) <= ord_of_system(bigger), {"system": M.to_json(), "phi": phi})
    return [check]


def _mask_ord(members: frozenset, memo: dict) -> int:
    """Ord by the derivative recursion, with label sets encoded as bitmasks."""
    if not members:
        return 0
    if members in memo:
        return memo[members]
    labels = 0
    for m in members:
        labels |= m
    best = 0
    a = 1
    while a <= labels:
        if labels & a:
            d = frozenset(m & ~a for m in members if m & a and m != a)
            best = max(best, _mask_ord(d, memo) + 1)
        a <<= 1
    memo[members] = best
    return best


def _intermediate_values(M: ExplicitSystem, check: Check, memo: dict | None = None):
    memo = {} if memo is None else memo
    labels = sorted(M.universe)
    bit = {a: 1 << i for i, a in enumerate(labels)}
    members = [sum(bit[a] for a in m) for m in M.members()]
    every = range(1 << len(labels))

    def ord_at(t):
        return _mask_ord(frozenset(m & ~t for m in members if m & t == t and m != t), memo)

    values = [ord_at(t) for t in every]
    for tau in every:
        reached = {values[tau | sigma] for sigma in every}
        for xi in range(values[tau] + 1):
            check.record(xi in reached, {"system": M.to_json(), "tau": tau, "xi": xi})


def inclusive_systems(universe):
    """Every system over ``universe`` closed under non-empty subsets."""
    candidates = list(subsets(universe))
    chosen: list = []
    have: set = set()

    def rec(i):
        if i == len(candidates):
            yield list(chosen)
            return
        s = candidates[i]
        yield from rec(i + 1)
        if all(s - {a} in have for a in s if len(s) > 1):
            chosen.append(s)
            have.add(s)
            yield from rec(i + 1)
            chosen.pop()
            have.discard(s)

    yield from rec(0)


@_timed
def intermediate_value_suite(trials: int = 100, seed: int = 7, exhaustive_universe: int = 3,
                 inclusive_universe: int = 5) -> list[Check]:
    """Every value below Ord M^tau is Ord M^(tau | sigma) for some sigma.

    Checked on every system over a universe of size <= ``exhaustive_universe``,
    on every inclusive system (the shape of a truncated A) over a universe of
    size <= ``inclusive_universe``, and on ``trials`` random systems over
    universes of size 4 and 5.
    """
    exhaustive = Check("intermediate-value-all-systems")
    for size in range(exhaustive_universe + 1):
        universe = list(range(1, size + 1))
        candidates = list(subsets(universe))
        for mask in range(1 << len(candidates)):
            members = [candidates[i] for i in range(len(candidates)) if mask >> i & 1]
            _intermediate_values(ExplicitSystem(universe, members), exhaustive)
    inclusive = Check("intermediate-value-inclusive-systems")
    memo: dict = {}
    for size in range(inclusive_universe + 1):
        universe = list(range(1, size + 1))
        for members in inclusive_systems(universe):
            _intermediate_values(ExplicitSystem(universe, members), inclusive, memo)
    rng = random.Random(seed)
    sampled = Check("intermediate-value-random")
    for _ in range(trials):
        size = rng.choice([4, 5])
        universe = list(range(1, size + 1))
        candidates = list(subsets(universe))
        members = [c for c in candidates if rng.random() < rng.choice([0.1, 0.3, 0.6])]
        _intermediate_values(ExplicitSystem(universe, members), sampled)
    return [exhaustive, inclusive, sampled]


WORKED_EXAMPLES = (
    # points 0..9 on a line: (radii, D, expected verdict)
    ((3,), 9, Verdict.SAT),
    ((3,), 2, Verdict.UNSAT),
    ((3, 3), 1, Verdict.SAT),
    ((2, 2), 0, Verdict.SAT),
    ((3, 3), 0, Verdict.UNSAT),
)


def random_small_window(rng: random.Random, max_points: int = 14) -> Window:
    kind = rng.choice(["line", "grid", "scaled", "tower", "scatter"])
    if kind == "line":
        W = make_window(WindowSpec("zn", rng.randint(1, 6)))
    elif kind == "grid":
        W = make_window(WindowSpec("zn", 1, dims=2))
    elif kind == "scaled":
        W = make_window(WindowSpec("kzn", 6, dims=1, scale=rng.randint(2, 3)))
    elif kind == "tower":
        W = make_window(WindowSpec(rng.choice(["lomega", "linf"]), rng.randint(1, 3), level_cap=2))
    else:
        W = make_window(WindowSpec("zn", 3, dims=2))
    if len(W) > max_points or kind == "scatter":
        W = W.subwindow(rng.sample(W.points, rng.randint(2, min(max_points, len(W)))))
    return W


@_timed
def oracle_suite(trials: int = 100, seed: int = 7) -> list[Check]:
    """decide_cover agrees with exhaustive enumeration; SAT witnesses validate."""
    rng = random.Random(seed)
    check = Check("solver-equals-brute-force")
    witness = Check("witness-valid")
    line = Window([(x,) for x in range(10)])
    cases = [DecisionInstance(line, r, D) for r, D, _ in WORKED_EXAMPLES]
    for _ in range(trials):
        W = random_small_window(rng)
        radii = [rng.randint(1, 5) for _ in range(rng.randint(1, 2))]
        cases.append(DecisionInstance(W, radii, rng.randint(0, W.diameter())))
    expected = [v for _, _, v in WORKED_EXAMPLES] + [None] * trials
    for inst, want in zip(cases, expected):
        cert = decide_cover(inst)
        ref = brute_force_decide(inst)
        ok = cert.verdict is ref.verdict and (want is None or want is cert.verdict)
        check.record(ok, {"points": len(inst.window), "radii": list(inst.radii), "D": inst.diameter,
                          "solver": cert.verdict.value, "brute": ref.verdict.value})
        if cert.verdict is Verdict.SAT:
            witness.record(validate_cover(cert.witness, inst.window, inst.diameter).accepted)
    return [check, witness]


@_timed
def zn_cover_suite(ns=(1, 2, 3), rs=(2, 5, 10)) -> list[Check]:
    """n+1 r-disjoint families with blocks of diameter <= (n+1)(r+1) cover Z^n windows."""
    check = Check("zn-cover-valid")
    for n in ns:
        for r in rs:
            L = (n + 1) * (r + 1)
            # a full period on every axis (five periods when that stays small)
            side = 5 * L // 2 if n < 3 else L // 2
            W = make_window(WindowSpec("zn", side, dims=n))
            cover = build_zn_cover(n, r, W)
            report = validate_cover(cover, W, L)
            check.record(report.accepted and len(cover.entries) == n + 1 and set(cover.radii) == {r},
                         {"n": n, "r": r, "side": side, "report": report.to_json()})
    return [check]


@_timed
def restriction_suite(trials: int = 50, seed: int = 7) -> list[Check]:
    """A witness for W restricted to any sub-window is a witness there."""
    rng = random.Random(seed)
    check = Check("restricted-witness-valid")
    found = 0
    while found < trials:
        W = random_small_window(rng, max_points=30)
        radii = [rng.randint(1, 4) for _ in range(rng.randint(1, 3))]
        cert = decide_cover(DecisionInstance(W, radii, rng.randint(0, W.diameter())))
        if cert.verdict is not Verdict.SAT:
            continue
        found += 1
        D = cert.witness.max_diameter(W)
        keep = [p for p in W.points if rng.random() < 0.6] or [rng.choice(W.points)]
        sub = W.subwindow(keep)
        check.record(validate_cover(cert.witness.restrict(keep), sub, D).accepted,
                     {"points": len(W), "kept": len(keep), "radii": radii})
    return [check]


@_timed
def obstruction_suite(diam_cap: int = 4, n: int = 2, k: int = 1, diam_min: int = 2,
                 budget: int = DEFAULT_BUDGET, cache: ResultCache | None = None,
                 brute_force_max: int = 2) -> list[Check]:
    """n families that are 2k-disjoint cannot cover a (kZ)^n box [-kD, kD]^n with blocks of diameter <= kD."""
    check = Check(f"no-{2 * k}-disjoint-{n}-cover")
    brute = Check("brute-force-agrees")
    for D in range(diam_min, diam_cap + 1):
        spec = WindowSpec("kzn" if k > 1 else "zn", k * D, dims=n, scale=k)
        W = make_window(spec)
        inst = DecisionInstance(W, [2 * k] * n, k * D)
        cert = decide_cover(inst, budget, cache)
        check.record(cert.verdict is Verdict.UNSAT,
                     {"D": D, "side": k * D, "verdict": cert.verdict.value, "nodes": cert.nodes})
        if D <= brute_force_max and n ** len(W) <= 2**28:
            brute.record(brute_force_decide(inst).verdict is cert.verdict, {"D": D})
    return [check, brute] if brute.total else [check]


@_timed
def expansion_suite(trials: int = 100, seed: int = 7) -> list[Check]:
    """(k+2m)-disjoint covers of X widen by m into k-disjoint covers of N_m(X)."""
    rng = random.Random(seed)
    check = Check("expand-shifted-radii")
    for _ in range(trials):
        dims = rng.choice([1, 1, 2])
        side = rng.randint(3, 9) if dims == 1 else rng.randint(2, 4)
        ambient = make_window(WindowSpec("zn", side, dims=dims))
        m = rng.randint(0, 2)
        # X: a random sub-box of the ambient window
        lo = [rng.randint(-side, side) for _ in range(dims)]
        hi = [rng.randint(a, side) for a in lo]
        X = ambient.subwindow(p for p in ambient.points if all(a <= x <= b for a, x, b in zip(lo, p, hi)))
        radii = [rng.randint(1, 4) for _ in range(rng.randint(1, 3))]
        shifted = [r + 2 * m for r in radii]
        cover = greedy_upper(X, shifted)
        D = cover.max_diameter(X)
        assert validate_cover(cover, X, D).accepted
        grown = ambient.subwindow(neighborhood(X.points, m, ambient))
        wide = expand_cover(cover, m, grown)
        report = validate_cover(wide, grown, D + 2 * m)
        check.record(report.accepted and list(wide.radii) == radii,
                     {"m": m, "radii": radii, "report": report.to_json()})
    return [check]


@_timed
def tower_cover_suite(ns=(1, 2), labels=range(2, 7), side: int = 30,
               containment_levels=(1, 2, 3, 4), containment_side: int = 8) -> list[Check]:
    """Tower covers with radii tau + {n} exist on L_omega windows, so tau | {n}
    is not in the truncated A at the achieved diameter."""
    check = Check("lomega-cover-valid")
    for n in ns:
        W = make_window(WindowSpec("lomega", side, level_cap=n + 1))
        for tau in itertools.combinations([a for a in labels if a != n], n):
            cover = build_lomega_cover(tau, n, W)
            D = cover.max_diameter(W)
            report = validate_cover(cover, W, D)
            check.record(report.accepted and len(cover.entries) == n + 1,
                         {"n": n, "tau": list(tau), "D": D, "report": report.to_json()})
    contain = Check("containment-radius")
    for n in containment_levels:
        W = level_part(make_window(WindowSpec("lomega", containment_side, level_cap=n)), n)
        measured = containment_radius(W, n)
        contain.record(measured <= max(tower_offset(n), n - 1),
                       {"n": n, "measured": measured, "displayed": tower_offset(n)})
    return [check, contain]


@_timed
def plane_pair_suite(k: int = 2, diam_cap: int = 4, budget: int = DEFAULT_BUDGET,
               cache: ResultCache | None = None, brute_force_max: int = 2,
               direct_max: int = 3) -> list[Check]:
    """{2, ..., k+1} admits no cover of a Z^k box [-D, D]^k at any D <= diam_cap.

    Raising a radius only removes covers, so UNSAT for k copies of radius 2
    (the 2-disjoint obstruction) already implies UNSAT for {2, ..., k+1}.
    That implication is used for every D; the search on the actual radii is
    repeated as a cross-check up to ``direct_max``.
    """
    radii = list(range(2, k + 2))
    dominating = [2] * k
    check = Check(f"sigma-{'-'.join(map(str, radii))}-in-A")
    direct = Check("direct-search-agrees")
    brute = Check("brute-force-agrees")
    for D in range(diam_cap + 1):
        W = make_window(WindowSpec("zn", max(D, 1), dims=k))
        lower = decide_cover(DecisionInstance(W, dominating, D), budget, cache)
        check.record(lower.verdict is Verdict.UNSAT,
                     {"D": D, "via": dominating, "verdict": lower.verdict.value, "nodes": lower.nodes})
        if D <= direct_max:
            inst = DecisionInstance(W, radii, D)
            cert = decide_cover(inst, budget, cache)
            direct.record(cert.verdict is Verdict.UNSAT, {"D": D, "verdict": cert.verdict.value})
            if D <= brute_force_max and len(radii) ** len(W) <= BRUTE_FORCE_LIMIT:
                brute.record(brute_force_decide(inst).verdict is cert.verdict, {"D": D})
    return [c for c in (check, direct, brute) if c.total]


def run_suite(name: str, trials: int | None = None, seed: int = 7, **kw) -> list[Check]:
    if name == "all":
        out = []
        for s in SUITES:
            out.extend(run_suite(s, trials, seed, **kw))
        return out
    name = ALIASES.get(name, name)
    if name not in SUITES:
        raise KeyError(name)
    budget = kw.get("budget", DEFAULT_BUDGET)
    cache = kw.get("cache")
    if name == "metric":
        return metric_suite(trials or 10_000, seed)
    if name == "ord-rank":
        return ord_rank_suite(trials or 200, seed)
    if name == "relabel":
        return relabel_suite(trials or 100, seed)
    if name == "intermediate":
        return intermediate_value_suite(trials or 100, seed)
    if name == "oracle":
        return oracle_suite(trials or 100, seed)
    if name == "zn-cover":
        return zn_cover_suite()
    if name == "restriction":
        return restriction_suite(trials or 50, seed)
    if name == "obstruction":
        return obstruction_suite(kw.get("diam_cap") or 4, n=kw.get("n") or 2, k=kw.get("k") or 1,
                                 budget=budget, cache=cache)
    if name == "expansion":
        return expansion_suite(trials or 100, seed)
    if name == "tower-cover":
        return tower_cover_suite()
    return plane_pair_suite(kw.get("k") or 2, kw.get("diam_cap") if kw.get("diam_cap") is not None else 4,
                            budget=budget, cache=cache)
