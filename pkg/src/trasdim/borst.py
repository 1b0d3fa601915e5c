"""Set systems over finite label sets, their derivatives and the Ord rank.

For M a collection of finite non-empty label sets and sigma a label set,
the derivative is M^sigma = {tau : sigma | tau in M, sigma & tau empty}.
Ord M is 0 for the empty system and otherwise the least ordinal strictly
above Ord M^{a} for every label a. On a finite universe that is a natural
number, equal to the largest member size.

:class:`TruncatedA` is the solver-backed system of radius sets sigma for
which no cover of a window with sigma-disjoint families of diameter <= D
exists. Membership is only evidence about the infinite space: a window is
bounded, so its own dimension is -1; a member sigma says any cover of the
whole space with those radii needs blocks of diameter > D.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .ordinal import ZERO, Ordinal, render, succ, sup
from .solver import DEFAULT_BUDGET, DecisionInstance, ResultCache, Verdict, decide_cover
from .spaces import Window, WindowSpec, make_window


def _label_set(sigma: Iterable[int]) -> frozenset:
    return frozenset(int(a) for a in sigma)


def subsets(universe: Iterable[int], nonempty: bool = True):
    """All subsets of ``universe`` as frozensets, by size then lexicographically."""
    labels = sorted(universe)
    for k in range(1 if nonempty else 0, len(labels) + 1):
        for combo in itertools.combinations(labels, k):
            yield frozenset(combo)


class SetSystem:
    """A subset M of Fin L for a finite label universe L."""

    universe: frozenset

    def contains(self, sigma: frozenset) -> bool | None:
        raise NotImplementedError

    def members(self) -> list[frozenset]:
        return [s for s in subsets(self.universe) if self.contains(s)]

    def is_empty(self) -> bool:
        return not self.members()

    def key(self):
        raise NotImplementedError

    def is_inclusive(self) -> bool:
        mem = set(self.members())
        return all(frozenset(sub) in mem
                   for s in mem for k in range(1, len(s)) for sub in itertools.combinations(s, k))


class ExplicitSystem(SetSystem):
    def __init__(self, universe: Iterable[int], members: Iterable[Iterable[int]], inclusive: bool = False):
        self.universe = _label_set(universe)
        self._members = frozenset(_label_set(m) for m in members)
        for m in self._members:
            if not m:
                raise ValueError("members must be non-empty")
            if not m <= self.universe:
                raise ValueError(f"member {sorted(m)} is not inside the universe")
        self.inclusive = inclusive
        if inclusive and not self.is_inclusive():
            raise ValueError("system flagged inclusive is not closed under non-empty subsets")

    def contains(self, sigma):
        return _label_set(sigma) in self._members

    def members(self):
        return sorted(self._members, key=lambda s: (len(s), sorted(s)))

    def is_empty(self):
        return not self._members

    def key(self):
        return ("explicit", self.universe, self._members)

    def __eq__(self, other):
        if not isinstance(other, ExplicitSystem):
            return NotImplemented
        return self.universe == other.universe and self._members == other._members

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"ExplicitSystem({sorted(self.universe)}, {[sorted(m) for m in self.members()]})"

    def to_json(self) -> dict:
        return {"universe": sorted(self.universe), "members": [sorted(m) for m in self.members()]}

    @classmethod
    def from_json(cls, doc: dict) -> ExplicitSystem:
        return cls(doc["universe"], doc["members"], doc.get("inclusive", False))


class DerivedSystem(SetSystem):
    """M^sigma for a membership-oracle M, evaluated lazily."""

    def __init__(self, base: SetSystem, sigma: frozenset):
        self.base = base
        self.sigma = sigma
        self.universe = base.universe

    def contains(self, tau):
        tau = _label_set(tau)
        if not tau or tau & self.sigma:
            return False
        return self.base.contains(self.sigma | tau)

    def key(self):
        return ("derived", self.base.key(), self.sigma)


def derivative(M: SetSystem, sigma: Iterable[int]) -> SetSystem:
    sigma = _label_set(sigma)
    if not sigma:
        return M
    if isinstance(M, ExplicitSystem):
        out = []
        for m in M.members():
            if sigma <= m and m != sigma:
                out.append(m - sigma)
        return ExplicitSystem(M.universe, out)
    if isinstance(M, DerivedSystem):
        return DerivedSystem(M.base, M.sigma | sigma) if not (M.sigma & sigma) else ExplicitSystem(M.universe, [])
    return DerivedSystem(M, sigma)


def ord_of_system(M: SetSystem, memo: dict | None = None) -> Ordinal:
    """Ord by direct recursion on derivatives (memoized on the system)."""
    memo = {} if memo is None else memo
    k = M.key()
    if k in memo:
        return memo[k]
    if M.is_empty():
        value = ZERO
    else:
        value = sup(succ(ord_of_system(derivative(M, {a}), memo)) for a in sorted(M.universe))
    memo[k] = value
    return value


def max_cardinality(M: SetSystem) -> Ordinal:
    return Ordinal.of(max((len(m) for m in M.members()), default=0))


def relabel(M: ExplicitSystem, phi: dict[int, int], universe: Iterable[int] | None = None) -> ExplicitSystem:
    """Image system {phi(sigma)} under an injective label map."""
    if len(set(phi.values())) != len(phi):
        raise ValueError("relabeling must be injective")
    target = _label_set(universe) if universe is not None else frozenset(phi.values())
    return ExplicitSystem(target, [{phi[a] for a in m} for m in M.members()])


@dataclass(frozen=True)
class OrdinalInterval:
    """Bounds on an Ord value when some memberships are undecided."""

    lower: Ordinal
    upper: Ordinal

    def __str__(self):
        return f"[{render(self.lower)}, {render(self.upper)}]"


class TruncatedA(SetSystem):
    """Radius sets sigma in {1..r_max} admitting no cover of ``window`` by
    sigma-disjoint families of diameter <= ``diameter``.

    ``contains`` returns None when the solver hits its budget.
    """

    def __init__(self, window: Window, diameter: int, r_max: int, budget: int = DEFAULT_BUDGET,
                 cache: ResultCache | None = None, spec: WindowSpec | None = None):
        if r_max < 1:
            raise ValueError("r_max must be >= 1")
        self.window = window
        self.diameter = diameter
        self.r_max = r_max
        self.budget = budget
        self.cache = cache
        self.spec = spec or window.spec
        self.universe = frozenset(range(1, r_max + 1))
        self.verdicts: dict[frozenset, Verdict] = {}
        self.unknown_as: bool | None = None

    @classmethod
    def from_json(cls, doc: dict, **kw) -> TruncatedA:
        spec = WindowSpec.from_json(doc["window"])
        return cls(make_window(spec), doc["diameter"], doc["r_max"], spec=spec, **kw)

    def to_json(self) -> dict:
        return {"window": self.spec.to_json() if self.spec else None,
                "diameter": self.diameter, "r_max": self.r_max}

    def verdict(self, sigma: frozenset) -> Verdict:
        sigma = _label_set(sigma)
        if sigma not in self.verdicts:
            inst = DecisionInstance(self.window, sorted(sigma), self.diameter)
            self.verdicts[sigma] = decide_cover(inst, self.budget, self.cache).verdict
        return self.verdicts[sigma]

    def contains(self, sigma):
        sigma = _label_set(sigma)
        if not sigma or not sigma <= self.universe:
            return False
        v = self.verdict(sigma)
        if v is Verdict.UNKNOWN:
            return self.unknown_as
        return v is Verdict.UNSAT

    def members(self):
        out = []
        for s in subsets(self.universe):
            c = self.contains(s)
            if c is None:
                raise LookupError(f"membership of {sorted(s)} is undecided")
            if c:
                out.append(s)
        return out

    def key(self):
        return ("truncated", id(self), self.unknown_as)


def membership_A(tA: TruncatedA, sigma: Iterable[int]) -> bool | None:
    """True/False for a decided membership, None when the solver ran out of budget."""
    sigma = _label_set(sigma)
    if not sigma or not sigma <= tA.universe:
        raise ValueError(f"sigma must be a non-empty subset of 1..{tA.r_max}")
    v = tA.verdict(sigma)
    return None if v is Verdict.UNKNOWN else v is Verdict.UNSAT


def ord_truncated_A(tA: TruncatedA) -> Ordinal | OrdinalInterval:
    """Ord of the truncated system; an interval when memberships are undecided.

    The recursion and the largest-member-size count are computed separately
    and must agree.
    """
    values = []
    for assume in (False, True):
        tA.unknown_as = assume
        rec = ord_of_system(tA)
        size = max_cardinality(tA)
        if rec != size:
            raise AssertionError(f"Ord recursion {rec} disagrees with max member size {size}")
        values.append(rec)
    tA.unknown_as = None
    lower, upper = values
    return lower if lower == upper else OrdinalInterval(lower, upper)
