"""Exact decision of colored-cover existence on a finite window.

An instance ``(W, radii, D)`` asks for families F_1..F_m covering W with F_i
radii[i]-disjoint and every block of diameter <= D. Such a cover exists iff
there is a coloring c: W -> {1..m} whose color-i components, in the graph
joining points at distance < radii[i], all have diameter <= D:

* a valid cover gives a coloring (color a point by any family containing it);
  a chain of steps shorter than radii[i] never leaves a block, since distinct
  blocks are radii[i] apart, so components sit inside blocks;
* conversely distinct components of one color are >= radii[i] apart by
  maximality, so the components form the families.

:func:`decide_cover` searches colorings by backtracking; :func:`brute_force_decide`
enumerates them all and is kept independent of the search code as its oracle.
"""

from __future__ import annotations

import hashlib
import json
import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numba
import numpy as np

from .covers import ColoredCover, Family, validate_cover
from .spaces import Window, level_gap, point_to_json

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**8
CACHE_ENV = "TRASDIM_CACHE_DIR"
# failed-state memo entries kept in memory (roughly 0.7 KB each); past the
# limit the oldest half is dropped. The memo only caches refutations, so
# eviction costs time but never correctness.
MEMO_LIMIT = 3_000_000


class Verdict(str, Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class DecisionInstance:
    window: Window
    radii: tuple
    diameter: int

    def __init__(self, window: Window, radii: Sequence[int], diameter: int):
        radii = tuple(int(r) for r in radii)
        if not radii:
            raise ValueError("at least one radius is required")
        if min(radii) < 1:
            raise ValueError("radii must be >= 1")
        if diameter < 0:
            raise ValueError("diameter bound must be >= 0")
        object.__setattr__(self, "window", window)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "diameter", int(diameter))

    def to_json(self) -> dict:
        return {"metric": self.window.metric,
                "points": [point_to_json(p) for p in self.window.points],
                "radii": list(self.radii), "diameter": self.diameter}

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class Certificate:
    verdict: Verdict
    instance_hash: str
    config: str
    witness: ColoredCover | None = None
    nodes: int = 0
    prunes: int = 0

    def to_json(self) -> dict:
        doc = {"verdict": self.verdict.value, "instance_hash": self.instance_hash,
               "config": self.config, "nodes": self.nodes, "prunes": self.prunes}
        if self.witness is not None:
            doc["witness"] = self.witness.to_json()
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> Certificate:
        w = doc.get("witness")
        return cls(Verdict(doc["verdict"]), doc["instance_hash"], doc["config"],
                   ColoredCover.from_json(w) if w else None, doc.get("nodes", 0), doc.get("prunes", 0))


class BudgetExhausted(RuntimeError):
    """Raised when a search hits its node budget; carries what is known."""

    def __init__(self, message: str, lower: int | None = None, upper: int | None = None):
        super().__init__(message)
        self.lower = lower
        self.upper = upper


class ResultCache:
    """Append-only JSON-lines store of certificates keyed by instance hash."""

    def __init__(self, directory: str | Path):
        self.path = Path(directory) / "results.jsonl"
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.entries: dict[str, dict] = {}
        self._load()

    @classmethod
    def from_env(cls) -> ResultCache | None:
        import os
        d = os.environ.get(CACHE_ENV)
        return cls(d) if d else None

    def _load(self):
        if not self.path.exists():
            return
        raw = self.path.read_bytes()
        good = 0
        for line in raw.splitlines(keepends=True):
            try:
                doc = json.loads(line)
                if not line.endswith(b"\n"):
                    raise ValueError("unterminated line")
            except ValueError:
                log.warning("truncating corrupt cache tail in %s at byte %d", self.path, good)
                with open(self.path, "r+b") as fh:
                    fh.truncate(good)
                break
            self.entries[doc["instance_hash"]] = doc
            good += len(line)

    def get(self, digest: str) -> Certificate | None:
        doc = self.entries.get(digest)
        return Certificate.from_json(doc) if doc else None

    def put(self, cert: Certificate):
        if cert.verdict is Verdict.UNKNOWN or cert.instance_hash in self.entries:
            return
        doc = cert.to_json()
        with open(self.path, "a") as fh:
            fh.write(json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n")
        self.entries[cert.instance_hash] = doc


def _static_order(nbrs: list[list[int]], seed_dist: Sequence[int]) -> list[int]:
    """Static branching order.

    Points are taken in shells of growing distance from the first window
    point, so small balls are completed (and refuted) early; inside a shell
    the most constrained point (most placed neighbors) goes first, ties to
    the lowest index. The order depends only on the window, never on colors.
    """
    n = len(nbrs)
    score = [0] * n
    order = []
    shells: dict[int, list[int]] = {}
    for p in range(n):
        shells.setdefault(seed_dist[p], []).append(p)
    for radius in sorted(shells):
        pending = set(shells[radius])
        while pending:
            p = max(pending, key=lambda q: (score[q], -q))
            pending.discard(p)
            order.append(p)
            for q in nbrs[p]:
                score[q] += 1
    return order


class _Search:
    """Shared state for the backtracking search and the greedy heuristic."""

    def __init__(self, W: Window, radii: Sequence[int], D: int):
        self.W = W
        self.radii = tuple(radii)
        self.m = len(self.radii)
        self.D = D
        n = len(W)
        self.n = n
        rmax = max(self.radii)
        distinct = sorted(set(self.radii))
        # neighbor lists per distinct radius (distance < r, excluding self)
        near = {r: [[] for _ in range(n)] for r in distinct}
        all_idx = np.arange(n)
        for s in range(0, n, 512):
            d = W.cross(all_idx[s:s + 512], all_idx)
            for r in distinct:
                rows, cols = np.nonzero(d < r)
                for i, j in zip(rows, cols):
                    if s + i != j:
                        near[r][s + i].append(int(j))
        seed = W.cross([0], all_idx)[0].tolist()
        self.order = _static_order(near[rmax], seed)
        pos = [0] * n
        for t, p in enumerate(self.order):
            pos[p] = t
        self.pos = pos
        # earlier[c][p]: neighbors of p under color c's radius placed before p
        self.earlier = []
        last = {}
        for r in distinct:
            last[r] = [max((pos[q] for q in near[r][p]), default=-1) for p in range(n)]
        for r in self.radii:
            self.earlier.append([[q for q in near[r][p] if pos[q] < pos[p]] for p in range(n)])
        self.last = [last[r] for r in self.radii]
        # frontier[t]: points placed before step t that may still touch step >= t
        lmax = last[rmax]
        self.frontier = [[] for _ in range(n + 1)]
        for p in range(n):
            for t in range(pos[p] + 1, lmax[p] + 1):
                self.frontier[t].append(p)
        for t in range(n + 1):
            self.frontier[t].sort(key=pos.__getitem__)
        # colors interchangeable with a lower one (equal radius)
        self.twins = [[b for b in range(a) if self.radii[b] == self.radii[a]] for a in range(self.m)]
        self.symmetric = [a for a in range(self.m) if self.twins[a] or
                          any(self.radii[b] == self.radii[a] for b in range(a + 1, self.m))]

        self.single_level = bool((W.levels == W.levels[0]).all())
        if self.single_level:
            k = W.width
            self.pprof = [tuple(row) + tuple(row) for row in W.coords.tolist()]
            self.span = _flat_span(k)
            self.join = _flat_join(k)
        else:
            self.pprof = [((int(l), tuple(row), tuple(row)),)
                          for l, row in zip(W.levels.tolist(), W.coords.tolist())]
            self.span = _tower_span
            self.join = _tower_join

        self.color = [-1] * n
        self.used = [0] * self.m
        self.parent = list(range(n))
        self.size = [1] * n
        self.prof = list(self.pprof)
        self.trail: list[tuple] = []

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            x = parent[x]
        return x

    def assign(self, p: int, c: int) -> bool:
        """Color p with c if every merged component stays within D; record undo."""
        color = self.color
        roots = []
        for q in self.earlier[c][p]:
            if color[q] == c:
                rq = self.find(q)
                if rq not in roots:
                    roots.append(rq)
        cur = self.pprof[p]
        span, join, D = self.span, self.join, self.D
        for rq in roots:
            P = self.prof[rq]
            if span(cur, P) > D:
                return False
            cur = join(cur, P)
        self.parent[p] = p
        self.size[p] = 1
        self.prof[p] = self.pprof[p]
        mark = len(self.trail)
        for rq in roots:
            a, b = self.find(p), rq
            if self.size[a] < self.size[b]:
                a, b = b, a
            self.trail.append((b, a, self.prof[a], self.size[a]))
            self.parent[b] = a
            self.size[a] += self.size[b]
            self.prof[a] = join(self.prof[a], self.prof[b])
        color[p] = c
        self.used[c] += 1
        self.marks.append(mark)
        return True

    def undo(self, p: int):
        mark = self.marks.pop()
        while len(self.trail) > mark:
            b, a, prof_a, size_a = self.trail.pop()
            self.parent[b] = b
            self.prof[a] = prof_a
            self.size[a] = size_a
        self.used[self.color[p]] -= 1
        self.color[p] = -1

    def allowed(self, c: int) -> bool:
        if self.used[c]:
            return True
        return not any(self.used[b] == 0 for b in self.twins[c])

    def key(self, t: int) -> tuple:
        color, last, parent, prof = self.color, self.last, self.parent, self.prof
        ids: dict[int, int] = {}
        profs = []
        cells = []
        for q in self.frontier[t]:
            c = color[q]
            if last[c][q] < t:
                cells.append(-1)
                continue
            while parent[q] != q:
                q = parent[q]
            k = ids.get(q)
            if k is None:
                k = ids[q] = len(ids)
                profs.append(prof[q])
            cells.append(c * 65536 + k)
        used = tuple(self.used[c] > 0 for c in self.symmetric)
        return (t, used, tuple(cells), tuple(profs))

    def coloring_cover(self) -> ColoredCover:
        groups: list[dict] = [dict() for _ in range(self.m)]
        for p in range(self.n):
            groups[self.color[p]].setdefault(self.find(p), []).append(self.W.points[p])
        return ColoredCover((self.radii[c], Family(groups[c].values())) for c in range(self.m))

    def run(self, budget: int) -> tuple[Verdict, int, int]:
        n, order = self.n, self.order
        self.marks = []
        failed: dict = {}  # insertion-ordered, so eviction drops the oldest
        keys = [None] * (n + 1)
        nxt = [0] * (n + 1)
        nodes = prunes = 0
        t = 0
        entering = True
        while True:
            if t == n:
                return Verdict.SAT, nodes, prunes
            if entering:
                k = self.key(t)
                if k in failed:
                    prunes += 1
                    if t == 0:
                        return Verdict.UNSAT, nodes, prunes
                    t -= 1
                    self.undo(order[t])
                    entering = False
                    continue
                keys[t] = k
                nxt[t] = 0
                entering = False
            p = order[t]
            for c in range(nxt[t], self.m):
                if self.allowed(c) and self.assign(p, c):
                    nxt[t] = c + 1
                    break
            else:
                failed[keys[t]] = None
                if len(failed) > MEMO_LIMIT:
                    log.info("failure memo reached %d entries; dropping the oldest half", MEMO_LIMIT)
                    for old in list(itertools.islice(failed, MEMO_LIMIT // 2)):
                        del failed[old]
                if t == 0:
                    return Verdict.UNSAT, nodes, prunes
                t -= 1
                self.undo(order[t])
                continue
            nodes += 1
            if nodes > budget:
                return Verdict.UNKNOWN, nodes, prunes
            t += 1
            entering = True

    def greedy(self) -> bool:
        self.marks = []
        for p in self.order:
            for c in range(self.m):
                if self.assign(p, c):
                    break
            else:
                return False
        return True


def _flat_span(k: int):
    def span(P, Q):
        best = 0
        for i in range(k):
            a = P[k + i] - Q[i]
            b = Q[k + i] - P[i]
            if a > best:
                best = a
            if b > best:
                best = b
        return best
    return span


def _flat_join(k: int):
    def join(P, Q):
        return tuple(map(min, P[:k], Q[:k])) + tuple(map(max, P[k:], Q[k:]))
    return join


def _tower_span(P, Q):
    best = 0
    for l, pmin, pmax in P:
        for k, qmin, qmax in Q:
            if l != k:
                best = max(best, level_gap(l, k))
            for a0, a1, b0, b1 in zip(pmin, pmax, qmin, qmax):
                best = max(best, a1 - b0, b1 - a0)
    return best


def _tower_join(P, Q):
    boxes = {l: (mn, mx) for l, mn, mx in P}
    for l, mn, mx in Q:
        if l in boxes:
            a, b = boxes[l]
            boxes[l] = (tuple(map(min, a, mn)), tuple(map(max, b, mx)))
        else:
            boxes[l] = (mn, mx)
    return tuple((l,) + boxes[l] for l in sorted(boxes))


def config_id(canonical: bool = True) -> str:
    return "backtrack-memo/v1/" + ("canonical" if canonical else "fast")


def decide_cover(inst: DecisionInstance, budget: int = DEFAULT_BUDGET,
                 cache: ResultCache | None = None, canonical: bool = True) -> Certificate:
    """Exact verdict for ``inst``; UNKNOWN only when ``budget`` nodes are spent."""
    digest = inst.digest()
    if cache is not None:
        hit = cache.get(digest)
        if hit is not None:
            return hit
    search = _Search(inst.window, inst.radii, inst.diameter)
    verdict, nodes, prunes = search.run(budget)
    cert = Certificate(verdict, digest, config_id(canonical), nodes=nodes, prunes=prunes)
    if verdict is Verdict.SAT:
        cert.witness = search.coloring_cover()
        if not validate_cover(cert.witness, inst.window, inst.diameter).accepted:
            raise AssertionError("solver produced an invalid witness")
    if cache is not None:
        cache.put(cert)
    return cert


BRUTE_FORCE_LIMIT = 2**28


@numba.njit(cache=True)
def _first_valid_coloring(dist, radii, D, adj_start, adj, start, stop):
    """Scan colorings start..stop-1 (base-m digits, point 0 least significant);
    return the first whose color components all have diameter <= D, else -1."""
    n = dist.shape[0]
    m = radii.shape[0]
    col = np.empty(n, np.int64)
    comp = np.empty(n, np.int64)
    members = np.empty(n, np.int64)
    stack = np.empty(n, np.int64)
    for code in range(start, stop):
        x = code
        for p in range(n):
            col[p] = x % m
            x //= m
        comp[:] = -1
        ok = True
        for s in range(n):
            if comp[s] != -1:
                continue
            comp[s] = s
            size = 0
            top = 0
            stack[top] = s
            top += 1
            c = col[s]
            r = radii[c]
            while top > 0:
                top -= 1
                v = stack[top]
                for w in range(size):
                    if dist[v, members[w]] > D:
                        ok = False
                members[size] = v
                size += 1
                for e in range(adj_start[v], adj_start[v + 1]):
                    u = adj[e]
                    if comp[u] == -1 and col[u] == c and dist[v, u] < r:
                        comp[u] = s
                        stack[top] = u
                        top += 1
                if not ok:
                    break
            if not ok:
                break
        if ok:
            return code
    return -1


def brute_force_decide(inst: DecisionInstance, chunk: int = 1 << 22) -> Certificate:
    """Enumerate every coloring; independent oracle for :func:`decide_cover`."""
    W, radii, D = inst.window, inst.radii, inst.diameter
    m, n = len(radii), len(W)
    total = m ** n
    if total > BRUTE_FORCE_LIMIT:
        raise ValueError(f"{m}^{n} colorings exceed the brute-force guard")
    dist = W.matrix().astype(np.int64)
    rad = np.array(radii, dtype=np.int64)
    adj_lists = [np.flatnonzero((dist[p] < rad.max()) & (np.arange(n) != p)) for p in range(n)]
    adj_start = np.zeros(n + 1, dtype=np.int64)
    adj_start[1:] = np.cumsum([len(a) for a in adj_lists])
    adj = np.concatenate(adj_lists).astype(np.int64) if adj_start[-1] else np.zeros(0, np.int64)
    for start in range(0, total, chunk):
        code = _first_valid_coloring(dist, rad, D, adj_start, adj, start, min(total, start + chunk))
        if code >= 0:
            colors = [(code // m ** p) % m for p in range(n)]
            return Certificate(Verdict.SAT, inst.digest(), "brute-force/v1",
                               _cover_from_coloring(W, radii, colors), nodes=code + 1)
    return Certificate(Verdict.UNSAT, inst.digest(), "brute-force/v1", nodes=total)


def _cover_from_coloring(W: Window, radii: Sequence[int], colors: Sequence[int]) -> ColoredCover:
    dist = W.matrix()
    n = len(W)
    seen = [False] * n
    groups: list[list] = [[] for _ in radii]
    for s in range(n):
        if seen[s]:
            continue
        c = colors[s]
        seen[s] = True
        block, todo = [], [s]
        while todo:
            v = todo.pop()
            block.append(W.points[v])
            for u in range(n):
                if not seen[u] and colors[u] == c and dist[v, u] < radii[c]:
                    seen[u] = True
                    todo.append(u)
        groups[c].append(block)
    return ColoredCover((radii[c], Family(groups[c])) for c in range(len(radii)))


def min_diameter(W: Window, radii: Sequence[int], budget: int = DEFAULT_BUDGET,
                 cache: ResultCache | None = None) -> tuple[int, int]:
    """Least D admitting a cover, and the total search nodes spent.

    Uses that SAT at D implies SAT at every larger D. Raises
    :class:`BudgetExhausted` with the bracket found so far when a decision
    runs out of budget.
    """
    upper = greedy_upper_bound(W, radii)
    lower = 0
    nodes = 0
    while lower < upper:
        mid = (lower + upper) // 2
        cert = decide_cover(DecisionInstance(W, radii, mid), budget, cache)
        nodes += cert.nodes
        if cert.verdict is Verdict.SAT:
            upper = min(mid, cert.witness.max_diameter(W))
        elif cert.verdict is Verdict.UNSAT:
            lower = mid + 1
        else:
            raise BudgetExhausted(f"budget exhausted deciding D={mid}", lower, upper)
    return upper, nodes


def greedy_upper(W: Window, radii: Sequence[int], diameter: int | None = None) -> ColoredCover | None:
    """One greedy pass (lowest feasible color, no backtracking).

    With ``diameter`` given, returns a cover within that bound or None. Without
    it, returns the cover for the smallest bound at which the pass succeeds.
    """
    if diameter is None:
        for d in range(W.diameter() + 1):
            found = greedy_upper(W, radii, d)
            if found is not None:
                return found
        raise AssertionError("greedy pass must succeed at the window diameter")
    search = _Search(W, radii, diameter)
    if not search.greedy():
        return None
    cover = search.coloring_cover()
    assert validate_cover(cover, W, diameter).accepted
    return cover


def greedy_upper_bound(W: Window, radii: Sequence[int]) -> int:
    cover = greedy_upper(W, radii)
    return cover.max_diameter(W)
