"""Colored covers of windows: validation, neighborhood expansion and the
explicit constructions for Z^n and for the level towers.

A :class:`ColoredCover` is a list of ``(radius, Family)`` entries. It is
valid for a window W and a bound D when the blocks cover W, every family is
radius-disjoint (distinct blocks at set-distance >= radius) and every block
has diameter <= D.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .spaces import (
    Window,
    neighborhood,
    point_from_json,
    point_to_json,
    profile_diameter,
    profile_of,
)


@dataclass(frozen=True)
class Family:
    blocks: frozenset

    def __init__(self, blocks: Iterable[Iterable]):
        fs = frozenset(frozenset(b) for b in blocks)
        if any(not b for b in fs):
            raise ValueError("blocks must be non-empty")
        seen = set()
        for b in fs:
            if seen & b:
                raise ValueError("blocks of a family must be disjoint")
            seen |= b
        object.__setattr__(self, "blocks", fs)

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.sorted_blocks())

    def points(self) -> frozenset:
        return frozenset().union(*self.blocks)

    def sorted_blocks(self) -> list[list]:
        return sorted(sorted(b) for b in self.blocks)


@dataclass(frozen=True)
class ColoredCover:
    entries: tuple  # tuple[tuple[int, Family], ...]

    def __init__(self, entries: Iterable[tuple[int, Family]]):
        entries = tuple((int(r), f if isinstance(f, Family) else Family(f)) for r, f in entries)
        for r, _ in entries:
            if r < 1:
                raise ValueError("radii must be >= 1")
        object.__setattr__(self, "entries", entries)

    @property
    def radii(self) -> tuple[int, ...]:
        return tuple(r for r, _ in self.entries)

    def families(self) -> list[Family]:
        return [f for _, f in self.entries]

    def max_diameter(self, W: Window) -> int:
        return max((profile_diameter(profile_of(W, [W.index[p] for p in b]))
                    for f in self.families() for b in f.blocks), default=0)

    def restrict(self, points: Iterable) -> ColoredCover:
        keep = set(points)
        out = []
        for r, f in self.entries:
            out.append((r, Family(b & keep for b in f.blocks if b & keep)))
        return ColoredCover(out)

    def to_json(self) -> dict:
        return {"entries": [
            {"radius": r, "blocks": [[point_to_json(p) for p in b] for b in f.sorted_blocks()]}
            for r, f in self.entries]}

    @classmethod
    def from_json(cls, doc: dict) -> ColoredCover:
        return cls((e["radius"], Family([point_from_json(p) for p in b] for b in e["blocks"]))
                   for e in doc["entries"])

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


@dataclass
class CoverReport:
    covers: bool
    disjoint: list[bool]
    bounded: bool
    outside: list = field(default_factory=list)
    uncovered: list = field(default_factory=list)
    oversized: list = field(default_factory=list)
    max_diameter: int = 0

    @property
    def accepted(self) -> bool:
        return self.covers and all(self.disjoint) and self.bounded and not self.outside

    def to_json(self) -> dict:
        return {"accepted": self.accepted, "covers": self.covers, "disjoint": self.disjoint,
                "bounded": self.bounded, "outside": len(self.outside),
                "uncovered": len(self.uncovered), "max_diameter": self.max_diameter}


def _block_distance(W: Window, a: Sequence[int], b: Sequence[int]) -> int:
    best = None
    for s in range(0, len(a), 512):
        m = int(W.cross(a[s:s + 512], b).min())
        best = m if best is None else min(best, m)
    return best


def is_r_disjoint(F: Family, r: int, W: Window) -> bool:
    blocks = [[W.index[p] for p in b] for b in F.sorted_blocks()]
    if len(blocks) <= 1:
        return True
    total = sum(map(len, blocks))
    if total <= 6000:
        idx = np.fromiter((i for b in blocks for i in b), dtype=np.int64, count=total)
        label = np.repeat(np.arange(len(blocks)), [len(b) for b in blocks])
        for s in range(0, total, 1024):
            d = W.cross(idx[s:s + 1024], idx)
            if ((d < r) & (label[s:s + 1024, None] != label[None, :])).any():
                return False
        return True
    # one box per (block, level); the box gap is a lower bound on set distance,
    # so only box pairs closer than r need an exact check
    lv, mn, mx, lab = [], [], [], []
    for k, b in enumerate(blocks):
        for level, lo, hi in profile_of(W, b):
            lv.append(level)
            mn.append(lo)
            mx.append(hi)
            lab.append(k)
    lv, mn, mx, lab = map(np.array, (lv, mn, mx, lab))
    order = np.argsort(mn[:, 0], kind="stable")
    lv, mn, mx, lab = lv[order], mn[order], mx[order], lab[order]
    # sweep along the first coordinate: boxes starting r or more past box i's end are far
    ends = np.searchsorted(mn[:, 0], mx[:, 0] + r, side="left")
    checked = set()
    for i in range(len(lab)):
        j = slice(i + 1, ends[i])
        if j.start >= j.stop:
            continue
        gap = np.maximum(mn[j] - mx[i], mn[i] - mx[j]).max(axis=1)
        gap = np.maximum(gap, W.gaps[lv[i], lv[j]])
        for k in np.flatnonzero((gap < r) & (lab[j] != lab[i])):
            pair = tuple(sorted((int(lab[i]), int(lab[i + 1 + k]))))
            if pair in checked:
                continue
            checked.add(pair)
            if _block_distance(W, blocks[pair[0]], blocks[pair[1]]) < r:
                return False
    return True


def validate_cover(cover: ColoredCover, W: Window, D: int) -> CoverReport:
    outside = []
    seen = set()
    disjoint = []
    oversized = []
    worst = 0
    for r, fam in cover.entries:
        inside_blocks = []
        for b in fam.blocks:
            bad = [p for p in b if p not in W.index]
            outside.extend(bad)
            good = [p for p in b if p in W.index]
            seen.update(good)
            if good:
                inside_blocks.append(good)
                d = profile_diameter(profile_of(W, [W.index[p] for p in good]))
                worst = max(worst, d)
                if d > D:
                    oversized.append(sorted(good))
        disjoint.append(is_r_disjoint(Family(inside_blocks), r, W))
    uncovered = [p for p in W.points if p not in seen]
    return CoverReport(covers=not uncovered, disjoint=disjoint, bounded=not oversized,
                       outside=sorted(outside), uncovered=uncovered, oversized=oversized,
                       max_diameter=worst)


def validate_cover_pairwise(cover: ColoredCover, W: Window, D: int) -> bool:
    """Slow reference check: every pair of points compared directly."""
    for r, fam in cover.entries:
        for b in fam.blocks:
            if any(p not in W.index for p in b):
                return False
    covered = set().union(*(b for f in cover.families() for b in f.blocks)) if cover.entries else set()
    if set(W.points) - covered:
        return False
    for r, fam in cover.entries:
        blocks = fam.sorted_blocks()
        for b in blocks:
            for p in b:
                for q in b:
                    if W.distance(p, q) > D:
                        return False
        for i, b in enumerate(blocks):
            for c in blocks[i + 1:]:
                for p in b:
                    for q in c:
                        if W.distance(p, q) < r:
                            return False
    return True


def expand_family(F: Family, m: int, W_ambient: Window) -> Family:
    """Replace every block by its m-neighborhood inside ``W_ambient``."""
    if m == 0:
        return F
    return Family(neighborhood(b, m, W_ambient) for b in F.sorted_blocks())


def expand_cover(cover: ColoredCover, m: int, W_ambient: Window, shrink: bool = True) -> ColoredCover:
    """Expand every family by m; with ``shrink`` the radii drop by 2m."""
    return ColoredCover((r - 2 * m if shrink else r, expand_family(f, m, W_ambient))
                        for r, f in cover.entries)


def _grid_blocks(W: Window, indices: np.ndarray, n: int, r: int) -> list[list[dict]]:
    """Per family j, a dict cube-index -> member indices of the shrunk shifted grid."""
    L = (n + 1) * (r + 1)
    margin = -(-r // 2)
    coords = W.coords[indices][:, :n]
    families = []
    taken = np.zeros(len(indices), dtype=bool)
    for j in range(n + 1):
        shifted = coords - j * (r + 1)
        cube = np.floor_divide(shifted, L)
        pos = shifted - cube * L
        inner = ((pos >= margin) & (pos <= L - 1 - margin)).all(axis=1) & ~taken
        taken |= inner
        groups: dict = {}
        for k in np.flatnonzero(inner):
            groups.setdefault(tuple(cube[k]), []).append(int(indices[k]))
        families.append(groups)
    if not taken.all():
        raise AssertionError("shifted grids failed to cover the window")
    return families


def build_zn_cover(n: int, r: int, W: Window) -> ColoredCover:
    """n+1 r-disjoint families of shrunk cubes of side (n+1)(r+1) covering W.

    Family j uses the cube grid shifted by j(r+1) on every axis, each cube
    shrunk by ceil(r/2) on all sides. The bad residues of consecutive shifts
    are disjoint, so each coordinate spoils at most one family and one of the
    n+1 families always contains a given point.
    Works on any sup-metric window of dimension n, including (kZ)^n.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if W.metric != "sup" or W.width != n:
        raise ValueError(f"expected a {n}-dimensional sup-metric window")
    idx = np.arange(len(W))
    fams = _grid_blocks(W, idx, n, r)
    return ColoredCover((r, Family([W.points[i] for i in g] for g in groups.values()))
                        for groups in fams)


def level_part(W: Window, max_level: int) -> Window:
    return W.subwindow(p for p in W.points if p.level <= max_level)


def containment_radius(W: Window, n: int) -> int:
    """Smallest c with every level <= n point of W within c of the level-n points."""
    low = [i for i, p in enumerate(W.points) if p.level < n]
    top = [i for i, p in enumerate(W.points) if p.level == n]
    if not top:
        raise ValueError(f"window has no level-{n} points")
    if not low:
        return 0
    return int(max(W.cross(low[s:s + 256], top).min(axis=1).max() for s in range(0, len(low), 256)))


def tower_offset(n: int) -> int:
    """1 + 2 + ... + (n-1)."""
    return n * (n - 1) // 2


def build_lomega_cover(tau: Iterable[int], n: int, W: Window) -> ColoredCover:
    """Cover of an L_omega window by n families at the radii in tau plus one
    n-disjoint family.

    The level-n sublattice (nZ)^n is covered by the Z^n construction at
    disjointness max(tau + {n}) + 2m, where m is the measured containment
    radius of the lower levels; blocks are then widened by m inside the
    level <= n part, and every higher-level point becomes a singleton of the
    last family.
    """
    tau = sorted(set(tau))
    if len(tau) != n:
        raise ValueError(f"tau must have exactly {n} elements")
    if n in tau:
        raise ValueError("n must not belong to tau")
    if min(tau) < 1:
        raise ValueError("radii must be >= 1")
    if W.metric != "tower" or W.width < n + 1:
        raise ValueError(f"need a tower window with level cap >= {n + 1}")
    low = level_part(W, n)
    m = containment_radius(low, n)
    r = max(tau + [n]) + 2 * m
    top_idx = np.array([i for i, p in enumerate(low.points) if p.level == n])
    # the level-n points form an n-dimensional sup-metric lattice
    flat = Window([p.coords for p in (low.points[i] for i in top_idx)], "sup")
    base = build_zn_cover(n, r, flat)
    lift = {p.coords: p for p in (low.points[i] for i in top_idx)}
    expanded = []
    for _, fam in base.entries:
        blocks = [[lift[c] for c in b] for b in fam.sorted_blocks()]
        expanded.append(expand_family(Family(blocks), m, low))
    entries = [(k, expanded[i]) for i, k in enumerate(tau)]
    singles = [[p] for p in W.points if p.level > n]
    last = Family(list(expanded[n].blocks) + singles)
    entries.append((n, last))
    cover = ColoredCover(entries)
    return cover
