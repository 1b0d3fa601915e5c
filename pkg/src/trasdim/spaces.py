"""Integer metric spaces and their finite windows.

Two metrics are supported:

* ``sup``: the sup-metric on Z^n (and its sublattices (kZ)^n);
* ``tower``: the level-gapped metric on the disjoint union Z^1, Z^2, ...
  A level-l point is zero-padded to the longer level k and the distance is
  ``max(sup distance, l + (l+1) + ... + (k-1))``.

A :class:`Window` is a finite, ordered point set with one of these metrics.
Every distance is an exact Python or numpy integer.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

LatticePoint = tuple  # tuple[int, ...]

FAMILIES = ("zn", "kzn", "lomega", "linf")


class TowerPoint(NamedTuple):
    level: int
    coords: tuple

    def padded(self, length: int) -> tuple:
        return self.coords + (0,) * (length - len(self.coords))


def sup_dist(a: Sequence[int], b: Sequence[int]) -> int:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return max((abs(x - y) for x, y in zip(a, b)), default=0)


def level_gap(l: int, k: int) -> int:
    """l + (l+1) + ... + (k-1) for l <= k (zero when l == k)."""
    if l > k:
        l, k = k, l
    return (k * (k - 1) - l * (l - 1)) // 2


def tower_dist(a: TowerPoint, b: TowerPoint) -> int:
    if a.level < 1 or b.level < 1:
        raise ValueError("levels start at 1")
    if a.level > b.level:
        a, b = b, a
    return max(sup_dist(a.padded(b.level), b.coords), level_gap(a.level, b.level))


@dataclass(frozen=True)
class WindowSpec:
    """Finite truncation of one of the example spaces.

    ``side`` bounds the sup-norm of the coordinates. ``dims`` is the lattice
    dimension for ``zn``/``kzn``; ``scale`` is k for ``kzn``; ``level_cap``
    is the top level for the tower families.
    """

    family: str
    side: int
    dims: int = 1
    scale: int = 1
    level_cap: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown space family {self.family!r}")
        if self.side < 0:
            raise ValueError("side must be non-negative")
        if self.family in ("zn", "kzn") and self.dims < 1:
            raise ValueError("dims must be >= 1")
        if self.family == "kzn" and self.scale < 1:
            raise ValueError("scale must be >= 1")
        if self.family in ("lomega", "linf") and self.level_cap < 1:
            raise ValueError("level_cap must be >= 1")

    def to_json(self) -> dict:
        doc = {"family": self.family, "side": self.side}
        if self.family in ("zn", "kzn"):
            doc["dims"] = self.dims
        if self.family == "kzn":
            doc["scale"] = self.scale
        if self.family in ("lomega", "linf"):
            doc["level_cap"] = self.level_cap
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> WindowSpec:
        known = {"family", "side", "dims", "scale", "level_cap"}
        extra = set(doc) - known
        if extra:
            raise ValueError(f"unknown WindowSpec keys: {sorted(extra)}")
        return cls(**doc)


class Window:
    """Ordered finite point set with an exact integer metric.

    Points are tuples of ints (``sup`` metric) or :class:`TowerPoint`
    (``tower`` metric). Internally every point is also stored as a row of a
    zero-padded coordinate array together with its level, which lets the
    validators and the solver compute distances in bulk.
    """

    def __init__(self, points: Iterable, metric: str = "sup", spec: WindowSpec | None = None):
        self.points = tuple(points)
        if not self.points:
            raise ValueError("empty window")
        if metric not in ("sup", "tower"):
            raise ValueError(f"unknown metric {metric!r}")
        self.metric = metric
        self.spec = spec
        self.index = {p: i for i, p in enumerate(self.points)}
        if len(self.index) != len(self.points):
            raise ValueError("duplicate points in window")
        if metric == "tower":
            for p in self.points:
                if not isinstance(p, TowerPoint) or len(p.coords) != p.level:
                    raise ValueError(f"bad tower point {p!r}")
            self.width = max(p.level for p in self.points)
            self.levels = np.array([p.level for p in self.points], dtype=np.int64)
            self.coords = np.array([p.padded(self.width) for p in self.points], dtype=np.int64)
        else:
            n = len(self.points[0])
            if any(len(p) != n for p in self.points):
                raise ValueError("mixed dimensions in a sup-metric window")
            self.width = n
            self.levels = np.full(len(self.points), n, dtype=np.int64)
            self.coords = np.array(self.points, dtype=np.int64).reshape(len(self.points), n)
        top = int(self.levels.max()) + 1
        self.gaps = np.array([[level_gap(l, k) for k in range(top)] for l in range(top)], dtype=np.int64)
        if metric == "sup":
            self.gaps[:] = 0
        self._matrix = None

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, p):
        return p in self.index

    def __repr__(self):
        return f"Window({len(self)} points, metric={self.metric!r})"

    def distance(self, p, q) -> int:
        if self.metric == "tower":
            return tower_dist(p, q)
        return sup_dist(p, q)

    def cross(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        """Distance matrix between two index lists."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        a = self.coords[rows][:, None, :]
        b = self.coords[cols][None, :, :]
        d = np.abs(a - b).max(axis=2) if self.width else np.zeros((len(rows), len(cols)), np.int64)
        return np.maximum(d, self.gaps[self.levels[rows][:, None], self.levels[cols][None, :]])

    def matrix(self) -> np.ndarray:
        """Full distance matrix (cached). Only sensible for small windows."""
        if self._matrix is None:
            idx = np.arange(len(self))
            self._matrix = self.cross(idx, idx)
        return self._matrix

    def diameter(self) -> int:
        return profile_diameter(profile_of(self, range(len(self))))

    def subwindow(self, points: Iterable) -> Window:
        keep = set(points)
        return Window([p for p in self.points if p in keep], self.metric)

    def to_json(self) -> dict:
        doc = {"metric": self.metric, "points": [point_to_json(p) for p in self.points]}
        if self.spec is not None:
            doc["spec"] = self.spec.to_json()
        return doc

    def to_csv(self, with_distances: bool = False) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        labels = [json.dumps(point_to_json(p), separators=(",", ":")) for p in self.points]
        if with_distances:
            w.writerow(["point"] + labels)
            for label, row in zip(labels, self.matrix()):
                w.writerow([label] + [int(x) for x in row])
        else:
            w.writerow(["index", "point"])
            for i, label in enumerate(labels):
                w.writerow([i, label])
        return buf.getvalue()


def point_to_json(p):
    if isinstance(p, TowerPoint):
        return {"level": p.level, "coords": list(p.coords)}
    return list(p)


def point_from_json(doc):
    if isinstance(doc, dict):
        return TowerPoint(int(doc["level"]), tuple(int(x) for x in doc["coords"]))
    return tuple(int(x) for x in doc)


def _box(dims: int, side: int, step: int):
    axis = range(-(side // step) * step, side + 1, step)
    return itertools.product(axis, repeat=dims)


def make_window(spec: WindowSpec) -> Window:
    """Enumerate the points of ``spec`` in level-major, lexicographic order."""
    if spec.family in ("zn", "kzn"):
        step = spec.scale if spec.family == "kzn" else 1
        pts = list(_box(spec.dims, spec.side, step))
        if not pts:
            raise ValueError(f"window {spec} is empty")
        return Window(pts, "sup", spec)
    pts = []
    for level in range(1, spec.level_cap + 1):
        step = level if spec.family == "lomega" else 1
        pts.extend(TowerPoint(level, c) for c in _box(level, spec.side, step))
    return Window(pts, "tower", spec)


def neighborhood(A: Iterable, R: int, W: Window) -> frozenset:
    """All points of W within distance R of A."""
    idx = [W.index[a] for a in A]
    if not idx:
        return frozenset()
    near = np.zeros(len(W), dtype=bool)
    everything = np.arange(len(W))
    for start in range(0, len(idx), 256):
        d = W.cross(idx[start:start + 256], everything)
        near |= (d <= R).any(axis=0)
    return frozenset(W.points[i] for i in np.flatnonzero(near))


def set_metrics(A: Iterable, B: Iterable, W: Window) -> tuple[int, int]:
    """(d(A, B), diam A) where d is the minimum pairwise distance."""
    ia = [W.index[a] for a in A]
    ib = [W.index[b] for b in B]
    if not ia or not ib:
        raise ValueError("set_metrics needs non-empty sets")
    return int(W.cross(ia, ib).min()), int(W.cross(ia, ia).max())


# Bounding-box profiles. For both metrics the largest distance between two
# point sets is determined by per-level coordinate boxes: sup-distance is a
# max over coordinates, and each coordinate's extreme difference only depends
# on that coordinate's min and max on either side.

def profile_of(W: Window, indices: Iterable[int]) -> tuple:
    """Per-level (level, mins, maxs) boxes of the given window indices."""
    indices = np.fromiter(indices, dtype=np.int64)
    out = []
    for level in np.unique(W.levels[indices]):
        sel = indices[W.levels[indices] == level]
        block = W.coords[sel]
        out.append((int(level), tuple(int(x) for x in block.min(axis=0)),
                    tuple(int(x) for x in block.max(axis=0))))
    return tuple(out)


def point_profile(level: int, coords: Sequence[int]) -> tuple:
    c = tuple(coords)
    return ((level, c, c),)


def profile_span(P: tuple, Q: tuple) -> int:
    """Largest distance between a point described by P and one described by Q."""
    best = 0
    for l, pmin, pmax in P:
        for k, qmin, qmax in Q:
            best = max(best, level_gap(l, k) if l != k else 0)
            for a0, a1, b0, b1 in zip(pmin, pmax, qmin, qmax):
                best = max(best, a1 - b0, b1 - a0)
    return best


def profile_diameter(P: tuple) -> int:
    return profile_span(P, P)


def profile_union(P: tuple, Q: tuple) -> tuple:
    boxes = {l: (mn, mx) for l, mn, mx in P}
    for l, mn, mx in Q:
        if l in boxes:
            a, b = boxes[l]
            boxes[l] = (tuple(map(min, a, mn)), tuple(map(max, b, mx)))
        else:
            boxes[l] = (mn, mx)
    return tuple((l,) + boxes[l] for l in sorted(boxes))
