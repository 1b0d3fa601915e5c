"""Ordinals below omega^omega in Cantor normal form, plus an infinity marker.

Values are immutable. ``Ordinal.of(5)`` is the natural 5, ``OMEGA`` is the
first infinite ordinal and ``INFINITY`` compares above every ordinal.
Text form: ``"w^2*3 + w*1 + 4"``, ``"0"``, ``"inf"``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from functools import total_ordering
from typing import Iterable


@total_ordering
@dataclass(frozen=True)
class Ordinal:
    """omega^e1*c1 + omega^e2*c2 + ... with e1 > e2 > ... >= 0, all ci >= 1.

    ``infinite`` marks the distinguished value above every ordinal; its
    ``terms`` are always empty.
    """

    terms: tuple[tuple[int, int], ...] = ()
    infinite: bool = False

    def __post_init__(self):
        if self.infinite:
            if self.terms:
                raise ValueError("infinity carries no terms")
            return
        prev = None
        for e, c in self.terms:
            if not (isinstance(e, int) and isinstance(c, int)):
                raise TypeError("exponents and coefficients must be int")
            if e < 0 or c < 1:
                raise ValueError(f"bad CNF term ({e}, {c})")
            if prev is not None and e >= prev:
                raise ValueError("exponents must be strictly decreasing")
            prev = e

    @classmethod
    def of(cls, n: int) -> Ordinal:
        if n < 0:
            raise ValueError("ordinals are non-negative")
        return cls(((0, n),)) if n else cls()

    @property
    def is_finite(self) -> bool:
        return not self.infinite and all(e == 0 for e, _ in self.terms)

    def __int__(self) -> int:
        if not self.is_finite:
            raise ValueError(f"{self} is not a natural number")
        return self.terms[0][1] if self.terms else 0

    def _key(self):
        # lexicographic on (exponent, coefficient) pairs; a strict prefix is smaller
        return (1,) if self.infinite else (0, self.terms)

    def __lt__(self, other):
        if isinstance(other, int):
            other = Ordinal.of(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self._key() < other._key()

    def __eq__(self, other):
        if isinstance(other, int):
            return not self.infinite and self.is_finite and int(self) == other
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.terms == other.terms and self.infinite == other.infinite

    def __hash__(self):
        return hash((self.terms, self.infinite))

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"Ordinal({render(self)!r})"


ZERO = Ordinal()
ONE = Ordinal.of(1)
OMEGA = Ordinal(((1, 1),))
INFINITY = Ordinal(infinite=True)


def cmp(a: Ordinal, b: Ordinal) -> int:
    """-1, 0 or 1 as a is less than, equal to or greater than b."""
    return (a > b) - (a < b)


def succ(a: Ordinal) -> Ordinal:
    if a.infinite:
        raise ValueError("succ(inf) is undefined")
    if a.terms and a.terms[-1][0] == 0:
        return Ordinal(a.terms[:-1] + ((0, a.terms[-1][1] + 1),))
    return Ordinal(a.terms + ((0, 1),))


def sup(values: Iterable[Ordinal]) -> Ordinal:
    """Maximum of a non-empty finite collection."""
    values = list(values)
    if not values:
        raise ValueError("sup of an empty collection")
    return max(values)


def render(a: Ordinal) -> str:
    if a.infinite:
        return "inf"
    if not a.terms:
        return "0"
    parts = []
    for e, c in a.terms:
        if e == 0:
            parts.append(str(c))
        elif e == 1:
            parts.append(f"w*{c}")
        else:
            parts.append(f"w^{e}*{c}")
    return " + ".join(parts)


_TERM = re.compile(r"^(?:w(?:\^(\d+))?\*(\d+)|(\d+))$")


def parse(text: str) -> Ordinal:
    text = text.strip()
    if text == "inf":
        return INFINITY
    if text == "0":
        return ZERO
    terms = []
    for part in text.split("+"):
        m = _TERM.match(part.strip())
        if not m:
            raise ValueError(f"cannot parse ordinal term {part!r}")
        if m.group(3) is not None:
            terms.append((0, int(m.group(3))))
        else:
            terms.append((int(m.group(1) or 1), int(m.group(2))))
    return Ordinal(tuple(terms))


class DimKind(Enum):
    MINUS_ONE = "-1"
    DIM = "dim"
    INFINITY = "inf"


@total_ordering
@dataclass(frozen=True, eq=True)
class DimensionValue:
    """trasdim-style value: -1 for bounded spaces, an ordinal, or infinity."""

    kind: DimKind
    value: Ordinal | None = None

    @classmethod
    def minus_one(cls) -> DimensionValue:
        return cls(DimKind.MINUS_ONE)

    @classmethod
    def dim(cls, value: Ordinal) -> DimensionValue:
        if value.infinite:
            return cls(DimKind.INFINITY)
        return cls(DimKind.DIM, value)

    def _key(self):
        if self.kind is DimKind.MINUS_ONE:
            return (0, ZERO)
        return (1, INFINITY if self.kind is DimKind.INFINITY else self.value)

    def __lt__(self, other):
        if not isinstance(other, DimensionValue):
            return NotImplemented
        return self._key() < other._key()

    def __str__(self):
        if self.kind is DimKind.MINUS_ONE:
            return "-1"
        if self.kind is DimKind.INFINITY:
            return "inf"
        return render(self.value)

    @classmethod
    def parse(cls, text: str) -> DimensionValue:
        text = text.strip()
        if text == "-1":
            return cls.minus_one()
        return cls.dim(parse(text))
