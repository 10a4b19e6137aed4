"""
Exact rational scalars and algebra on finite unions of closed intervals.

All sets handled here are finite unions of closed intervals with rational
endpoints. Set difference takes closures, so every result is again such a
union; touching intervals are merged, degenerate point intervals are kept.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import MalformedIntervalError


def as_rational(value) -> Fraction:
    """Coerce an int, str ("p/q") or Fraction to a Fraction. Floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError(f"refusing inexact float {value!r}; pass a Fraction or a 'p/q' string")
    return Fraction(value)


def format_rational(value: Fraction) -> str:
    """Render as 'p/q' in lowest terms, integers included ('3/1')."""
    value = as_rational(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    return Fraction(str(text).strip())


@dataclass(frozen=True, slots=True, order=True)
class Interval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise MalformedIntervalError(f"interval lo={self.lo} exceeds hi={self.hi}")

    @classmethod
    def of(cls, lo, hi) -> Interval:
        return cls(as_rational(lo), as_rational(hi))

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        return self.lo <= x <= self.hi

    def covers(self, other: Interval) -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def to_json(self) -> dict:
        return {"lo": format_rational(self.lo), "hi": format_rational(self.hi)}

    def __repr__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


def _merge_sorted(items: Iterable[Interval]) -> tuple[Interval, ...]:
    out: list[Interval] = []
    for iv in items:
        if out and iv.lo <= out[-1].hi:
            if iv.hi > out[-1].hi:
                out[-1] = Interval(out[-1].lo, iv.hi)
        else:
            out.append(iv)
    return tuple(out)


class IntervalSet:
    """Sorted, pairwise separated closed intervals. Immutable."""

    __slots__ = ("_items", "_los")

    def __init__(self, items: Iterable[Interval] = ()):
        raw = list(items)
        for iv in raw:
            if not isinstance(iv, Interval):
                raise TypeError(f"expected Interval, got {type(iv).__name__}")
        self._items = _merge_sorted(sorted(raw))
        self._los = None

    @classmethod
    def _canonical(cls, items: tuple[Interval, ...]) -> IntervalSet:
        obj = cls.__new__(cls)
        obj._items = items
        obj._los = None
        return obj

    @classmethod
    def of(cls, *pairs) -> IntervalSet:
        return cls(Interval.of(lo, hi) for lo, hi in pairs)

    @classmethod
    def empty(cls) -> IntervalSet:
        return cls._canonical(())

    @classmethod
    def from_scaled(cls, pairs: Iterable[tuple[int, int]], denominator: int) -> IntervalSet:
        """Build from integer numerator pairs over a common denominator (already merged)."""
        return cls._canonical(
            tuple(Interval(Fraction(lo, denominator), Fraction(hi, denominator)) for lo, hi in pairs)
        )

    def to_scaled(self, denominator: int) -> list[tuple[int, int]]:
        out = []
        for iv in self._items:
            lo, hi = iv.lo * denominator, iv.hi * denominator
            if lo.denominator != 1 or hi.denominator != 1:
                raise ValueError(f"{iv!r} is not on the grid 1/{denominator}")
            out.append((lo.numerator, hi.numerator))
        return out

    @property
    def items(self) -> tuple[Interval, ...]:
        return self._items

    def __iter__(self) -> Iterator[Interval]:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __bool__(self) -> bool:
        return bool(self._items)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __repr__(self) -> str:
        return "{" + ", ".join(repr(iv) for iv in self._items) + "}"

    def hull(self) -> Interval | None:
        if not self._items:
            return None
        return Interval(self._items[0].lo, self._items[-1].hi)

    def _locate(self, x) -> Interval | None:
        if self._los is None:
            self._los = [iv.lo for iv in self._items]
        idx = bisect.bisect_right(self._los, x) - 1
        if idx < 0:
            return None
        return self._items[idx]

    def contains_point(self, x) -> bool:
        iv = self._locate(x)
        return iv is not None and x <= iv.hi

    def contains_interval(self, target: Interval) -> bool:
        # a connected set inside a union of separated closed intervals sits in one of them
        iv = self._locate(target.lo)
        return iv is not None and iv.covers(target)

    def issubset(self, other: IntervalSet) -> bool:
        return all(other.contains_interval(iv) for iv in self._items)

    def to_json(self) -> list[dict]:
        return [iv.to_json() for iv in self._items]

    @classmethod
    def from_json(cls, data: Sequence[dict]) -> IntervalSet:
        return normalize(
            [Interval(parse_rational(item["lo"]), parse_rational(item["hi"])) for item in data]
        )

    @classmethod
    def coerce(cls, value) -> IntervalSet:
        if isinstance(value, IntervalSet):
            return value
        return cls.from_json(value)


def normalize(raw: Iterable[Interval]) -> IntervalSet:
    """
    Canonical merged form of a collection of closed intervals.

    Raises:
            MalformedIntervalError: when an interval has lo > hi.
    """
    return IntervalSet(raw)


def set_union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    if not b:
        return a
    if not a:
        return b
    return IntervalSet(a.items + b.items)


def set_intersect(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    xs, ys = a.items, b.items
    i = j = 0
    out: list[Interval] = []
    while i < len(xs) and j < len(ys):
        lo = max(xs[i].lo, ys[j].lo)
        hi = min(xs[i].hi, ys[j].hi)
        if lo <= hi:
            out.append(Interval(lo, hi))
        if xs[i].hi < ys[j].hi:
            i += 1
        else:
            j += 1
    return IntervalSet._canonical(_merge_sorted(out))


def set_subtract(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    """Closure of a \\ b."""
    cuts = b.items
    out: list[Interval] = []
    j = 0
    for iv in a.items:
        while j < len(cuts) and cuts[j].hi < iv.lo:
            j += 1
        lo, hi = iv.lo, iv.hi
        keep = True
        k = j
        while k < len(cuts) and cuts[k].lo <= hi:
            cut = cuts[k]
            if cut.lo > lo:
                out.append(Interval(lo, cut.lo))
            if cut.hi >= hi:
                keep = False
                break
            lo = max(lo, cut.hi)
            k += 1
        if keep:
            out.append(Interval(lo, hi))
    return IntervalSet(out)


def measure(s: IntervalSet) -> Fraction:
    return sum((iv.length for iv in s), Fraction(0))


def components(s: IntervalSet) -> int:
    return len(s)


def gaps(s: IntervalSet, within: Interval) -> IntervalSet:
    """
    Bounded complementary intervals of s inside `within`, as closed intervals.

    Raises:
            MalformedIntervalError: if `within` does not contain s.
    """
    hull = s.hull()
    if hull is None:
        return IntervalSet._canonical((within,))
    if not within.covers(hull):
        raise MalformedIntervalError(f"{within!r} does not contain {hull!r}")
    out: list[Interval] = []
    cursor = within.lo
    for iv in s:
        if iv.lo > cursor:
            out.append(Interval(cursor, iv.lo))
        cursor = iv.hi
    if within.hi > cursor:
        out.append(Interval(cursor, within.hi))
    return IntervalSet._canonical(tuple(out))


def affine_image(s: IntervalSet, ratio, offset) -> IntervalSet:
    """
    Image of s under x -> ratio*x + offset.

    Raises:
            ValueError: on a zero ratio.
    """
    ratio, offset = as_rational(ratio), as_rational(offset)
    if ratio == 0:
        raise ValueError("affine_image needs a non-zero ratio")
    if ratio > 0:
        return IntervalSet._canonical(
            tuple(Interval(ratio * iv.lo + offset, ratio * iv.hi + offset) for iv in s)
        )
    return IntervalSet._canonical(
        tuple(Interval(ratio * iv.hi + offset, ratio * iv.lo + offset) for iv in reversed(s.items))
    )


def reflect(s: IntervalSet, center_times_2) -> IntervalSet:
    """Image of s under x -> center_times_2 - x."""
    return affine_image(s, -1, center_times_2)


def merge_scaled(pairs: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    """Merge integer (lo, hi) pairs that arrive sorted by lo; touching pairs merge."""
    out: list[tuple[int, int]] = []
    for lo, hi in pairs:
        if out and lo <= out[-1][1]:
            if hi > out[-1][1]:
                out[-1] = (out[-1][0], hi)
        else:
            out.append((lo, hi))
    return out


def scaled_measure(pairs: Iterable[tuple[int, int]], denominator: int) -> Fraction:
    return Fraction(sum(hi - lo for lo, hi in pairs), denominator)
