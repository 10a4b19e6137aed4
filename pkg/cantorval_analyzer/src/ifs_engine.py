"""
The iterated function system w_1..w_{2m+2} whose attractor is X(m).

Level sets W^n(I) are iterated as integer numerators over the common
denominator (2m+1)(2m+2)^n: w_i shifts a level-(n-1) numerator by
digit_i * (2m+1)(2m+2)^(n-1), so no fraction is formed until the end.
"""

import bisect
import heapq
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Literal, Tuple

from .boundary_geometry import copy_extent
from .config import resolve_budget
from .errors import BudgetExceededError, DisjointnessViolation
from .exact_numerics import (
    Interval,
    IntervalSet,
    format_rational,
    merge_scaled,
    scaled_measure,
    set_intersect,
    set_union,
)
from .models import BracketRow, OrderingRelation, OrderingReport
from .series_model import digit_set

Pairs = List[Tuple[int, int]]


@dataclass(frozen=True, slots=True)
class SimilarityMap:
    ratio: Fraction
    offset: Fraction

    def __call__(self, x) -> Fraction:
        return self.ratio * x + self.offset

    def image(self, iv: Interval) -> Interval:
        return Interval(self(iv.lo), self(iv.hi))

    def apply(self, s: IntervalSet) -> IntervalSet:
        return IntervalSet._canonical(tuple(self.image(iv) for iv in s))

    def compose(self, inner: "SimilarityMap") -> "SimilarityMap":
        """self after inner."""
        return SimilarityMap(self.ratio * inner.ratio, self.ratio * inner.offset + self.offset)

    def power(self, k: int) -> "SimilarityMap":
        result = SimilarityMap(Fraction(1), Fraction(0))
        for _ in range(k):
            result = self.compose(result)
        return result

    def to_json(self) -> dict:
        return {"ratio": format_rational(self.ratio), "offset": format_rational(self.offset)}


@dataclass(frozen=True, slots=True)
class SimilaritySystem:
    m: int
    maps: Tuple[SimilarityMap, ...]
    base: Interval

    def w(self, i: int) -> SimilarityMap:
        """1-based access, w(1) .. w(2m+2)."""
        return self.maps[i - 1]

    @property
    def base_ratio(self) -> int:
        return 2 * self.m + 2

    @property
    def digits(self) -> List[int]:
        return [int(f.offset * self.base_ratio) for f in self.maps]

    @property
    def diameter(self) -> Fraction:
        return self.base.hi


def build_ifs(m: int) -> SimilaritySystem:
    """
    w_1(x) = x/(2m+2), w_i(x) = (i + x)/(2m+2) for 2 <= i <= 2m+1,
    w_{2m+2}(x) = (2m+3 + x)/(2m+2), on I = [0, (2m+3)/(2m+1)].
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    base = 2 * m + 2
    maps = tuple(SimilarityMap(Fraction(1, base), Fraction(d, base)) for d in digit_set(m))
    return SimilaritySystem(m=m, maps=maps, base=Interval(Fraction(0), Fraction(2 * m + 3, 2 * m + 1)))


def _shifted(pairs: Pairs, shift: int) -> Iterator[Tuple[int, int]]:
    for lo, hi in pairs:
        yield lo + shift, hi + shift


def _step(sys: SimilaritySystem, pairs: Pairs, denominator: int, budget: int, what: str) -> Pairs:
    raw = len(pairs) * len(sys.maps)
    if raw > budget:
        raise BudgetExceededError(what, raw, budget)
    streams = [_shifted(pairs, d * denominator) for d in sys.digits]
    return merge_scaled(heapq.merge(*streams))


def _level_denominator(sys: SimilaritySystem, n: int) -> int:
    return (2 * sys.m + 1) * sys.base_ratio**n


def scaled_levels(sys: SimilaritySystem, n: int, budget: int | None = None) -> Iterator[Tuple[int, Pairs, int]]:
    """Yield (level, numerator pairs, denominator) for W^0(I) .. W^n(I)."""
    budget = resolve_budget(budget)
    pairs: Pairs = [(0, 2 * sys.m + 3)]
    yield 0, pairs, _level_denominator(sys, 0)
    for level in range(1, n + 1):
        pairs = _step(sys, pairs, _level_denominator(sys, level - 1), budget, f"W^{level}(I)")
        yield level, pairs, _level_denominator(sys, level)


def iterate_cover(sys: SimilaritySystem, n: int, budget: int | None = None) -> IntervalSet:
    """
    Exact W^n(I).

    Raises:
            BudgetExceededError: when (2m+2) * |W^(n-1)(I)| raw images pass the budget.
    """
    if n < 0:
        raise ValueError(f"level must be >= 0, got {n}")
    for level, pairs, denominator in scaled_levels(sys, n, budget):
        if level == n:
            return IntervalSet.from_scaled(pairs, denominator)


def iterate_levels(sys: SimilaritySystem, n: int, budget: int | None = None) -> List[IntervalSet]:
    return [IntervalSet.from_scaled(p, d) for _, p, d in scaled_levels(sys, n, budget)]


def apply_operator(sys: SimilaritySystem, s: IntervalSet) -> IntervalSet:
    """Hutchinson operator W(s) = union of w_i(s)."""
    return IntervalSet([iv for f in sys.maps for iv in f.apply(s)])


@dataclass(frozen=True)
class BTAssembly:
    pieces: Tuple[Tuple[str, IntervalSet], ...]
    central: Interval
    cover: IntervalSet


def _check_disjoint(pieces: List[Tuple[str, IntervalSet]]) -> None:
    hulls = [(label, s.hull(), s) for label, s in pieces if s]
    for i in range(len(hulls)):
        for j in range(i + 1, len(hulls)):
            (la, ha, sa), (lb, hb, sb) = hulls[i], hulls[j]
            if ha.hi < hb.lo or hb.hi < ha.lo:
                continue
            overlap = set_intersect(sa, sb)
            if overlap:
                raise DisjointnessViolation(la, lb, overlap)


def bt_assembly(sys: SimilaritySystem, n: int, budget: int | None = None) -> BTAssembly:
    """
    Rebuild W^n(I) piece by piece: left pieces w_2^k o w_1(W^(n-1-k)(I)), the
    central interval [w_2^n(0), w_{2m+1}^n(|I|)], right pieces
    w_{2m+1}^(n-1-k) o w_{2m+2}(W^k(I)), for k = 0..n-1.

    Raises:
            DisjointnessViolation: if two pieces intersect.
    """
    if n < 1:
        raise ValueError(f"assembly level must be >= 1, got {n}")
    levels = iterate_levels(sys, n - 1, budget)
    first, second = sys.w(1), sys.w(2)
    last, inner_last = sys.w(2 * sys.m + 2), sys.w(2 * sys.m + 1)

    pieces: List[Tuple[str, IntervalSet]] = []
    for k in range(n):
        f = second.power(k).compose(first)
        pieces.append((f"left[{k}]", f.apply(levels[n - 1 - k])))
    central = Interval(second.power(n)(Fraction(0)), inner_last.power(n)(sys.diameter))
    pieces.append(("central", IntervalSet._canonical((central,))))
    for k in range(n):
        f = inner_last.power(n - 1 - k).compose(last)
        pieces.append((f"right[{k}]", f.apply(levels[k])))

    _check_disjoint(pieces)
    cover = IntervalSet.empty()
    for _, s in pieces:
        cover = set_union(cover, s)
    return BTAssembly(pieces=tuple(pieces), central=central, cover=cover)


def central_interval(m: int) -> Interval:
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return Interval(Fraction(2, 2 * m + 1), Fraction(1))


def central_containment(sys: SimilaritySystem, levels: int, budget: int | None = None) -> bool:
    """True when [2/(2m+1), 1] lies in W^n(I) for every n <= levels."""
    base = sys.base_ratio
    for level, pairs, denominator in scaled_levels(sys, levels, budget):
        # the central interval is [2(2m+2)^n, (2m+1)(2m+2)^n] over this denominator
        lo, hi = 2 * base**level, (2 * sys.m + 1) * base**level
        idx = bisect.bisect_right(pairs, (lo, float("inf"))) - 1
        if idx < 0 or pairs[idx][1] < hi:
            logging.warning(f"Central interval escapes W^{level}(I) for m={sys.m}")
            return False
    return True


def _scaled_inner(sys: SimilaritySystem, depth: int, budget: int) -> Iterator[Tuple[int, Pairs, int]]:
    base = sys.base_ratio
    pairs: Pairs = [(2, 2 * sys.m + 1)]
    yield 0, pairs, _level_denominator(sys, 0)
    for level in range(1, depth + 1):
        images = _step(sys, pairs, _level_denominator(sys, level - 1), budget, f"inner level {level}")
        centre = (2 * base**level, (2 * sys.m + 1) * base**level)
        pairs = merge_scaled(heapq.merge(images, [centre]))
        yield level, pairs, _level_denominator(sys, level)


def inner_approx(sys: SimilaritySystem, depth: int, budget: int | None = None) -> IntervalSet:
    """
    Union of w(J) over all words w of length <= depth, J the central interval.
    Every returned point lies in X(m).
    """
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    for level, pairs, denominator in _scaled_inner(sys, depth, resolve_budget(budget)):
        if level == depth:
            return IntervalSet.from_scaled(pairs, denominator)


def inner_measure(sys: SimilaritySystem, depth: int, budget: int | None = None) -> Fraction:
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    for level, pairs, denominator in _scaled_inner(sys, depth, resolve_budget(budget)):
        if level == depth:
            return scaled_measure(pairs, denominator)


def measure_bracket(sys: SimilaritySystem, depth: int, budget: int | None = None) -> List[BracketRow]:
    """inner_measure(d) <= 1 <= measure(W^d(I)) for d = 0..depth, with the gap length |I| - outer."""
    budget = resolve_budget(budget)
    outer = [scaled_measure(p, d) for _, p, d in scaled_levels(sys, depth, budget)]
    inner = [scaled_measure(p, d) for _, p, d in _scaled_inner(sys, depth, budget)]
    return [
        BracketRow(depth=d, inner=i, outer=o, width=o - i, gap_length=sys.diameter - o)
        for d, (i, o) in enumerate(zip(inner, outer))
    ]


def ordering_check(sys: SimilaritySystem) -> OrderingReport:
    """
    The min/max relations of the pieces w_i(X(m)), using min X(m) = 0 and
    max X(m) = (2m+3)/(2m+1).
    """
    m, top = sys.m, sys.diameter
    mins = [f(0) for f in sys.maps]
    maxs = [f(top) for f in sys.maps]
    relations: List[OrderingRelation] = []

    def add(name, relation, lhs, rhs):
        holds = lhs < rhs if relation == "<" else lhs == rhs
        relations.append(OrderingRelation(name=name, relation=relation, lhs=lhs, rhs=rhs, holds=holds))

    for i in range(1, 2 * m + 2):
        add(f"min w{i} < min w{i + 1}", "<", mins[i - 1], mins[i])
        add(f"max w{i} < max w{i + 1}", "<", maxs[i - 1], maxs[i])
    for i in range(2, 2 * m + 2):
        add(f"min w{i}", "=", mins[i - 1], Fraction(i, 2 * m + 2))
        add(f"max w{i}", "=", maxs[i - 1], Fraction(i * (2 * m + 1) + 2 * m + 3, (2 * m + 1) * (2 * m + 2)))
    add("min w1", "=", mins[0], Fraction(0))
    add("max w1", "=", maxs[0], Fraction(2 * m + 3, (2 * m + 1) * (2 * m + 2)))
    add(f"min w{2 * m + 2}", "=", mins[-1], Fraction(2 * m + 3, 2 * m + 2))
    add(f"max w{2 * m + 2}", "=", maxs[-1], Fraction(2 * m + 3, 2 * m + 1))
    return OrderingReport(m=m, relations=relations)


def copy_map(sys: SimilaritySystem, side: Literal["left", "right"], n: int) -> SimilarityMap:
    """w_2^(n-1) o w_1 (left) or w_{2m+1}^(n-1) o w_{2m+2} (right): maps X(m) onto its n-th copy."""
    if n < 1:
        raise ValueError(f"copy level must be >= 1, got {n}")
    if side == "left":
        return sys.w(2).power(n - 1).compose(sys.w(1))
    if side == "right":
        return sys.w(2 * sys.m + 1).power(n - 1).compose(sys.w(2 * sys.m + 2))
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def copy_image(sys: SimilaritySystem, side: Literal["left", "right"], n: int) -> Interval:
    return copy_map(sys, side, n).image(sys.base)


def copy_words_check(sys: SimilaritySystem, levels: int) -> List[Tuple[str, int, bool]]:
    """
    Each copy map sends I onto the boundary copy extent and stays clear of the
    interior of the central interval, for n <= levels.
    """
    centre = central_interval(sys.m)
    results = []
    for n in range(1, levels + 1):
        for side in ("left", "right"):
            iv = copy_image(sys, side, n)
            clear = iv.hi <= centre.lo or iv.lo >= centre.hi
            results.append((side, n, clear and iv == copy_extent(sys.m, side, n)))
    return results
