"""
Depth-n interval covers of the achievement set E(a_n) and trichotomy certificates.

The depth-n cover is the union of [s, s + r_n] over the distinct subset sums s
of the first n terms, r_n being the tail after n terms. Covers are nested and
their intersection is E(a_n).
"""

import bisect
import heapq
import logging
import math
from fractions import Fraction
from typing import List, Tuple

from .config import resolve_budget
from .errors import BudgetExceededError
from .exact_numerics import Interval, IntervalSet, gaps, merge_scaled
from .models import Certificate, Classification, GapRecord, LevelCover, SeriesSpec
from .series_model import kakeya_profile, tail, terms, total


def _merge_distinct(a: List[int], b: List[int]) -> List[int]:
    out: List[int] = []
    for value in heapq.merge(a, b):
        if not out or out[-1] != value:
            out.append(value)
    return out


def _scaled_prefix_sums(spec: SeriesSpec, depth: int, budget: int) -> Tuple[List[int], int]:
    head = terms(spec, depth)
    denominator = math.lcm(1, *(t.denominator for t in head))
    sums = [0]
    for t in head:
        step = t.numerator * (denominator // t.denominator)
        shifted = [s + step for s in sums]
        sums = _merge_distinct(sums, shifted)
        if len(sums) > budget:
            raise BudgetExceededError(f"prefix sums at depth {depth}", len(sums), budget)
    return sums, denominator


def prefix_sums(spec: SeriesSpec, depth: int, budget: int | None = None) -> List[Fraction]:
    """
    Distinct subset sums of the first `depth` terms, sorted.

    Raises:
            BudgetExceededError: when the distinct-sum count passes the budget.
    """
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    sums, denominator = _scaled_prefix_sums(spec, depth, resolve_budget(budget))
    return [Fraction(s, denominator) for s in sums]


def level_cover(spec: SeriesSpec, depth: int, budget: int | None = None) -> LevelCover:
    """Outer approximation of E(a_n) from prefix sums of `depth` terms and the tail after them."""
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")
    sums, denominator = _scaled_prefix_sums(spec, depth, resolve_budget(budget))
    radius = tail(spec, depth)
    scale = math.lcm(denominator, radius.denominator)
    factor = scale // denominator
    width = radius.numerator * (scale // radius.denominator)
    pairs = merge_scaled((s * factor, s * factor + width) for s in sums)
    return LevelCover(
        depth=depth,
        cover=IntervalSet.from_scaled(pairs, scale),
        tail_radius=radius,
        prefix_count=len(sums),
    )


def cover_sequence(spec: SeriesSpec, max_depth: int, budget: int | None = None) -> List[LevelCover]:
    """Covers for depths 0..max_depth."""
    return [level_cover(spec, d, budget) for d in range(max_depth + 1)]


def _has_gap_inside(gap: Interval, gap_set: IntervalSet, los: List[Fraction]) -> bool:
    # gaps are sorted and separated: only the first one starting at or after gap.lo can fit
    idx = bisect.bisect_left(los, gap.lo)
    return idx < len(los) and gap.covers(gap_set.items[idx])


def _trace_gaps(covers: List[LevelCover], whole: Interval) -> List[GapRecord]:
    gap_sets = [gaps(c.cover, whole) for c in covers[1:]]
    lo_lists = [[g.lo for g in s] for s in gap_sets]
    records = []
    for gap in gap_sets[-1]:
        holds = [_has_gap_inside(gap, s, los) for s, los in zip(gap_sets, lo_lists)]
        born_at = next(d for d, ok in enumerate(holds, start=1) if ok)
        records.append(GapRecord(gap=gap, born_at=born_at, persistent=all(holds[born_at - 1 :])))
    return records


def gap_report(spec: SeriesSpec, depth: int, budget: int | None = None) -> List[GapRecord]:
    """
    Gaps of the depth-n cover inside [0, total], each traced back to the first
    depth whose cover already shows a gap inside it.
    """
    if depth < 1:
        raise ValueError(f"gap report needs depth >= 1, got {depth}")
    covers = cover_sequence(spec, depth, budget)
    return _trace_gaps(covers, Interval(Fraction(0), total(spec)))


def classify(spec: SeriesSpec, max_depth: int, budget: int | None = None) -> Classification:
    """
    Trichotomy verdict with a machine-checkable certificate.

    Multigeometric terms and tails both scale by the ratio from one block to
    the next, so the Kakeya pattern of the first block repeats forever: an
    all-true block proves a finite union of intervals, an all-false block
    proves a Cantor set. Mixed blocks are only ever reported as candidates.
    """
    period = spec.block_length
    if max_depth < period:
        raise ValueError(f"max_depth {max_depth} is shorter than one block ({period} terms)")
    block = kakeya_profile(spec, period).pattern
    covers = cover_sequence(spec, max_depth, budget)
    counts = [(c.depth, len(c.cover)) for c in covers]

    if all(block):
        return Classification(
            verdict="FiniteUnionOfIntervals",
            max_depth=max_depth,
            certificate=Certificate(
                period=period,
                kakeya_block=block,
                conclusive=True,
                interval_witness=covers[-1].cover.hull(),
                component_counts=counts,
                note="a_n <= r_n for every n: each cover equals the previous one",
            ),
        )
    if not any(block):
        return Classification(
            verdict="CantorLike",
            max_depth=max_depth,
            certificate=Certificate(
                period=period,
                kakeya_block=block,
                conclusive=True,
                component_counts=counts,
                note="a_n > r_n for every n: every prefix interval splits into two disjoint ones",
            ),
        )

    deepest = covers[-1]
    witness = max(deepest.cover, key=lambda iv: (iv.length, -iv.lo))
    interval_ok = witness.length > deepest.tail_radius and all(
        c.cover.contains_interval(witness) for c in covers
    )
    records = _trace_gaps(covers, Interval(Fraction(0), total(spec)))
    persistent = [r for r in records if r.persistent]
    gap_witness = min(persistent, key=lambda r: (r.born_at, -r.gap.length), default=None)

    verdict = "CantorvalCandidate" if interval_ok and gap_witness is not None else "Undetermined"
    logging.info(f"Classified with mixed Kakeya block {block}: {verdict}")
    return Classification(
        verdict=verdict,
        max_depth=max_depth,
        certificate=Certificate(
            period=period,
            kakeya_block=block,
            conclusive=False,
            interval_witness=witness if interval_ok else None,
            gap_witness=gap_witness,
            component_counts=counts,
            note="finite-depth evidence only; not a proof of the Cantorval type",
        ),
    )
