"""
The boundary X_C(m): a disjoint union of left copies C_n^l and right copies
C_n^r (n >= 1), each similar to X_C(m) with ratio (2m+2)^-n, accumulating at
the endpoints 2/(2m+1) and 1 of the central interval.
"""

import logging
from functools import lru_cache
from fractions import Fraction
from typing import List, Literal, Tuple

from .config import resolve_budget
from .errors import BudgetExceededError
from .exact_numerics import Interval, IntervalSet, as_rational
from .models import BoundaryCopy, BoundaryCover, Discrepancy, DistanceRow, GeometryReport

Side = Literal["left", "right"]


def _check(m: int, n: int | None = None) -> None:
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if n is not None and n < 1:
        raise ValueError(f"copy level must be >= 1, got {n}")


def diameter(m: int) -> Fraction:
    """|I| = (2m+3)/(2m+1), also the diameter of X(m) and of X_C(m)."""
    return Fraction(2 * m + 3, 2 * m + 1)


def contraction(m: int) -> Fraction:
    return Fraction(1, 2 * m + 2)


@lru_cache(maxsize=None)
def _left_offset(m: int, n: int) -> Fraction:
    # sum_{i=1}^{n-1} 2 t^i in closed form
    t = contraction(m)
    return 2 * t * (1 - t ** (n - 1)) / (1 - t)


@lru_cache(maxsize=None)
def copy_offset(m: int, side: Side, n: int) -> Fraction:
    """min C_n: the left offset, or its mirror image shifted by the copy diameter."""
    _check(m, n)
    left = _left_offset(m, n)
    if side == "left":
        return left
    if side == "right":
        return diameter(m) - left - contraction(m) ** n * diameter(m)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def copy_extent(m: int, side: Side, n: int) -> Interval:
    offset = copy_offset(m, side, n)
    return Interval(offset, offset + contraction(m) ** n * diameter(m))


def boundary_copy(m: int, side: Side, n: int) -> BoundaryCopy:
    return BoundaryCopy(
        m=m,
        side=side,
        n=n,
        offset=copy_offset(m, side, n),
        ratio=contraction(m) ** n,
        extent=copy_extent(m, side, n),
    )


def neighbor_distance(m: int, n: int) -> Fraction:
    """min C_{n+1}^l - max C_n^l = (2m-1) / ((2m+1)(2m+2)^n)."""
    _check(m, n)
    return copy_extent(m, "left", n + 1).lo - copy_extent(m, "left", n).hi


def stated_neighbor_distance(m: int, n: int) -> Fraction:
    """The published closed form 1 / ((2m+1)(2m+2)^n); agrees with the extents only for m = 1."""
    _check(m, n)
    return Fraction(1, 2 * m + 1) * contraction(m) ** n


def stated_intermediate_distance(m: int, n: int) -> Fraction:
    """The intermediate step 2 t^(n+1) - t^n |I| written out on the way to the neighbor distance."""
    _check(m, n)
    t = contraction(m)
    return 2 * t ** (n + 1) - t**n * diameter(m)


def symmetric_distance(m: int, n: int) -> Fraction:
    """
    min C_n^r - max C_n^l, computed from the extents.

    Equals |I| - 2 (sum_{i=1}^{n-1} 2 t^i + t^n |I|) and tends to
    (2m-1)/(2m+1), the length of the central interval.
    """
    _check(m, n)
    return copy_extent(m, "right", n).lo - copy_extent(m, "left", n).hi


def stated_symmetric_distance(m: int, n: int) -> Fraction:
    """The published formula with the offset sum running to n instead of n-1."""
    _check(m, n)
    t = contraction(m)
    return diameter(m) - 2 * (_left_offset(m, n + 1) + t**n * diameter(m))


def accumulation_distance(m: int, n: int) -> Fraction:
    """2/(2m+1) - max C_n^l; by symmetry also min C_n^r - 1."""
    _check(m, n)
    return Fraction(2, 2 * m + 1) - copy_extent(m, "left", n).hi


def involution(m: int, x) -> Fraction:
    """h(x) = (2m+3)/(2m+1) - x."""
    return diameter(m) - as_rational(x)


def involution_center(m: int) -> Fraction:
    return diameter(m) / 2


def _tail_cutoff(m: int, scale: Fraction, epsilon: Fraction) -> int:
    # smallest N >= 1 with scale * 2 t^(N-1) / (2m+1) <= epsilon
    t = contraction(m)
    length = scale * Fraction(2, 2 * m + 1)
    cutoff = 1
    while length > epsilon:
        length *= t
        cutoff += 1
    return cutoff


def _expand(m: int, offset: Fraction, scale: Fraction, epsilon: Fraction, boxes: List[Interval], budget: int) -> None:
    size = scale * diameter(m)
    if size <= epsilon:
        boxes.append(Interval(offset, offset + size))
    else:
        cutoff = _tail_cutoff(m, scale, epsilon)
        for n in range(1, cutoff):
            ratio = scale * contraction(m) ** n
            _expand(m, offset + scale * copy_offset(m, "left", n), ratio, epsilon, boxes, budget)
            _expand(m, offset + scale * copy_offset(m, "right", n), ratio, epsilon, boxes, budget)
        # each tail box closes the remaining copies of this level up to the accumulation point
        boxes.append(Interval(offset + scale * _left_offset(m, cutoff), offset + scale * Fraction(2, 2 * m + 1)))
        boxes.append(Interval(offset + scale, offset + scale * (diameter(m) - _left_offset(m, cutoff))))
    if len(boxes) > budget:
        raise BudgetExceededError(f"boundary cover at epsilon={epsilon}", len(boxes), budget)


def boundary_cover(m: int, epsilon, budget: int | None = None) -> BoundaryCover:
    """
    Cover X_C(m) by closed intervals of length at most epsilon.

    A copy longer than epsilon is replaced by its own children C_n^l, C_n^r for
    n below a cutoff, plus two tail boxes reaching from the first omitted child
    to the accumulation points. The cutoff is the smallest level at which the
    tail boxes fit in epsilon.

    Raises:
            ValueError: if epsilon <= 0.
            BudgetExceededError: if more boxes than the budget are needed.
    """
    _check(m)
    epsilon = as_rational(epsilon)
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    boxes: List[Interval] = []
    _expand(m, Fraction(0), Fraction(1), epsilon, boxes, resolve_budget(budget))
    return BoundaryCover(epsilon=epsilon, boxes=IntervalSet(boxes), count=len(boxes))


def box_epsilon(m: int, k: int) -> Fraction:
    """Aligned grid scale diameter * (2m+2)^-k."""
    return diameter(m) * contraction(m) ** k


def box_count(m: int, k: int, budget: int | None = None) -> Tuple[int, Fraction, int]:
    epsilon = box_epsilon(m, k)
    cover = boundary_cover(m, epsilon, budget)
    logging.info(f"m={m} k={k}: {cover.count} boxes")
    return k, epsilon, cover.count


def discrepancies(m: int, n: int = 1) -> List[Discrepancy]:
    """The three published distance formulas next to the values the extents give."""
    _check(m, n)
    derived_s, stated_s = symmetric_distance(m, n), stated_symmetric_distance(m, n)
    derived_d, stated_d = neighbor_distance(m, n), stated_neighbor_distance(m, n)
    intermediate = stated_intermediate_distance(m, n)
    return [
        Discrepancy(
            name="symmetric_distance_summation",
            description="symmetric-copy distance with the offset sum taken to n rather than n-1",
            n=n,
            stated=stated_s,
            derived=derived_s,
            agrees=stated_s == derived_s,
        ),
        Discrepancy(
            name="neighbor_distance_general_m",
            description="neighbor-copy distance 1/((2m+1)(2m+2)^n) against (2m-1)/((2m+1)(2m+2)^n)",
            n=n,
            stated=stated_d,
            derived=derived_d,
            agrees=stated_d == derived_d,
        ),
        Discrepancy(
            name="neighbor_distance_intermediate",
            description="intermediate step 2 t^(n+1) - t^n |I| against the final neighbor distance",
            n=n,
            stated=intermediate,
            derived=derived_d,
            agrees=intermediate == derived_d,
        ),
    ]


def geometry_report(m: int, levels: int, with_discrepancies: bool = False) -> GeometryReport:
    """Extents of C_n^l and C_n^r and both distance sequences for n = 1..levels."""
    _check(m, levels)
    copies = [boundary_copy(m, side, n) for n in range(1, levels + 1) for side in ("left", "right")]
    neighbors = []
    symmetric = []
    for n in range(1, levels + 1):
        d, d_stated = neighbor_distance(m, n), stated_neighbor_distance(m, n)
        neighbors.append(DistanceRow(n=n, derived=d, stated=d_stated, agrees=d == d_stated))
        s, s_stated = symmetric_distance(m, n), stated_symmetric_distance(m, n)
        symmetric.append(DistanceRow(n=n, derived=s, stated=s_stated, agrees=s == s_stated))
    return GeometryReport(
        m=m,
        diameter=diameter(m),
        involution_center=involution_center(m),
        copies=copies,
        neighbor_distances=neighbors,
        symmetric_distances=symmetric,
        discrepancies=discrepancies(m) if with_discrepancies else [],
    )
