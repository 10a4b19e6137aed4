from fractions import Fraction

import pytest

from cantorval_analyzer.src.boundary_geometry import (
    accumulation_distance,
    boundary_cover,
    box_epsilon,
    copy_extent,
    diameter,
    discrepancies,
    geometry_report,
    involution,
    involution_center,
    neighbor_distance,
    stated_intermediate_distance,
    stated_neighbor_distance,
    stated_symmetric_distance,
    symmetric_distance,
)
from cantorval_analyzer.src.exact_numerics import Interval, IntervalSet, reflect


def test_copy_extents():
    assert copy_extent(1, "left", 1) == Interval.of(0, "5/12")
    assert copy_extent(1, "right", 1) == Interval.of("5/4", "5/3")
    assert copy_extent(1, "left", 2) == Interval.of("1/2", "29/48")
    for m in (1, 2, 3):
        for n in range(1, 8):
            assert copy_extent(m, "left", n).length == diameter(m) / (2 * m + 2) ** n


def test_neighbor_distance():
    assert neighbor_distance(1, 1) == Fraction(1, 12)
    for n in range(1, 21):
        assert neighbor_distance(1, n) * 3 * 4**n == 1
        assert neighbor_distance(1, n) == stated_neighbor_distance(1, n)
    assert neighbor_distance(2, 1) == Fraction(1, 10)
    assert stated_neighbor_distance(2, 1) == Fraction(1, 30)


def test_symmetric_distance():
    assert symmetric_distance(1, 1) == Fraction(5, 6)
    assert stated_symmetric_distance(1, 1) == Fraction(-1, 6)
    for n in range(1, 21):
        assert symmetric_distance(1, n) - Fraction(1, 3) == Fraction(2, 4**n)
        assert symmetric_distance(2, n) - Fraction(3, 5) == Fraction(2, 6**n)


def test_intermediate_step_disagrees():
    assert stated_intermediate_distance(1, 1) == Fraction(-7, 24)
    assert stated_intermediate_distance(1, 1) != neighbor_distance(1, 1)


def test_accumulation_points():
    for m in (1, 2, 3):
        for n in range(1, 15):
            assert accumulation_distance(m, n) == Fraction(1, (2 * m + 2) ** n)
            assert copy_extent(m, "right", n).lo - 1 == accumulation_distance(m, n)


def test_involution():
    assert involution(1, 0) == Fraction(5, 3)
    assert involution(1, Fraction(5, 6)) == Fraction(5, 6)
    assert involution(2, Fraction(2, 5)) == 1
    assert involution_center(1) == Fraction(5, 6)
    assert involution(3, involution(3, Fraction(4, 9))) == Fraction(4, 9)


def test_copies_reflect_and_are_disjoint():
    for m in range(1, 5):
        top = diameter(m)
        extents = []
        for n in range(1, 31):
            left, right = copy_extent(m, "left", n), copy_extent(m, "right", n)
            assert reflect(IntervalSet([left]), top) == IntervalSet([right])
            extents.extend([left, right])
        extents.sort()
        assert all(a.hi < b.lo for a, b in zip(extents, extents[1:]))


def test_boundary_cover_single_box():
    cover = boundary_cover(1, Fraction(5, 3))
    assert cover.count == 1
    assert cover.boxes == IntervalSet.of((0, "5/3"))


@pytest.mark.parametrize("m", [1, 2])
def test_boundary_cover_counts(m):
    for k in range(1, 7):
        eps = box_epsilon(m, k)
        cover = boundary_cover(m, eps)
        assert cover.count == 4 * 3 ** (k - 1)
        assert len(cover.boxes) == cover.count
        assert all(box.length <= eps for box in cover.boxes)


def test_boundary_cover_contains_boundary_points():
    eps = box_epsilon(1, 4)
    boxes = boundary_cover(1, eps).boxes
    assert boxes.contains_point(Fraction(2, 3))
    assert boxes.contains_point(Fraction(1))
    for n in range(1, 13):
        for side in ("left", "right"):
            extent = copy_extent(1, side, n)
            assert boxes.contains_point(extent.lo)
            assert boxes.contains_point(extent.hi)
    # no box reaches into the open central interval
    assert not boxes.contains_point(Fraction(5, 6))


def test_boundary_cover_rejects_non_positive_epsilon():
    with pytest.raises(ValueError):
        boundary_cover(1, 0)
    with pytest.raises(ValueError):
        boundary_cover(1, Fraction(-1, 3))


def test_geometry_report_and_discrepancies():
    report = geometry_report(1, 4)
    assert len(report.copies) == 8
    assert report.involution_center == Fraction(5, 6)
    assert all(row.agrees for row in report.neighbor_distances)
    assert not any(row.agrees for row in report.symmetric_distances)

    found = {d.name: d for d in discrepancies(2)}
    assert set(found) == {
        "symmetric_distance_summation",
        "neighbor_distance_general_m",
        "neighbor_distance_intermediate",
    }
    assert found["neighbor_distance_general_m"].stated == Fraction(1, 30)
    assert found["neighbor_distance_general_m"].derived == Fraction(1, 10)
    assert not any(d.agrees for d in found.values())
    assert {d.name: d for d in discrepancies(1)}["neighbor_distance_general_m"].agrees
