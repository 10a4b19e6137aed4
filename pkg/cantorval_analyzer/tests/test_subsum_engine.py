import random
from fractions import Fraction

import pytest

from cantorval_analyzer.src.errors import BudgetExceededError
from cantorval_analyzer.src.exact_numerics import Interval, IntervalSet, measure, reflect
from cantorval_analyzer.src.ifs_engine import build_ifs, iterate_levels
from cantorval_analyzer.src.series_model import parse_series, total, xm_series
from cantorval_analyzer.src.subsum_engine import (
    classify,
    cover_sequence,
    gap_report,
    level_cover,
    prefix_sums,
)


def test_prefix_sums(guthrie_nymann):
    assert prefix_sums(guthrie_nymann, 0) == [0]
    assert prefix_sums(guthrie_nymann, 2) == [0, Fraction(1, 2), Fraction(3, 4), Fraction(5, 4)]
    # digits {0, 2, 3, 5} at two scales: sixteen distinct sums
    assert len(prefix_sums(guthrie_nymann, 4)) == 16
    assert [16 * s for s in prefix_sums(guthrie_nymann, 4)] == [
        0, 2, 3, 5, 8, 10, 11, 12, 13, 14, 15, 17, 20, 22, 23, 25
    ]


def test_level_cover(guthrie_nymann, level_one):
    assert level_cover(guthrie_nymann, 0).cover == IntervalSet.of((0, "5/3"))
    depth_two = level_cover(guthrie_nymann, 2)
    assert depth_two.cover == level_one
    assert depth_two.tail_radius == Fraction(5, 12)
    assert depth_two.prefix_count == 4


def test_covers_are_nested(guthrie_nymann):
    covers = cover_sequence(guthrie_nymann, 10)
    for shallow, deep in zip(covers, covers[1:]):
        assert deep.cover.issubset(shallow.cover)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_series_cover_matches_ifs_levels(m):
    levels = iterate_levels(build_ifs(m), 6)
    series = xm_series(m)
    for k, level in enumerate(levels):
        assert level_cover(series, (m + 1) * k).cover == level


def test_gap_report(guthrie_nymann):
    records = gap_report(guthrie_nymann, 4)
    first = [r for r in records if r.gap == Interval.of("5/12", "1/2")]
    assert len(first) == 1
    assert first[0].born_at == 2
    assert first[0].persistent
    assert all(1 <= r.born_at <= 4 for r in records)
    with pytest.raises(ValueError):
        gap_report(guthrie_nymann, 0)


def test_guthrie_nymann_is_a_cantorval_candidate(guthrie_nymann):
    result = classify(guthrie_nymann, 12)
    assert result.verdict == "CantorvalCandidate"
    cert = result.certificate
    assert not cert.conclusive
    assert cert.kakeya_block == [True, False]
    assert cert.interval_witness.covers(Interval.of("2/3", 1))
    assert cert.interval_witness == Interval(
        Fraction(2, 3) * (1 - Fraction(1, 4**6)), 1 + Fraction(2, 3) / 4**6
    )
    assert cert.gap_witness.gap == Interval.of("5/12", "1/2")
    assert cert.gap_witness.born_at == 2
    assert cert.component_counts[0] == (0, 1)


def test_finite_union_and_cantor_like():
    interval = classify(parse_series("geom(1;1/2)"), 6)
    assert interval.verdict == "FiniteUnionOfIntervals"
    assert interval.certificate.conclusive
    assert interval.certificate.interval_witness == Interval.of(0, 1)

    cantor = classify(parse_series("geom(2;1/3)"), 8)
    assert cantor.verdict == "CantorLike"
    assert cantor.certificate.conclusive
    assert cantor.certificate.component_counts == [(d, 2**d) for d in range(9)]


def test_classify_needs_a_full_block(guthrie_nymann):
    with pytest.raises(ValueError):
        classify(guthrie_nymann, 1)


def test_budget_is_enforced():
    with pytest.raises(BudgetExceededError):
        prefix_sums(parse_series("geom(2;1/3)"), 20, budget=1000)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_xm_cover_measure_stays_above_one(m):
    measures = [measure(c.cover) for c in cover_sequence(xm_series(m), 10)]
    assert all(x >= 1 for x in measures)
    assert all(b <= a for a, b in zip(measures, measures[1:]))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_xm_cover_is_symmetric_at_block_ends(m):
    series = xm_series(m)
    for k in range(4):
        cover = level_cover(series, (m + 1) * k).cover
        assert reflect(cover, total(series)) == cover


@pytest.mark.parametrize("dsl", ["mg(3,2;1/4)", "xm(2)", "geom(2;1/3)", "mg(1,1,1;1/5)"])
def test_prefix_sums_lie_in_shallower_covers(dsl):
    spec = parse_series(dsl)
    rng = random.Random(7)
    covers = cover_sequence(spec, 8)
    sums = prefix_sums(spec, 8)
    for s in rng.sample(sums, min(40, len(sums))):
        assert all(c.cover.contains_point(s) for c in covers)
