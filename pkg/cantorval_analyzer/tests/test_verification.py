from fractions import Fraction

import pytest

from cantorval_analyzer.src import verification
from cantorval_analyzer.src.models import BracketRow
from cantorval_analyzer.src.verification import (
    BRACKET_DEPTH,
    SUITES,
    check_classify,
    check_dimension,
    check_discrepancies,
    check_measure,
    run_suite,
)


def _by_name(results):
    return {r.name: r for r in results}


def test_measure_width_pinned_for_m1():
    results = _by_name(check_measure(1, 2))
    width = results[f"bracket_width[m=1,d={BRACKET_DEPTH}]"]
    assert width.passed
    assert width.reference == "Lebesgue measure of X(1) is 1"
    assert all(r.passed for r in results.values())


def test_measure_width_fails_on_wide_bracket(monkeypatch):
    def wide(sys, depth, budget=None):
        return [
            BracketRow(
                depth=d,
                inner=Fraction(1, 3) + Fraction(d, 100),
                outer=Fraction(5, 3) - Fraction(d, 100),
                width=Fraction(100),
                gap_length=Fraction(0),
            )
            for d in range(depth + 1)
        ]

    monkeypatch.setattr(verification, "measure_bracket", wide)
    results = _by_name(check_measure(1, 3))
    assert not results[f"bracket_width[m=1,d={BRACKET_DEPTH}]"].passed
    assert results["bracket[m=1]"].passed
    assert results["inner_increasing[m=1]"].passed


def test_measure_width_for_m2():
    results = check_measure(2, 4)
    assert [r.name for r in results][-1] == "bracket_width[m=2,d=4]"
    assert all(r.passed for r in results)


def test_classify_suite():
    results = check_classify()
    assert len(results) == 3
    assert all(r.passed for r in results)
    assert results[0].reference == "Guthrie-Nymann Cantorval"


@pytest.mark.parametrize("m", [1, 2, 3])
def test_discrepancy_suite(m):
    results = _by_name(check_discrepancies(m))
    assert all(r.passed for r in results.values())
    assert f"neighbor_formula_agreement[m={m}]" in results


def test_dimension_counts_boxes_once(monkeypatch):
    calls = []
    original = verification.box_table

    def counting(*args, **kwargs):
        calls.append(args)
        return original(*args, **kwargs)

    monkeypatch.setattr(verification, "box_table", counting)
    results = check_dimension(1, 6)
    assert len(calls) == 1
    assert all(r.passed for r in results)


def test_every_result_carries_a_reference():
    results = run_suite("all", 1, 2)
    assert {r.suite for r in results} == set(SUITES)
    assert all(r.reference for r in results)


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("bogus", 1, 2)
