"""
Dimension of the boundary X_C(m): the exact Moran root, a high-precision
bisection solver for countable and finite ratio families, and the box-count
slope on the aligned grid epsilon_k = |I| (2m+2)^-k.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import List, Optional, Tuple

import mpmath
import numpy as np
import pandas as pd

from .boundary_geometry import box_count, contraction
from .config import DEFAULT_CONFIG, resolve_budget
from .errors import RootBracketError
from .exact_numerics import format_rational
from .models import BoxCountRow, DimensionEstimate, RatioFamily, ScalingReport, ScalingSequence

PRECISION_DIGITS = DEFAULT_CONFIG["engine"]["precision_digits"]
REPORT_DIGITS = DEFAULT_CONFIG["engine"]["report_digits"]
SOLVER_TOL = DEFAULT_CONFIG["dimension"]["solver_tol"]
FIT_MIN_LEVEL = DEFAULT_CONFIG["dimension"]["fit_min_level"]


def _mpf(value: Fraction) -> mpmath.mpf:
    return mpmath.mpf(value.numerator) / value.denominator


def closed_form_expression(m: int) -> str:
    return f"log(3)/log({2 * m + 2})"


def nss_dimension_closed(m: int, digits: int = PRECISION_DIGITS) -> mpmath.mpf:
    """
    The root of 2 t^x + 2 t^(2x) + ... = 1 with t = 1/(2m+2).

    Summing the geometric series gives 2 t^x / (1 - t^x) = 1, i.e.
    (2m+2)^x = 3, so x = log 3 / log(2m+2).
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    with mpmath.workdps(digits):
        return mpmath.log(3) / mpmath.log(2 * m + 2)


def moran_sum(family: RatioFamily, x) -> mpmath.mpf:
    """sum of k_i^x over the family; +inf at x = 0 for infinitely many ratios."""
    x = mpmath.mpf(x)
    if family.kind == "geometric_pairs":
        if x <= 0:
            return mpmath.inf
        power = _mpf(family.t) ** x
        return 2 * power / (1 - power)
    return mpmath.fsum(_mpf(k) ** x for k in family.ratios)


def nss_dimension_solve(family: RatioFamily, tol=SOLVER_TOL, digits: int = PRECISION_DIGITS) -> mpmath.mpf:
    """
    Bisect x -> moran_sum(family, x) - 1, which is strictly decreasing.

    Args:
            family (RatioFamily): copy ratios, all in (0, 1).
            tol: bracket width at which bisection stops.
            digits (int): mpmath working precision.

    Returns:
            mpmath.mpf: the root, at `digits` significant digits.

    Raises:
            RootBracketError: if the sum does not exceed 1 at x = 0 or never
            drops below 1.
    """
    with mpmath.workdps(digits):
        tol = mpmath.mpf(tol)
        if tol <= 0:
            raise ValueError(f"solver tolerance must be positive, got {tol}")
        lo, hi = mpmath.mpf(0), mpmath.mpf(1)
        if moran_sum(family, lo) <= 1:
            raise RootBracketError(f"moran sum at x=0 is {moran_sum(family, lo)}, needs to exceed 1")
        for _ in range(64):
            if moran_sum(family, hi) < 1:
                break
            lo, hi = hi, 2 * hi
        else:
            raise RootBracketError(f"moran sum stays >= 1 up to x={hi}")
        while hi - lo > tol:
            mid = (lo + hi) / 2
            if mid in (lo, hi):
                logging.warning(f"Bisection ran out of precision at width {hi - lo}")
                break
            value = moran_sum(family, mid) - 1
            if value == 0:
                return mid
            if value > 0:
                lo = mid
            else:
                hi = mid
        return (lo + hi) / 2


def nss_truncation_sequence(family: RatioFamily, max_terms: int, tol=SOLVER_TOL) -> List[mpmath.mpf]:
    """
    Roots of the equations truncated to the copies of levels 1..N, N = 1..max_terms.

    The sequence is non-decreasing and bounded by the root of the full equation;
    nothing is claimed about the rate.
    """
    if family.kind != "geometric_pairs":
        raise ValueError("truncation sequences are defined for countable (geometric pair) families")
    if max_terms < 1:
        raise ValueError(f"max_terms must be >= 1, got {max_terms}")
    roots = []
    for n in range(1, max_terms + 1):
        ratios = [family.t**level for level in range(1, n + 1) for _ in range(2)]
        roots.append(nss_dimension_solve(RatioFamily.explicit(ratios), tol))
    return roots


def dimension_trend(m_max: int) -> List[Tuple[int, mpmath.mpf]]:
    """Closed-form dimension for m = 1..m_max; strictly decreasing toward 0."""
    return [(m, nss_dimension_closed(m)) for m in range(1, m_max + 1)]


def _count_level(args: Tuple[int, int, int]) -> Tuple[int, Fraction, int]:
    m, k, budget = args
    return box_count(m, k, budget)


def box_table(m: int, k_max: int, jobs: int = 1, budget: int | None = None) -> pd.DataFrame:
    """
    Box counts for k = 1..k_max as a DataFrame with columns k, epsilon ("p/q"),
    count and scaled = count * epsilon^alpha at the closed-form alpha.
    """
    budget = resolve_budget(budget)
    tasks = [(m, k, budget) for k in range(1, k_max + 1)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_count_level, tasks))
    else:
        rows = [_count_level(task) for task in tasks]
    alpha = float(nss_dimension_closed(m))
    df = pd.DataFrame(rows, columns=["k", "epsilon", "count"])
    df["scaled"] = [count * float(eps) ** alpha for eps, count in zip(df["epsilon"], df["count"])]
    df["epsilon"] = df["epsilon"].map(format_rational)
    return df


def fit_slope(df: pd.DataFrame, fit_min_level: int = FIT_MIN_LEVEL) -> Tuple[float, float]:
    """
    Least-squares slope of log(count) against log(1/epsilon) and its RMS residual.

    Levels below `fit_min_level` are dropped unless fewer than two would remain.
    """
    fit_rows = df[df["k"] >= fit_min_level]
    if len(fit_rows) < 2:
        logging.warning(f"Fewer than two levels >= {fit_min_level}; fitting all {len(df)} levels")
        fit_rows = df
    x = np.array([-np.log(float(Fraction(e))) for e in fit_rows["epsilon"]])
    y = np.log(fit_rows["count"].to_numpy(dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), residual


def dimension_from_table(m: int, df: pd.DataFrame, fit_min_level: int = FIT_MIN_LEVEL) -> DimensionEstimate:
    """Dimension report for a box table produced by `box_table`."""
    slope, residual = fit_slope(df, fit_min_level)
    closed = nss_dimension_closed(m)
    root = nss_dimension_solve(RatioFamily.geometric_pairs(contraction(m)))
    return DimensionEstimate(
        m=m,
        closed_form=closed_form_expression(m),
        closed_form_value=mpmath.nstr(closed, REPORT_DIGITS),
        numeric_root=mpmath.nstr(root, REPORT_DIGITS),
        box_table=[BoxCountRow(**row) for row in df[["k", "epsilon", "count"]].to_dict("records")],
        fitted_slope=slope,
        residual=residual,
        slope_error=abs(slope - float(closed)),
    )


def box_dimension(
    m: int,
    k_max: int,
    jobs: int = 1,
    budget: int | None = None,
    fit_min_level: int = FIT_MIN_LEVEL,
) -> DimensionEstimate:
    """
    Least-squares slope of log(count) against log(1/epsilon) over the aligned grid.

    Raises:
            ValueError: if k_max < 3.
            BudgetExceededError: if a level needs more boxes than the budget.
    """
    if k_max < 3:
        raise ValueError(f"k_max must be >= 3, got {k_max}")
    logging.info(f"Box counting X_C({m}) for k = 1..{k_max}")
    return dimension_from_table(m, box_table(m, k_max, jobs, budget), fit_min_level)


def _trend(values: List[float]) -> str:
    steps = [b / a for a, b in zip(values, values[1:])]
    if steps and all(s > 1 + 1e-9 for s in steps):
        return "increasing"
    if steps and all(s < 1 - 1e-9 for s in steps):
        return "decreasing"
    return "bounded"


def _sequence(counts: List[Tuple[Fraction, int]], alpha: float) -> ScalingSequence:
    values = [count * float(eps) ** alpha for eps, count in counts]
    return ScalingSequence(
        alpha=alpha,
        values=values,
        band_ratio=max(values) / min(values),
        trend=_trend(values),
    )


def scaling_from_table(
    m: int, df: pd.DataFrame, alpha: Optional[float] = None, delta: float = 0.1
) -> ScalingReport:
    """Scaling report over the levels of an existing box table."""
    if len(df) < 3:
        raise ValueError(f"need at least 3 box-count levels, got {len(df)}")
    if alpha is None:
        alpha = float(nss_dimension_closed(m))
    counts = [(Fraction(eps), int(count)) for eps, count in zip(df["epsilon"], df["count"])]
    return ScalingReport(
        m=m,
        levels=[int(k) for k in df["k"]],
        critical=_sequence(counts, alpha),
        supercritical=_sequence(counts, alpha + delta),
        subcritical=_sequence(counts, alpha - delta),
    )


def scaling_identity_check(
    m: int,
    alpha: Optional[float],
    k: int,
    delta: float = 0.1,
    budget: int | None = None,
) -> ScalingReport:
    """
    count_j * epsilon_j^alpha for j = 1..k at alpha and alpha +/- delta.

    At the critical exponent the sequence stays in a bounded band; above it the
    sequence falls monotonically, below it rises. `alpha=None` uses the closed form.
    """
    if k < 3:
        raise ValueError(f"k must be >= 3, got {k}")
    return scaling_from_table(m, box_table(m, k, budget=budget), alpha, delta)
