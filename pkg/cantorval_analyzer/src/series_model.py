"""
Convergent positive multigeometric series with exact term and tail formulas.

Series are written in a small DSL:

    mg(k1,k2,...;p/q)   k1 q + ... + km q + k1 q^2 + ... + km q^2 + ...
    xm(m)               3q + 2q (m times) + 3q^2 + ..., q = 1/(2m+2)
    geom(c;p/q)         c q + c q^2 + ...
"""

import itertools
import logging
import re
from fractions import Fraction
from typing import List

from pydantic import ValidationError

from .errors import InvalidSeriesError
from .exact_numerics import parse_rational
from .models import KakeyaFlag, KakeyaProfile, SeriesSpec

_NUMBER = r"\s*[0-9]+(?:\s*/\s*[0-9]+)?\s*"
_MG = re.compile(rf"^\s*mg\s*\((?P<coeffs>{_NUMBER}(?:,{_NUMBER})*);(?P<ratio>{_NUMBER})\)\s*$")
_XM = re.compile(r"^\s*xm\s*\(\s*(?P<m>[0-9]+)\s*\)\s*$")
_GEOM = re.compile(rf"^\s*geom\s*\((?P<scale>{_NUMBER});(?P<ratio>{_NUMBER})\)\s*$")


def _number(text: str) -> Fraction:
    return parse_rational(text.replace(" ", ""))


def multigeometric(coeffs, ratio) -> SeriesSpec:
    return SeriesSpec(kind="multigeometric", coeffs=tuple(coeffs), ratio=ratio)


def xm_series(m: int) -> SeriesSpec:
    if m < 1:
        raise InvalidSeriesError(f"xm needs m >= 1, got {m}")
    return SeriesSpec(kind="xm", coeffs=(3,) + (2,) * m, ratio=Fraction(1, 2 * m + 2), m=m)


def geometric(scale, ratio) -> SeriesSpec:
    return SeriesSpec(kind="geometric", coeffs=(scale,), ratio=ratio, scale=scale)


def parse_series(dsl: str) -> SeriesSpec:
    """
    Parse the series DSL into a SeriesSpec.

    Args:
            dsl (str): e.g. 'mg(3,2;1/4)', 'xm(2)', 'geom(2;1/3)'.

    Returns:
            SeriesSpec: validated, immutable description.

    Raises:
            InvalidSeriesError: on syntax errors, a ratio outside (0,1) or a
            non-positive coefficient.
    """
    try:
        if match := _MG.match(dsl):
            coeffs = [_number(c) for c in match.group("coeffs").split(",")]
            return multigeometric(coeffs, _number(match.group("ratio")))
        if match := _XM.match(dsl):
            return xm_series(int(match.group("m")))
        if match := _GEOM.match(dsl):
            return geometric(_number(match.group("scale")), _number(match.group("ratio")))
    except (ValidationError, ZeroDivisionError) as e:
        logging.error(f"Rejected series {dsl!r}: {e}")
        raise InvalidSeriesError(f"invalid series {dsl!r}: {e}") from e
    raise InvalidSeriesError(
        f"cannot parse {dsl!r}; expected mg(k1,...;p/q), xm(m) or geom(c;p/q)"
    )


def format_series(spec: SeriesSpec) -> str:
    if spec.kind == "xm":
        return f"xm({spec.m})"
    if spec.kind == "geometric":
        return f"geom({spec.scale};{spec.ratio})"
    return f"mg({','.join(str(k) for k in spec.coeffs)};{spec.ratio})"


def term(spec: SeriesSpec, n: int) -> Fraction:
    """The n-th term (n >= 1); block b = ceil(n / block_length) carries ratio**b."""
    if n < 1:
        raise ValueError(f"term index must be >= 1, got {n}")
    block, position = divmod(n - 1, spec.block_length)
    return spec.coeffs[position] * spec.ratio ** (block + 1)


def total(spec: SeriesSpec) -> Fraction:
    q = spec.ratio
    return sum(spec.coeffs, Fraction(0)) * q / (1 - q)


def tail(spec: SeriesSpec, n: int) -> Fraction:
    """Sum of the terms after the first n, by closed form; tail(spec, 0) == total(spec)."""
    if n < 0:
        raise ValueError(f"tail index must be >= 0, got {n}")
    blocks, position = divmod(n, spec.block_length)
    q = spec.ratio
    consumed = sum(spec.coeffs[:position], Fraction(0)) * q ** (blocks + 1)
    return total(spec) * q**blocks - consumed


def terms(spec: SeriesSpec, count: int) -> List[Fraction]:
    return [term(spec, n) for n in range(1, count + 1)]


def kakeya_profile(spec: SeriesSpec, depth: int) -> KakeyaProfile:
    """Term/tail comparison a_n <= r_n for n = 1..depth, exact."""
    if depth < 1:
        raise ValueError(f"kakeya profile depth must be >= 1, got {depth}")
    flags = []
    for n in range(1, depth + 1):
        a_n, r_n = term(spec, n), tail(spec, n)
        flags.append(KakeyaFlag(n=n, a_n=a_n, r_n=r_n, interval_ok=a_n <= r_n))
    return KakeyaProfile(flags=flags)


def block_subset_sums(spec: SeriesSpec) -> List[Fraction]:
    """Distinct subset sums of one block of coefficients, sorted."""
    sums = {
        sum(choice, Fraction(0))
        for r in range(spec.block_length + 1)
        for choice in itertools.combinations(spec.coeffs, r)
    }
    return sorted(sums)


def digit_set(m: int) -> List[int]:
    """Digits {0, 2, 3, ..., 2m+1, 2m+3} of X(m) in base 2m+2."""
    return [0] + list(range(2, 2 * m + 2)) + [2 * m + 3]
