from fractions import Fraction
from typing import Annotated, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, PlainSerializer, PlainValidator, model_validator

from .exact_numerics import Interval, IntervalSet, as_rational, format_rational, parse_rational


def _to_rational(value) -> Fraction:
    if isinstance(value, str):
        return parse_rational(value)
    return as_rational(value)


def _to_interval(value) -> Interval:
    if isinstance(value, Interval):
        return value
    if isinstance(value, dict):
        return Interval(_to_rational(value["lo"]), _to_rational(value["hi"]))
    lo, hi = value
    return Interval(_to_rational(lo), _to_rational(hi))


ExactRational = Annotated[
    Fraction, PlainValidator(_to_rational), PlainSerializer(format_rational, return_type=str)
]
ExactInterval = Annotated[
    Interval, PlainValidator(_to_interval), PlainSerializer(lambda iv: iv.to_json(), return_type=dict)
]
ExactIntervalSet = Annotated[
    IntervalSet,
    PlainValidator(IntervalSet.coerce),
    PlainSerializer(lambda s: s.to_json(), return_type=list),
]


class ExactModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


class SeriesSpec(ExactModel):
    kind: Literal["multigeometric", "xm", "geometric"]
    coeffs: Tuple[ExactRational, ...]
    ratio: ExactRational
    m: Optional[int] = None
    scale: Optional[ExactRational] = None

    @model_validator(mode="after")
    def check_series(self):
        if not self.coeffs:
            raise ValueError("a series needs at least one coefficient")
        if any(k <= 0 for k in self.coeffs):
            raise ValueError("coefficients must be positive")
        if not (0 < self.ratio < 1):
            raise ValueError(f"ratio {self.ratio} must lie in (0, 1)")
        if self.kind == "xm":
            if self.m is None or self.m < 1:
                raise ValueError("xm series need m >= 1")
            if self.coeffs != (Fraction(3),) + (Fraction(2),) * self.m:
                raise ValueError("xm coefficients must be one 3 followed by m 2s")
            if self.ratio != Fraction(1, 2 * self.m + 2):
                raise ValueError("xm ratio must be 1/(2m+2)")
        if self.kind == "geometric":
            if len(self.coeffs) != 1 or self.scale != self.coeffs[0]:
                raise ValueError("geometric series carry exactly one coefficient equal to scale")
        return self

    @property
    def block_length(self) -> int:
        return len(self.coeffs)

    def expanded(self) -> "SeriesSpec":
        """The same series written as a plain multigeometric series."""
        return SeriesSpec(kind="multigeometric", coeffs=self.coeffs, ratio=self.ratio)


class KakeyaFlag(ExactModel):
    n: int
    a_n: ExactRational
    r_n: ExactRational
    interval_ok: bool


class KakeyaProfile(ExactModel):
    flags: List[KakeyaFlag]

    @property
    def pattern(self) -> List[bool]:
        return [f.interval_ok for f in self.flags]


class LevelCover(ExactModel):
    depth: int
    cover: ExactIntervalSet
    tail_radius: ExactRational
    prefix_count: int


class GapRecord(ExactModel):
    gap: ExactInterval
    born_at: int
    persistent: bool


class Certificate(ExactModel):
    period: int
    kakeya_block: List[bool]
    conclusive: bool
    interval_witness: Optional[ExactInterval] = None
    gap_witness: Optional[GapRecord] = None
    component_counts: List[Tuple[int, int]] = []
    note: str = ""


class Classification(ExactModel):
    verdict: Literal["FiniteUnionOfIntervals", "CantorLike", "CantorvalCandidate", "Undetermined"]
    max_depth: int
    certificate: Certificate


class OrderingRelation(ExactModel):
    name: str
    relation: Literal["<", "="]
    lhs: ExactRational
    rhs: ExactRational
    holds: bool


class OrderingReport(ExactModel):
    m: int
    relations: List[OrderingRelation]

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.relations)


class BracketRow(ExactModel):
    depth: int
    inner: ExactRational
    outer: ExactRational
    width: ExactRational
    gap_length: ExactRational


class BoundaryCopy(ExactModel):
    m: int
    side: Literal["left", "right"]
    n: int
    offset: ExactRational
    ratio: ExactRational
    extent: ExactInterval


class BoundaryCover(ExactModel):
    epsilon: ExactRational
    boxes: ExactIntervalSet
    count: int


class DistanceRow(ExactModel):
    n: int
    derived: ExactRational
    stated: ExactRational
    agrees: bool


class Discrepancy(ExactModel):
    name: str
    description: str
    n: int
    stated: ExactRational
    derived: ExactRational
    agrees: bool


class GeometryReport(ExactModel):
    m: int
    diameter: ExactRational
    involution_center: ExactRational
    copies: List[BoundaryCopy]
    neighbor_distances: List[DistanceRow]
    symmetric_distances: List[DistanceRow]
    discrepancies: List[Discrepancy] = []


class RatioFamily(ExactModel):
    kind: Literal["geometric_pairs", "explicit_finite"]
    t: Optional[ExactRational] = None
    ratios: Tuple[ExactRational, ...] = ()

    @model_validator(mode="after")
    def check_ratios(self):
        if self.kind == "geometric_pairs":
            if self.t is None or not (0 < self.t < 1):
                raise ValueError("geometric pairs need a ratio t in (0, 1)")
        else:
            if not self.ratios:
                raise ValueError("an explicit family needs at least one ratio")
            if any(not (0 < k < 1) for k in self.ratios):
                raise ValueError("all ratios must lie in (0, 1)")
        return self

    @classmethod
    def geometric_pairs(cls, t) -> "RatioFamily":
        return cls(kind="geometric_pairs", t=t)

    @classmethod
    def explicit(cls, ratios) -> "RatioFamily":
        return cls(kind="explicit_finite", ratios=tuple(ratios))


class BoxCountRow(ExactModel):
    k: int
    epsilon: ExactRational
    count: int


class DimensionEstimate(ExactModel):
    m: int
    closed_form: Optional[str] = None
    closed_form_value: Optional[str] = None
    numeric_root: str
    box_table: List[BoxCountRow]
    fitted_slope: float
    residual: float
    slope_error: Optional[float] = None


class ScalingSequence(ExactModel):
    alpha: float
    values: List[float]
    band_ratio: float
    trend: Literal["increasing", "decreasing", "bounded"]


class ScalingReport(ExactModel):
    m: int
    levels: List[int]
    critical: ScalingSequence
    supercritical: ScalingSequence
    subcritical: ScalingSequence


class CheckResult(ExactModel):
    suite: str
    name: str
    reference: str
    statement: str
    passed: bool
    detail: str = ""


class Command(ExactModel):
    verb: Literal["classify", "cover", "ifs", "geometry", "dimension", "measure", "render", "verify"]
    params: dict
