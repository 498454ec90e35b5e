"""Loads, buckling capacity, material use and plan feasibility.

Units: spans and tube dimensions in mm at the interface, converted to
metres for the load model (q in N/m, buckling decay in 1/m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .geometry import EnvironmentMap, polyline_polygon_distance
from .tube import FoldSchedule, TubeSpec, consumed_length, simulate_schedule
from .weave import WeavePlan

AIR_DENSITY = 1.225  # kg/m^3
MPH = 0.44704  # m/s
GALE_WIND_SPEED = 39 * MPH
LDPE_DENSITY = 0.91  # g/cm^3


def dynamic_pressure(rho: float, v: float) -> float:
    if rho <= 0:
        raise ValueError("air density must be positive")
    if v < 0:
        raise ValueError("wind speed must be >= 0")
    return 0.5 * rho * v * v


def wind_line_load(rho: float, v: float, d_infl: float, drag_coefficient: float = 1.0) -> float:
    """Wind force per metre of tube, N/m.

    Dynamic pressure over the tube's frontal width ``d_infl`` (mm).  The
    drag coefficient defaults to 1, i.e. bare dynamic pressure.
    """
    return drag_coefficient * dynamic_pressure(rho, v) * d_infl / 1000.0


@dataclass(frozen=True)
class LoadSpec:
    kind: str  # "wind" or "direct"
    q: float
    rho: float = AIR_DENSITY
    v: float = 0.0
    direction: tuple[float, float] = (0.0, 1.0)
    drag_coefficient: float = 1.0

    @classmethod
    def wind(cls, v: float, d_infl: float, rho: float = AIR_DENSITY, drag_coefficient: float = 1.0,
             direction=(0.0, 1.0)) -> "LoadSpec":
        q = wind_line_load(rho, v, d_infl, drag_coefficient)
        return cls("wind", q, rho, v, _unit(direction), drag_coefficient)

    @classmethod
    def direct(cls, q: float, direction=(0.0, 1.0)) -> "LoadSpec":
        if q < 0:
            raise ValueError("line load must be >= 0")
        return cls("direct", q, direction=_unit(direction))


def _unit(v):
    n = math.hypot(*v)
    if n == 0:
        raise ValueError("load direction must be nonzero")
    return (v[0] / n, v[1] / n)


@dataclass(frozen=True)
class BucklingModel:
    """Kink load q_max(L) = a * exp(-b L), L in metres, valid at ``pressure``."""

    a: float
    b: float
    pressure: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"buckling model needs a > 0 and b > 0, got a={self.a}, b={self.b}")


def buckling_capacity(m: BucklingModel, length: float) -> float:
    if length < 0:
        raise ValueError("span length must be >= 0")
    return m.a * math.exp(-m.b * length)


def max_span(m: BucklingModel, q: float) -> float:
    """Longest span (m) whose capacity still carries q."""
    if q <= 0:
        return math.inf
    if q > m.a:
        return 0.0
    return math.log(m.a / q) / m.b


def fit_buckling_model(samples: Sequence[tuple[float, float]], pressure: float) -> BucklingModel:
    """Least-squares line through (L, ln q); L in metres, q in N/m."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2 or arr.shape[1] != 2:
        raise ValueError("need at least two (length, load) samples")
    L, q = arr[:, 0], arr[:, 1]
    if np.any(q <= 0):
        raise ValueError("buckling loads must be positive")
    if len(np.unique(L)) < 2:
        raise ValueError("need at least two distinct span lengths")
    A = np.column_stack([np.ones_like(L), L])
    (ln_a, slope), *_ = np.linalg.lstsq(A, np.log(q), rcond=None)
    if slope >= 0:
        raise ValueError(f"fitted capacity does not decay with length (slope {slope:.4g})")
    return BucklingModel(float(math.exp(ln_a)), float(-slope), pressure)


@dataclass(frozen=True)
class MaterialEstimate:
    tubes: int
    volume_cm3: float
    mass_g: float


def material_estimate(
    wall_height: float, l_tube: float, tube: TubeSpec, rho_ldpe: float = LDPE_DENSITY
) -> MaterialEstimate:
    """Flat-packed film for a wall of stacked tubes (mm in, cm^3 and g out).

    Each tube contributes two film walls of thickness t and width D_flat.
    """
    if wall_height <= 0 or l_tube < 0 or rho_ldpe <= 0:
        raise ValueError("wall height and density must be positive, tube length >= 0")
    n = math.ceil(wall_height / tube.d_infl - 1e-12)
    volume_mm3 = 2 * n * tube.t * tube.d_flat * l_tube
    volume = volume_mm3 / 1000.0
    return MaterialEstimate(n, volume, rho_ldpe * volume)


@dataclass(frozen=True)
class SpanResult:
    length_mm: float
    q: float
    q_max: float

    @property
    def passed(self) -> bool:
        return self.q <= self.q_max

    @property
    def margin(self) -> float:
        return self.q_max - self.q


def contact_points(plan: WeavePlan) -> list:
    pts = [plan.polyline[0]]
    pts += [w.position for w in plan.waypoints if w.position is not None]
    pts.append(plan.polyline[-1])
    return pts


def span_check(plan: WeavePlan, load: LoadSpec, m: BucklingModel) -> list[SpanResult]:
    """Each stretch between consecutive supports must carry the line load."""
    pts = contact_points(plan)
    out = []
    for a, b in zip(pts, pts[1:]):
        length = math.dist(a, b)
        out.append(SpanResult(length, load.q, buckling_capacity(m, length / 1000.0)))
    return out


@dataclass(frozen=True)
class FeasibilityReport:
    plan_id: str
    spans: tuple[SpanResult, ...]
    cumulative_bend: float
    theta_max: float
    tube_length: float
    reel_length: float
    material: MaterialEstimate
    total_length: float
    min_clearance: float
    notes: tuple[str, ...] = field(default=())

    @property
    def spans_pass(self) -> bool:
        return all(s.passed for s in self.spans)

    @property
    def bend_pass(self) -> bool:
        return self.cumulative_bend <= self.theta_max

    @property
    def reel_pass(self) -> bool:
        return self.tube_length <= self.reel_length

    @property
    def passed(self) -> bool:
        return self.spans_pass and self.bend_pass and self.reel_pass

    @property
    def worst_span_margin(self) -> float:
        return min((s.margin for s in self.spans), default=math.inf)


def feasibility(
    plan: WeavePlan,
    schedule: FoldSchedule | None,
    env: EnvironmentMap,
    tube: TubeSpec,
    load: LoadSpec,
    m: BucklingModel,
    theta_max: float = 2 * math.pi,
    layers: int = 1,
) -> FeasibilityReport:
    """Spans, friction budget and reel use for one plan.

    With a schedule, the bend budget counts the folds actually released and
    the tube length is what the schedule extrudes; without one, the plan's
    own turns and length are used.  Clearance is measured on the rolled-out
    tube when a schedule is given.
    """
    if schedule is not None:
        bend = schedule.cumulative_bend
        length = consumed_length(schedule)
        path = simulate_schedule(schedule).polyline
    else:
        bend = plan.cumulative_bend
        length = plan.total_length
        path = plan.polyline
    clearance = min((polyline_polygon_distance(path, o) for o in env.obstacles), default=math.inf)
    material = material_estimate(layers * tube.d_infl, length, tube)
    return FeasibilityReport(
        plan_id=plan.plan_id,
        spans=tuple(span_check(plan, load, m)),
        cumulative_bend=bend,
        theta_max=theta_max,
        tube_length=length,
        reel_length=tube.reel_length,
        material=material,
        total_length=plan.total_length,
        min_clearance=clearance,
    )


@dataclass(frozen=True)
class RankWeights:
    length: float = 1.0
    bend: float = 0.0
    clearance: float = 0.0
    span_margin: float = 0.0


def _normalised(values: list[float]) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    finite = v[np.isfinite(v)]
    if len(finite) == 0:
        return np.zeros(len(v))
    lo, hi = finite.min(), finite.max()
    v = np.where(np.isposinf(v), hi, np.where(np.isneginf(v), lo, v))
    if hi == lo:
        return np.zeros(len(v))
    return (v - lo) / (hi - lo)


def plan_scores(reports: Sequence[FeasibilityReport], weights: RankWeights) -> list[float]:
    """Lower is better.  Each criterion is min-max scaled over the batch.

    Weights are divided by their total so that scaling them all by one
    factor leaves the scores, and hence the ranking, unchanged; scores are
    rounded to 12 decimals so float noise cannot split genuine ties.
    """
    if not reports:
        return []
    w = np.array([weights.length, weights.bend, weights.clearance, weights.span_margin], dtype=float)
    total = float(np.abs(w).sum())
    if total == 0:
        return [0.0] * len(reports)
    w /= total
    score = (
        w[0] * _normalised([r.total_length for r in reports])
        + w[1] * _normalised([r.cumulative_bend for r in reports])
        - w[2] * _normalised([r.min_clearance for r in reports])
        - w[3] * _normalised([r.worst_span_margin for r in reports])
    )
    return np.round(score, 12).tolist()


def rank_plans(reports: Sequence[FeasibilityReport], weights: RankWeights = RankWeights()) -> list[str]:
    """Ids of feasible plans, best first; ties broken by plan id."""
    feasible = [r for r in reports if r.passed]
    scores = plan_scores(feasible, weights)
    order = sorted(zip(scores, [r.plan_id for r in feasible]))
    return [pid for _, pid in order]
