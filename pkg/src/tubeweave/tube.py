"""Fold-steered tube kinematics.

A tube is pre-folded every ``fold_spacing`` mm of arclength.  Releasing the
thread on one side of a fold makes the tube bend toward the remaining
thread by the fold angle; releasing both threads removes the fold, and
keeping both leaves it in place.

Heading convention: CCW positive.  LEFT removes the left thread, so the
tube bends right (-theta); RIGHT bends left (+theta).
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.optimize import brentq, minimize

from .geometry import (
    EPS,
    EnvironmentMap,
    InvalidEnvironment,
    Point2,
    polyline_polygon_distance,
    segment_distance_matrix,
)
from .weave import Side, WeavePlan, heading, observed_sides, signed_offset, turn_angles, wrap_angle

PSI = 6894.757293168361
VALID_PRESSURE = (5 * PSI, 8 * PSI)
# fold lengths with no recorded release failures, widened to 30 mm
RELIABLE_FOLD = (30.0, 50.0)


class TubeWarning(UserWarning):
    pass


class NoFoldSolution(ValueError):
    pass


class DiscretizationError(ValueError):
    """One or more plan turns cannot be matched by whole folds."""

    def __init__(self, turns: list[tuple[int, float, int, float]]):
        desc = ", ".join(f"vertex {i}: {phi:+.3f} rad ~ {n} folds (residual {r:.3f})" for i, phi, n, r in turns)
        super().__init__(f"turns outside angle tolerance: {desc}")
        self.turns = turns


class ReelExhausted(ValueError):
    def __init__(self, required: float, available: float):
        super().__init__(f"schedule needs {required:.1f} mm of tube, reel holds {available:.1f} mm")
        self.required = required
        self.available = available


class ConformError(RuntimeError):
    pass


def inflated_diameter(d_flat: float) -> float:
    """Diameter of the inflated round tube from its lay-flat width."""
    if d_flat < 0:
        raise ValueError(f"lay-flat diameter must be >= 0, got {d_flat}")
    return 2.0 * d_flat / math.pi


@dataclass(frozen=True)
class FoldGeometry:
    l_fold: float
    x: float
    theta: float


def _bend_from_chord(l_fold: float, d_infl: float, x: float) -> float:
    return 2.0 * l_fold / (d_infl + x)


def _bend_from_arc(l_fold: float, x: float) -> float:
    return 2.0 * math.asin(min(1.0, l_fold / (2.0 * x)))


def fold_residual(l_fold: float, d_infl: float, x: float) -> float:
    return _bend_from_chord(l_fold, d_infl, x) - _bend_from_arc(l_fold, x)


def fold_angle(l_fold: float, d_infl: float, tol: float = 1e-9) -> FoldGeometry:
    """Solve the two-equation fold model for the chord x and bend angle.

    theta = 2 L / (D + x)   and   theta = 2 asin(L / 2x),   x > L/2.

    The residual is negative at x = L/2 and positive for large x, so a
    sign change is bracketed on (L/2, 100 (L + D)).
    """
    if not (l_fold > 0 and d_infl > 0):
        raise ValueError("fold length and inflated diameter must be positive")
    lo = l_fold / 2.0
    hi = 100.0 * (l_fold + d_infl)
    f = lambda x: fold_residual(l_fold, d_infl, x)  # noqa: E731
    if not (f(lo) < 0 < f(hi)):
        raise NoFoldSolution(f"no bracket for L_fold={l_fold}, D_infl={d_infl} on ({lo}, {hi})")
    x = brentq(f, lo, hi, xtol=1e-14 * hi, rtol=4 * np.finfo(float).eps, maxiter=500)
    theta = _bend_from_chord(l_fold, d_infl, x)
    if abs(f(x)) >= tol:
        raise NoFoldSolution(f"solver residual {abs(f(x)):.3g} above tolerance {tol}")
    return FoldGeometry(l_fold, x, theta)


@dataclass(frozen=True)
class TubeSpec:
    """Physical tube. Lengths in mm, pressure in Pa.

    ``theta_override`` replaces the modelled fold angle, for calibrating
    against measured bends.
    """

    d_flat: float = 76.2
    t: float = 0.0508
    pressure: float = 8 * PSI
    fold_spacing: float = 30.0
    l_fold: float = 40.0
    l_thread: float = 40.0
    reel_length: float = 10_000.0
    theta_override: float | None = None

    def __post_init__(self):
        for name in ("d_flat", "t", "pressure", "fold_spacing", "l_fold", "l_thread", "reel_length"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive number, got {v!r}")
        if abs(self.l_thread - self.l_fold) > 0.1 * self.l_fold:
            raise ValueError(f"thread length {self.l_thread} not within 10% of fold length {self.l_fold}")
        if self.theta_override is not None and not 0 < self.theta_override < math.pi:
            raise ValueError("theta_override must lie in (0, pi)")
        lo, hi = VALID_PRESSURE
        if not lo * (1 - 1e-9) <= self.pressure <= hi * (1 + 1e-9):
            warnings.warn(f"pressure {self.pressure:.0f} Pa outside the 5-8 PSI validated range", TubeWarning, stacklevel=3)
        if not RELIABLE_FOLD[0] <= self.l_fold <= RELIABLE_FOLD[1]:
            warnings.warn(f"fold length {self.l_fold} mm outside the reliable {RELIABLE_FOLD} mm band", TubeWarning, stacklevel=3)

    @property
    def d_infl(self) -> float:
        return inflated_diameter(self.d_flat)

    @cached_property
    def fold(self) -> FoldGeometry:
        return fold_angle(self.l_fold, self.d_infl)

    @property
    def theta(self) -> float:
        return self.theta_override if self.theta_override is not None else self.fold.theta


class FoldCommand(str, Enum):
    KEEP = "keep"
    BOTH = "both"
    LEFT = "left"
    RIGHT = "right"

    @property
    def turn_sign(self) -> int:
        return {"left": -1, "right": 1}.get(self.value, 0)


@dataclass(frozen=True)
class FoldSchedule:
    """Per-station release commands; unlisted stations are kept folded.

    ``corners`` maps plan vertices to (first station, release count) and is
    bookkeeping only, not part of the file format.
    """

    tube: TubeSpec
    commands: tuple[tuple[int, FoldCommand], ...]
    base: tuple[Point2, float] = (Point2(0.0, 0.0), 0.0)
    corners: tuple[tuple[int, int, int], ...] = field(default=(), compare=False)

    def __post_init__(self):
        cmds = tuple((int(k), FoldCommand(c)) for k, c in self.commands)
        object.__setattr__(self, "commands", cmds)
        object.__setattr__(self, "base", (Point2(*self.base[0]), float(self.base[1])))
        ks = [k for k, _ in cmds]
        if any(k < 1 for k in ks) or any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("fold indices must be >= 1 and strictly increasing")
        need = consumed_length(self)
        if need > self.tube.reel_length + 1e-9:
            raise ReelExhausted(need, self.tube.reel_length)

    @property
    def releases(self) -> int:
        return sum(1 for _, c in self.commands if c.turn_sign)

    @property
    def cumulative_bend(self) -> float:
        return self.releases * self.tube.theta


def _interval_lengths(schedule: FoldSchedule) -> list[tuple[FoldCommand, float]]:
    """(command, length of the interval that follows) for stations 1..K."""
    tube = schedule.tube
    both = tube.fold_spacing + 2 * tube.l_fold
    cmd = dict(schedule.commands)
    last = schedule.commands[-1][0] if schedule.commands else 0
    out = []
    for k in range(1, last + 1):
        c = cmd.get(k, FoldCommand.KEEP)
        out.append((c, both if c is FoldCommand.BOTH else tube.fold_spacing))
    return out


def consumed_length(schedule: FoldSchedule) -> float:
    """Extruded arclength from the outlet to the last station."""
    steps = _interval_lengths(schedule)
    if not steps:
        return 0.0
    # the outlet interval plus every interval except the one after the last station
    return schedule.tube.fold_spacing + sum(length for _, length in steps[:-1])


@dataclass(frozen=True)
class Rollout:
    polyline: tuple[Point2, ...]
    heading: float


def simulate_schedule(schedule: FoldSchedule) -> Rollout:
    """Forward rollout: straight runs between stations, kinks at releases."""
    (x, y), h = schedule.base
    theta = schedule.tube.theta
    pts = [Point2(x, y)]
    length = schedule.tube.fold_spacing
    for cmd, next_length in _interval_lengths(schedule):
        x += length * math.cos(h)
        y += length * math.sin(h)
        pts.append(Point2(x, y))
        h += cmd.turn_sign * theta
        length = next_length
    return Rollout(tuple(pts), h)


# --- discretisation -------------------------------------------------------


def turn_fold_counts(turns: Sequence[float], theta: float) -> list[int]:
    return [int(round(abs(phi) / theta)) for phi in turns]


def discretize_plan(
    plan: WeavePlan,
    tube: TubeSpec,
    straight_policy: FoldCommand = FoldCommand.KEEP,
    angle_tol: float = 0.1,
) -> FoldSchedule:
    """Realise a plan's polyline as fold releases at fixed stations.

    A turn of phi becomes round(|phi| / theta) single releases at consecutive
    stations.  Where the releases start is chosen per corner so that the
    tube, once turned, lies closest to the plan's outgoing segment; this
    keeps positional error from accumulating along the route.
    """
    straight_policy = FoldCommand(straight_policy)
    if straight_policy.turn_sign:
        raise ValueError("straight policy must be keep or both")
    pts = [np.asarray(p, float) for p in plan.polyline]
    if len(pts) < 2:
        raise ValueError("plan needs at least two points")
    theta = tube.theta
    turns = plan.turn_angles
    counts = turn_fold_counts(turns, theta)
    bad = []
    for i, (phi, n) in enumerate(zip(turns, counts)):
        r = abs(abs(phi) - n * theta)
        if r > angle_tol:
            bad.append((i + 1, phi, n, r))
    if bad:
        raise DiscretizationError(bad)

    s = tube.fold_spacing
    straight_len = s + 2 * tube.l_fold if straight_policy is FoldCommand.BOTH else s
    h0 = heading(pts[0], pts[1])

    # state: position of the current station, heading, index, next interval
    state = (pts[0].copy(), h0, 0, s)
    cmds: list[tuple[int, FoldCommand]] = []
    corners = []

    def step(st, cmd):
        pos, h, k, nxt = st
        pos = pos + nxt * np.array([math.cos(h), math.sin(h)])
        h = h + cmd.turn_sign * theta
        nxt = straight_len if cmd is straight_policy else s
        return (pos, h, k + 1, nxt)

    for i, (phi, n) in enumerate(zip(turns, counts)):
        if n == 0:
            continue
        release = FoldCommand.RIGHT if phi > 0 else FoldCommand.LEFT
        v, w = pts[i + 1], pts[i + 2]
        pos, h = state[0], state[1]
        along = float(np.dot(v - pos, [math.cos(h), math.sin(h)]))
        jmax = max(0, int(math.ceil((along + n * s) / straight_len))) + 2
        best = None
        st = state
        for j in range(jmax + 1):
            trial = st
            for _ in range(n):
                trial = step(trial, release)
            err = abs(signed_offset(v, w, trial[0]))
            if best is None or err < best[0] - 1e-12:
                best = (err, j)
            st = step(st, straight_policy)
        j = best[1]
        for _ in range(j):
            state = step(state, straight_policy)
            cmds.append((state[2], straight_policy))
        corners.append((i + 1, state[2] + 1, n))
        for _ in range(n):
            state = step(state, release)
            cmds.append((state[2], release))

    end = pts[-1]
    while True:
        pos, h, k, nxt = state
        remaining = float(np.dot(end - pos, [math.cos(h), math.sin(h)]))
        if remaining <= nxt / 2:
            break
        state = step(state, straight_policy)
        cmds.append((state[2], straight_policy))
    return FoldSchedule(tube, tuple(cmds), (Point2(*pts[0]), h0), tuple(corners))


# --- fold-aware plan adjustment ---------------------------------------------


def _clearances(flat: np.ndarray, fixed_start, fixed_end, polys) -> np.ndarray:
    pts = np.vstack([fixed_start, flat.reshape(-1, 2), fixed_end])
    p0, p1 = pts[:-1], pts[1:]
    out = []
    for starts, ends in polys:
        out.append(segment_distance_matrix(p0, p1, starts, ends).min(axis=1))
    return np.concatenate(out)


def _turns(flat: np.ndarray, fixed_start, fixed_end) -> np.ndarray:
    pts = np.vstack([fixed_start, flat.reshape(-1, 2), fixed_end])
    return np.asarray(turn_angles(pts))


def conform_plan(
    plan: WeavePlan,
    env: EnvironmentMap,
    theta: float,
    clearance: float = 0.0,
    max_attempts: int = 16,
) -> WeavePlan:
    """Nudge interior vertices so every turn is a whole number of folds.

    Solves a small constrained least-squares problem: move the vertices as
    little as possible such that each turn equals n * theta (n from
    rounding, then neighbouring counts if that is infeasible) while every
    segment keeps ``clearance`` from obstacles and stays off the boundary.
    Start and end stay fixed.  Vertices whose target turn is zero are
    dropped afterwards.  The result must pass its features on the planned
    sides, otherwise :class:`ConformError` is raised.
    """
    pts = np.asarray(plan.polyline, float)
    if len(pts) <= 2:
        return plan
    a, b = pts[0], pts[-1]
    x0 = pts[1:-1].ravel()
    turns0 = _turns(x0, a, b)
    scale = max(1.0, float(np.ptp(pts, axis=0).max()))
    polys = [(o.edge_starts, o.edge_ends) for o in env.obstacles]
    polys.append((env.boundary.edge_starts, env.boundary.edge_ends))
    c0 = _clearances(x0, a, b, polys)
    # never demand more than the input already has
    need = np.minimum(max(clearance, 10 * EPS), c0 * (1 - 1e-6))

    base = np.abs(turns0) / theta
    options = []
    for q in base:
        lo, hi = math.floor(q), math.ceil(q)
        near = sorted({lo, hi}, key=lambda n: abs(n - q))
        options.append(near)
    combos = sorted(itertools.product(*options), key=lambda c: sum(abs(n - q) for n, q in zip(c, base)))
    signs = np.sign(turns0)

    for combo in combos[:max_attempts]:
        target = signs * np.asarray(combo) * theta
        cons = [
            {"type": "eq", "fun": lambda x, t=target: np.array([wrap_angle(v) for v in _turns(x, a, b) - t])},
            {"type": "ineq", "fun": lambda x: (_clearances(x, a, b, polys) - need) / scale},
        ]
        res = minimize(
            lambda x: float(np.sum((x - x0) ** 2)) / scale**2,
            x0.copy(),
            jac=lambda x: 2 * (x - x0) / scale**2,
            constraints=cons,
            method="SLSQP",
            options={"maxiter": 500, "ftol": 1e-14},
        )
        x = res.x
        if np.max(np.abs(_turns(x, a, b) - target)) > 1e-7:
            continue
        if np.min(_clearances(x, a, b, polys) - need) < -1e-6:
            continue
        new = [a] + [p for p, n in zip(x.reshape(-1, 2), combo) if n > 0] + [b]
        cand = plan.replace(polyline=tuple(Point2(*p) for p in new))
        if not all(env.segment_clear(p, q) for p, q in zip(cand.polyline, cand.polyline[1:])):
            continue
        got = observed_sides(cand.polyline, plan.chord, env, plan.contacted)
        if any(g is not w.side for g, w in zip(got, plan.waypoints)):
            continue
        return cand
    raise ConformError(f"no fold-compatible adjustment found for plan {plan.plan_id!r}")


# --- verification -----------------------------------------------------------


@dataclass(frozen=True)
class SideCheck:
    obstacle: int
    expected: Side
    observed: Side
    distance: float
    contacted: bool

    @property
    def ok(self) -> bool:
        return self.contacted and self.expected is self.observed


@dataclass(frozen=True)
class VerificationReport:
    collisions: tuple[bool, ...]
    distances: tuple[float, ...]
    min_clearance: float
    inside_boundary: bool
    sides: tuple[SideCheck, ...] = ()

    @property
    def failures(self) -> list[str]:
        out = [f"collision with obstacle {i}" for i, c in enumerate(self.collisions) if c]
        if not self.inside_boundary:
            out.append("leaves the environment boundary")
        for sc in self.sides:
            if not sc.contacted:
                out.append(f"obstacle {sc.obstacle} not contacted (distance {sc.distance:.1f} mm)")
            elif sc.expected is not sc.observed:
                out.append(f"obstacle {sc.obstacle} passed {sc.observed.value}, planned {sc.expected.value}")
        return out

    @property
    def passed(self) -> bool:
        return not self.failures


def verify_discretized(
    env: EnvironmentMap,
    polyline: Sequence,
    clearance: float = 0.0,
    plan: WeavePlan | None = None,
    contact_distance: float = math.inf,
) -> VerificationReport:
    """Check a rolled-out tube against the map.

    A collision is any approach to an obstacle within ``max(clearance, eps)``.
    When ``plan`` is given, each feature it weaves around must be passed on
    the planned side (judged against the plan's chord) and come within
    ``contact_distance`` of the tube.
    """
    pts = np.asarray(polyline, float).reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("empty polyline")
    limit = max(clearance, env.eps)
    dist = tuple(polyline_polygon_distance(pts, o) for o in env.obstacles)
    collisions = tuple(d <= limit for d in dist)
    inside = all(env.boundary.contains(p) for p in pts)
    if inside and len(pts) > 1:
        b = env.boundary
        inside = float(segment_distance_matrix(pts[:-1], pts[1:], b.edge_starts, b.edge_ends).min()) > env.eps
    sides: tuple[SideCheck, ...] = ()
    if plan is not None and plan.contacted and len(pts) > 1:
        got = observed_sides(pts, plan.chord, env, plan.contacted)
        sides = tuple(
            SideCheck(w.obstacle, w.side, o, dist[w.obstacle], dist[w.obstacle] <= contact_distance)
            for w, o in zip(plan.waypoints, got)
        )
    return VerificationReport(collisions, dist, min(dist, default=math.inf), inside, sides)


# --- map perturbation -------------------------------------------------------

DIRECTIONS = {"+x": (1, 0), "-x": (-1, 0), "+y": (0, 1), "-y": (0, -1)}


def axis_grid(max_mm: float, step_mm: float) -> list[tuple[float, float]]:
    """Zero plus displacements along +-x and +-y up to max_mm."""
    n = int(math.floor(max_mm / step_mm + 1e-9))
    out = [(0.0, 0.0)]
    for ux, uy in DIRECTIONS.values():
        out.extend((ux * k * step_mm, uy * k * step_mm) for k in range(1, n + 1))
    return out


@dataclass(frozen=True)
class PerturbationEntry:
    dx: float
    dy: float
    status: str  # "pass", "fail" or "invalid"
    reasons: tuple[str, ...] = ()


@dataclass(frozen=True)
class PerturbationReport:
    obstacle: int
    entries: tuple[PerturbationEntry, ...]
    margins: dict
    max_pass: dict
    contact_distance: float
    clearance: float


def perturbation_robustness(
    env: EnvironmentMap,
    schedule: FoldSchedule,
    obstacle: int,
    grid: Sequence[tuple[float, float]],
    plan: WeavePlan | None = None,
    clearance: float = 0.0,
    contact_distance: float | None = None,
) -> PerturbationReport:
    """Move one obstacle over ``grid`` and re-verify the fixed rollout.

    The schedule is open-loop, so the tube shape never changes; only the map
    does.  ``margins`` gives, per axis direction, the largest displacement
    up to which every tested step passed; ``max_pass`` the largest passing
    step regardless of gaps.  Displacements that make the map invalid are
    marked "invalid" and end the contiguous run.

    ``contact_distance`` defaults to the nominal tube-to-feature distance
    plus half the inflated diameter, i.e. the feature may drift away by one
    tube radius before the tube stops bearing on it.
    """
    tube_pts = simulate_schedule(schedule).polyline
    if contact_distance is None:
        nominal = verify_discretized(env, tube_pts, clearance, plan)
        far = max((sc.distance for sc in nominal.sides), default=0.0)
        contact_distance = far + schedule.tube.d_infl / 2
    nominal = verify_discretized(env, tube_pts, clearance, plan, contact_distance)
    if not nominal.passed:
        raise ValueError(f"schedule fails on the nominal map: {'; '.join(nominal.failures)}")
    entries = []
    for dx, dy in grid:
        try:
            moved = env.with_obstacle(obstacle, env.obstacles[obstacle].translated(dx, dy))
        except InvalidEnvironment as exc:
            entries.append(PerturbationEntry(dx, dy, "invalid", (str(exc),)))
            continue
        rep = verify_discretized(moved, tube_pts, clearance, plan, contact_distance)
        entries.append(PerturbationEntry(dx, dy, "pass" if rep.passed else "fail", tuple(rep.failures)))
    margins, max_pass = {}, {}
    for name, (ux, uy) in DIRECTIONS.items():
        along = []
        for e in entries:
            m = e.dx * ux + e.dy * uy
            if m > 0 and abs(e.dx * uy - e.dy * ux) < 1e-12:
                along.append((m, e.status))
        along.sort()
        run = 0.0
        for m, status in along:
            if status != "pass":
                break
            run = m
        margins[name] = run
        max_pass[name] = max((m for m, st in along if st == "pass"), default=0.0)
    return PerturbationReport(obstacle, tuple(entries), margins, max_pass, contact_distance, clearance)
