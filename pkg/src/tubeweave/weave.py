"""Alternating over/under weave planning on a visibility roadmap.

"Above" and "below" are measured against the start->end chord: a point is
above when it lies to the left of the chord direction.  Passing above a
feature while travelling along the chord wraps it clockwise, so above legs
are tagged CW and below legs CCW.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Sequence

import numpy as np

from .geometry import EnvironmentMap, Point2, segment_polygon_distance, point_in_polygon
from .roadmap import RoadmapGraph, insert_point, shortest_path


class Side(str, Enum):
    ABOVE = "above"
    BELOW = "below"

    @property
    def sign(self) -> int:
        return 1 if self is Side.ABOVE else -1

    @property
    def other(self) -> "Side":
        return Side.BELOW if self is Side.ABOVE else Side.ABOVE

    @property
    def direction(self) -> "Direction":
        return Direction.CW if self is Side.ABOVE else Direction.CCW


class Direction(str, Enum):
    CW = "CW"
    CCW = "CCW"


class WeaveError(RuntimeError):
    """A weave could not be produced; ``leg`` or ``obstacle`` says where."""

    def __init__(self, msg: str, leg: int | None = None, obstacle: int | None = None):
        super().__init__(msg)
        self.leg = leg
        self.obstacle = obstacle


@dataclass(frozen=True)
class WeaveWaypoint:
    node: int
    side: Side
    direction: Direction
    obstacle: int | None = None
    position: Point2 | None = None


def heading(a, b) -> float:
    return math.atan2(b[1] - a[1], b[0] - a[0])


def wrap_angle(a: float) -> float:
    """Map to (-pi, pi]."""
    a = math.fmod(a + math.pi, 2 * math.pi)
    if a <= 0:
        a += 2 * math.pi
    return a - math.pi


def turn_angles(polyline: Sequence) -> list[float]:
    """Signed heading change at each interior vertex (CCW positive)."""
    out = []
    for i in range(1, len(polyline) - 1):
        out.append(wrap_angle(heading(polyline[i], polyline[i + 1]) - heading(polyline[i - 1], polyline[i])))
    return out


def polyline_length(polyline: Sequence) -> float:
    pts = np.asarray(polyline, float)
    if len(pts) < 2:
        return 0.0
    return float(np.hypot(*np.diff(pts, axis=0).T).sum())


@dataclass(frozen=True)
class WeavePlan:
    waypoints: tuple[WeaveWaypoint, ...]
    polyline: tuple[Point2, ...]
    contacted: tuple[int, ...]
    start: int = 0
    end: int = 0
    plan_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "waypoints", tuple(self.waypoints))
        object.__setattr__(self, "polyline", tuple(Point2(*p) for p in self.polyline))
        object.__setattr__(self, "contacted", tuple(self.contacted))
        for a, b in zip(self.polyline, self.polyline[1:]):
            if a == b:
                raise ValueError("consecutive polyline points must be distinct")

    @cached_property
    def total_length(self) -> float:
        return polyline_length(self.polyline)

    @cached_property
    def turn_angles(self) -> list[float]:
        return turn_angles(self.polyline)

    @property
    def cumulative_bend(self) -> float:
        return float(sum(abs(a) for a in self.turn_angles))

    @property
    def chord(self) -> tuple[Point2, Point2]:
        return self.polyline[0], self.polyline[-1]

    @property
    def family(self) -> Direction:
        """Direction of the first wrap; a plan with no waypoints counts as CCW."""
        return self.waypoints[0].direction if self.waypoints else Direction.CCW

    def replace(self, **kw) -> "WeavePlan":
        d = dict(
            waypoints=self.waypoints, polyline=self.polyline, contacted=self.contacted,
            start=self.start, end=self.end, plan_id=self.plan_id,
        )
        d.update(kw)
        return WeavePlan(**d)


# --- chord-relative sides ---------------------------------------------------


def signed_offset(start, end, p) -> float:
    """Signed perpendicular distance of p from the chord line; positive above."""
    dx, dy = end[0] - start[0], end[1] - start[1]
    L = math.hypot(dx, dy)
    if L == 0:
        raise ValueError("start and end coincide; the chord has no direction")
    return (dx * (p[1] - start[1]) - dy * (p[0] - start[0])) / L


def _winding(pt, loop: np.ndarray) -> int:
    wn = 0
    px, py = pt
    n = len(loop)
    for i in range(n):
        x0, y0 = loop[i]
        x1, y1 = loop[(i + 1) % n]
        c = (x1 - x0) * (py - y0) - (px - x0) * (y1 - y0)
        if y0 <= py:
            if y1 > py and c > 0:
                wn += 1
        elif y1 <= py and c < 0:
            wn -= 1
    return wn


def passing_side(polyline: Sequence, chord: tuple, point) -> Side:
    """Which side of ``point`` the polyline passes, relative to the chord.

    The polyline is closed through a far-away detour on the below side; the
    point is enclosed exactly when the polyline went over it.
    """
    s, e = chord
    dx, dy = e[0] - s[0], e[1] - s[1]
    L = math.hypot(dx, dy)
    nx, ny = -dy / L, dx / L
    pts = np.asarray(polyline, float)
    span = float(np.ptp(np.vstack([pts, [point]]), axis=0).max()) + L
    far = 10.0 * span + 1.0
    first, last = pts[0], pts[-1]
    loop = np.vstack([pts, [last[0] - far * nx, last[1] - far * ny], [first[0] - far * nx, first[1] - far * ny]])
    return Side.ABOVE if _winding(point, loop) != 0 else Side.BELOW


def observed_sides(polyline: Sequence, chord: tuple, env: EnvironmentMap, obstacles: Sequence[int]) -> list[Side]:
    return [passing_side(polyline, chord, env.obstacles[i].centroid) for i in obstacles]


# --- planning ---------------------------------------------------------------


def default_targets(env: EnvironmentMap, start, end, d: float, exclude=()) -> list[int]:
    """Obstacles touched by the chord widened by d, ordered along the chord."""
    s = np.asarray(start, float)
    u = np.asarray(end, float) - s
    u /= np.linalg.norm(u)
    hits = []
    for i, obs in enumerate(env.obstacles):
        if i in exclude:
            continue
        if segment_polygon_distance(start, end, obs) <= d:
            hits.append((float(np.dot(np.asarray(obs.centroid) - s, u)), i))
    return [i for _, i in sorted(hits)]


def select_weave_waypoints(
    env: EnvironmentMap,
    g: RoadmapGraph,
    start: int,
    end: int,
    targets: Sequence[int],
    first_side: Side = Side.ABOVE,
    tie_tol: float = 1e-9,
) -> list[WeaveWaypoint]:
    """One waypoint per target, alternating sides from ``first_side``.

    Each waypoint is the target's roadmap node on the required side that is
    nearest the chord line; near-ties go to the lower node index.  Nodes
    within ``g.eps`` of the chord line belong to neither side.
    """
    if not targets:
        raise ValueError("targets must be nonempty")
    first_side = Side(first_side)
    s, e = g.nodes[start].position, g.nodes[end].position
    side = first_side
    out = []
    for t in targets:
        cands = []
        for i in g.nodes_of(t):
            w = signed_offset(s, e, g.nodes[i].position)
            if w * side.sign > g.eps:
                cands.append((abs(w), i))
        if not cands:
            raise WeaveError(f"obstacle {t} has no roadmap node {side.value} the chord", obstacle=t)
        m = min(c[0] for c in cands)
        best = min(i for w, i in cands if w <= m + tie_tol)
        out.append(WeaveWaypoint(best, side, side.direction, t, g.nodes[best].position))
        side = side.other
    return out


def _leg_mask(g: RoadmapGraph, s, e, constraints: Sequence[tuple[int, Side]]) -> np.ndarray | None:
    if not constraints:
        return None
    mask = np.ones(len(g.nodes), dtype=bool)
    for obstacle, side in constraints:
        for i in g.nodes_of(obstacle):
            if signed_offset(s, e, g.nodes[i].position) * side.sign < -g.offset_d:
                mask[i] = False
    return mask


def plan_weave(
    g: RoadmapGraph,
    start: int,
    end: int,
    waypoints: Sequence[WeaveWaypoint],
    env: EnvironmentMap | None = None,
    plan_id: str = "",
) -> WeavePlan:
    """Chain shortest legs start -> w1 -> ... -> wk -> end.

    On the legs arriving at and leaving a waypoint, the nodes of that
    waypoint's feature may not lie on the opposite side of the chord by more
    than the roadmap offset, so the route wraps the feature the planned way.
    When ``env`` is given the routed polyline is also checked to pass every
    target on its planned side.  Raises :class:`WeaveError` naming the
    failing leg.
    """
    s, e = g.nodes[start].position, g.nodes[end].position
    seq = [start] + [w.node for w in waypoints] + [end]
    nodes: list[int] = [start]
    for k in range(len(seq) - 1):
        near = [waypoints[j] for j in (k - 1, k) if 0 <= j < len(waypoints)]
        mask = _leg_mask(g, s, e, [(w.obstacle, w.side) for w in near if w.obstacle is not None])
        path = shortest_path(g, seq[k], seq[k + 1], mask)
        if path is None:
            raise WeaveError(f"leg {k} ({seq[k]} -> {seq[k + 1]}) unreachable", leg=k)
        nodes.extend(path.nodes[1:])
    pts: list[Point2] = []
    for i in nodes:
        p = g.nodes[i].position
        if not pts or math.dist(pts[-1], p) > g.eps:
            pts.append(p)
    plan = WeavePlan(
        tuple(waypoints), tuple(pts), tuple(w.obstacle for w in waypoints), start, end, plan_id
    )
    if env is not None:
        check_sides(plan, env)
    return plan


def check_sides(plan: WeavePlan, env: EnvironmentMap) -> None:
    got = observed_sides(plan.polyline, plan.chord, env, plan.contacted)
    for w, side in zip(plan.waypoints, got):
        if side is not w.side:
            raise WeaveError(
                f"route passes obstacle {w.obstacle} {side.value}, planned {w.side.value}",
                obstacle=w.obstacle,
            )


def _triangle_has_obstacle(a, b, c, env: EnvironmentMap) -> bool:
    tri = (a, b, c)
    for obs in env.obstacles:
        if point_in_polygon(obs.vertices[0], tri):
            return True
    return False


def smooth_path(plan: WeavePlan, env: EnvironmentMap) -> WeavePlan:
    """Three-node sliding-window shortcutting.

    Each interior vertex is dropped when its neighbours see each other and
    no obstacle sits inside the triangle they form (so the route keeps
    passing every feature on the same side).  Sweeps repeat until a pass
    changes nothing, which makes the operation idempotent.
    """
    pts = list(plan.polyline)
    changed = True
    while changed:
        changed = False
        i = 1
        while i < len(pts) - 1:
            a, b, c = pts[i - 1], pts[i], pts[i + 1]
            if env.segment_clear(a, c) and not _triangle_has_obstacle(a, b, c, env):
                del pts[i]
                changed = True
            else:
                i += 1
    if len(pts) == len(plan.polyline):
        return plan
    return plan.replace(polyline=tuple(pts))


def plan_is_clear(plan: WeavePlan, env: EnvironmentMap) -> bool:
    pts = plan.polyline
    return all(env.segment_clear(a, b) for a, b in zip(pts, pts[1:]))


# --- batch generation -----------------------------------------------------


@dataclass(frozen=True)
class TargetsPolicy:
    """Which ordered node pairs get a plan, and how their targets are picked.

    ``first_side=None`` emits both weave families for every pair.
    ``boundary_band`` keeps only start/end nodes within that distance of the
    environment boundary; None accepts every node.
    """

    first_side: Side | None = Side.ABOVE
    min_targets: int = 1
    max_targets: int | None = None
    boundary_band: float | None = None
    sample_fraction: float = 1.0
    seed: int = 0
    smooth: bool = True


@dataclass(frozen=True)
class PairFailure:
    start: int
    end: int
    first_side: Side
    reason: str


@dataclass
class AllPairsResult:
    plans: list[WeavePlan] = field(default_factory=list)
    failures: list[PairFailure] = field(default_factory=list)
    pairs: int = 0


def all_pairs_plans(env: EnvironmentMap, g: RoadmapGraph, policy: TargetsPolicy = TargetsPolicy()) -> AllPairsResult:
    n = len(g.nodes)
    eligible = list(range(n))
    if policy.boundary_band is not None:
        eligible = [i for i in eligible if env.boundary.boundary_distance(g.nodes[i].position) <= policy.boundary_band]
    sides = [Side(policy.first_side)] if policy.first_side is not None else [Side.ABOVE, Side.BELOW]
    jobs = []
    for i in eligible:
        for j in eligible:
            if i == j or math.dist(g.nodes[i].position, g.nodes[j].position) <= g.eps:
                continue
            excl = {g.nodes[i].obstacle, g.nodes[j].obstacle}
            targets = default_targets(env, g.nodes[i].position, g.nodes[j].position, g.offset_d, excl)
            if policy.max_targets is not None:
                targets = targets[: policy.max_targets]
            if len(targets) < policy.min_targets:
                continue
            for side in sides:
                jobs.append((i, j, side, targets))
    if policy.sample_fraction < 1.0:
        rng = np.random.default_rng(policy.seed)
        k = int(round(policy.sample_fraction * len(jobs)))
        keep = np.sort(rng.choice(len(jobs), size=k, replace=False)) if jobs else []
        jobs = [jobs[int(t)] for t in keep]
    result = AllPairsResult(pairs=len(jobs))
    for i, j, side, targets in jobs:
        pid = f"{i}-{j}-{side.value}"
        try:
            wps = select_weave_waypoints(env, g, i, j, targets, side) if targets else []
            plan = plan_weave(g, i, j, wps, env, plan_id=pid)
            if policy.smooth:
                plan = smooth_path(plan, env)
        except WeaveError as exc:
            result.failures.append(PairFailure(i, j, side, str(exc)))
            continue
        result.plans.append(plan)
    return result


def plan_between(
    env: EnvironmentMap,
    g: RoadmapGraph,
    start,
    end,
    targets: Sequence[int] | None = None,
    first_side: Side = Side.ABOVE,
    smooth: bool = True,
    plan_id: str = "",
) -> WeavePlan:
    """Plan between two free points; g is copied, never modified."""
    g = g.copy()
    a = insert_point(g, env, start, "start")
    b = insert_point(g, env, end, "end")
    if targets is None:
        targets = default_targets(env, start, end, g.offset_d)
    wps = select_weave_waypoints(env, g, a, b, targets, first_side) if targets else []
    plan = plan_weave(g, a, b, wps, env, plan_id=plan_id)
    return smooth_path(plan, env) if smooth else plan
