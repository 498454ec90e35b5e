"""Three-pillar demonstration layout.

Pillars R3, R2, R1 stand in a row in front of the outlet (R3 nearest), each
a 100 mm pipe polygonised as a regular 12-gon at 400 mm pitch.  No source
dimensions exist for this layout; all sizes are declared defaults.

Planning runs on pillars grown by ``margin`` (about one tube radius), so the
tube centreline keeps that distance and the tube wall just bears on each
pillar.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import EnvironmentMap, Point2, dilate_environment, rectangle, regular_polygon
from .roadmap import build_roadmap
from .tube import (
    FoldSchedule,
    Rollout,
    TubeSpec,
    VerificationReport,
    conform_plan,
    discretize_plan,
    simulate_schedule,
    verify_discretized,
)
from .weave import Side, WeavePlan, plan_between


@dataclass(frozen=True)
class DemoLayout:
    env: EnvironmentMap
    labels: tuple[str, ...]
    start: Point2
    end: Point2
    start_heading: float
    # the opposing tube is extruded from the far end
    alt_start: Point2
    alt_heading: float
    offset_d: float
    margin: float
    clearance: float

    def index(self, label: str) -> int:
        return self.labels.index(label)

    @property
    def planning_env(self) -> EnvironmentMap:
        return dilate_environment(self.env, self.margin, len(self.env.obstacles[0]))


def demo_layout(
    pillar_diameter: float = 100.0,
    pitch: float = 400.0,
    sides: int = 12,
    offset_d: float = 10.0,
    margin: float = 25.0,
    clearance: float = 20.0,
) -> DemoLayout:
    r = pillar_diameter / 2
    xs = [pitch * (k + 1) for k in range(3)]
    pillars = tuple(regular_polygon((x, 0.0), r, sides) for x in xs)
    length = pitch * 4
    boundary = rectangle(-pitch / 2, -1.5 * pitch, length + pitch / 2, 1.5 * pitch)
    env = EnvironmentMap(boundary, pillars, "demo-3-pillars")
    return DemoLayout(
        env=env,
        labels=("R3", "R2", "R1"),
        start=Point2(0.0, 0.0),
        end=Point2(length, 0.0),
        start_heading=0.0,
        alt_start=Point2(length, 0.0),
        alt_heading=3.141592653589793,
        offset_d=offset_d,
        margin=margin,
        clearance=clearance,
    )


@dataclass(frozen=True)
class DemoRun:
    plan: WeavePlan
    conformed: WeavePlan
    schedule: FoldSchedule
    rollout: Rollout
    report: VerificationReport


def run_demo(
    layout: DemoLayout | None = None,
    tube: TubeSpec | None = None,
    first_side: Side = Side.ABOVE,
    angle_tol: float = 0.1,
) -> DemoRun:
    """Plan, fold-conform, discretise, roll out and verify the demo weave."""
    layout = layout or demo_layout()
    tube = tube or TubeSpec()
    penv = layout.planning_env
    g = build_roadmap(penv, layout.offset_d)
    plan = plan_between(penv, g, layout.start, layout.end, first_side=first_side, plan_id="demo")
    conformed = conform_plan(plan, layout.env, tube.theta, layout.clearance)
    schedule = discretize_plan(conformed, tube, angle_tol=angle_tol)
    rollout = simulate_schedule(schedule)
    report = verify_discretized(layout.env, rollout.polyline, 0.0, conformed)
    return DemoRun(plan, conformed, schedule, rollout, report)
