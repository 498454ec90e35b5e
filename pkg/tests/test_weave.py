import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from plangen import random_map, raw_plan_cache, raw_plans_on
from tubeweave.geometry import EnvironmentMap, rectangle, regular_polygon
from tubeweave.roadmap import build_roadmap, insert_point
from tubeweave.weave import (
    Direction,
    Side,
    TargetsPolicy,
    WeaveError,
    WeavePlan,
    all_pairs_plans,
    default_targets,
    observed_sides,
    passing_side,
    plan_between,
    plan_is_clear,
    select_weave_waypoints,
    signed_offset,
    smooth_path,
    turn_angles,
    wrap_angle,
)


def test_signed_offset_and_sides():
    assert signed_offset((0, 0), (10, 0), (3, 2)) == pytest.approx(2)
    assert signed_offset((0, 0), (10, 0), (3, -2)) == pytest.approx(-2)
    # chord pointing left flips which half-plane is above
    assert signed_offset((10, 0), (0, 0), (3, 2)) == pytest.approx(-2)
    assert Side.ABOVE.direction is Direction.CW
    assert Side.BELOW.direction is Direction.CCW
    assert Side.ABOVE.other is Side.BELOW
    with pytest.raises(ValueError):
        signed_offset((1, 1), (1, 1), (0, 0))


def test_wrap_and_turns():
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert turn_angles([(0, 0), (1, 0), (1, 1)]) == pytest.approx([math.pi / 2])
    assert turn_angles([(0, 0), (1, 0), (2, -1)]) == pytest.approx([-math.pi / 4])


def test_passing_side():
    chord = ((0, 0), (10, 0))
    over = [(0, 0), (5, 3), (10, 0)]
    assert passing_side(over, chord, (5, 0)) is Side.ABOVE
    assert passing_side(over, chord, (5, 5)) is Side.BELOW
    assert passing_side([(0, 0), (10, 0)], chord, (5, 1)) is Side.BELOW


def test_straight_plan_in_empty_env():
    env = EnvironmentMap(rectangle(0, 0, 100, 100))
    g = build_roadmap(env, 5.0)
    plan = plan_between(env, g, (10, 10), (90, 50))
    assert plan.polyline == ((10, 10), (90, 50))
    assert plan.waypoints == ()
    assert plan.turn_angles == []
    assert plan.total_length == pytest.approx(math.hypot(80, 40))


def test_plan_rejects_repeated_points():
    with pytest.raises(ValueError):
        WeavePlan((), ((0, 0), (0, 0), (1, 1)), ())


def test_demo_weave_alternates(layout, demo_run):
    plan = demo_run.plan
    assert plan.contacted == (0, 1, 2)
    sides = [w.side for w in plan.waypoints]
    assert sides == [Side.ABOVE, Side.BELOW, Side.ABOVE]
    dirs = [w.direction for w in plan.waypoints]
    assert all(a is not b for a, b in zip(dirs, dirs[1:]))
    assert plan_is_clear(plan, layout.env)
    assert observed_sides(plan.polyline, plan.chord, layout.env, plan.contacted) == sides


def test_demo_weave_below_first(layout):
    env = layout.planning_env
    g = build_roadmap(env, layout.offset_d)
    plan = plan_between(env, g, layout.start, layout.end, first_side=Side.BELOW)
    assert [w.side for w in plan.waypoints] == [Side.BELOW, Side.ABOVE, Side.BELOW]
    assert plan.family is Direction.CCW
    # the mirror image of the above-first weave
    up = plan_between(env, g, layout.start, layout.end, first_side=Side.ABOVE)
    assert np.allclose(np.asarray(plan.polyline) * [1, -1], np.asarray(up.polyline), atol=1e-6)


def test_default_targets_ordered_along_chord(layout):
    t = default_targets(layout.env, layout.start, layout.end, 10.0)
    assert t == [0, 1, 2]
    back = default_targets(layout.env, layout.end, layout.start, 10.0)
    assert back == [2, 1, 0]
    assert default_targets(layout.env, (0, 300), (1600, 300), 10.0) == []


def test_waypoint_needs_node_on_side():
    env = EnvironmentMap(rectangle(-50, -50, 250, 50), (rectangle(50, -49, 150, 10),))
    g = build_roadmap(env, 5.0)
    a = insert_point(g, env, (0, 0))
    b = insert_point(g, env, (200, 0))
    # the obstacle's low corners sit outside the boundary, so nothing below
    with pytest.raises(WeaveError, match="below"):
        select_weave_waypoints(env, g, a, b, [0], Side.BELOW)
    wps = select_weave_waypoints(env, g, a, b, [0], Side.ABOVE)
    assert wps[0].side is Side.ABOVE and wps[0].obstacle == 0


def test_explicit_targets_override():
    env = EnvironmentMap(
        rectangle(-100, -300, 1100, 300),
        (regular_polygon((300, 0), 40), regular_polygon((700, 0), 40)),
    )
    g = build_roadmap(env, 10.0)
    only_second = plan_between(env, g, (0, 0), (1000, 0), targets=[1])
    assert only_second.contacted == (1,)
    both = plan_between(env, g, (0, 0), (1000, 0))
    assert both.contacted == (0, 1)
    assert [w.side for w in both.waypoints] == [Side.ABOVE, Side.BELOW]


def test_smooth_keeps_sides_around_feature():
    env = EnvironmentMap(rectangle(-100, -300, 1100, 300), (regular_polygon((500, 0), 50),))
    g = build_roadmap(env, 10.0)
    raw = plan_between(env, g, (0, 0), (1000, 0), smooth=False)
    sm = smooth_path(raw, env)
    assert len(sm.polyline) <= len(raw.polyline)
    assert passing_side(sm.polyline, sm.chord, (500, 0)) is Side.ABOVE


@pytest.fixture(scope="module")
def plan_pool():
    return raw_plan_cache(120)


@given(st.data())
def test_smoothing_properties(plan_pool, data):
    env, plan = data.draw(st.sampled_from(plan_pool))
    sm = smooth_path(plan, env)
    assert smooth_path(sm, env).polyline == sm.polyline
    assert sm.total_length <= plan.total_length + 1e-9
    assert sm.cumulative_bend <= plan.cumulative_bend + 1e-9
    assert plan_is_clear(sm, env)
    assert sm.polyline[0] == plan.polyline[0] and sm.polyline[-1] == plan.polyline[-1]
    # smoothing never changes which side a target is passed on
    assert observed_sides(sm.polyline, sm.chord, env, sm.contacted) == [w.side for w in sm.waypoints]


def test_generated_plans_alternate(plan_pool):
    for env, plan in plan_pool:
        sides = [w.side for w in plan.waypoints]
        assert all(a is not b for a, b in zip(sides, sides[1:]))
        dirs = [w.direction for w in plan.waypoints]
        assert all(a is not b for a, b in zip(dirs, dirs[1:]))
        assert plan_is_clear(plan, env)


def test_plans_repeat_for_same_seed():
    env, g = random_map(5)
    a = raw_plans_on(env, g, np.random.default_rng(1), 5)
    b = raw_plans_on(env, g, np.random.default_rng(1), 5)
    assert [p.polyline for p in a] == [p.polyline for p in b]


def test_all_pairs_accounting_and_determinism():
    env, g = random_map(3, n_obstacles=(6, 6))
    policy = TargetsPolicy(sample_fraction=0.1, seed=11)
    r1 = all_pairs_plans(env, g, policy)
    r2 = all_pairs_plans(env, g, policy)
    assert [p.polyline for p in r1.plans] == [p.polyline for p in r2.plans]
    assert len(r1.plans) == r1.pairs - len(r1.failures)
    assert r1.pairs > 0
    for p in r1.plans:
        assert plan_is_clear(p, env)
        sides = [w.side for w in p.waypoints]
        assert all(x is not y for x, y in zip(sides, sides[1:]))
    full = all_pairs_plans(env, g, TargetsPolicy())
    assert r1.pairs == round(0.1 * full.pairs)
    ids = {p.plan_id for p in full.plans}
    assert {p.plan_id for p in r1.plans} <= ids


def test_all_pairs_both_families():
    env = EnvironmentMap(rectangle(-100, -300, 1100, 300), (regular_polygon((500, 0), 50),))
    g = build_roadmap(env, 10.0)
    res = all_pairs_plans(env, g, TargetsPolicy(first_side=None))
    fams = {p.family for p in res.plans}
    assert fams <= {Direction.CW, Direction.CCW}
    assert res.pairs == len(res.plans) + len(res.failures)


def test_two_node_graph():
    env = EnvironmentMap(rectangle(0, 0, 100, 100))
    g = build_roadmap(env, 1.0)
    insert_point(g, env, (10, 10))
    insert_point(g, env, (90, 90))
    res = all_pairs_plans(env, g, TargetsPolicy(min_targets=0))
    assert len(res.plans) <= 2


def test_smooth_drops_collinear_and_keeps_blocked():
    env = EnvironmentMap(rectangle(-100, -300, 1100, 300), (regular_polygon((500, 0), 50),))
    line = WeavePlan((), ((0, 0), (1, 0), (2, 0)), ())
    assert smooth_path(line, env).polyline == ((0, 0), (2, 0))
    detour = WeavePlan((), ((0, 200), (300, 250), (1000, 200)), ())
    sm = smooth_path(detour, env)
    assert sm.polyline == ((0, 200), (1000, 200))
    assert sm.total_length < detour.total_length
    # dropping the apex would cut straight through the pillar
    around = WeavePlan((), ((0, 0), (500, 120), (1000, 0)), ())
    assert smooth_path(around, env).polyline == around.polyline


def test_waypoint_ties_go_to_lower_index():
    # chord through the centre of a square: two nodes tie on each side
    env = EnvironmentMap(rectangle(-200, -200, 1200, 200), (rectangle(450, -50, 550, 50),))
    g = build_roadmap(env, 10.0)
    a = insert_point(g, env, (0, 0))
    b = insert_point(g, env, (1000, 0))
    for side in (Side.ABOVE, Side.BELOW):
        (w,) = select_weave_waypoints(env, g, a, b, [0], side)
        cands = [i for i in g.nodes_of(0) if signed_offset((0, 0), (1000, 0), g.nodes[i].position) * side.sign > 0]
        offs = {i: abs(signed_offset((0, 0), (1000, 0), g.nodes[i].position)) for i in cands}
        best = min(offs.values())
        assert w.node == min(i for i in cands if offs[i] <= best + 1e-9)
        assert len([i for i in cands if offs[i] <= best + 1e-9]) == 2
