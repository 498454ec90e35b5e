"""JSON file formats for environments, roadmaps, plans, schedules and reports."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .geometry import EnvironmentMap, InvalidGeometry, Point2, Polygon
from .roadmap import RoadmapGraph, RoadmapNode
from .structural import FeasibilityReport, MaterialEstimate, SpanResult
from .tube import FoldCommand, FoldSchedule, PerturbationReport, Rollout, TubeSpec, VerificationReport
from .weave import Direction, Side, WeavePlan, WeaveWaypoint


class SchemaError(ValueError):
    pass


def _num(v):
    # JSON has no infinity; null stands in for it
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _inf(v):
    return math.inf if v is None else float(v)


def _xy(p) -> list[float]:
    return [float(p[0]), float(p[1])]


def _require(d: dict, *keys: str, what: str):
    if not isinstance(d, dict):
        raise SchemaError(f"{what}: expected an object")
    for k in keys:
        if k not in d:
            raise SchemaError(f"{what}: missing field {k!r}")


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_json(doc, path) -> None:
    Path(path).write_text(dumps(doc))


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


# --- environment ------------------------------------------------------------


def env_to_dict(env: EnvironmentMap) -> dict:
    return {
        "name": env.name,
        "units": "mm",
        "boundary": [_xy(p) for p in env.boundary.vertices],
        "obstacles": [[_xy(p) for p in o.vertices] for o in env.obstacles],
    }


def env_from_dict(d: dict) -> EnvironmentMap:
    _require(d, "boundary", "obstacles", what="environment")
    if d.get("units", "mm") != "mm":
        raise SchemaError(f"environment: units must be 'mm', got {d.get('units')!r}")
    try:
        boundary = Polygon.from_points(d["boundary"])
        obstacles = []
        for i, pts in enumerate(d["obstacles"]):
            try:
                obstacles.append(Polygon.from_points(pts))
            except InvalidGeometry as exc:
                raise SchemaError(f"environment: obstacle {i}: {exc}") from exc
        return EnvironmentMap(boundary, tuple(obstacles), str(d.get("name", "env")))
    except SchemaError:
        raise
    except (InvalidGeometry, TypeError, ValueError) as exc:
        raise SchemaError(f"environment: {exc}") from exc


# --- roadmap ----------------------------------------------------------------


def roadmap_to_dict(g: RoadmapGraph) -> dict:
    return {
        "offset_mm": g.offset_d,
        "nodes": [
            {"x": n.position.x, "y": n.position.y, "obstacle": n.obstacle, "vertex": n.vertex, "tag": n.tag}
            for n in g.nodes
        ],
        "adjacency": np.asarray(g.adjacency, float).tolist(),
    }


def roadmap_from_dict(d: dict) -> RoadmapGraph:
    _require(d, "offset_mm", "nodes", "adjacency", what="roadmap")
    nodes = [RoadmapNode(Point2(n["x"], n["y"]), n.get("obstacle"), n.get("vertex"), n.get("tag")) for n in d["nodes"]]
    adj = np.asarray(d["adjacency"], float).reshape(len(nodes), len(nodes))
    if not np.allclose(adj, adj.T):
        raise SchemaError("roadmap: adjacency is not symmetric")
    return RoadmapGraph(nodes, adj, float(d["offset_mm"]))


# --- plans ------------------------------------------------------------------


def plan_to_dict(p: WeavePlan) -> dict:
    return {
        "plan_id": p.plan_id,
        "start": p.start,
        "end": p.end,
        "waypoints": [
            {
                "node": w.node,
                "side": w.side.value,
                "dir": w.direction.value,
                "obstacle": w.obstacle,
                "xy": None if w.position is None else _xy(w.position),
            }
            for w in p.waypoints
        ],
        "polyline": [_xy(q) for q in p.polyline],
        "contacted": list(p.contacted),
        "total_length_mm": p.total_length,
        "turn_angles_rad": list(p.turn_angles),
    }


def plan_from_dict(d: dict) -> WeavePlan:
    _require(d, "start", "end", "waypoints", "polyline", "contacted", what="plan")
    try:
        wps = tuple(
            WeaveWaypoint(
                int(w["node"]),
                Side(w["side"]),
                Direction(w["dir"]),
                w.get("obstacle"),
                None if w.get("xy") is None else Point2(*w["xy"]),
            )
            for w in d["waypoints"]
        )
        return WeavePlan(wps, tuple(d["polyline"]), tuple(d["contacted"]), int(d["start"]), int(d["end"]),
                         str(d.get("plan_id", "")))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"plan: {exc}") from exc


# --- tube and schedules -----------------------------------------------------


def tube_to_dict(t: TubeSpec) -> dict:
    d = {
        "d_flat_mm": t.d_flat,
        "t_mm": t.t,
        "pressure_pa": t.pressure,
        "s_mm": t.fold_spacing,
        "l_fold_mm": t.l_fold,
        "l_thread_mm": t.l_thread,
        "reel_mm": t.reel_length,
    }
    if t.theta_override is not None:
        d["theta_override_rad"] = t.theta_override
    return d


def tube_from_dict(d: dict) -> TubeSpec:
    _require(d, "d_flat_mm", "t_mm", "pressure_pa", "s_mm", "l_fold_mm", "l_thread_mm", "reel_mm", what="tube")
    try:
        return TubeSpec(
            d_flat=float(d["d_flat_mm"]), t=float(d["t_mm"]), pressure=float(d["pressure_pa"]),
            fold_spacing=float(d["s_mm"]), l_fold=float(d["l_fold_mm"]), l_thread=float(d["l_thread_mm"]),
            reel_length=float(d["reel_mm"]), theta_override=d.get("theta_override_rad"),
        )
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"tube: {exc}") from exc


def schedule_to_dict(s: FoldSchedule) -> dict:
    (x, y), h = s.base
    return {
        "tube": tube_to_dict(s.tube),
        "base": {"x": x, "y": y, "heading": h},
        "commands": [{"k": k, "cmd": c.value} for k, c in s.commands],
    }


def schedule_from_dict(d: dict) -> FoldSchedule:
    _require(d, "tube", "base", "commands", what="schedule")
    _require(d["base"], "x", "y", "heading", what="schedule base")
    try:
        cmds = tuple((int(c["k"]), FoldCommand(c["cmd"])) for c in d["commands"])
        base = (Point2(d["base"]["x"], d["base"]["y"]), float(d["base"]["heading"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"schedule: {exc}") from exc
    tube = tube_from_dict(d["tube"])
    try:
        return FoldSchedule(tube, cmds, base)
    except ValueError as exc:
        raise SchemaError(f"schedule: {exc}") from exc


# --- reports ----------------------------------------------------------------


def rollout_to_dict(r: Rollout, report: VerificationReport | None = None) -> dict:
    d = {"polyline": [_xy(p) for p in r.polyline], "heading": r.heading}
    if report is not None:
        d["verification"] = verification_to_dict(report)
    return d


def verification_to_dict(r: VerificationReport) -> dict:
    return {
        "passed": r.passed,
        "failures": r.failures,
        "collisions": list(r.collisions),
        "distances_mm": [_num(x) for x in r.distances],
        "min_clearance_mm": _num(r.min_clearance),
        "inside_boundary": r.inside_boundary,
        "sides": [
            {"obstacle": s.obstacle, "expected": s.expected.value, "observed": s.observed.value,
             "distance_mm": s.distance, "contacted": s.contacted}
            for s in r.sides
        ],
    }


def perturbation_to_dict(r: PerturbationReport) -> dict:
    return {
        "obstacle": r.obstacle,
        "clearance_mm": r.clearance,
        "contact_distance_mm": _num(r.contact_distance),
        "margins_mm": r.margins,
        "max_pass_mm": r.max_pass,
        "entries": [{"dx": e.dx, "dy": e.dy, "status": e.status, "reasons": list(e.reasons)} for e in r.entries],
    }


def feasibility_to_dict(r: FeasibilityReport) -> dict:
    return {
        "plan_id": r.plan_id,
        "passed": r.passed,
        "spans": [{"length_mm": s.length_mm, "q_n_per_m": s.q, "q_max_n_per_m": s.q_max, "passed": s.passed}
                  for s in r.spans],
        "spans_pass": r.spans_pass,
        "cumulative_bend_rad": r.cumulative_bend,
        "theta_max_rad": r.theta_max,
        "bend_pass": r.bend_pass,
        "tube_length_mm": r.tube_length,
        "reel_length_mm": r.reel_length,
        "reel_pass": r.reel_pass,
        "material": {"tubes": r.material.tubes, "volume_cm3": r.material.volume_cm3, "mass_g": r.material.mass_g},
        "total_length_mm": r.total_length,
        "min_clearance_mm": _num(r.min_clearance),
    }


def feasibility_from_dict(d: dict) -> FeasibilityReport:
    _require(d, "plan_id", "spans", "cumulative_bend_rad", "theta_max_rad", "tube_length_mm",
             "reel_length_mm", "material", "total_length_mm", "min_clearance_mm", what="feasibility report")
    m = d["material"]
    return FeasibilityReport(
        plan_id=str(d["plan_id"]),
        spans=tuple(SpanResult(s["length_mm"], s["q_n_per_m"], s["q_max_n_per_m"]) for s in d["spans"]),
        cumulative_bend=float(d["cumulative_bend_rad"]),
        theta_max=float(d["theta_max_rad"]),
        tube_length=float(d["tube_length_mm"]),
        reel_length=float(d["reel_length_mm"]),
        material=MaterialEstimate(int(m["tubes"]), float(m["volume_cm3"]), float(m["mass_g"])),
        total_length=float(d["total_length_mm"]),
        min_clearance=_inf(d["min_clearance_mm"]),
    )
