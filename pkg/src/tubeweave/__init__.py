"""Weave-path planning for everting inflatable tube barriers."""

from .geometry import EnvironmentMap, Point2, Polygon, random_environment
from .roadmap import RoadmapGraph, build_roadmap, shortest_path
from .structural import BucklingModel, LoadSpec, feasibility, material_estimate, rank_plans, wind_line_load
from .tube import FoldCommand, FoldSchedule, TubeSpec, discretize_plan, fold_angle, simulate_schedule
from .weave import Side, WeavePlan, plan_between, smooth_path

__version__ = "0.1.0"

__all__ = [
    "EnvironmentMap", "Point2", "Polygon", "random_environment",
    "RoadmapGraph", "build_roadmap", "shortest_path",
    "BucklingModel", "LoadSpec", "feasibility", "material_estimate", "rank_plans", "wind_line_load",
    "FoldCommand", "FoldSchedule", "TubeSpec", "discretize_plan", "fold_angle", "simulate_schedule",
    "Side", "WeavePlan", "plan_between", "smooth_path",
]
