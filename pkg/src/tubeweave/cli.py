"""``tubeweave`` command line.

Every command reads and writes the JSON formats in :mod:`tubeweave.io`.
Results go to ``-o/--out`` when given, else to stdout.  Failures print one
line to stderr::

    error: code=<exit code> kind=<kind> msg=<message>
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings
from pathlib import Path

from . import io as tio
from .demo import demo_layout, run_demo
from .geometry import (
    InvalidGeometry,
    PlacementError,
    Point2,
    dilate_environment,
    random_environment,
    rectangle,
)
from .render import RenderStyle, render_svg
from .roadmap import EmptyRoadmap, PointRejected, build_roadmap
from .structural import (
    AIR_DENSITY,
    GALE_WIND_SPEED,
    LDPE_DENSITY,
    BucklingModel,
    LoadSpec,
    RankWeights,
    feasibility,
    fit_buckling_model,
    material_estimate,
    plan_scores,
    rank_plans,
)
from .tube import (
    PSI,
    ConformError,
    DiscretizationError,
    FoldCommand,
    NoFoldSolution,
    ReelExhausted,
    TubeSpec,
    axis_grid,
    conform_plan,
    discretize_plan,
    perturbation_robustness,
    simulate_schedule,
    verify_discretized,
)
from .weave import Side, TargetsPolicy, WeaveError, all_pairs_plans, plan_between

CONFIG_ENV = "TUBEWEAVE_CONFIG"

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_NOT_FOUND = 3
EXIT_SCHEMA = 4
EXIT_PLANNING = 5
EXIT_CHECK_FAILED = 6

EXIT_HELP = f"""exit codes:
  {EXIT_OK}  success
  {EXIT_INTERNAL}  internal error
  {EXIT_USAGE}  usage error (unknown flag, bad value, missing input)
  {EXIT_NOT_FOUND}  input file not found
  {EXIT_SCHEMA}  input file or geometry fails validation
  {EXIT_PLANNING}  no plan / schedule could be produced
  {EXIT_CHECK_FAILED}  --strict and the verification or feasibility check failed

config: --config FILE (or ${CONFIG_ENV}) is a JSON object whose "defaults"
section and per-command sections (e.g. "plan") set flag defaults by dest
name, e.g. {{"plan": {{"offset_mm": 10}}}}.  Flags always win.
"""


class CliError(Exception):
    def __init__(self, code: int, kind: str, msg: str):
        super().__init__(msg)
        self.code = code
        self.kind = kind


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(EXIT_USAGE, "usage", message)


# --- helpers ----------------------------------------------------------------


def _point(text: str) -> Point2:
    try:
        x, y = (float(v) for v in text.split(","))
        return Point2(x, y)
    except (ValueError, InvalidGeometry):
        raise argparse.ArgumentTypeError(f"expected X,Y in mm, got {text!r}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated indices, got {text!r}")


def _fraction(text: str) -> float:
    v = float(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError("fraction must be in (0, 1]")
    return v


def _load(path, reader):
    p = Path(path)
    if not p.is_file():
        raise CliError(EXIT_NOT_FOUND, "not_found", f"{path}: no such file")
    return reader(tio.read_json(p))


def _plans_from_doc(doc) -> list:
    if isinstance(doc, dict) and "plans" in doc:
        return [tio.plan_from_dict(p) for p in doc["plans"]]
    return [tio.plan_from_dict(doc)]


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, doc) -> None:
    _emit(args, tio.dumps(doc))


def _tube(args) -> TubeSpec:
    l_thread = args.l_thread_mm if args.l_thread_mm is not None else args.l_fold_mm
    return TubeSpec(
        d_flat=args.d_flat_mm, t=args.t_mm, pressure=args.pressure_pa, fold_spacing=args.s_mm,
        l_fold=args.l_fold_mm, l_thread=l_thread, reel_length=args.reel_mm, theta_override=args.theta_rad,
    )


def _tube_parent() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("tube")
    g.add_argument("--d-flat-mm", type=float, default=76.2, help="lay-flat diameter (default 76.2 = 3 in)")
    g.add_argument("--t-mm", type=float, default=0.0508, help="wall thickness (default 0.0508 = 2 mil)")
    g.add_argument("--pressure-pa", type=float, default=8 * PSI, help="inflation pressure (default 8 PSI)")
    g.add_argument("--s-mm", type=float, default=30.0, help="fold spacing (default 30)")
    g.add_argument("--l-fold-mm", type=float, default=40.0, help="fold length (default 40)")
    g.add_argument("--l-thread-mm", type=float, default=None, help="thread length (default = fold length)")
    g.add_argument("--reel-mm", type=float, default=10000.0, help="tubing on the reel (default 10000)")
    g.add_argument("--theta-rad", type=float, default=None, help="calibrated fold angle, overrides the model")
    return p


def _common_parent() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="seed for stochastic steps (default 0)")
    p.add_argument("-o", "--out", default=None, help="output file (default stdout)")
    return p


# --- commands ---------------------------------------------------------------


def cmd_gen_env(args) -> int:
    bounds = rectangle(0.0, 0.0, args.width_mm, args.height_mm)
    env = random_environment(
        args.seed, args.n, bounds, (args.min_size_mm, args.max_size_mm), min_gap=args.min_gap_mm,
        name=f"random-{args.seed}-{args.n}",
    )
    _emit_json(args, tio.env_to_dict(env))
    return EXIT_OK


def cmd_demo(args) -> int:
    layout = demo_layout(args.pillar_mm, args.pitch_mm, args.sides, args.offset_mm, args.margin_mm, args.clearance_mm)
    run = run_demo(layout, _tube(args))
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tio.write_json(tio.env_to_dict(layout.env), out / "env.json")
    tio.write_json(tio.plan_to_dict(run.conformed), out / "plan.json")
    tio.write_json(tio.schedule_to_dict(run.schedule), out / "schedule.json")
    tio.write_json(tio.rollout_to_dict(run.rollout, run.report), out / "rollout.json")
    sys.stdout.write(f"labels={','.join(layout.labels)} passed={run.report.passed} out={out}\n")
    return EXIT_OK if run.report.passed or not args.strict else EXIT_CHECK_FAILED


def cmd_plan(args) -> int:
    env = _load(args.env, tio.env_from_dict)
    penv = dilate_environment(env, args.margin_mm, args.max_vertices) if args.margin_mm else env
    g = build_roadmap(penv, args.offset_mm, allow_empty=True)
    sides = {"above": Side.ABOVE, "below": Side.BELOW, "both": None}
    if args.all_pairs:
        policy = TargetsPolicy(
            first_side=sides[args.first_side], min_targets=args.min_targets, max_targets=args.max_targets,
            boundary_band=args.boundary_band_mm, sample_fraction=args.sample, seed=args.seed,
            smooth=not args.no_smooth,
        )
        res = all_pairs_plans(penv, g, policy)
        doc = {
            "pairs": res.pairs,
            "plans": [tio.plan_to_dict(p) for p in res.plans],
            "failures": [
                {"start": f.start, "end": f.end, "first_side": f.first_side.value, "reason": f.reason}
                for f in res.failures
            ],
        }
        if args.roadmap_out:
            tio.write_json(tio.roadmap_to_dict(g), args.roadmap_out)
        _emit_json(args, doc)
        return EXIT_OK
    if args.start is None or args.end is None:
        raise CliError(EXIT_USAGE, "usage", "plan needs --start and --end (or --all-pairs)")
    if args.first_side == "both":
        raise CliError(EXIT_USAGE, "usage", "--first-side both is only valid with --all-pairs")
    plan = plan_between(penv, g, args.start, args.end, args.targets, sides[args.first_side],
                        smooth=not args.no_smooth, plan_id=args.plan_id)
    if args.conform:
        plan = conform_plan(plan, env, _tube(args).theta, args.clearance_mm)
    if args.roadmap_out:
        tio.write_json(tio.roadmap_to_dict(g), args.roadmap_out)
    _emit_json(args, tio.plan_to_dict(plan))
    return EXIT_OK


def cmd_discretize(args) -> int:
    plan = _load(args.plan, tio.plan_from_dict)
    tube = _tube(args)
    if args.conform:
        if not args.env:
            raise CliError(EXIT_USAGE, "usage", "--conform needs --env")
        env = _load(args.env, tio.env_from_dict)
        plan = conform_plan(plan, env, tube.theta, args.clearance_mm)
    sched = discretize_plan(plan, tube, FoldCommand(args.policy), args.angle_tol)
    _emit_json(args, tio.schedule_to_dict(sched))
    return EXIT_OK


def cmd_simulate(args) -> int:
    sched = _load(args.schedule, tio.schedule_from_dict)
    roll = simulate_schedule(sched)
    report = None
    if args.env:
        env = _load(args.env, tio.env_from_dict)
        plan = _load(args.plan, tio.plan_from_dict) if args.plan else None
        contact = args.contact_mm if args.contact_mm is not None else math.inf
        report = verify_discretized(env, roll.polyline, args.clearance_mm, plan, contact)
    _emit_json(args, tio.rollout_to_dict(roll, report))
    if args.strict and report is not None and not report.passed:
        raise CliError(EXIT_CHECK_FAILED, "verification", "; ".join(report.failures))
    return EXIT_OK


def _buckling(args) -> BucklingModel:
    if args.buckling_samples:
        p = Path(args.buckling_samples)
        if not p.is_file():
            raise CliError(EXIT_NOT_FOUND, "not_found", f"{p}: no such file")
        doc = tio.read_json(p)
        samples = doc["samples"] if isinstance(doc, dict) else doc
        pressure = doc.get("pressure_pa", args.buckling_pressure_pa) if isinstance(doc, dict) else args.buckling_pressure_pa
        return fit_buckling_model(samples, pressure)
    if args.buckling_a is None or args.buckling_b is None:
        raise CliError(EXIT_USAGE, "usage",
                       "no buckling model: pass --buckling-a and --buckling-b, or --buckling-samples")
    return BucklingModel(args.buckling_a, args.buckling_b, args.buckling_pressure_pa)


def cmd_check(args) -> int:
    env = _load(args.env, tio.env_from_dict)
    plans = _load(args.plan, _plans_from_doc)
    sched = _load(args.schedule, tio.schedule_from_dict) if args.schedule else None
    tube = sched.tube if sched is not None else _tube(args)
    if args.q_n_per_m is not None:
        load = LoadSpec.direct(args.q_n_per_m)
    else:
        load = LoadSpec.wind(args.wind_ms, tube.d_infl, args.rho, args.drag)
    m = _buckling(args)
    if sched is not None and len(plans) != 1:
        raise CliError(EXIT_USAGE, "usage", "--schedule pairs with a single plan")
    reports = [feasibility(p, sched, env, tube, load, m, args.theta_max_rad, args.layers) for p in plans]
    docs = [tio.feasibility_to_dict(r) for r in reports]
    _emit_json(args, docs[0] if len(docs) == 1 else {"reports": docs})
    if args.strict and not all(r.passed for r in reports):
        raise CliError(EXIT_CHECK_FAILED, "feasibility", "at least one plan is infeasible")
    return EXIT_OK


def cmd_perturb(args) -> int:
    env = _load(args.env, tio.env_from_dict)
    sched = _load(args.schedule, tio.schedule_from_dict)
    plan = _load(args.plan, tio.plan_from_dict) if args.plan else None
    if not 0 <= args.obstacle < len(env.obstacles):
        raise CliError(EXIT_USAGE, "usage", f"obstacle {args.obstacle} out of range")
    grid = axis_grid(args.max_mm, args.step_mm)
    rep = perturbation_robustness(env, sched, args.obstacle, grid, plan, args.clearance_mm, args.contact_mm)
    _emit_json(args, tio.perturbation_to_dict(rep))
    return EXIT_OK


def cmd_rank(args) -> int:
    reports = []
    for path in args.reports:
        doc = _load(path, lambda d: d)
        for r in doc["reports"] if isinstance(doc, dict) and "reports" in doc else [doc]:
            try:
                reports.append(tio.feasibility_from_dict(r))
            except (KeyError, TypeError, ValueError) as exc:
                raise tio.SchemaError(f"{path}: {exc}") from exc
    w = RankWeights(args.w_length, args.w_bend, args.w_clearance, args.w_margin)
    order = rank_plans(reports, w)
    feasible = [r for r in reports if r.passed]
    scores = dict(zip([r.plan_id for r in feasible], plan_scores(feasible, w)))
    doc = {
        "weights": {"length": w.length, "bend": w.bend, "clearance": w.clearance, "span_margin": w.span_margin},
        "ranking": [{"plan_id": pid, "score": scores[pid]} for pid in order],
        "rejected": sorted(r.plan_id for r in reports if not r.passed),
    }
    _emit_json(args, doc)
    return EXIT_OK


def cmd_render(args) -> int:
    env = _load(args.env, tio.env_from_dict) if args.env else None
    roadmap = None
    if args.roadmap:
        roadmap = _load(args.roadmap, tio.roadmap_from_dict)
    elif args.roadmap_offset_mm is not None:
        if env is None:
            raise CliError(EXIT_USAGE, "usage", "--roadmap-offset-mm needs --env")
        roadmap = build_roadmap(env, args.roadmap_offset_mm, allow_empty=True)
    plans = []
    for path in args.plan:
        plans += _load(path, _plans_from_doc)
    tubes = [simulate_schedule(_load(path, tio.schedule_from_dict)).polyline for path in args.schedule]
    svg = render_svg(env, roadmap, plans, tubes, RenderStyle(scale=args.scale), title=args.title)
    _emit(args, svg)
    return EXIT_OK


def cmd_material(args) -> int:
    est = material_estimate(args.height_mm, args.length_mm, _tube(args), args.rho_ldpe)
    doc = {"tubes": est.tubes, "volume_cm3": est.volume_cm3, "mass_g": est.mass_g}
    if args.out:
        tio.write_json(doc, args.out)
    sys.stdout.write(f"N={est.tubes} volume_cm3={est.volume_cm3:.2f} mass_g={est.mass_g:.1f}\n")
    return EXIT_OK


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common, tube = _common_parent(), _tube_parent()
    top = _Parser(
        prog="tubeweave",
        description="Weave-path planning for inflatable tube barriers.",
        epilog=EXIT_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    top.add_argument("--config", default=None, help=f"JSON config file (default ${CONFIG_ENV})")
    sub = top.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, func, help, parents=(common,)):
        p = sub.add_parser(name, help=help, description=help, parents=list(parents), epilog=EXIT_HELP,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.set_defaults(func=func)
        return p

    p = add("gen-env", cmd_gen_env, "write a seeded random obstacle map")
    p.add_argument("--n", type=int, default=12, help="number of obstacles (default 12)")
    p.add_argument("--width-mm", type=float, default=2000.0)
    p.add_argument("--height-mm", type=float, default=2000.0)
    p.add_argument("--min-size-mm", type=float, default=60.0, help="smallest obstacle circumradius")
    p.add_argument("--max-size-mm", type=float, default=150.0, help="largest obstacle circumradius")
    p.add_argument("--min-gap-mm", type=float, default=0.0, help="minimum gap between obstacles")

    p = add("demo", cmd_demo, "plan, discretise and verify the three-pillar demo", (common, tube))
    p.add_argument("--out-dir", default="demo_out", help="directory for env/plan/schedule/rollout files")
    p.add_argument("--pillar-mm", type=float, default=100.0, help="pillar diameter")
    p.add_argument("--pitch-mm", type=float, default=400.0, help="pillar spacing")
    p.add_argument("--sides", type=int, default=12, help="polygon sides per pillar")
    p.add_argument("--offset-mm", type=float, default=10.0, help="roadmap node offset")
    p.add_argument("--margin-mm", type=float, default=25.0, help="pillar growth for planning")
    p.add_argument("--clearance-mm", type=float, default=20.0, help="clearance kept when fitting folds")
    p.add_argument("--strict", action="store_true", help="exit 6 if verification fails")

    p = add("plan", cmd_plan, "plan a weave between two points, or for all node pairs", (common, tube))
    p.add_argument("--env", required=True, help="environment file")
    p.add_argument("--start", type=_point, default=None, help="start X,Y in mm")
    p.add_argument("--end", type=_point, default=None, help="end X,Y in mm")
    p.add_argument("--targets", type=_int_list, default=None,
                   help="obstacle indices to weave, in order (default: obstacles on the corridor)")
    p.add_argument("--first-side", choices=["above", "below", "both"], default="above")
    p.add_argument("--offset-mm", type=float, default=10.0, help="roadmap node offset d (default 10)")
    p.add_argument("--margin-mm", type=float, default=0.0, help="grow obstacles by this before planning")
    p.add_argument("--max-vertices", type=int, default=None, help="vertex cap for grown obstacles")
    p.add_argument("--no-smooth", action="store_true", help="skip shortcut smoothing")
    p.add_argument("--conform", action="store_true", help="snap turns to whole fold counts")
    p.add_argument("--clearance-mm", type=float, default=0.0, help="clearance kept by --conform")
    p.add_argument("--plan-id", default="", help="id stored in the plan file")
    p.add_argument("--roadmap-out", default=None, help="also write the roadmap here")
    p.add_argument("--all-pairs", action="store_true", help="plan between every ordered node pair")
    p.add_argument("--sample", type=_fraction, default=1.0, help="fraction of pairs to keep (uses --seed)")
    p.add_argument("--min-targets", type=int, default=1)
    p.add_argument("--max-targets", type=int, default=None)
    p.add_argument("--boundary-band-mm", type=float, default=None,
                   help="only pair nodes this close to the boundary")

    p = add("discretize", cmd_discretize, "turn a plan into fold-release commands", (common, tube))
    p.add_argument("--plan", required=True)
    p.add_argument("--env", default=None, help="environment (needed for --conform)")
    p.add_argument("--policy", choices=["keep", "both"], default="keep", help="straight-run fold handling")
    p.add_argument("--angle-tol", type=float, default=0.1, help="max per-turn residual, rad")
    p.add_argument("--conform", action="store_true", help="snap turns to whole fold counts first")
    p.add_argument("--clearance-mm", type=float, default=0.0)

    p = add("simulate", cmd_simulate, "roll out a schedule, optionally verifying it against a map")
    p.add_argument("--schedule", required=True)
    p.add_argument("--env", default=None)
    p.add_argument("--plan", default=None, help="source plan, enables the weave side check")
    p.add_argument("--clearance-mm", type=float, default=0.0)
    p.add_argument("--contact-mm", type=float, default=None, help="max distance counted as contact")
    p.add_argument("--strict", action="store_true", help="exit 6 if verification fails")

    p = add("check", cmd_check, "feasibility report: spans, bend budget, reel, material", (common, tube))
    p.add_argument("--plan", required=True, help="plan file or all-pairs batch")
    p.add_argument("--env", required=True)
    p.add_argument("--schedule", default=None)
    p.add_argument("--wind-ms", type=float, default=GALE_WIND_SPEED, help="wind speed (default 39 mph)")
    p.add_argument("--rho", type=float, default=AIR_DENSITY, help="air density kg/m^3")
    p.add_argument("--drag", type=float, default=1.0, help="drag coefficient")
    p.add_argument("--q-n-per-m", type=float, default=None, help="direct line load, replaces wind")
    p.add_argument("--buckling-a", type=float, default=None, help="capacity at zero span, N/m")
    p.add_argument("--buckling-b", type=float, default=None, help="capacity decay, 1/m")
    p.add_argument("--buckling-pressure-pa", type=float, default=8 * PSI)
    p.add_argument("--buckling-samples", default=None, help="JSON [[span_m, q_N_per_m], ...] to fit")
    p.add_argument("--theta-max-rad", type=float, default=2 * math.pi, help="cumulative bend budget")
    p.add_argument("--layers", type=int, default=1, help="stacked tubes for the material estimate")
    p.add_argument("--strict", action="store_true", help="exit 6 if any plan is infeasible")

    p = add("perturb", cmd_perturb, "move one obstacle over an axis grid and re-verify")
    p.add_argument("--env", required=True)
    p.add_argument("--schedule", required=True)
    p.add_argument("--plan", default=None)
    p.add_argument("--obstacle", type=int, required=True, help="obstacle index")
    p.add_argument("--max-mm", type=float, default=100.0)
    p.add_argument("--step-mm", type=float, default=5.0)
    p.add_argument("--clearance-mm", type=float, default=0.0)
    p.add_argument("--contact-mm", type=float, default=None)

    p = add("rank", cmd_rank, "drop infeasible plans and rank the rest")
    p.add_argument("reports", nargs="+", help="feasibility report files")
    p.add_argument("--w-length", type=float, default=1.0)
    p.add_argument("--w-bend", type=float, default=0.0)
    p.add_argument("--w-clearance", type=float, default=0.0)
    p.add_argument("--w-margin", type=float, default=0.0)

    p = add("render", cmd_render, "draw maps, roadmaps, plans and tubes as SVG")
    p.add_argument("--env", default=None)
    p.add_argument("--roadmap", default=None, help="roadmap file")
    p.add_argument("--roadmap-offset-mm", type=float, default=None, help="build and draw a roadmap")
    p.add_argument("--plan", action="append", default=[], help="plan or batch file (repeatable)")
    p.add_argument("--schedule", action="append", default=[], help="schedule to roll out (repeatable)")
    p.add_argument("--scale", type=float, default=0.5, help="px per mm")
    p.add_argument("--title", default=None)

    p = add("material", cmd_material, "film volume and mass for a stacked-tube wall", (common, tube))
    p.add_argument("--height-mm", type=float, required=True)
    p.add_argument("--length-mm", type=float, required=True)
    p.add_argument("--rho-ldpe", type=float, default=LDPE_DENSITY, help="film density g/cm^3")
    return top


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    path = known.config or os.environ.get(CONFIG_ENV)
    if not path:
        return
    if not Path(path).is_file():
        raise CliError(EXIT_NOT_FOUND, "not_found", f"{path}: no such config file")
    cfg = tio.read_json(path)
    if not isinstance(cfg, dict):
        raise tio.SchemaError("config: expected an object")
    subs = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for key in cfg:
        if key != "defaults" and key not in subs.choices:
            raise tio.SchemaError(f"config: unknown section {key!r}")
    for name, sp in subs.choices.items():
        values = {**cfg.get("defaults", {}), **cfg.get(name, {})}
        dests = {a.dest for a in sp._actions}
        own = {}
        for k, v in values.items():
            k = k.replace("-", "_")
            if k in dests:
                own[k] = v
            elif k in cfg.get(name, {}):
                raise tio.SchemaError(f"config: {name}: unknown option {k!r}")
        sp.set_defaults(**own)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser = build_parser()
        _apply_config(parser, argv)
        args = parser.parse_args(argv)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return args.func(args)
    except CliError as exc:
        return _fail(exc.code, exc.kind, str(exc))
    except FileNotFoundError as exc:
        return _fail(EXIT_NOT_FOUND, "not_found", f"{exc.filename}: no such file")
    except (tio.SchemaError, InvalidGeometry, json.JSONDecodeError) as exc:
        return _fail(EXIT_SCHEMA, "schema", str(exc))
    except (WeaveError, EmptyRoadmap, PointRejected, DiscretizationError, ConformError, ReelExhausted,
            NoFoldSolution, PlacementError) as exc:
        return _fail(EXIT_PLANNING, type(exc).__name__, str(exc))
    except ValueError as exc:
        return _fail(EXIT_USAGE, "value", str(exc))
    except Exception as exc:  # pragma: no cover - last resort
        return _fail(EXIT_INTERNAL, type(exc).__name__, str(exc))


def _fail(code: int, kind: str, msg: str) -> int:
    msg = " ".join(msg.split())
    sys.stderr.write(f"error: code={code} kind={kind} msg={msg}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
