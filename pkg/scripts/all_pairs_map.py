"""All-pairs weave plans on a seeded 12-obstacle map, sampled and rendered."""

import argparse
import time
from pathlib import Path

from tubeweave import io as tio
from tubeweave.geometry import random_environment, rectangle
from tubeweave.render import render_svg
from tubeweave.roadmap import build_roadmap
from tubeweave.weave import TargetsPolicy, all_pairs_plans


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--sample", type=float, default=0.1)
    ap.add_argument("--offset-mm", type=float, default=10.0)
    ap.add_argument("--out-dir", type=Path, default=Path("out/all_pairs"))
    args = ap.parse_args()

    env = random_environment(args.seed, args.n, rectangle(0, 0, 2000, 2000), (60, 150))
    g = build_roadmap(env, args.offset_mm)
    t0 = time.perf_counter()
    res = all_pairs_plans(env, g, TargetsPolicy(sample_fraction=args.sample, seed=args.seed))
    dt = time.perf_counter() - t0
    print(f"{len(g)} nodes, {len(g.edges())} edges")
    print(f"{res.pairs} pairs, {len(res.plans)} plans, {len(res.failures)} failures in {dt:.1f}s")

    args.out_dir.mkdir(parents=True, exist_ok=True)
    tio.write_json(tio.env_to_dict(env), args.out_dir / "env.json")
    tio.write_json({"plans": [tio.plan_to_dict(p) for p in res.plans]}, args.out_dir / "plans.json")
    (args.out_dir / "all_pairs.svg").write_text(render_svg(env, g, res.plans, title="all pairs"))


if __name__ == "__main__":
    main()
