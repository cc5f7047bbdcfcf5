"""Tune a few configuration fields on the synthetic benchmark and write the result."""

import argparse
import time

from groundtrack import synth
from groundtrack.config import TrackerConfig, format_config
from groundtrack.tuner import SearchSpace, format_trace, pattern_search, scene_objective

BOUNDS = {
    "alpha2": (0.0, 1.0, 0.3),
    "p_ss": (0.0, 0.99, 0.09),
    "p_dd": (0.0, 0.99, 0.09),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-iters", type=int, default=2)
    ap.add_argument("--frames", type=int, default=200)
    ap.add_argument("--metric", choices=["mota", "idf1"], default="mota")
    ap.add_argument("--out", default="tuned.cfg")
    ap.add_argument("--trace", default=None)
    args = ap.parse_args()

    base = TrackerConfig()
    objective = scene_objective(synth.benchmark_scenes(args.frames), args.metric, base)
    t0 = time.perf_counter()
    r = pattern_search(objective, SearchSpace.for_config(base, BOUNDS), args.max_iters)
    print(f"mean {args.metric}: {r.trace[0].value:.4f} -> {r.value:.4f} in {time.perf_counter() - t0:.1f} s")
    print(r.best)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(format_config(base.replace(**r.best)))
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(format_trace(r.trace))


if __name__ == "__main__":
    main()
