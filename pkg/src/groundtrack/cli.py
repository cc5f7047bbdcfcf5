"""Command line front end: ``track``, ``synth``, ``eval`` and ``tune``.

Exit status is 0 on success, 2 for unusable input (bad flags, unparsable
files, invalid configuration) and 1 for any other failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io, metrics, synth, tuner
from .config import TrackerConfig, format_config, load_config
from .errors import IoError, TrackingError
from .tracker import run_sequence

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _base_config(path, fps: float) -> TrackerConfig:
    base = TrackerConfig.from_fps(fps)
    return load_config(path, base) if path else base


def cmd_track(args) -> int:
    cfg = _base_config(args.config, args.fps)
    dets = io.read_detections(args.dets)
    h0 = io.read_homography(args.homography)
    affines = io.read_affines(args.affines) if args.affines else io.AffineTable()
    results = run_sequence(dets, h0, affines, cfg)
    io.write_results(results, args.out)
    n_rows = sum(len(r.outputs) for r in results)
    print(f"wrote {n_rows} rows over {len(results)} frames to {args.out}")
    return EXIT_OK


def cmd_synth(args) -> int:
    spec = synth.crossing_scene(
        seed=args.seed,
        n_agents=args.agents,
        n_frames=args.frames,
        camera=args.camera,
        noise_px=args.noise_px,
        dropout=args.dropout,
    )
    scene = synth.generate(spec)
    out = io.write_bundle(args.out_dir, scene.detections, scene.h0, scene.affines, scene.gt_boxes())
    print(f"wrote {spec.n_frames}-frame scene with {spec.n_agents} agents to {out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    gt = io.boxes_by_frame(io.read_results(args.gt))
    res = io.boxes_by_frame(io.read_results(args.res))
    s = metrics.evaluate(gt, res, args.iou)
    print(f"MOTA {s.mota:.4f}")
    print(f"IDF1 {s.idf1:.4f}")
    print(f"IDSW {s.idsw}")
    print(f"FP {s.fp} FN {s.fn} GT {s.num_gt}")
    return EXIT_OK


def cmd_tune(args) -> int:
    init = load_config(args.config_init) if args.config_init else TrackerConfig()
    bounds = tuner.parse_bounds(Path(args.bounds).read_text(encoding="utf-8"), source=args.bounds)
    space = tuner.SearchSpace.for_config(init, bounds)
    objective = tuner.scene_objective(synth.benchmark_scenes(args.frames), args.metric, init)
    result = tuner.pattern_search(objective, space, args.max_iters)
    best = init.replace(**result.best)
    print(f"best mean {args.metric.upper()} {result.value:.4f} after {result.iterations} iterations")
    text = format_config(best)
    if args.out:
        io.write_text(args.out, text)
    else:
        sys.stdout.write(text)
    if args.trace:
        io.write_text(args.trace, tuner.format_trace(result.trace))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="groundtrack", description="Ground-plane multi-object tracker.")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("track", help="track detections and write MOTChallenge results")
    t.add_argument("--dets", required=True)
    t.add_argument("--homography", required=True)
    t.add_argument("--affines")
    t.add_argument("--config")
    t.add_argument("--out", required=True)
    t.add_argument("--fps", type=float, default=20.0)
    t.set_defaults(func=cmd_track)

    s = sub.add_parser("synth", help="write a synthetic crossing scene bundle")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--agents", type=int, default=5)
    s.add_argument("--frames", type=int, default=300)
    s.add_argument("--camera", choices=["static", "pan"], default="pan")
    s.add_argument("--noise-px", type=float, default=1.0)
    s.add_argument("--dropout", type=float, default=0.1)
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_synth)

    e = sub.add_parser("eval", help="score results against ground truth")
    e.add_argument("--gt", required=True)
    e.add_argument("--res", required=True)
    e.add_argument("--iou", type=float, default=0.5)
    e.set_defaults(func=cmd_eval)

    u = sub.add_parser("tune", help="pattern search over the synthetic benchmark")
    u.add_argument("--config-init")
    u.add_argument("--bounds", required=True)
    u.add_argument("--metric", choices=["mota", "idf1"], default="mota")
    u.add_argument("--max-iters", type=int, default=200)
    u.add_argument("--frames", type=int, default=200, help="length of each benchmark scene")
    u.add_argument("--out", help="write the best configuration here instead of stdout")
    u.add_argument("--trace", help="write the evaluation trace CSV here")
    u.set_defaults(func=cmd_tune)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except IoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (TrackingError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
