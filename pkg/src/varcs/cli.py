"""Command-line entry point: ``varcs track|simulate|compare|plot``."""

import argparse
import logging
import math
import sys

import numpy as np

from . import __version__
from .baselines import DecoupledVarianceTracker, MPTracker
from .config import TrackerConfig
from .hilbert import HilbertVarianceTracker, check_ball
from .sim.config_file import default_seed, load_experiment
from .sim.harness import METHODS, ExperimentSpec, coverage_and_width
from .sim.io import csv_text, emit_csv, emit_svg, parse_csv
from .variance_cs import VarianceConfidenceSequence

log = logging.getLogger("varcs")

TRACK_METHODS = ("eb", "alt", "double-eb", "decoupled", "mp", "hilbert")


def _positive_int(text):
    v = int(float(text))
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _read_observations(path, dim):
    """Yield ``(line_number, observation)``; ``#`` comments and blanks skipped."""
    fh = sys.stdin if path == "-" else open(path, encoding="utf-8")
    try:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                vals = [float(v) for v in line.split(",")]
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number: {line!r}") from None
            if dim is None:
                if len(vals) != 1:
                    raise ValueError(f"{path}:{lineno}: expected one value, got {len(vals)}"
                                     " (use --dim for vectors)")
                x = vals[0]
                if not 0.0 <= x <= 1.0:
                    raise ValueError(f"{path}:{lineno}: observation {x} outside [0, 1]")
                yield lineno, x
            else:
                if len(vals) != dim:
                    raise ValueError(f"{path}:{lineno}: expected {dim} coordinates, "
                                     f"got {len(vals)}")
                try:
                    x = check_ball(np.array(vals))
                except ValueError as exc:
                    raise ValueError(f"{path}:{lineno}: {exc}") from None
                yield lineno, x
    finally:
        if fh is not sys.stdin:
            fh.close()


def _make_tracker(args, cfg):
    m = args.method
    if args.dim is not None and m not in ("eb", "hilbert"):
        raise ValueError(f"method {m!r} does not take vector input")
    if m == "hilbert" or args.dim is not None:
        return HilbertVarianceTracker(args.dim or 1, cfg)
    if m == "decoupled":
        return DecoupledVarianceTracker(cfg)
    if m == "mp":
        return MPTracker(cfg.alpha, cfg.cap)
    variant = {"eb": "gated", "alt": "alt", "double-eb": "double-eb"}[m]
    return VarianceConfidenceSequence(cfg, lower_variant=variant)


def cmd_track(args):
    if args.mode == "ci" and args.horizon is None:
        raise ValueError("--mode ci needs --horizon")
    if args.method == "double-eb" and args.horizon is None:
        raise ValueError("double-eb needs --horizon")
    # scalar data for the vector tracker is moved into the ball by y - 1/2
    shift = args.method == "hilbert" and args.dim is None
    cfg = TrackerConfig(alpha=args.alpha, mode=args.mode, horizon=args.horizon,
                        split=args.split, cap=args.cap,
                        running_intersection=args.intersect)
    tracker = _make_tracker(args, cfg)
    out = sys.stdout
    out.write("t,lower,upper,std_lower,std_upper\n")
    for _, x in _read_observations(args.input, args.dim):
        tracker.update(np.array([x - 0.5]) if shift else x)
        iv = tracker.interval()
        if args.mode == "ci" and iv.t != args.horizon and not args.all:
            continue
        out.write(f"{iv.t},{iv.lower!r},{iv.upper!r},{math.sqrt(iv.lower)!r},"
                  f"{math.sqrt(iv.upper)!r}\n")
    return 0


def _finish(result, csv_path, svg_path):
    if csv_path:
        emit_csv(result, csv_path)
        log.info("wrote %s", csv_path)
    else:
        sys.stdout.write(csv_text(result))
    if svg_path:
        emit_svg(result, svg_path)
        log.info("wrote %s", svg_path)
    for (dist, method), secs in result.wall_time.items():
        log.info("%s %s: %.2fs", dist, method, secs)


def cmd_simulate(args):
    spec = load_experiment(args.config)
    if args.n_jobs is not None:
        spec.n_jobs = args.n_jobs
    result = coverage_and_width(spec)
    _finish(result, args.csv or spec.csv, args.svg or spec.svg)
    return 0


def cmd_compare(args):
    from .sim.config_file import log_grid

    methods = tuple(m.strip() for m in args.methods.split(",") if m.strip())
    spec = ExperimentSpec(streams=("uniform", "beta(2,6)", "beta(5,5)"), methods=methods,
                          alpha=args.alpha, replications=args.replications,
                          checkpoints=log_grid(10, args.horizon, args.points),
                          split=args.split, scale="std",
                          seed=default_seed() if args.seed is None else args.seed,
                          n_jobs=args.n_jobs)
    result = coverage_and_width(spec)
    _finish(result, args.csv, args.svg)
    return 0


def cmd_plot(args):
    rows = parse_csv(args.input)
    emit_svg(rows, args.output)
    log.info("wrote %s", args.output)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="varcs", description="Confidence sequences and "
                                "intervals for the variance of bounded data.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("track", help="stream a data file and print intervals as CSV")
    t.add_argument("--input", required=True, help="one observation per line ('-' = stdin)")
    t.add_argument("--method", default="eb", choices=TRACK_METHODS)
    t.add_argument("--alpha", type=float, default=0.05)
    t.add_argument("--mode", choices=("cs", "ci"), default="cs")
    t.add_argument("--horizon", type=_positive_int)
    t.add_argument("--dim", type=_positive_int,
                   help="vector observations with d coordinates (implies the hilbert method)")
    t.add_argument("--split", default="halves", choices=("halves", "log-horizon"))
    t.add_argument("--cap", type=float, default=1.0)
    t.add_argument("--intersect", action="store_true", help="report running intersection")
    t.add_argument("--all", action="store_true", help="in CI mode print every t, not only n")
    t.set_defaults(func=cmd_track)

    s = sub.add_parser("simulate", help="run an experiment file")
    s.add_argument("--config", required=True)
    s.add_argument("--csv", help="override the output CSV path")
    s.add_argument("--svg", help="override the output SVG path")
    s.add_argument("--n-jobs", type=int)
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("compare", help="EB against MP on the three reference streams")
    c.add_argument("--methods", default="EB-CI,MP",
                   help=f"comma-separated subset of {','.join(METHODS)}")
    c.add_argument("--alpha", type=float, default=0.05)
    c.add_argument("--replications", type=_positive_int, default=100)
    c.add_argument("--horizon", type=_positive_int, default=10000)
    c.add_argument("--points", type=_positive_int, default=13)
    c.add_argument("--split", default="halves", choices=("halves", "log-horizon"))
    c.add_argument("--seed", type=int)
    c.add_argument("--n-jobs", type=int, default=1)
    c.add_argument("--csv")
    c.add_argument("--svg")
    c.set_defaults(func=cmd_compare)

    g = sub.add_parser("plot", help="render a result CSV as SVG")
    g.add_argument("--input", required=True)
    g.add_argument("--output", required=True)
    g.set_defaults(func=cmd_plot)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"varcs {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
