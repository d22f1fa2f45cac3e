"""Command line entry point: ``rmshift {run,validate,variance,plot-script}``."""
from __future__ import annotations

import argparse
import logging
import sys
import time
import warnings

from .config import read_config
from .errors import (AdmissibilityError, ConfigError, NumericError, ReplicationError,
                     RmShiftError)
from .shapes import asymptotic_variance

log = logging.getLogger("rmshift")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _load(args):
    cfg = read_config(args.config)
    if getattr(args, "reps_override", None) is not None:
        cfg = cfg.with_overrides(n_reps=args.reps_override)
    if getattr(args, "steps_override", None) is not None:
        cfg = cfg.with_overrides(n_steps=args.steps_override)
    cfg.validate(strict=args.strict)
    return cfg


def cmd_run(args):
    from .outputs import write_outputs
    from .simulate import run_experiment

    cfg = _load(args)
    start = time.perf_counter()
    summary, reps = run_experiment(cfg, jobs=args.jobs, return_reps=True)
    elapsed = time.perf_counter() - start
    manifest = write_outputs(summary, reps, args.out_dir, cfg, elapsed)
    print(f"{cfg.n_reps} replications x {cfg.n_steps} steps in {elapsed:.1f}s")
    print(f"var(sqrt(n) error) = {summary.empirical_var_standardized:.6g}"
          + (f"  xi2 = {summary.xi2_theoretical:.6g}" if summary.xi2_theoretical else ""))
    if summary.ks_pvalue is not None:
        print(f"KS statistic = {summary.ks_statistic:.4f}  p = {summary.ks_pvalue:.4g}")
    print(f"wrote {len(manifest.artifact_paths)} files to {args.out_dir}")
    return EXIT_OK


def cmd_validate(args):
    cfg = _load(args)
    print(f"ok: {args.config} (digest {cfg.digest()[:16]})")
    return EXIT_OK


def cmd_variance(args):
    cfg = _load(args)
    q = asymptotic_variance(cfg.theta_true, cfg.shape, cfg.density, cfg.noise.sigma)
    print(f"f1 = {q.f1:.12g}")
    print(f"phi(theta) = {q.phi_at_theta:.12g}")
    print(f"xi2 = {q.xi2:.12g}")
    return EXIT_OK


def cmd_plot_script(args):
    from .outputs import plot_script

    print(plot_script(args.out_dir))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="rmshift", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("config", help="YAML or JSON experiment file")
        p.add_argument("--strict", action="store_true",
                       help="treat admissibility warnings as errors")
        return p

    run = with_config(sub.add_parser("run", help="run an experiment"))
    run.add_argument("--out-dir", default="results")
    run.add_argument("--reps-override", type=int)
    run.add_argument("--steps-override", type=int)
    run.add_argument("--jobs", type=int, default=1, help="parallel replication workers")
    run.set_defaults(func=cmd_run)

    with_config(sub.add_parser("validate", help="check a config")).set_defaults(
        func=cmd_validate)
    with_config(sub.add_parser("variance", help="print f1, phi(theta) and xi2")).set_defaults(
        func=cmd_variance)

    plot = sub.add_parser("plot-script", help="write a gnuplot script for an output dir")
    plot.add_argument("out_dir")
    plot.set_defaults(func=cmd_plot_script)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            try:
                return args.func(args)
            finally:
                for w in caught:
                    print(f"warning: {w.message}", file=sys.stderr)
    except (ConfigError, AdmissibilityError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, ReplicationError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (RmShiftError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
