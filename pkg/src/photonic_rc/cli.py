"""``photonic-rc`` command line.

Exit codes: 0 success, 2 reservoir non-convergence, 3 configuration error.
"""
import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ExperimentConfig, load_config
from .errors import ConfigError, NonConvergence
from . import harness

EXIT_OK, EXIT_NONCONVERGENCE, EXIT_CONFIG = 0, 2, 3


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_value("run.seed", args.seed)
    if getattr(args, "out", None) is not None:
        cfg = cfg.with_value("run.out_dir", args.out)
    return cfg


def _parse_values(text):
    return [v.strip() for v in text.split(",") if v.strip()] if text else []


def cmd_run(args):
    cfg = _load(args)
    bundle = harness.run_experiment(cfg, cfg.out_dir, save_matrices=args.save_matrices)
    m, t = bundle.summary["metrics"], bundle.summary["training"]
    print(f"{bundle.summary['task']}: eps={t['final_eps']:.4g} after {t['epochs_used']} epochs "
          f"({t['stop_reason']}); mean SER={m['mean_ser']}; residual std={m['mean_residual_std']:.4g}")
    print(f"results written to {cfg.out_dir}")


def cmd_sweep(args):
    cfg = _load(args)
    rows = harness.sweep(cfg, args.param, _parse_values(args.values), args.replicates, cfg.out_dir)
    for row in rows:
        print(f"{row['param']}={row['value']} seed={row['seed']}: eps={row['final_eps']:.4g} "
              f"ser={row['mean_ser']} std={row['mean_residual_std']:.4g}")
    print(f"{len(rows)} runs; table at {Path(cfg.out_dir) / 'sweep.csv'}")


def cmd_render(args):
    cfg = _load(args)
    csv_path, pgm_path = harness.render_near_field(cfg, args.digit)
    print(csv_path)
    print(pgm_path)


def cmd_oracle(args):
    cfg = _load(args)
    print(json.dumps(harness.oracle_comparison(cfg, args.nodes), indent=2))


def build_parser():
    parser = argparse.ArgumentParser(prog="photonic-rc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--config", help="flat 'section.key = value' file (defaults if omitted)")
        p.add_argument("--seed", type=int, help="override run.seed")
        p.add_argument("--out", help="override run.out_dir")
        p.set_defaults(func=func)
        return p

    p = add("run", cmd_run, "train and test one task")
    p.add_argument("--save-matrices", action="store_true", help="also write fiber.bin and imaging.bin")
    p = add("sweep", cmd_sweep, "repeat runs over values of one config key")
    p.add_argument("--param", required=True, help="dotted key, e.g. reservoir.noise_sigma")
    p.add_argument("--values", default="", help="comma-separated values")
    p.add_argument("--replicates", type=int, default=1, help="seeds per value")
    p = add("render", cmd_render, "write near-field CSV/PGM for one digit")
    p.add_argument("--digit", type=int, required=True)
    p = add("oracle", cmd_oracle, "compare greedy, exhaustive and ridge on a small reservoir")
    p.add_argument("--nodes", type=int, default=8)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NonConvergence as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
