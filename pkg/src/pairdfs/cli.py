"""Command-line entry point: ``pairdfs --config run.json [--out DIR]``.

Exit codes: 0 all verdicts pass, 2 config or I/O error, 3 numerical
contract violation, 4 at least one failed verdict.
"""

import argparse
import sys

import numpy as np

from .config import ConfigError, load_config
from .errors import CodeConstructionError, ContractViolation, ShapeError, ValidationError
from .scenarios import run_scenario

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_FAIL = 0, 2, 3, 4


def build_parser():
    p = argparse.ArgumentParser(
        prog="pairdfs",
        description="Run a paired-qubit DFS / gate-constraint scenario.",
    )
    p.add_argument("--config", required=True, help="scenario JSON file")
    p.add_argument("--out", help="output directory (overrides config 'output')")
    p.add_argument("--seed", type=int, help="override params.seed")
    p.add_argument("--tol-scale", type=float, default=1.0,
                   help="multiply every verdict tolerance (debugging only)")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        if args.seed < 0:
            print("config error: seed must be non-negative", file=sys.stderr)
            return EXIT_CONFIG
        cfg.params["seed"] = args.seed
    try:
        report = run_scenario(cfg, args.out, args.tol_scale)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ContractViolation, ShapeError, CodeConstructionError, ValidationError,
            np.linalg.LinAlgError) as exc:
        print(f"numerical contract violation in {cfg.scenario}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(report.text(), end="")
    return EXIT_OK if report.all_passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
