"""Command line entry point.

    fw-sliding run <config.json>
    fw-sliding bench <suite.json> [--parallel P]
    fw-sliding demo-segment
    fw-sliding lmo-check <family> <size> <trials> <seed>

Exit codes: 0 success/certified, 2 cap-terminated or failed suite rows,
1 errors.  ``FW_SLIDING_LOG`` (error, info or debug) sets the verbosity of
diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from ..core import FwSlidingError
from .checks import lmo_equivalence, segment_trajectory
from .config import ConfigError, load_json, load_run_config
from .runner import execute, exit_code, run_suite, write_outputs

TRAJECTORY_TOL = 1e-12


def _setup_logging() -> None:
    level = os.environ.get("FW_SLIDING_LOG", "error").upper()
    logging.basicConfig(stream=sys.stderr, level=getattr(logging, level, logging.ERROR),
                        format="%(levelname)s %(name)s: %(message)s")


def cmd_run(args) -> int:
    try:
        cfg = load_run_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        result, summary = execute(cfg)
    except FwSlidingError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    write_outputs(cfg, result, summary)
    print(json.dumps({k: summary[k] for k in ("algorithm", "termination", "outer_iters", "inner_lmo",
                                              "f_final", "cert_gap", "wolfe_gap")}))
    return exit_code(result)


def cmd_bench(args) -> int:
    try:
        suite, _ = load_json(args.suite)
        csv_text, report, code = run_suite(suite, parallel=args.parallel)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    outputs = suite.get("outputs", {})
    base = Path(args.suite).parent
    if outputs.get("aggregate_csv"):
        (base / outputs["aggregate_csv"]).write_text(csv_text)
    if outputs.get("report_json"):
        (base / outputs["report_json"]).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    sys.stdout.write(csv_text)
    for row in report["rows"]:
        for comp in row["comparisons"]:
            status = "PASS" if comp["pass"] else "FAIL"
            print(f"{status} {row['instance']}: {comp['lhs']}={comp['lhs_value']} {comp['op']} "
                  f"{comp['rhs']}={comp['rhs_value']}")
        for e in row["errors"]:
            print(f"ERROR {row['instance']} {e['algorithm']}: {e['error']}")
    return code


def cmd_demo_segment(args) -> int:
    ys, vertices = segment_trajectory(3)
    for k in range(1, 4):
        print(f"k={k}  x_k=({vertices[k - 1][0]:g}, {vertices[k - 1][1]:g})  "
              f"y_k=({ys[k][0]:.17g}, {ys[k][1]:.17g})")
    expected = {2: (1 / 3, 2 / 3), 3: (2 / 3, 1 / 3)}
    for k, target in expected.items():
        if np.max(np.abs(ys[k] - np.array(target))) > TRAJECTORY_TOL:
            print(f"FAIL: y_{k} = {ys[k].tolist()} differs from {target}", file=sys.stderr)
            return 1
    print("trajectory matches (1/3, 2/3) -> (2/3, 1/3)")
    return 0


def cmd_lmo_check(args) -> int:
    try:
        bad = lmo_equivalence(args.family, args.size, args.trials, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for m in bad:
        print(f"MISMATCH {m}")
    print(f"{args.family}: {'all trials agree' if not bad else f'{len(bad)} mismatches'}")
    return 1 if bad else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fw-sliding", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one config")
    r.add_argument("config")
    r.set_defaults(func=cmd_run)
    b = sub.add_parser("bench", help="run a suite of configs")
    b.add_argument("suite")
    b.add_argument("--parallel", type=int, default=1)
    b.set_defaults(func=cmd_bench)
    d = sub.add_parser("demo-segment", help="conditional gradient on the 2-d segment")
    d.set_defaults(func=cmd_demo_segment)
    c = sub.add_parser("lmo-check", help="compare an LMO with brute force")
    c.add_argument("family", choices=["simplex", "spectrahedron", "hamiltonian"])
    c.add_argument("size", type=int)
    c.add_argument("trials", type=int)
    c.add_argument("seed", type=int)
    c.set_defaults(func=cmd_lmo_check)
    return p


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
