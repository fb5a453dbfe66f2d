"""Command-line entry point: ``rego <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import harness
from .embedding import EPSILON
from .problems import CATALOGUE, get_problem, problem_names

log = logging.getLogger("rego")


def _ints(text):
    return [int(t) for t in str(text).split(",") if t.strip()]


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment. Keys use flag names."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.lstrip("-").replace("-", "_")] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default: print to stdout)")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--epsilon", type=float, default=EPSILON)
    common.add_argument("--config", help="flat key=value file; command-line flags win")
    common.add_argument("--workers", type=int, default=1,
                        help="worker processes (capped by REGO_THREADS)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="rego", description="Random embeddings for global optimization")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("list-problems", parents=[common], help="show the test-problem catalogue")

    v = sub.add_parser("verify", parents=[common], help="check the law of the least-norm reduced minimizer")
    v.add_argument("--de", type=int, default=3)
    v.add_argument("--d", type=int, default=6)
    v.add_argument("--samples", type=int, default=50000)

    c = sub.add_parser("curves", parents=[common], help="Monte Carlo success curves next to the analytic bound")
    c.add_argument("--de", type=int, default=2)
    c.add_argument("--d-offsets", default="0,1,2,3")
    c.add_argument("--grid-min", type=float, default=0.02)
    c.add_argument("--grid-max", type=float, default=10.0)
    c.add_argument("--points", type=int, default=50)
    c.add_argument("--trials", type=int, default=1000)
    c.add_argument("--log-grid", action="store_true", help="log-spaced grid instead of linear")

    t = sub.add_parser("success-table", parents=[common], help="geometric success rates per (D, pair)")
    t.add_argument("--problems", default="all", help="comma-separated names or 'all'")
    t.add_argument("--D", default="10,100,1000")
    t.add_argument("--pairs", default="main",
                   help="preset (main, A, B, C) or list like '0:8.0*sqrt(de),1:2.2*sqrt(de)'")
    t.add_argument("--embeddings", type=int, default=100)

    m = sub.add_parser("compare", parents=[common], help="REGO against solving in the full space")
    m.add_argument("--problem", required=False, default="branin")
    m.add_argument("--D", type=int, default=100)
    m.add_argument("--solver", choices=["direct", "multistart", "random"], default="direct")
    m.add_argument("--pair", default="1:2.2*sqrt(de)")
    m.add_argument("--trials", type=int, default=20)
    m.add_argument("--max-evals", type=int, help="override the default 10000*de evaluations")
    m.add_argument("--starts", type=int, help="override the default 20*de starts")
    return p


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = read_config(args.config)
        # re-parse with file values as defaults so explicit flags still win
        sp = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sp._actions}
        unknown = sorted(set(cfg) - known)
        if unknown:
            parser.error(f"unknown config keys: {', '.join(unknown)}")
        sp.set_defaults(**{k: v for k, v in cfg.items()})
        args = parser.parse_args(argv)
        for a in sp._actions:
            if a.dest in cfg and isinstance(a, argparse._StoreTrueAction) \
                    and isinstance(getattr(args, a.dest), str):
                setattr(args, a.dest, cfg[a.dest].lower() in ("1", "true", "yes", "on"))
    return args


def _emit(obj, args):
    if args.out:
        harness.emit_results(obj, args.format, args.out)
        log.info("wrote %s", args.out)
        return
    fields, rows = harness._rows_of(obj)
    if args.format == "json":
        print(json.dumps([{k: harness._jsonable(r[k]) for k in fields} for r in rows], indent=1))
    else:
        print(",".join(fields))
        for r in rows:
            print(",".join(str(harness._fmt(r[k])) for k in fields))


def cmd_list_problems(args):
    rows = []
    for name in problem_names():
        p = CATALOGUE[name]
        rows.append({"name": name, "de": p.de, "f_star": p.f_star,
                     "f_star_reported": p.f_star_reported, "minimizers": len(p.known_minimizers)})
    _emit(rows, args)


def cmd_verify(args):
    rep = harness.verify_distribution(args.de, args.d, args.samples, args.seed)
    if not rep.mean_defined:
        log.warning("mean of ||y2||^2 is infinite for d - de <= 1; mean check skipped")
    _emit(rep, args)


def cmd_curves(args):
    space = np.geomspace if args.log_grid else np.linspace
    grid = space(args.grid_min, args.grid_max, args.points)
    curves = []
    for k, off in enumerate(_ints(args.d_offsets)):
        curves.append(harness.estimate_L_star(args.de, args.de + off, grid, args.trials,
                                              harness.RngStream(args.seed, (k,))))
    _emit(curves, args)


def cmd_success_table(args):
    names = None if args.problems == "all" else [s.strip() for s in args.problems.split(",")]
    cells = harness.run_success_table(names, _ints(args.D), harness.parse_pairs(args.pairs),
                                      args.embeddings, args.seed, workers=args.workers)
    _emit(cells, args)


def cmd_compare(args):
    from .solvers import Budget

    de = get_problem(args.problem).de
    budget = None
    if args.max_evals or args.starts:
        std = Budget.standard(de)
        budget = Budget(args.max_evals or std.max_evals, args.starts or std.max_starts)
    pair = harness.parse_pair(args.pair)
    res = harness.compare(args.problem, args.D, args.solver, pair, args.trials, args.seed,
                          args.epsilon, workers=args.workers, budget=budget)
    log.info("summary %s", res.summary())
    _emit(res.rego + res.direct, args)


COMMANDS = {
    "list-problems": cmd_list_problems,
    "verify": cmd_verify,
    "curves": cmd_curves,
    "success-table": cmd_success_table,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    args = parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        COMMANDS[args.command](args)
    except (KeyError, ValueError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"rego: error: {msg}", file=sys.stderr)
        return 2
    return 0
