"""Command-line entry point: ``coordscope run | check-derivatives | reproduce``."""

import argparse
import logging
import sys

from coordscope import __version__
from coordscope.calculus import check_problem
from coordscope.config import CASES, load_config
from coordscope.errors import ConfigError, CoordscopeError
from coordscope.runner import StageError, run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPUTE = 3
EXIT_ASSERTION = 4


def _parser():
    p = argparse.ArgumentParser(prog="coordscope", description=__doc__)
    p.add_argument("--version", action="version", version=f"coordscope {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="search, classify and plan for one config file")
    r.add_argument("config")
    r.add_argument("--seed", type=int)
    r.add_argument("--out", help="output directory (overrides output_dir)")
    r.add_argument("--restarts", type=int)

    c = sub.add_parser("check-derivatives", help="compare analytic derivatives with finite differences")
    c.add_argument("config")
    c.add_argument("--points", type=int, default=20)
    c.add_argument("--seed", type=int)

    rp = sub.add_parser("reproduce", help="run a bundled case and its structural checks")
    rp.add_argument("case", choices=CASES)
    rp.add_argument("--out", help="output directory")
    return p


def _summary(report):
    sols = report["atlas"]["solutions"]
    coord = report["coordination"]
    lines = [f"{report['problem']['name']}: {len(sols)} classified solution(s), "
             f"{len(report['atlas']['discarded'])} discarded"]
    for s in sols:
        lines.append(f"  #{s['id']:<3d} cost {s['cost']:.6f}  maximal {', '.join(s['maximal']) or '-'}")
    lines.append(f"top interval(s): {', '.join(coord['top_sets'])}  (p = {max(coord['p']):.6f})")
    for w in coord["warnings"]:
        lines.append(f"warning: {w}")
    return "\n".join(lines)


def cmd_run(args):
    cfg = load_config(args.config).with_overrides(seed=args.seed, output_dir=args.out, restarts=args.restarts)
    report, _ = run(cfg)
    print(_summary(report))
    print(f"artifacts written to {cfg.output_dir}")
    return EXIT_OK


def cmd_check(args):
    if args.points < 1:
        raise ConfigError(f"--points must be a positive integer, got {args.points}")
    cfg = load_config(args.config)
    seed = cfg.seed if args.seed is None else args.seed
    res = check_problem(cfg.build_problem(), points=args.points, seed=seed)
    print(f"{res.problem}: {res.points} point(s), worst gradient rel. error {res.worst_grad_error:.3e}, "
          f"worst Hessian rel. error {res.worst_hess_error:.3e}")
    if res.passed:
        print("PASS")
        return EXIT_OK
    j, kind, entry = res.failure
    print(f"FAIL: {kind} entry {entry} at point {j}")
    return EXIT_COMPUTE


def cmd_reproduce(args):
    from coordscope.reproduce import reproduce

    report, _, cfg = reproduce(args.case, args.out)
    print(_summary(report))
    rep = report["reproduction"]
    for c in rep["checks"]:
        tag = "PASS" if c["passed"] else ("FAIL" if c["hard"] else "DEVIATION")
        print(f"[{tag}] {c['name']} {c['detail']}".rstrip())
    print(f"artifacts written to {cfg.output_dir}")
    return EXIT_ASSERTION if rep["hard_failures"] else EXIT_OK


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handler = {"run": cmd_run, "check-derivatives": cmd_check, "reproduce": cmd_reproduce}[args.command]
    try:
        return handler(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except StageError as e:
        print(f"compute failure in stage {e.stage}: {e.cause}", file=sys.stderr)
        return EXIT_COMPUTE
    except CoordscopeError as e:
        print(f"compute failure: {e}", file=sys.stderr)
        return EXIT_COMPUTE


if __name__ == "__main__":
    sys.exit(main())
