"""Command-line front end.

``stamp solve`` plans a problem, streams an anytime ledger, and writes
the best policy as self-contained JSON; ``stamp verify`` replays such a
policy JSON against its embedded model by seeded Monte-Carlo rollout;
``stamp dump-prg`` loads and prints a refinement-graph snapshot written
by ``solve --prg``; ``stamp bench`` writes a built-in benchmark to disk.

Exit status: 0 when the stop criterion was met (mass threshold or full
refinement; for verify, zero violations), 2 when the time budget ended
the run early or there was nothing to verify, 1 on errors.

With ``--virtual-time`` the run clock advances only on counted work, so
two runs with the same seed write byte-identical outputs.  Set the
``STAMP_LOG`` environment variable to echo the event ledger to stderr.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from fractions import Fraction

from .benchmarks import BENCHMARKS
from .errors import PolicyModelMismatch, StampError
from .geometry import WorldModel
from .parser import parse_domain, parse_problem
from .planner import HPlan, VirtualClock, write_ledger
from .verify import load_policy, rollout_verify


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stamp",
        description="anytime planner for stochastic task and motion problems")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="plan and report covered mass")
    p_solve.add_argument("--domain", required=True,
                         help="domain file (.sdom)")
    p_solve.add_argument("--problem", required=True,
                         help="problem file (.sprob)")
    p_solve.add_argument("--world", help="world geometry file (.world)")
    p_solve.add_argument("--seed", type=int, default=0)
    p_solve.add_argument("--time-budget", type=float, default=None,
                         help="stop after this many seconds of run clock")
    p_solve.add_argument("--mass-threshold", type=float, default=1.0,
                         help="stop once this probability mass is covered "
                              "(default 1.0)")
    p_solve.add_argument("--path-order", choices=("pc", "random"),
                         default="pc",
                         help="RTL path priority: p/c ratio or the random "
                              "baseline")
    p_solve.add_argument("--explore-prob", type=float, default=0.1,
                         help="chance to swap a random action into the "
                              "policy before concretizing")
    p_solve.add_argument("--refine-abstraction-prob", type=float,
                         default=0.25,
                         help="chance to grow the refinement graph instead "
                              "of concretizing")
    p_solve.add_argument("--ledger", help="write the event ledger as CSV")
    p_solve.add_argument("--policy",
                         help="write the best policy tree as self-contained "
                              "JSON")
    p_solve.add_argument("--prg", help="write the refinement graph as JSON")
    p_solve.add_argument("--max-iterations", type=int, default=100_000)
    p_solve.add_argument("--virtual-time", action="store_true",
                         help="deterministic clock; identical runs give "
                              "identical outputs")
    p_solve.add_argument("--quiet", action="store_true")

    p_verify = sub.add_parser(
        "verify", help="replay a solved policy JSON by Monte-Carlo rollout")
    p_verify.add_argument("--policy", required=True,
                          help="policy JSON written by solve")
    p_verify.add_argument("--rollouts", type=int, default=10_000)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--domain",
                          help="cross-check: must match the embedded domain")
    p_verify.add_argument("--problem",
                          help="cross-check: must match the embedded problem")
    p_verify.add_argument("--world",
                          help="cross-check: must match the embedded world")

    p_dump = sub.add_parser(
        "dump-prg", help="load and print a refinement-graph snapshot")
    p_dump.add_argument("--snapshot", required=True,
                        help="PRG JSON written by solve --prg")

    p_bench = sub.add_parser("bench", help="write a built-in benchmark to disk")
    p_bench.add_argument("name", nargs="?",
                         help="benchmark name; omit with --list")
    p_bench.add_argument("--dir", default=".", help="output directory")
    p_bench.add_argument("--list", action="store_true",
                         help="list available benchmarks")
    return parser


def _cmd_solve(args) -> int:
    domain_text = _read(args.domain)
    problem_text = _read(args.problem)
    world_json = None
    world = None
    if args.world:
        world = WorldModel.load(args.world)
        world_json = world.to_json()
    domain = parse_domain(domain_text)
    model = parse_problem(problem_text, domain,
                          base_dir=os.path.dirname(os.path.abspath(args.problem)),
                          world=world)
    plan = HPlan(
        model,
        stop_mass=args.mass_threshold,
        seed=args.seed,
        clock=VirtualClock() if args.virtual_time else None,
        budget_seconds=args.time_budget,
        max_iterations=args.max_iterations,
        select="ratio" if args.path_order == "pc" else "random",
        explore_prob=args.explore_prob,
        refine_abstraction_prob=args.refine_abstraction_prob,
    )
    result = plan.run()
    if os.environ.get("STAMP_LOG"):
        buf = io.StringIO()
        write_ledger(result.ledger, buf)
        sys.stderr.write(buf.getvalue())

    if args.policy:
        if result.best is not None:
            tree_json = result.best.to_json()
        else:
            tree_json = {
                "root": None,
                "nodes": [],
                "covered_mass": str(result.covered),
                "learned_facts": [],
                "verified_leaves": [],
            }
        payload = {
            "policy": tree_json,
            "model": {
                "domain": domain_text,
                "problem": problem_text,
                "world": world_json,
            },
            "config": {
                "seed": args.seed,
                "mass_threshold": args.mass_threshold,
                "path_order": args.path_order,
                "explore_prob": args.explore_prob,
                "refine_abstraction_prob": args.refine_abstraction_prob,
            },
        }
        with open(args.policy, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if args.ledger:
        with open(args.ledger, "w") as fh:
            write_ledger(result.ledger, fh)
    if args.prg:
        with open(args.prg, "w") as fh:
            json.dump(result.prg.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    if not args.quiet:
        print(f"covered_mass {result.covered}")
        print(f"stop_reason {result.stop_reason}")
        print(f"iterations {result.iterations}")
        print(f"elapsed {result.elapsed:.6f}")
    if result.stop_reason in ("mass-threshold", "exhausted"):
        return 0
    if result.stop_reason == "root-unsolvable":
        print("error: the abstract problem has no proper policy",
              file=sys.stderr)
        return 1
    return 2


def _check_source(flag: str, path: str | None, embedded):
    if path is None:
        return
    actual = _read(path)
    if isinstance(embedded, dict):  # world JSON
        if json.loads(actual) != embedded:
            raise PolicyModelMismatch(
                f"--{flag} file does not match the model the policy "
                f"was planned against")
    elif actual != embedded:
        raise PolicyModelMismatch(
            f"--{flag} file does not match the model the policy "
            f"was planned against")


def _cmd_verify(args) -> int:
    with open(args.policy) as fh:
        payload = json.load(fh)
    try:
        model_part = payload["model"]
        policy_part = payload["policy"]
    except KeyError as exc:
        raise PolicyModelMismatch(
            f"policy JSON lacks the {exc.args[0]!r} section")
    _check_source("domain", args.domain, model_part.get("domain"))
    _check_source("problem", args.problem, model_part.get("problem"))
    if args.world is not None:
        _check_source("world", args.world, model_part.get("world"))
    world = None
    if model_part.get("world") is not None:
        world = WorldModel.from_json(model_part["world"])
    domain = parse_domain(model_part["domain"])
    model = parse_problem(model_part["problem"], domain, world=world)
    snapshot = load_policy(policy_part, model.actions)
    if snapshot is None:
        if model.goal_holds(model.initial):
            print("verify: empty policy, goal already satisfied")
            return 0
        print("verify: no refined policy to replay")
        return 2
    report = rollout_verify(
        model, snapshot, rollouts=args.rollouts, seed=args.seed)
    print(f"rollouts {report.rollouts}")
    print(f"goal_reached {report.goal_reached}")
    print(f"uncovered {report.uncovered}")
    print(f"dead_ends {report.dead_ends}")
    print(f"violations {report.violations}")
    for msg in report.messages:
        print(f"violation: {msg}")
    return 0 if report.ok else 1


def _cmd_dump_prg(args) -> int:
    with open(args.snapshot) as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "nodes" not in data or "edges" not in data:
        print(f"error: {args.snapshot} is not a refinement-graph snapshot",
              file=sys.stderr)
        return 1
    print(json.dumps(data, indent=2, sort_keys=True))
    return 0


def _cmd_bench(args) -> int:
    if args.list or args.name is None:
        for name in sorted(BENCHMARKS):
            print(name)
        return 0
    if args.name not in BENCHMARKS:
        print(f"unknown benchmark {args.name!r}; try --list", file=sys.stderr)
        return 1
    bench = BENCHMARKS[args.name]()
    dom, prob, world = bench.write(args.dir)
    print(dom)
    print(prob)
    print(world)
    print(f"solve with: stamp solve --domain {dom} --problem {prob} "
          f"--world {world}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "dump-prg":
            return _cmd_dump_prg(args)
        if args.command == "bench":
            return _cmd_bench(args)
    except StampError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
