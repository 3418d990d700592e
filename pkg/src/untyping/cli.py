"""Command-line front end.

Exit codes: 0 positive verdict, 1 negative verdict, 2 input or usage
error, 3 node budget exhausted.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from untyping import bench, kleene, prover, relmodel, typecheck
from untyping.syntax import (
    ParseError,
    parse_env,
    parse_ka_inequation,
    parse_ka_term,
    parse_rm_inequation,
    parse_sequent,
    render,
)
from untyping.terms import has_additives, variables
from untyping.typecheck import EMPTY_ENV, Constant, MetaVar

OK, NO, USAGE, BUDGET = 0, 1, 2, 3


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.prog}: {message}")


def _read_env(path: Optional[str]):
    if path is None:
        return EMPTY_ENV
    return parse_env(Path(path).read_text(encoding="utf-8"))


class _Names:
    """Print unconstrained objects as ?0, ?1, ... in order of appearance."""

    def __init__(self):
        self.seen: dict = {}

    def __call__(self, o) -> str:
        if isinstance(o, MetaVar):
            if o not in self.seen:
                self.seen[o] = f"?{len(self.seen)}"
            return self.seen[o]
        return str(o)


# ------------------------------------------------------------ commands


def cmd_prove(args) -> int:
    seq = parse_sequent(args.sequent)
    if args.logic == "mll" and has_additives(seq):
        print("error: additive connectives or constants are not part of MLL", file=sys.stderr)
        return USAGE
    env = _read_env(args.env)
    cfg = prover.SearchConfig(prune=not args.no_prune, env=env if args.env else None, node_budget=args.budget)
    try:
        proof, stats = prover.prove(seq, cfg)
    except prover.PruneUnsound as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    except prover.BudgetExceeded as e:
        print("unknown (node budget exhausted)")
        print(f"nodes: {e.stats.nodes_expanded}", file=sys.stderr)
        return BUDGET
    if proof is None:
        print("unprovable")
        return NO
    print("provable")
    if args.proof:
        print(prover.format_proof(proof))
    if args.env:
        m = typecheck.infer_sequent(seq, env)
        if typecheck.is_square(m):
            obj = m.find(m.start)
            try:
                typed = prover.decorate(proof, env, obj)
            except (prover.DecorationFailed, typecheck.UnboundVariable) as e:
                print(f"typed derivation: none ({e})")
            else:
                print(f"typed derivation at {_Names()(obj)}:")
                print(prover.format_typed_proof(typed))
    return OK


def cmd_infer(args) -> int:
    seq = parse_sequent(args.sequent)
    m = typecheck.infer_sequent(seq, _read_env(args.env))
    name = _Names()
    s, e = m.endpoints()
    print(f"endpoints: {name(s)} -> {name(e)}")
    for x, (a, b) in sorted(m.var_types.items()):
        print(f"{x} : {name(a)} -> {name(b)}")
    if not m.consistent:
        print("inconsistent")
    square = typecheck.is_square(m)
    print("SQUARE" if square else "NON-SQUARE")
    return OK if square else NO


def cmd_ka(args) -> int:
    a, b = parse_ka_term(args.lhs), parse_ka_term(args.rhs)
    if args.env is None:
        if args.at:
            raise _Usage("ka eq: --at needs --env")
        eq = kleene.decide_untyped(a, b)
        print("Equal" if eq else "NotEqual")
        return OK if eq else NO
    if not args.at:
        raise _Usage("ka eq: --env needs --at N M")
    env = _read_env(args.env)
    for x in sorted(variables(a) | variables(b)):
        if x not in env:
            print(f"error: variable {x} is not bound in {args.env}", file=sys.stderr)
            return USAGE
    v = kleene.decide_typed(a, b, env, Constant(args.at[0]), Constant(args.at[1]))
    print(str(v))
    if v is kleene.Verdict.EQUAL:
        return OK
    return NO if v is kleene.Verdict.NOT_EQUAL else USAGE


def _parse_inequation(text: str):
    try:
        return parse_rm_inequation(text)
    except ParseError as first:
        try:
            return parse_ka_inequation(text)
        except ParseError:
            raise first from None


def cmd_model(args) -> int:
    lhs, rhs = _parse_inequation(args.inequation)
    if args.action == "check":
        if args.val is None:
            raise _Usage("model check: --val FILE is required")
        v = relmodel.parse_valuation(Path(args.val).read_text(encoding="utf-8"))
        left, right = relmodel.eval_sides(lhs, rhs, v)
        holds = left <= right
        print("holds" if holds else "fails")
        print(f"lhs = {left}")
        print(f"rhs = {right}")
        return OK if holds else NO
    if args.max_size is None:
        raise _Usage("model search: --max-size K is required")
    if args.max_size < 0:
        raise _Usage("model search: --max-size must be non-negative")
    shape = _read_env(args.shape)
    res = relmodel.search_counterexample(lhs, rhs, shape, args.max_size, args.allow_empty)
    if res.witness is None:
        print(f"none up to bound {args.max_size}")
        return OK
    print("counterexample:")
    print(relmodel.format_valuation(res.witness))
    return NO


def cmd_bench(args) -> int:
    if args.leaves < 1 or args.vars < 1 or args.count < 1 or args.repeat < 1:
        raise _Usage("bench: --leaves, --vars, --count and --repeat must be positive")
    if args.budget is not None and args.budget < 1:
        raise _Usage("bench: --budget must be positive")
    p = bench.GenParams(args.leaves, args.vars, bench.Fragment(args.fragment), args.seed)
    records = bench.run_bench(p, args.count, args.budget, args.repeat)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        bench.write_csv(records, fh)
    s = bench.summarize(records)
    if args.summary:
        with open(args.summary, "w", encoding="utf-8", newline="") as fh:
            bench.write_distribution_csv(s, fh)
    print(f"records: {s.total}")
    print(f"budget exceeded: {s.budget_exceeded}")
    print(f"rejection rate: {s.rejection_rate:.4f}")
    print(f"verdict mismatches: {s.mismatches}")
    print(f"total time unpruned: {s.time_unpruned_ns / 1e9:.3f} s")
    print(f"total time pruned: {s.time_pruned_ns / 1e9:.3f} s")
    return OK


# ------------------------------------------------------------ wiring


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="untyping", description="Cyclic linear logic prover and typed-algebra workbench.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("prove", help="decide provability of a one-sided sequent")
    p.add_argument("sequent")
    p.add_argument("--logic", choices=("mll", "mall"), default="mall")
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--env")
    p.add_argument("--proof", action="store_true")
    p.add_argument("--budget", type=int)
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("infer", help="most general type of a sequent")
    p.add_argument("sequent")
    p.add_argument("--env")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("ka", help="Kleene algebra equality")
    p.add_argument("action", choices=("eq",))
    p.add_argument("lhs")
    p.add_argument("rhs")
    p.add_argument("--env")
    p.add_argument("--at", nargs=2, metavar=("N", "M"))
    p.set_defaults(func=cmd_ka)

    p = sub.add_parser("model", help="finite relational models")
    p.add_argument("action", choices=("check", "search"))
    p.add_argument("inequation")
    p.add_argument("--val")
    p.add_argument("--shape")
    p.add_argument("--max-size", type=int)
    p.add_argument("--allow-empty", action="store_true")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("bench", help="pruning benchmark on random sequents")
    p.add_argument("--leaves", type=int, required=True)
    p.add_argument("--vars", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--fragment", choices=("mll", "mall"), default="mll")
    p.add_argument("--budget", type=int)
    p.add_argument("--repeat", type=int, default=1)
    p.add_argument("--summary", help="also write the cumulative time distribution here")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except _Usage as e:
        print(e, file=sys.stderr)
        return USAGE
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return USAGE
    except (relmodel.TypeMismatch, typecheck.UnboundVariable) as e:
        print(f"type error: {e}", file=sys.stderr)
        return USAGE
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
