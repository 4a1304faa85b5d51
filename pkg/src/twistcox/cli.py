"""Command-line entry point: ``twistcox {enumerate,poset,check,homology}``.

Exit codes: 0 pass, 1 check failed, 2 budget exceeded, 3 usage or input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from .checks import SUITES, CheckContext, run_check
from .coxeter import DEFAULT_ELEMENT_BUDGET, enumerate_elements, reduced_word
from .errors import BudgetExceeded, CoxeterError
from .poset import export_dot, export_json, index_string, parse_index_string
from .presets import resolve_group
from .topology import DEFAULT_CHAIN_BUDGET, interval_homology
from .twisted import TwistedBruhat, TwistedSystem

EXIT_OK, EXIT_FAIL, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _nonneg(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", required=True,
                        help="preset such as A5:flip, D4:swap, affineA2, square(A2), or a group JSON file")
    common.add_argument("--theta", help="override theta: id, flip, swap or a 0-based image list")
    common.add_argument("--max-rank", type=_nonneg, help="truncate at this rank (required for infinite groups)")
    common.add_argument("--budget-elements", type=_positive, default=DEFAULT_ELEMENT_BUDGET)
    common.add_argument("--budget-chains", type=_positive, default=DEFAULT_CHAIN_BUDGET)

    parser = _Parser(prog="twistcox", description="Twisted identities in Coxeter groups.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("enumerate", parents=[common], help="list W, twisted involutions or twisted identities")
    p.add_argument("--set", choices=["W", "inv", "iota"], default="iota")
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("poset", parents=[common], help="export the Bruhat order on iota or inv")
    p.add_argument("--set", choices=["iota", "inv"], default="iota")
    p.add_argument("--format", choices=["dot", "json", "text"], default="dot")

    p = sub.add_parser("check", parents=[common], help="run a named verification suite")
    p.add_argument("name", choices=sorted(SUITES))
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("homology", parents=[common], help="reduced homology of an open interval of Br(iota)")
    p.add_argument("--interval", nargs=2, metavar=("U", "V"), required=True,
                   help="S-expression index words, e.g. 3 213 (use e for the identity)")
    p.add_argument("--format", choices=["text", "json"], default="text")
    return parser


def _twisted(args) -> TwistedSystem:
    system, theta = resolve_group(args.group, args.theta)
    if not system.is_finite and args.max_rank is None and args.command != "homology":
        raise CoxeterError(f"{system.name or 'this group'} is infinite: pass --max-rank")
    return TwistedSystem(system, theta)


def cmd_enumerate(args, out) -> int:
    ts = _twisted(args)
    system = ts.system
    rank = system.rank
    rows = []
    if args.set == "W":
        layers = enumerate_elements(system, args.max_rank, args.budget_elements)
        for w in layers:
            rows.append({"length": w.length(), "word": index_string(reduced_word(w), rank)})
    else:
        enum = ts.enumerate_twisted_involutions(args.max_rank, args.budget_elements)
        idx = enum.iota if args.set == "iota" else range(len(enum))
        for i in idx:
            e = enum.elements[i]
            rows.append({"rank": e.rho, "length": e.length, "ell_theta": e.ell_theta,
                         "sexpr": e.sexpr_text(), "word": index_string(reduced_word(e.element), rank)})
    if args.format == "json":
        out.write(json.dumps(rows, indent=2) + "\n")
        return EXIT_OK
    if args.set == "W":
        out.write("length\tword\n")
        for r in rows:
            out.write(f"{r['length']}\t{r['word'] or 'e'}\n")
    else:
        out.write("rank\tlength\tell_theta\tsexpr\tword\n")
        for r in rows:
            out.write(f"{r['rank']}\t{r['length']}\t{r['ell_theta']}\t{r['sexpr'] or 'e'}\t{r['word'] or 'e'}\n")
    out.write(f"# {len(rows)} elements\n")
    return EXIT_OK


def cmd_poset(args, out) -> int:
    ts = _twisted(args)
    p = TwistedBruhat(ts, args.max_rank, args.budget_elements).poset(args.set)
    if args.format == "dot":
        out.write(export_dot(p, name=f"{ts.system.name or 'W'} {args.set}"))
    elif args.format == "json":
        out.write(export_json(p))
    else:
        for i, e in enumerate(p.elements):
            below = " ".join(p.label(j) for j in p.lower_covers(i))
            out.write(f"{i}\t{e.rank}\t{p.label(i)}\t> {below}\n")
    return EXIT_OK


def cmd_check(args, out) -> int:
    ctx = CheckContext(_twisted(args), args.max_rank, args.budget_elements, args.budget_chains)
    result = run_check(args.name, ctx)
    if args.format == "json":
        out.write(json.dumps({"name": result.name, "status": result.status, "details": result.details,
                              "witness": result.witness}, indent=2) + "\n")
    else:
        out.write("\n".join(result.lines()) + "\n")
        if result.witness is not None:
            out.write("witness: " + json.dumps(result.witness, sort_keys=True) + "\n")
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_homology(args, out) -> int:
    ts = _twisted(args)
    rank = ts.system.rank
    u_expr, v_expr = (parse_index_string(x, rank) for x in args.interval)
    u_el, v_el = ts.eval_sexpr(u_expr), ts.eval_sexpr(v_expr)
    need = args.max_rank
    if need is None and not ts.system.is_finite:
        need = len(v_expr)  # rho(v) never exceeds the length of an S-expression for v
    B = TwistedBruhat(ts, need, args.budget_elements)
    u, v = B.find(u_el), B.find(v_el)
    for name, i in (("U", u), ("V", v)):
        if not B.in_iota[i]:
            raise CoxeterError(f"{name} = {B.element(i).sexpr_text() or 'e'} is not a twisted identity")
    if not B.leq[u, v] or u == v:
        raise CoxeterError("U is not strictly below V")
    p = B.poset("iota")
    pu, pv = B.poset_index(u), B.poset_index(v)
    h = interval_homology(p, pu, pv, args.budget_chains)
    full = B.is_full(u, v)
    if args.format == "json":
        out.write(json.dumps({
            "u": p.label(pu), "v": p.label(pv), "full": full, "classification": h.classify(),
            "betti": {str(d): h.betti_at(d) for d in h.degrees()},
            "torsion": {str(d): h.torsion_at(d) for d in h.degrees()},
        }, indent=2) + "\n")
    else:
        out.write(f"interval ({p.label(pu)}, {p.label(pv)}): rank gap {p.rank[pv] - p.rank[pu]}, "
                  f"{'full' if full else 'not full'}\n")
        out.write("\n".join(h.lines()) + "\n")
    return EXIT_OK


COMMANDS = {"enumerate": cmd_enumerate, "poset": cmd_poset, "check": cmd_check, "homology": cmd_homology}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (CoxeterError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
