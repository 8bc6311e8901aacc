"""Command-line entry point.

Exit codes: 0 success, 1 usage or malformed input, 2 capacity exceeded,
3 verification failure (for example a diffusion layer that is not linear
for the requested operation). Every randomized run prints its seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import analysis, cipher, hcirc, ops
from .errors import (AltDiffError, CapacityError, DegenerateOperationError,
                     DimensionError, FormatError, VerificationError)
from .gf2 import BinMatrix, hex_width, word_to_hex

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CAPACITY = 2
EXIT_VERIFY = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise FormatError(message)


def _write_output(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table_csv(tag: str, table, bits: int) -> str:
    w = hex_width(bits)
    size = 1 << bits
    head = [tag] + [format(j, "0{}X".format(w)) for j in range(size)]
    lines = [",".join(head)]
    for i in range(size):
        lines.append(",".join([format(i, "0{}X".format(w))] +
                              [format(int(table[i][j]), "0{}X".format(w))
                               for j in range(size)]))
    return "\n".join(lines) + "\n"


def _build_block_op(args) -> ops.AltOperation:
    return ops.make_op(args.n, int(args.b, 16))


def cmd_op_info(args) -> int:
    op = _build_block_op(args)
    weak = sorted(op.weak_keys())
    errors = sorted(op.error_set())
    if args.json:
        doc = {"n": op.n, "b": word_to_hex(op.b, op.n - 2),
               "weak_dim": op.weak_dim,
               "weak_keys": [word_to_hex(k, op.n) for k in weak],
               "error_set": [word_to_hex(k, op.n) for k in errors]}
        _write_output(json.dumps(doc, indent=2) + "\n", args.out)
        return EXIT_OK
    lines = [
        f"operation {op.tag}",
        f"weak-key dimension {op.weak_dim}",
        "weak keys " + " ".join(word_to_hex(k, op.n) for k in weak),
        "error set " + " ".join(word_to_hex(k, op.n) for k in errors),
    ]
    _write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_op_cayley(args) -> int:
    op = _build_block_op(args)
    table = op.dot_table if args.table == "dot" else op.sum_table
    if table is None:
        raise CapacityError("tables are precomputed only for small blocks")
    if args.format == "pretty":
        w = hex_width(op.n)
        size = 1 << op.n
        head = " " * w + " |" + "".join(format(j, ">2X") for j in range(size))
        lines = [head, "-" * len(head)]
        for i in range(size):
            lines.append(format(i, "X").rjust(w) + " |" +
                         "".join(format(int(table[i][j]), ">2X")
                                 for j in range(size)))
        _write_output("\n".join(lines) + "\n", args.out)
    else:
        tag = "dot" if args.table == "dot" else op.tag
        _write_output(_table_csv(tag, table, op.n), args.out)
    return EXIT_OK


def cmd_ddt(args) -> int:
    spec = cipher.load_cipher(args.cipher)
    op = ops.parse_op(args.op, blocks=1, width=spec.nb)
    table = cipher.ddt(spec.sbox, op)
    if args.json:
        doc = {"cipher": args.cipher, "op": op.tag,
               "uniformity": table.uniformity(),
               "counts": [list(r) for r in table.counts]}
        _write_output(json.dumps(doc, indent=2) + "\n", args.out)
    elif args.format == "pretty":
        _write_output(table.to_pretty(), args.out)
    else:
        _write_output(table.to_csv(), args.out)
    return EXIT_OK


def cmd_check_linear(args) -> int:
    spec = cipher.load_cipher(args.cipher)
    op = ops.parse_op(args.op, blocks=spec.m, width=spec.nbits)
    ok = hcirc.is_circ_linear(spec.diffusion, op)
    invertible = spec.diffusion.is_invertible()
    if args.json:
        doc = {"cipher": args.cipher, "op": op.tag,
               "invertible": invertible, "circ_linear": ok}
        _write_output(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        verdict = "PASS" if ok else "FAIL"
        _write_output(
            f"{verdict}: diffusion layer of {args.cipher} "
            f"{'is' if ok else 'is not'} linear for {op.tag}\n", args.out)
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_hcirc_enumerate(args) -> int:
    op = _build_block_op(args)
    mats = hcirc.enumerate_hcirc(op)
    doc = {"op": op.tag, "count": len(mats),
           "predicted": hcirc.hcirc_order(op)}
    if args.matrices:
        doc["matrices"] = [m.to_text().split("\n") for m in mats]
    if args.json:
        _write_output(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        lines = [f"H order for {op.tag}: {len(mats)} "
                 f"(parametrization predicts {doc['predicted']})"]
        if args.matrices:
            for m in mats:
                lines.append("")
                lines.append(m.to_text())
        _write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_hcirc_witnesses(args) -> int:
    par = ops.parse_op(f"circ:{args.n}:{args.b}", blocks=args.blocks)
    if isinstance(par, ops.AltOperation):
        par = ops.parallel([par])
    mats = hcirc.parallel_hcirc_witnesses(par, budget=args.budget,
                                          seed=args.seed)
    doc = {"op": par.tag, "blocks": par.m, "seed": args.seed,
           "budget": args.budget, "verified_distinct": len(mats)}
    if args.json:
        _write_output(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        _write_output(
            "verified {} distinct H elements for {} "
            "(budget {}, seed {})\n".format(len(mats), par.tag,
                                            args.budget, args.seed), args.out)
    return EXIT_OK


def cmd_hcirc_conjecture(args) -> int:
    value = hcirc.conjecture_bound(args.n, args.blocks)
    note = ""
    if args.blocks == 1:
        note = " (literal value; the bound is intended for m >= 2)"
    if args.json:
        _write_output(json.dumps({"n": args.n, "m": args.blocks,
                                  "bound": value}) + "\n", args.out)
    else:
        _write_output(f"conjectured lower bound on |H| for n={args.n}, "
                      f"m={args.blocks}: {value}{note}\n", args.out)
    return EXIT_OK


def _run_search(args) -> analysis.SearchReport:
    spec = cipher.load_cipher(args.cipher, rounds=args.rounds)
    circ_op = ops.parse_op(args.op, blocks=spec.m, width=spec.nbits)
    if isinstance(circ_op, ops.XorOp):
        raise FormatError("the search compares XOR against a circ operation; "
                          "pass a circ descriptor")
    return analysis.search(spec, circ_op, rounds=args.rounds,
                           engine=args.engine, restrict=args.restrict,
                           keys=args.keys, pairs=args.pairs, seed=args.seed,
                           allow_big=args.allow_big, threads=args.threads)


def cmd_search(args) -> int:
    report = _run_search(args)
    if args.json:
        _write_output(json.dumps(report.to_jsonable(), indent=2) + "\n",
                      args.out)
        return EXIT_OK
    lines = []
    if report.engine == "montecarlo":
        lines.append(f"seed {report.seed} keys {report.keys} "
                     f"pairs {report.pairs}")
    for p, c in zip(report.plus, report.circ):
        lines.append(
            "round {:2d}: + {:04X}->{:04X} 2^{:.3f} | o {:04X}->{:04X} "
            "2^{:.3f}".format(p.rounds, p.din, p.dout, p.log2_prob,
                              c.din, c.dout, c.log2_prob))
    _write_output("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_curve(args) -> int:
    report = _run_search(args)
    if report.engine == "montecarlo":
        sys.stderr.write(f"seed {report.seed}\n")
    _write_output(analysis.curve_csv(report), args.out)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="altdiff",
                     description="differential experiments with alternative "
                                 "parallel operations")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--json", action="store_true",
                       help="emit a JSON report on stdout")
        p.add_argument("--out", "-o", help="write output to this file")

    op_parser = sub.add_parser("op", help="inspect a block operation")
    op_sub = op_parser.add_subparsers(dest="op_command", required=True)
    p_info = op_sub.add_parser("info", help="weak keys and error set")
    p_info.add_argument("--n", type=int, required=True)
    p_info.add_argument("--b", required=True, help="defining vector, hex")
    add_common(p_info)
    p_info.set_defaults(func=cmd_op_info)
    p_cayley = op_sub.add_parser("cayley", help="Cayley or dot table")
    p_cayley.add_argument("--n", type=int, required=True)
    p_cayley.add_argument("--b", required=True)
    p_cayley.add_argument("--table", choices=["sum", "dot"], default="sum")
    p_cayley.add_argument("--format", choices=["csv", "pretty"],
                          default="csv")
    add_common(p_cayley)
    p_cayley.set_defaults(func=cmd_op_cayley)

    p_ddt = sub.add_parser("ddt", help="difference distribution table")
    p_ddt.add_argument("--cipher", default="paper16")
    p_ddt.add_argument("--op", default="xor")
    p_ddt.add_argument("--format", choices=["csv", "pretty"], default="csv")
    add_common(p_ddt)
    p_ddt.set_defaults(func=cmd_ddt)

    p_chk = sub.add_parser("check-linear",
                           help="verify the diffusion layer is circ-linear")
    p_chk.add_argument("--cipher", default="paper16")
    p_chk.add_argument("--op", required=True)
    add_common(p_chk)
    p_chk.set_defaults(func=cmd_check_linear)

    p_h = sub.add_parser("hcirc", help="H group tooling")
    h_sub = p_h.add_subparsers(dest="hcirc_command", required=True)
    p_enum = h_sub.add_parser("enumerate", help="all single-block H elements")
    p_enum.add_argument("--n", type=int, required=True)
    p_enum.add_argument("--b", required=True)
    p_enum.add_argument("--matrices", action="store_true",
                        help="include matrices in the report")
    add_common(p_enum)
    p_enum.set_defaults(func=cmd_hcirc_enumerate)
    p_wit = h_sub.add_parser("witnesses",
                             help="verified elements for a parallel operation")
    p_wit.add_argument("--n", type=int, required=True)
    p_wit.add_argument("--b", required=True)
    p_wit.add_argument("--blocks", type=int, required=True)
    p_wit.add_argument("--budget", type=int, default=300)
    p_wit.add_argument("--seed", type=int, default=0)
    add_common(p_wit)
    p_wit.set_defaults(func=cmd_hcirc_witnesses)
    p_conj = h_sub.add_parser("conjecture",
                              help="conjectured lower bound on |H|")
    p_conj.add_argument("--n", type=int, required=True)
    p_conj.add_argument("--blocks", type=int, required=True)
    add_common(p_conj)
    p_conj.set_defaults(func=cmd_hcirc_conjecture)

    for name, func in (("search", cmd_search), ("curve", cmd_curve)):
        p = sub.add_parser(name, help="best-differential " + name)
        p.add_argument("--cipher", default="paper16")
        p.add_argument("--op", default="circ:4:1")
        p.add_argument("--rounds", type=int, default=17)
        p.add_argument("--engine", choices=["markov", "montecarlo"],
                       default="markov")
        p.add_argument("--restrict", choices=["single-block", "all"],
                       default="single-block")
        p.add_argument("--keys", type=int, default=1024)
        p.add_argument("--pairs", type=int, default=None)
        p.add_argument("--seed", default="0")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--allow-big", action="store_true",
                       help="accept the multi-hour restrict=all budget")
        add_common(p)
        p.set_defaults(func=func)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (FormatError, DimensionError, DegenerateOperationError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except CapacityError as exc:
        sys.stderr.write(f"capacity error: {exc}\n")
        return EXIT_CAPACITY
    except VerificationError as exc:
        sys.stderr.write(f"verification failure: {exc}\n")
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
