"""weightlab command-line interface.

Usage:
    weightlab check --seq gevrey:1 --cond lc,mg,fdb
    weightlab compare --a factorial --b gevrey:1
    weightlab conjugate --omega log_power:2 --x 4
    weightlab omega-check --omega log_power:2
    weightlab build-matrix --from omega --name log_power:2 --out omega.json
    weightlab matrix-check --cond mg --flavor roumieu omega:log_power:2
    weightlab matrix-relate gevrey phi:tlogt --flavor roumieu
    weightlab witness {blocks|mg-violation|char-derivs|family} ...
    weightlab reproduce
    weightlab export --seq factorial --format csv
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .catalog import sequence
from .config import Config, load_config, parse_grid
from .errors import SchemaError, WeightlabError
from .fdb import check_fdb, check_rai, compose_max
from .matrix import (CONDITIONS, WeightMatrix, check_inclusion_flags, check_matrix_condition, check_msc,
                     make_gevrey, make_omega, make_phi, relate_matrices)
from .report import Report
from .seqcore import LogSeq, check_dc, check_lc, check_lcset, check_mg, relate
from .weightfn import check_omega_conditions, conjugate, convex_weight, resolve_weight
from . import witness as wit

EXIT_OK, EXIT_INVALID, EXIT_INCONCLUSIVE, EXIT_USAGE, EXIT_SCHEMA = 0, 2, 3, 64, 65

SEQ_CHECKS = {
    "lc": lambda s, tol: check_lc(s, "M"),
    "slc": lambda s, tol: check_lc(s, "m"),
    "mg": check_mg,
    "dc": check_dc,
    "lcset": check_lcset,
    "fdb": check_fdb,
    "rai": check_rai,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ------------------------------------------------------------------ loaders

def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from None


def load_seq(spec: str, n: int) -> LogSeq:
    """A catalog name, ``recip:<name>`` (reciprocal sequence) or a LogSeq JSON file."""
    if spec.startswith("recip:"):
        s = load_seq(spec[len("recip:"):], n)
        return LogSeq(-s.logM, f"1/{s.label}")
    if os.path.exists(spec):
        return LogSeq.from_dict(_read_json(spec))
    return sequence(spec, n)


def load_matrix(spec: str, cfg: Config) -> WeightMatrix:
    """``gevrey``, ``omega:<weight>``, ``phi:<convex>`` or a matrix JSON file."""
    if os.path.exists(spec):
        return WeightMatrix.from_dict(_read_json(spec))
    kind, _, name = spec.partition(":")
    if kind == "gevrey":
        return make_gevrey(parse_grid(name) if name else (1.0, 2.0, 3.0), cfg.n)
    if kind == "omega":
        return make_omega(resolve_weight(name), cfg.lambda_grid, cfg.n)
    if kind == "phi":
        return make_phi(convex_weight(name), cfg.lambda_grid, cfg.n)
    raise SchemaError(f"unknown matrix {spec!r}; use gevrey[:grid], omega:<weight>, phi:<convex> or a JSON file")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


# ----------------------------------------------------------------- commands

def cmd_check(args, cfg):
    seq = load_seq(args.seq, cfg.n)
    rep = _report("check", {"seq": args.seq, "cond": args.cond}, cfg)
    for c in args.cond.split(","):
        if c not in SEQ_CHECKS:
            raise UsageError(f"unknown condition {c!r}; choose from {', '.join(SEQ_CHECKS)}")
        rep.add(c, "verdict", SEQ_CHECKS[c](seq, cfg.tol_trend))
    return rep


def cmd_fdb(args, cfg):
    seq = load_seq(args.seq, cfg.n)
    comp = compose_max(seq.m)
    k_max = min(args.max_k, seq.N)
    rep = _report("fdb", {"seq": args.seq, "max_k": k_max}, cfg)
    rep.add("fdb", "verdict", check_fdb(seq, cfg.tol_trend))
    rep.add("rai", "verdict", check_rai(seq, cfg.tol_trend))
    rep.add("circ", "sequence", {"log_values": comp.circ.logM[:k_max + 1],
                                 "partitions": [list(p) if p else None for p in comp.argmax[:k_max + 1]]})
    return rep


def cmd_compare(args, cfg):
    a, b = load_seq(args.a, cfg.n), load_seq(args.b, cfg.n)
    rep = _report("compare", {"a": args.a, "b": args.b}, cfg)
    rep.add("relation", "relation", relate(a, b, cfg.tol_trend))
    return rep


def cmd_conjugate(args, cfg):
    if (args.omega is None) == (args.phi is None):
        raise UsageError("give exactly one of --omega or --phi")
    cw = resolve_weight(args.omega).convex if args.omega else convex_weight(args.phi)
    xs = _floats(args.x)
    vals = conjugate(cw, np.array(xs))
    rep = _report("conjugate", {"omega": args.omega, "phi": args.phi, "x": xs}, cfg)
    rep.add("conjugate", "values", {"x": xs, "value": np.atleast_1d(vals)}, {"tol_conj": cfg.tol_conj})
    return rep


def cmd_omega_check(args, cfg):
    w = resolve_weight(args.omega)
    rep = _report("omega-check", {"omega": args.omega}, cfg)
    for k, v in check_omega_conditions(w, cfg.tol_trend).items():
        rep.add(k, "verdict", v, {"t_max": w.t_max, "grid_points": w.grid_points})
    if w.note:
        rep.add("note", "text", w.note, {})
    return rep


def _matrix_from_args(args, cfg) -> WeightMatrix:
    src = getattr(args, "from")
    if src == "gevrey":
        return make_gevrey(cfg.lambda_grid if args.lambda_grid else (1.0, 2.0, 3.0), cfg.n)
    if not args.name:
        raise UsageError(f"--from {src} needs --name")
    if src == "omega":
        return make_omega(resolve_weight(args.name), cfg.lambda_grid, cfg.n)
    return make_phi(convex_weight(args.name), cfg.lambda_grid, cfg.n)


def cmd_build_matrix(args, cfg):
    mx = _matrix_from_args(args, cfg)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(mx.to_json())
    rep = _report("build-matrix", {"from": getattr(args, "from"), "name": args.name, "out": args.out}, cfg)
    rep.add("matrix", "matrix", mx if not args.out else {"label": mx.label, "lambda": mx.lambdas, "N": mx.N})
    return rep


def cmd_matrix_check(args, cfg):
    mx = load_matrix(args.matrix, cfg)
    rep = _report("matrix-check", {"matrix": args.matrix, "cond": args.cond, "flavor": args.flavor}, cfg)
    ctx = {"n": mx.N, "lambda_grid": mx.lambdas}
    for c in args.cond.split(","):
        if c == "msc":
            rep.add(c, "verdict", check_msc(mx, cfg.tol_trend), ctx)
        elif c == "inclusion":
            rep.add(c, "verdicts", check_inclusion_flags(mx, cfg.tol_trend), ctx)
        elif c in CONDITIONS:
            flavors = ("roumieu", "beurling") if args.flavor == "both" else (args.flavor,)
            for fl in flavors:
                rep.add(f"{c}:{fl}", "matrix_verdict",
                        check_matrix_condition(mx, c, fl, tol=cfg.tol_trend, c_grid=cfg.c_grid), ctx)
        else:
            raise UsageError(f"unknown matrix condition {c!r}")
    return rep


def cmd_matrix_relate(args, cfg):
    A, B = load_matrix(args.a, cfg), load_matrix(args.b, cfg)
    ua = _floats(args.universe_a) if args.universe_a else None
    ub = _floats(args.universe_b) if args.universe_b else None
    rep = _report("matrix-relate", {"a": args.a, "b": args.b, "flavor": args.flavor,
                                    "universe_a": ua, "universe_b": ub}, cfg)
    rel = relate_matrices(A, B, args.flavor, universe_a=ua, universe_b=ub, tol=cfg.tol_trend)
    rep.add("relation", "matrix_relation", rel, {"n": A.N, "lambda_a": A.lambdas, "lambda_b": B.lambdas})
    return rep


def cmd_witness(args, cfg):
    kind = args.witness_kind
    rep = _report(f"witness {kind}", {k: v for k, v in vars(args).items()
                                      if k not in ("func", "config", "format", "strict", "command")}, cfg)
    if kind == "blocks":
        mx = load_matrix(args.matrix, cfg)
        b = load_seq(args.b, mx.N)
        try:
            w = wit.build_block_witness(mx, b, args.alpha_offset, args.max_blocks)
        except wit.InsufficientDivergence as exc:
            if exc.witness is not None:
                rep.add("partial", "block_witness", exc.witness)
            rep.add("error", "error", {"passed": False, "message": str(exc)})
            return rep
        rep.add("blocks", "block_witness", w)
        rep.add("block_log_sums", "values", wit.block_sums(w, b))
    elif kind == "mg-violation":
        mx = load_matrix(args.matrix, cfg)
        hit = wit.find_mg_violation(mx, args.x, args.n_value, args.j_max, args.y)
        rep.add("violation", "pair", {"found": hit is not None, "pair": hit})
    elif kind == "char-derivs":
        seq = load_seq(args.seq, cfg.n)
        logs, tails = wit.characteristic_terms(seq, args.j_max)
        rep.add("s", "values", {"log_s": logs, "log_M": seq.logM[:len(logs)],
                                "relative_tail_bound": tails})
    elif kind == "family":
        seq = load_seq(args.seq, cfg.n)
        mx = load_matrix(args.matrix, cfg) if args.matrix else None
        for tag in wit.classify_family(seq, mx, t_grid=cfg.t_grid, tol=cfg.tol_trend):
            rep.add(tag.family, "family", tag, {"n": seq.N, "t_grid": cfg.t_grid,
                                                "lambda_grid": mx.lambdas if mx else None})
    return rep


def cmd_reproduce(args, cfg):
    from .reproduce import run_reproduce
    rep = run_reproduce(cfg.to_dict())
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(rep.to_json())
    return rep


def cmd_export(args, cfg):
    if (args.seq is None) == (args.matrix is None):
        raise UsageError("give exactly one of --seq or --matrix")
    if args.seq:
        obj = load_seq(args.seq, cfg.n)
        rows = [(obj.label, k, v) for k, v in enumerate(obj.logM)]
    else:
        obj = load_matrix(args.matrix, cfg)
        rows = [(x, k, v) for x, r in zip(obj.lambdas, obj.rows) for k, v in enumerate(r.logM)]
    if args.format == "csv":
        head = "label,k,log_value" if args.seq else "lambda,k,log_value"
        return head + "\n" + "".join(f"{a},{k},{float(v)!r}\n" for a, k, v in rows)
    return json.dumps(obj.to_dict(), sort_keys=True) + "\n"


# ------------------------------------------------------------------- plumbing

def _report(command, inputs, cfg) -> Report:
    return Report(command, inputs, [], cfg.to_dict())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="truncation length N")
    common.add_argument("--lambda-grid", help="grid, e.g. 1,2,4 or 2^-4..6")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--strict", action="store_true", help="exit 3 if any verdict is inconclusive")
    common.add_argument("--config", help="key=value config file (default: $WEIGHTLAB_CONFIG)")

    p = _Parser(prog="weightlab", description="Weight sequences, weight functions and weight matrices.")
    p.add_argument("--version", action="version", version=f"weightlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", parents=[common], help="single-sequence conditions")
    c.add_argument("--seq", required=True)
    c.add_argument("--cond", default="lc,mg,fdb", help=f"comma list of {','.join(SEQ_CHECKS)}")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("fdb", parents=[common], help="composed sequence and (FdB)/(rai)")
    c.add_argument("seq")
    c.add_argument("--max-k", type=int, default=32)
    c.set_defaults(func=cmd_fdb)

    c = sub.add_parser("compare", parents=[common], help="growth relation of two sequences")
    c.add_argument("--a", required=True)
    c.add_argument("--b", required=True)
    c.set_defaults(func=cmd_compare)

    c = sub.add_parser("conjugate", parents=[common], help="Legendre-Fenchel-Young conjugate")
    c.add_argument("--omega")
    c.add_argument("--phi")
    c.add_argument("--x", required=True, help="comma list of points")
    c.set_defaults(func=cmd_conjugate)

    c = sub.add_parser("omega-check", parents=[common], help="weight-function conditions")
    c.add_argument("--omega", required=True, help="catalog name or CSV table t,omega")
    c.set_defaults(func=cmd_omega_check)

    c = sub.add_parser("build-matrix", parents=[common], help="construct a weight matrix")
    c.add_argument("--from", required=True, choices=("omega", "phi", "gevrey"))
    c.add_argument("--name")
    c.add_argument("--out")
    c.set_defaults(func=cmd_build_matrix)

    c = sub.add_parser("matrix-check", parents=[common], help="matrix conditions")
    c.add_argument("matrix")
    c.add_argument("--cond", default="mg", help=f"comma list of {','.join(CONDITIONS)},msc,inclusion")
    c.add_argument("--flavor", choices=("roumieu", "beurling", "both"), default="roumieu")
    c.set_defaults(func=cmd_matrix_check)

    c = sub.add_parser("matrix-relate", parents=[common], help="relation between two matrices")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--flavor", choices=("roumieu", "beurling", "triangle"), default="roumieu")
    c.add_argument("--universe-a")
    c.add_argument("--universe-b")
    c.set_defaults(func=cmd_matrix_relate)

    c = sub.add_parser("witness", help="constructive witnesses")
    wsub = c.add_subparsers(dest="witness_kind", required=True, parser_class=_Parser)
    w = wsub.add_parser("blocks", parents=[common])
    w.add_argument("--matrix", required=True)
    w.add_argument("--b", required=True)
    w.add_argument("--alpha-offset", type=int, default=1)
    w.add_argument("--max-blocks", type=int)
    w = wsub.add_parser("mg-violation", parents=[common])
    w.add_argument("--matrix", required=True)
    w.add_argument("--x", type=float, required=True)
    w.add_argument("--n-value", dest="n_value", type=float, required=True,
                   help="the bound n (use --n for the truncation)")
    w.add_argument("--y", type=float)
    w.add_argument("--j-max", type=int, default=64)
    w = wsub.add_parser("char-derivs", parents=[common])
    w.add_argument("--seq", required=True)
    w.add_argument("--j-max", type=int, default=16)
    w = wsub.add_parser("family", parents=[common])
    w.add_argument("--seq", required=True)
    w.add_argument("--matrix")
    c.set_defaults(func=cmd_witness)

    c = sub.add_parser("reproduce", parents=[common], help="regenerate the worked computations")
    c.add_argument("--out")
    c.set_defaults(func=cmd_reproduce)

    c = sub.add_parser("export", parents=[common], help="dump a sequence or matrix")
    c.add_argument("--seq")
    c.add_argument("--matrix")
    c.set_defaults(func=cmd_export)
    return p


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors, --help and --version
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        cfg = load_config(args.config)
        grid = parse_grid(args.lambda_grid) if args.lambda_grid else None
        cfg = cfg.override(n=args.n, lambda_grid=grid)
        result = args.func(args, cfg)
    except UsageError as exc:
        print(f"weightlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchemaError as exc:
        print(f"weightlab: schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except (WeightlabError, OSError) as exc:
        print(f"weightlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if isinstance(result, str):
        out.write(result)
        return EXIT_OK
    out.write(result.to_csv() if args.format == "csv" else result.to_json())
    if not result.passed:
        return EXIT_INVALID
    if args.strict and "inconclusive" in result.trends:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
