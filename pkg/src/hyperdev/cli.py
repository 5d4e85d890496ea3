"""Command-line entry point.

Every subcommand that writes an output file also writes
``<out>.manifest.json`` holding the fully resolved arguments and the tool
version; ``hyperdev --from-manifest FILE`` replays it.

Exit codes: 0 success, 2 invalid input or configuration, 3 I/O failure,
4 a verification that should hold exactly did not.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from ._exact import BudgetExceeded, HyperdevError, InvalidInput
from .bounds import THEOREMS, BoundQuery, ConstantsPack, evaluate
from .families import FAMILIES, build_family
from .hypergraph import Hypergraph
from .io import atomic_write, dump_json, fmt_float, format_edge_list, read_edge_list, read_matrix
from .lab import pmodel_exact_tail, reference_bound, tail_estimate, transfer_tail
from .martingale import check_increment_bound, random_trajectory, verify_trajectory
from .partite import PartiteSpec, build_partite, niceness_check, simple_construction

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_ASSERT = 0, 2, 3, 4

SIMULATE_COLUMNS = [
    "threshold",
    "side",
    "exceedances",
    "samples",
    "estimate",
    "ci_lo",
    "ci_hi",
    "bound_value",
    "bound_valid",
]


class VerificationFailed(HyperdevError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InvalidInput(f"{self.prog}: {message}")


# parsing helpers

def parse_params(text: str) -> dict:
    """JSON, a JSON file, relaxed ``{N:101,m:50}`` or ``N=101,m=50``."""
    text = text.strip()
    if text and not text.startswith(("{", "[")) and Path(text).is_file():
        text = Path(text).read_text().strip()
    try:
        out = json.loads(text)
    except json.JSONDecodeError:
        body = text.strip("{} \n")
        if "=" in body and ":" not in body:
            body = body.replace("=", ":")
        quoted = re.sub(r"([A-Za-z_][A-Za-z0-9_]*)\s*:", r'"\1":', body)
        try:
            out = json.loads("{" + quoted + "}")
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"cannot parse parameters {text!r}: {exc}") from None
    if not isinstance(out, dict):
        raise InvalidInput("parameters must be a mapping")
    return out


def parse_grid(text: str | None) -> list[tuple[str, list]]:
    """``a=1000:5000:1000`` (inclusive range) or ``a=1,2,3``; ``;`` separates axes."""
    if not text:
        return []
    axes = []
    for part in text.split(";"):
        if "=" not in part:
            raise InvalidInput(f"grid axis {part!r} must look like name=values")
        name, vals = part.split("=", 1)
        if ":" in vals:
            try:
                lo, hi, step = (float(v) for v in vals.split(":"))
            except ValueError:
                raise InvalidInput(f"bad range {vals!r}") from None
            if step <= 0:
                raise InvalidInput("grid step must be positive")
            n = int(round((hi - lo) / step))
            seq = [lo + i * step for i in range(n + 1)]
        else:
            seq = [json.loads(v) for v in vals.split(",")]
        axes.append((name.strip(), [int(v) if isinstance(v, float) and v.is_integer() else v for v in seq]))
    return axes


def parse_matrix(text: str) -> list[list[int]]:
    if Path(text).is_file():
        return read_matrix(text)
    try:
        rows = [[int(t) for t in r.replace(",", " ").split()] for r in text.split(";") if r.strip()]
    except ValueError:
        raise InvalidInput(f"cannot parse matrix {text!r}") from None
    if not rows or len({len(r) for r in rows}) != 1:
        raise InvalidInput("matrix rows must be nonempty and of equal length")
    return rows


def parse_number_list(text: str) -> list:
    out = []
    for t in text.split(","):
        t = t.strip()
        if not t:
            continue
        try:
            out.append(int(t))
        except ValueError:
            try:
                out.append(float(t))
            except ValueError:
                raise InvalidInput(f"bad number {t!r}") from None
    return out


def _num(text: str):
    """int, exact fraction like 1/2, or float."""
    try:
        return int(text)
    except ValueError:
        pass
    if "/" in text:
        return Fraction(text)
    return float(text)


# hypergraph sources

def _add_source(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--family", choices=FAMILIES, help="arithmetic family")
    p.add_argument("--n", type=int, help="modulus N")
    p.add_argument("--k", type=int, help="uniformity for kap")
    p.add_argument("--matrix", help="linsys matrix: file or rows like '1,1,-2;...'")
    p.add_argument("--exclude-zero", action="store_true", help="linsys: nonzero residues only")
    p.add_argument("--input", help="edge-list file instead of a family")


def _source(args) -> Hypergraph:
    if args.input:
        return read_edge_list(args.input)
    if not args.family or args.n is None:
        raise InvalidInput("give --family and --n, or --input")
    matrix = parse_matrix(args.matrix) if args.matrix else None
    return build_family(args.family, args.n, args.k, matrix, args.exclude_zero)


# output

def _emit(args, text: str) -> None:
    if args.out:
        atomic_write(args.out, text)
        if not getattr(args, "no_manifest", False):
            atomic_write(str(args.out) + ".manifest.json", dump_json(_manifest(args)))
    else:
        sys.stdout.write(text)


def _manifest(args) -> dict:
    skip = {"func", "from_manifest", "rerun_out", "no_manifest"}
    resolved = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    return {"tool": "hyperdev", "version": __version__, "command": args.command, "args": resolved}


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({c: _cell(row.get(c)) for c in columns})
    return buf.getvalue()


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, Fraction):
        return str(v)
    return v


# subcommands

def cmd_build(args) -> int:
    H = _source(args)
    _emit(args, format_edge_list(H))
    return EXIT_OK


def cmd_analyze(args) -> int:
    H = _source(args)
    rs = args.r if args.r else list(range(1, H.k + 1))
    report = {
        "N": H.N,
        "k": H.k,
        "h": H.h,
        "meta": H.meta,
        "regularity": {str(r): H.regularity_report(r, budget=args.budget, n_samples=args.samples, seed=args.seed) for r in rs},
    }
    if args.link is not None:
        L = H.link(args.link)
        report["link"] = {
            "vertex": args.link,
            "h": L.h,
            "regularity": {str(r): L.regularity_report(r, budget=args.budget, seed=args.seed) for r in range(1, L.k + 1)},
        }
    _emit(args, dump_json(report))
    return EXIT_OK


def cmd_verify_martingale(args) -> int:
    H = _source(args)
    rng = np.random.default_rng(args.seed)
    js = args.j if args.j else None
    matched, failures, bound_fail = 0, [], 0
    for t in range(args.trials):
        traj = random_trajectory(H, rng)
        bad = verify_trajectory(traj, js)
        if bad:
            failures.append({"trial": t, "mismatches": bad[:10]})
        else:
            matched += 1
        if args.increment_r:
            rep = check_increment_bound(traj, args.increment_r)
            bound_fail += len(rep.violations)
    report = {
        "family": H.meta.get("family"),
        "N": H.N,
        "k": H.k,
        "h": H.h,
        "trials": args.trials,
        "exact_matches": matched,
        "failures": failures,
    }
    if args.increment_r:
        report["increment_bound_violations"] = bound_fail
    _emit(args, dump_json(report))
    if failures or bound_fail:
        print(f"verification failed: {len(failures)} trial(s) mismatched", file=sys.stderr)
        return EXIT_ASSERT
    print(f"{matched}/{args.trials} exact matches", file=sys.stderr)
    return EXIT_OK


def cmd_bounds(args) -> int:
    params = parse_params(args.params) if args.params else {}
    pack = ConstantsPack.from_file(args.constants) if args.constants else None
    axes = parse_grid(args.grid)
    points = [dict(params)]
    for name, vals in axes:
        points = [{**pt, name: v} for pt in points for v in vals]
    rows = []
    for pt in points:
        res = evaluate(BoundQuery(args.theorem, pt, pack, args.rho))
        row = {k: v for k, v in pt.items() if not isinstance(v, (dict, list))}
        row.update(value=res.value, log_value=res.log_value, valid=res.valid)
        for name, ok in res.conditions.items():
            row[f"cond_{name}"] = ok
        rows.append(row)
    columns: list[str] = []
    for row in rows:
        columns.extend(c for c in row if c not in columns)
    _emit(args, _csv(rows, columns))
    return EXIT_OK


def cmd_simulate(args) -> int:
    H = _source(args)
    thresholds = parse_number_list(args.thresholds)
    param = _num(args.param)
    stats = tail_estimate(
        H,
        args.model,
        param,
        thresholds,
        args.samples,
        args.seed,
        threads=args.threads,
        confidence=args.confidence,
    )
    rows = stats.rows()
    for row in rows:
        if row["side"] == "abs":
            value, valid = reference_bound(H, args.model, param, row["threshold"])
            row["bound_value"], row["bound_valid"] = value, (valid if value is not None else None)
    _emit(args, _csv(rows, SIMULATE_COLUMNS))
    return EXIT_OK


def cmd_construct(args) -> int:
    if args.simple:
        size = {k: v for k, v in (("n", args.n), ("d", args.d), ("q", args.q), ("s", args.s)) if v is not None}
        H = simple_construction(args.r, **size)
        l = H.N // H.part_size
    else:
        if None in (args.l, args.s, args.gamma):
            raise InvalidInput("construct needs --l, --s and --gamma (or --simple)")
        spec = PartiteSpec(args.r, args.l, args.s, Fraction(args.gamma), relaxed=args.relaxed)
        H = build_partite(spec)
        l = args.l
    gamma = Fraction(args.gamma) if args.gamma else Fraction(1, 2)
    report = {"meta": H.meta, "h": H.h, "N": H.N}
    if args.r >= 2 or args.simple:
        report["niceness"] = niceness_check(H, args.r, l, gamma, budget=args.budget, seed=args.seed)
    if hasattr(H, "weights"):
        report["weights"] = H.weights
    text = dump_json(report)
    if args.edges:
        atomic_write(args.edges, format_edge_list(H))
    _emit(args, text)
    return EXIT_OK


def cmd_transfer(args) -> int:
    H = _source(args)
    p = _num(args.p)
    a = _num(args.a)
    mixture = transfer_tail(H, p, a, args.budget)
    direct = pmodel_exact_tail(H, p, a, args.budget)
    equal = mixture == direct if isinstance(mixture, Fraction) else abs(mixture - direct) <= 1e-12
    report = {
        "N": H.N,
        "h": H.h,
        "p": p,
        "a": a,
        "mixture": mixture,
        "direct": direct,
        "mixture_float": float(mixture),
        "equal": equal,
    }
    _emit(args, dump_json(report))
    return EXIT_OK if equal else EXIT_ASSERT


# parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed")
    common.add_argument("--threads", type=int, default=1, help="worker cap")
    common.add_argument("--budget", type=int, default=None, help="enumeration budget (else HYPERDEV_BUDGET or 1e7)")
    common.add_argument("--constants", help="constants pack JSON (c1, c2)")
    common.add_argument("--out", help="output file (stdout if omitted)")
    common.add_argument("--no-manifest", action="store_true", help="skip <out>.manifest.json")

    p = _Parser(prog="hyperdev", description="Hypergraph edge-count deviations.")
    p.add_argument("--version", action="version", version=f"hyperdev {__version__}")
    p.add_argument("--from-manifest", help="replay a run from its manifest")
    p.add_argument("--rerun-out", help="with --from-manifest: write here instead")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    b = sub.add_parser("build", parents=[common], help="write a family's edge list")
    _add_source(b)
    b.set_defaults(func=cmd_build)

    a = sub.add_parser("analyze", parents=[common], help="regularity report (JSON)")
    _add_source(a)
    a.add_argument("--r", type=int, nargs="*", help="tuple orders (default 1..k)")
    a.add_argument("--link", type=int, help="also report the link of this vertex")
    a.add_argument("--samples", type=int, default=10_000, help="sample size when exact is too costly")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("verify-martingale", parents=[common], help="exact check of the martingale representation")
    _add_source(v)
    v.add_argument("--trials", type=int, default=10)
    v.add_argument("--j", type=int, nargs="*", help="orders j (default 1..k)")
    v.add_argument("--increment-r", type=int, help="also check the increment bound at this r")
    v.set_defaults(func=cmd_verify_martingale)

    bo = sub.add_parser("bounds", parents=[common], help="evaluate a bound over a grid (CSV)")
    bo.add_argument("--theorem", required=True, choices=THEOREMS)
    bo.add_argument("--params", help="JSON, relaxed {N:101,m:50} or a file")
    bo.add_argument("--grid", help="e.g. 'a=1000:5000:1000;m=30,50'")
    bo.add_argument("--rho", type=float, default=10.0, help="factor standing in for <<")
    bo.set_defaults(func=cmd_bounds)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo deviation tails (CSV)")
    _add_source(s)
    s.add_argument("--model", choices=("m", "p"), required=True)
    s.add_argument("--param", required=True, help="m (m-model) or p (p-model)")
    s.add_argument("--thresholds", required=True, help="comma-separated, ascending")
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--confidence", type=float, default=0.95)
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("construct", parents=[common], help="l-part construction plus niceness report")
    c.add_argument("--r", type=int, required=True)
    c.add_argument("--l", type=int)
    c.add_argument("--s", type=int)
    c.add_argument("--gamma", help="e.g. 1/4")
    c.add_argument("--relaxed", action="store_true")
    c.add_argument("--simple", action="store_true", help="small-r explicit construction")
    c.add_argument("--n", type=int, help="simple r=1: number of vertices")
    c.add_argument("--d", type=int, help="simple r=1: degree")
    c.add_argument("--q", type=int, help="simple r=2: prime size of each copy")
    c.add_argument("--edges", help="also write the edge list here")
    c.set_defaults(func=cmd_construct)

    t = sub.add_parser("transfer", parents=[common], help="p-model tail: mixture vs direct enumeration")
    _add_source(t)
    t.add_argument("--p", required=True, help="probability, e.g. 1/2 for exact mode")
    t.add_argument("--a", default="0", help="deviation threshold")
    t.set_defaults(func=cmd_transfer)
    return p


COMMANDS = {
    "build": cmd_build,
    "analyze": cmd_analyze,
    "verify-martingale": cmd_verify_martingale,
    "bounds": cmd_bounds,
    "simulate": cmd_simulate,
    "construct": cmd_construct,
    "transfer": cmd_transfer,
}


def _from_manifest(parser, path: str, out: str | None) -> argparse.Namespace:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"manifest {path} is not JSON: {exc}") from None
    if data.get("tool") != "hyperdev" or "command" not in data:
        raise InvalidInput(f"{path} is not a hyperdev manifest")
    if data["command"] not in COMMANDS:
        raise InvalidInput(f"unknown command {data['command']!r} in manifest")
    ns = argparse.Namespace(**data.get("args", {}))
    ns.command = data["command"]
    ns.func = COMMANDS[data["command"]]
    if out:
        ns.out = out
    return ns


def main(argv: list[str] | None = None) -> int:
    saved = os.environ.get("HYPERDEV_BUDGET")
    try:
        return _main(argv)
    finally:
        if saved is None:
            os.environ.pop("HYPERDEV_BUDGET", None)
        else:
            os.environ["HYPERDEV_BUDGET"] = saved


def _main(argv: list[str] | None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.from_manifest:
            args = _from_manifest(parser, args.from_manifest, args.rerun_out)
        if not args.command:
            parser.print_help(sys.stderr)
            return EXIT_CONFIG
        if args.budget is not None:
            os.environ["HYPERDEV_BUDGET"] = str(args.budget)
        return args.func(args)
    except (InvalidInput, BudgetExceeded, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (VerificationFailed, ArithmeticError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_ASSERT


if __name__ == "__main__":
    sys.exit(main())
