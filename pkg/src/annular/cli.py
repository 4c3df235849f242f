"""Command-line entry point: ``annular <command> ...``.

Exit status is 0 when every check in the run passes, 1 when a check fails
and 2 for usage or parse errors.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from . import cellular, growth, presentations, repdecomp
from .diagram import DiagramError, FamilyId, compose, from_text, to_text

log = logging.getLogger("annular")

DEFAULT_SEED = 0
DEFAULT_CAP = repdecomp.CHOP_CAP


def _scalar(text):
    if text is None:
        return None
    return Fraction(text)


def _field(text):
    """'Q' for the rationals or a prime."""
    if text is None or text.upper() == "Q":
        return None
    p = int(text)
    from .exactmath import is_prime
    if not is_prime(p):
        raise argparse.ArgumentTypeError(f"{text} is not prime")
    return p


def _write(out, text, args=None):
    """Write atomically to --out, or to stdout."""
    if not out:
        sys.stdout.write(text)
        return
    path = Path(out)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=".annular-")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _meta(args, **extra):
    keys = ("command", "family", "m", "lam", "r", "beta", "alpha", "z", "field", "seed",
            "nmax", "depth", "cap")
    lines = []
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            lines.append(f"# {k}={v}")
    for k, v in extra.items():
        lines.append(f"# {k}={v}")
    return "\n".join(lines) + "\n"


def _z(args, fam):
    """z defaults to 1 for affine planar families, whose forms need it."""
    if args.z is None and fam.planar and fam.flavor in ("affineBar", "affineReduced"):
        return Fraction(1)
    return args.z


def _family(args):
    return FamilyId.parse(args.family, r=args.r)


# --- commands -----------------------------------------------------------------------------

def cmd_compose(args) -> int:
    try:
        a = from_text(Path(args.a).read_text())
        b = from_text(Path(args.b).read_text())
    except (OSError, DiagramError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if a.s != b.t:
        print(f"error: arity mismatch ({a.s} bottom vs {b.t} top)", file=sys.stderr)
        return 2
    el = compose(a, b)
    text = to_text(el.diagram) + f"betaExp={el.beta} alphaExp={el.alpha} loops={el.diagram.loops}\n"
    _write(args.out, text)
    return 0


def cmd_check(args) -> int:
    try:
        if args.builtin:
            pres = presentations.builtin_presentation(args.builtin, args.m, args.A)
            suite = f"{args.builtin} m={args.m}"
        elif args.file:
            pres = presentations.parse_presentation(Path(args.file).read_text())
            suite = args.file
        else:
            print("error: give a presentation file or --builtin", file=sys.stderr)
            return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    records = presentations.check_relations(pres, suite)
    verdict = presentations.summarize(records)
    lines = [f"suite {suite}: {verdict['instances']} instances, "
             f"{len(verdict['failures'])} failures, ok={verdict['ok']}"]
    for r in records:
        mark = "PASS" if r.passed else "FAIL"
        lines.append(f"{mark} [{r.status}] {r.label}: {r.relation}")
    for name in verdict["typos_unrefuted"]:
        lines.append(f"UNREFUTED typo {name}")
    _write(args.out, "\n".join(lines) + "\n")
    return 0 if verdict["ok"] else 1


def _lams(args, fam, m):
    return [args.lam] if args.lam is not None else cellular.lambda_set(fam, m)


def cmd_topsets(args) -> int:
    fam = _family(args)
    rows, bad = [], 0
    ms = range(1, args.m + 1) if args.upto else [args.m]
    for m in ms:
        for lam in _lams(args, fam, m):
            count = len(cellular.top_set(fam, m, lam))
            try:
                formula = cellular.top_count_formula(fam, m, lam, fam.r)
            except cellular.UnsupportedFamily:
                formula = ""
            if formula != "" and formula != count:
                bad += 1
            rows.append({"family": str(fam), "m": m, "lambda": lam, "r": fam.r or "",
                         "count": count, "formula": formula})
    _write(args.out, _meta(args) + cellular.counts_csv(rows))
    return 1 if bad else 0


def cmd_gram(args) -> int:
    fam = _family(args)
    if args.lam is None:
        print("error: --lambda is required", file=sys.stderr)
        return 2
    G = cellular.gram_matrix(fam, args.m, args.lam)
    lines = [_meta(args).rstrip("\n")]
    lines.append("# top set: " + " | ".join(to_text(x).strip().replace("\n", "; ") for x in G.top.diagrams))
    for row in G.entries:
        lines.append(",".join("0" if x is None else str(x) for x in row))
    ok = G.symmetric_under_star()
    if args.beta is not None:
        rank = cellular.simple_dim(fam, args.m, args.lam, args.beta, args.alpha, _z(args, fam),
                                   p=args.field)
        lines.append(f"# rank={rank}")
    lines.append(f"# star_symmetric={ok}")
    _write(args.out, "\n".join(lines) + "\n")
    return 0 if ok else 1


def cmd_simpledims(args) -> int:
    fam = _family(args)
    beta = args.beta if args.beta is not None else Fraction(1)
    rows = []
    params = cellular.simple_param_set(fam, args.m, beta, args.alpha)
    for lam in _lams(args, fam, args.m):
        try:
            rank = cellular.simple_dim(fam, args.m, lam, beta, args.alpha, _z(args, fam), p=args.field)
        except ValueError as exc:
            rank = f"n/a ({exc})"
        labels = [p for p in params if p[0] == lam]
        rows.append({"family": str(fam), "m": args.m, "lambda": lam, "r": fam.r or "",
                     "count": len(cellular.top_set(fam, args.m, lam)), "rank": rank,
                     "params": ";".join(map(str, labels))})
    _write(args.out, _meta(args) + cellular.counts_csv(rows))
    return 0


def _kv(tokens):
    """Split 'key=value' tokens from the rest of a growth spec."""
    words, kv = [], {}
    for t in tokens:
        if "=" in t and not t.startswith("weights="):
            k, v = t.split("=", 1)
            kv[k] = v
        else:
            words.append(t)
    return words, kv


def cmd_growth(args) -> int:
    words, kv = _kv(args.spec)
    nmax = args.nmax = int(kv.get("nmax", args.nmax))
    depth = args.depth = int(kv.get("depth", args.depth))
    if not words:
        print("error: empty growth spec", file=sys.stderr)
        return 2
    if words[0] == "wallpaper":
        lines = [_meta(args, spec=" ".join(args.spec)).rstrip("\n"), "n,engine,paperFormula,conserved,discrepancy"]
        ok = True
        for n in range(1, nmax + 1):
            rep = growth.wallpaper_report(n)
            ok &= rep["conserved"]
            flag = "DISCREPANCY" if rep["discrepancy"] else ""
            lines.append(f"{n},{rep['engine']},{rep['paperFormula']},{rep['conserved']},{flag}")
            if rep["discrepancy"]:
                log.warning("n=%d: engine %d differs from the closed form %d", n, rep["engine"],
                            rep["paperFormula"])
        _write(args.out, "\n".join(lines) + "\n")
        return 0 if ok else 1
    if words[0] == "cell":
        fam = FamilyId.parse(words[1] if len(words) > 1 else args.family, r=args.r)
        m = int(kv.get("m", args.m))
        lam = int(kv.get("lambda", args.lam if args.lam is not None else 0))
        z = Fraction(kv.get("z", args.z if args.z is not None else 1))
        beta = Fraction(kv.get("beta", args.beta if args.beta is not None else 1))
        mode = kv.get("mode", "summand")
        p = args.field or repdecomp.DEFAULT_PRIME
        V = repdecomp.cell_matrix_rep(fam, m, lam, z=z, beta0=beta, alpha0=args.alpha, p=p)
        if V.dim > args.cap:
            print(f"error: dimension {V.dim} exceeds cap {args.cap}", file=sys.stderr)
            return 2
        G = repdecomp.fusion_graph(V, depth, mode, seed=args.seed)
        info = repdecomp.graph_analytics(G)
        meta = {"spec": " ".join(args.spec), "field": p, "seed": args.seed, "cap": args.cap,
                "depth": depth, "mode": mode, "vertices": len(G.vertices),
                "final_basic_classes": info["final_basic_classes"]}
        _write(args.out, repdecomp.series_csv(G, nmax, meta=meta))
        if args.dot:
            _write(args.dot, G.to_dot())
        return 0 if G.conservation_ok() else 1
    try:
        series = growth.growth_series(" ".join(words), nmax)
    except growth.UnsupportedGroup as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    series.meta.update({"spec": " ".join(words), "nmax": nmax})
    _write(args.out, series.to_csv())
    return 0


# --- parser -------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", default="aTL")
    common.add_argument("--m", type=int, default=3)
    common.add_argument("--lambda", dest="lam", type=int)
    common.add_argument("--r", type=int)
    common.add_argument("--beta", type=_scalar)
    common.add_argument("--alpha", type=_scalar)
    common.add_argument("--z", type=_scalar)
    common.add_argument("--field", type=_field, help="Q or a prime p")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--nmax", type=int, default=8)
    common.add_argument("--depth", type=int, default=6)
    common.add_argument("--cap", type=int, default=DEFAULT_CAP)
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--dot", help="DOT file for fusion graphs")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="annular", description="Affine and periodic diagram algebras.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compose", parents=[common], help="compose two diagram files (a on top)")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("check", parents=[common], help="verify a presentation")
    p.add_argument("file", nargs="?")
    p.add_argument("--builtin")
    p.add_argument("--A", type=int, default=2, help="free integer in twist relations")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("topsets", parents=[common], help="top-set counts against closed formulas")
    p.add_argument("--upto", action="store_true", help="all m from 1 to --m")
    p.set_defaults(func=cmd_topsets)

    p = sub.add_parser("gram", parents=[common], help="Gram matrix of a cell module")
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("simpledims", parents=[common], help="ranks of specialised forms")
    p.set_defaults(func=cmd_simpledims)

    p = sub.add_parser("growth", parents=[common], help="growth series of tensor powers")
    p.add_argument("spec", nargs="+", help="e.g. 'wreath Z S3 weights=1,2,3' or 'cell aTL m=3 lambda=1'")
    p.set_defaults(func=cmd_growth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
