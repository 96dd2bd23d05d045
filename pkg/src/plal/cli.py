"""Command-line front end.

Exit codes: 0 answered, 1 negative answer, 2 usage or parse error,
3 unknown (search budget exhausted).
"""
from __future__ import annotations

import argparse
import contextlib
import json
import sys
from typing import Dict, List, Optional, Sequence, TextIO

from .chain import (
    ChainError,
    Kind,
    LexChain,
    Sqrt2,
    classify,
    format_element,
    p_radical,
    rank,
    shift_normalize,
    strongly_pointed_part,
)
from .embeddings import (
    find_partial_embedding,
    normalize_universal_class,
    parse_universal_class,
    universal_member,
    verify_partial_embedding,
)
from .equations import check_bruteforce, check_oracle, parse_family, witness_bound
from .mundici import check_mv_axioms, gamma
from .terms import Equation, TermSyntaxError, parse_equations
from .varieties import (
    axioms_variety,
    axioms_Zn,
    deciding_axiom,
    enumerate_lattice,
    export_dot,
    member,
    parse_variety,
)

SCHEMA = 1
EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_UNKNOWN = 0, 1, 2, 3


class _Out:
    """Collects text lines and a JSON record; only one is printed."""

    def __init__(self, verb: str) -> None:
        self.lines: List[str] = []
        self.record: Dict[str, object] = {"schema": SCHEMA, "verb": verb}

    def line(self, text: str) -> None:
        self.lines.append(text)


def _elem_json(e) -> list:
    return [[v.a, v.b] if isinstance(v, Sqrt2) else v for v in e]


def _rank_text(r) -> str:
    if isinstance(r, float):
        return "+inf" if r > 0 else "-inf"
    return str(r)


def _fmt_assignment(pairs) -> str:
    return " ".join(f"{name}={format_element(v)}" for name, v in pairs)


def _family_line(ax, expand: bool) -> str:
    if isinstance(ax, Equation):
        return str(ax)
    if expand:
        return f"{ax}\t{ax.equation()}"
    return str(ax)


# -- verbs ---------------------------------------------------------------------


def cmd_check(a, out: _Out) -> int:
    c = LexChain.parse(a.chain)
    if a.equation is not None:
        eqs = parse_equations(a.equation)
        if not a.brute:
            raise ValueError("raw equations are only checked by search; add --brute")
        bound = a.bound if a.bound is not None else 8
        out.record.update(chain=str(c), equation=[str(e) for e in eqs], method="search", bound=bound)
        for eq in eqs:
            res = check_bruteforce(c, eq, bound)
            if not res.valid:
                out.record.update(valid=False, failed=str(eq), witness={k: _elem_json(v) for k, v in res.witness})
                out.line(f"INVALID {_fmt_assignment(res.witness)}")
                return EXIT_NO
        out.record.update(valid=True, witness=None)
        out.line(f"VALID bound={bound}")
        return EXIT_OK
    fam = parse_family(a.family)
    out.record.update(chain=str(c), family=str(fam))
    if a.brute:
        bound = a.bound if a.bound is not None else witness_bound(c, fam)
        res = check_bruteforce(c, fam, bound)
        out.record.update(method="search", bound=bound, valid=res.valid)
        if res.valid:
            out.record["witness"] = None
            out.line(f"VALID bound={bound}")
            return EXIT_OK
        out.record["witness"] = {k: _elem_json(v) for k, v in res.witness}
        out.line(f"INVALID {_fmt_assignment(res.witness)}")
        return EXIT_NO
    res = check_oracle(c, fam)
    out.record.update(method="oracle", valid=res.valid)
    out.line("VALID" if res.valid else "INVALID")
    return EXIT_OK if res.valid else EXIT_NO


def cmd_classify(a, out: _Out) -> int:
    c = LexChain.parse(a.chain)
    g = classify(c)
    r = rank(c)
    if g.kind == "Z0":
        radical = "undefined"
    else:
        rad = p_radical(c)
        radical = "trivial" if rad is None else str(rad)
    out.record.update(chain=str(c), generator=str(g), rank=_rank_text(r), radical=radical)
    out.line(f"{g} rank={_rank_text(r)}")
    out.line(f"radical={radical}")
    return EXIT_OK


def cmd_axioms(a, out: _Out) -> int:
    if a.zn is not None:
        axs = axioms_Zn(a.zn)
        out.record["zn"] = a.zn
    else:
        v = parse_variety(a.variety)
        axs = axioms_variety(v)
        out.record["variety"] = str(v)
    out.record["axioms"] = [
        {"name": str(ax), "equation": str(ax if isinstance(ax, Equation) else ax.equation())}
        for ax in axs
    ]
    for ax in axs:
        out.line(_family_line(ax, a.expand))
    return EXIT_OK


def cmd_member(a, out: _Out) -> int:
    c = LexChain.parse(a.chain)
    v = parse_variety(a.variety)
    ok = member(c, v)
    out.record.update(chain=str(c), variety=str(v), member=ok)
    if ok:
        out.record["fails"] = None
        out.line("true")
        return EXIT_OK
    ax = deciding_axiom(c, v)
    out.record["fails"] = None if ax is None else str(ax)
    out.line("false")
    if ax is not None:
        out.line(f"fails: {ax}")
    return EXIT_NO


def cmd_lattice(a, out: _Out) -> int:
    lat = enumerate_lattice(a.nmax, a.side)
    out.record.update(nmax=a.nmax, side=a.side, nodes=len(lat.nodes), covers=len(lat.covers))
    out.line(f"nodes={len(lat.nodes)} covers={len(lat.covers)}")
    if a.list:
        out.record["varieties"] = [str(v) for v in lat.nodes]
        out.record["cover_pairs"] = [list(p) for p in lat.covers]
        for i, v in enumerate(lat.nodes):
            out.line(f"{i}\t{v}")
        for lo, hi in lat.covers:
            out.line(f"{lo} < {hi}")
    if a.dot:
        text = export_dot(lat)
        if a.dot == "-":
            out.lines.append(text.rstrip("\n"))
        else:
            with open(a.dot, "w", encoding="utf-8") as fh:
                fh.write(text)
            out.line(f"wrote {a.dot}")
        out.record["dot"] = a.dot
    return EXIT_OK


def _aligned_table(elems, op, name: str) -> List[str]:
    labels = [format_element(e) for e in elems]
    w = max(len(s) for s in labels + [name])
    rows = [name.rjust(w) + " | " + " ".join(s.rjust(w) for s in labels)]
    rows.append("-" * len(rows[0]))
    for e, s in zip(elems, labels):
        rows.append(s.rjust(w) + " | " + " ".join(format_element(op(e, f)).rjust(w) for f in elems))
    return rows


def cmd_gamma(a, out: _Out) -> int:
    c = LexChain.parse(a.chain)
    m = gamma(c)
    if m.finite:
        elems = m.elements()
        report = check_mv_axioms(m)
        out.line(f"finite MV-chain carrier={len(elems)}")
    else:
        window = a.window if a.window is not None else 4
        elems = m.elements(window)
        report = check_mv_axioms(m, window)
        out.line(f"infinite MV-chain window={window} elements={len(elems)}")
        out.record["window"] = window
    out.record.update(chain=str(c), finite=m.finite, carrier=len(elems), axioms_ok=report.ok)
    out.record["failures"] = [{"axiom": k, "witness": [_elem_json(x) for x in w]} for k, w in report.failures]
    out.line("axioms=ok" if report.ok else "axioms=FAILED")
    for k, w in report.failures:
        out.line(f"fails {k} at {', '.join(format_element(x) for x in w)}")
    if a.table:
        rows = []
        for name, op in (("oplus", m.oplus), ("otimes", m.otimes)):
            out.lines += _aligned_table(elems, op, name)
            out.line("")
            for x in elems:
                for y in elems:
                    r = op(x, y)
                    rows.append({"op": name, "a": _elem_json(x), "b": _elem_json(y), "c": _elem_json(r)})
                    out.line(f"{format_element(x)} {name} {format_element(y)} = {format_element(r)}")
        for x in elems:
            r = m.neg(x)
            rows.append({"op": "neg", "a": _elem_json(x), "c": _elem_json(r)})
            out.line(f"neg {format_element(x)} = {format_element(r)}")
        out.record["rows"] = rows
    return EXIT_OK if report.ok else EXIT_NO


def cmd_embed(a, out: _Out) -> int:
    src = LexChain.parse(a.source)
    tgt = LexChain.parse(a.target)
    F = list(src.window(a.window))
    pe = find_partial_embedding(src, F, tgt, a.budget)
    out.record.update(source=str(src), target=str(tgt), window=a.window, budget=a.budget)
    if pe is None:
        out.record.update(found=False, map=None)
        out.line("NOT-FOUND")
        return EXIT_UNKNOWN
    ok = verify_partial_embedding(pe)
    out.record.update(found=True, verified=ok, map=[[_elem_json(x), _elem_json(y)] for x, y in pe.pairs])
    out.line("FOUND verified" if ok else "FOUND unverified")
    for x, y in sorted(pe.pairs):
        out.line(f"{format_element(x)} -> {format_element(y)}")
    return EXIT_OK


def cmd_uclass(a, out: _Out) -> int:
    c = LexChain.parse(a.chain)
    u = normalize_universal_class(parse_universal_class(a.cls))
    res = universal_member(c, u, a.budget)
    out.record.update(chain=str(c), uclass=str(u), answer=res.answer)
    out.record["witnesses"] = [{"window": w, "generator": str(g)} for w, g, _ in res.witnesses]
    out.line(res.answer)
    for w, g, _ in res.witnesses:
        out.line(f"window={w} generator={g}")
    if res.answer != "Yes":
        out.record["failed_window"] = res.failed_window
        out.line(f"no generator found for window={res.failed_window}")
        return EXIT_UNKNOWN
    return EXIT_OK


def cmd_normalize(a, out: _Out) -> int:
    if a.cls is not None:
        u = normalize_universal_class(parse_universal_class(a.cls))
        flagged = [list(p) for part in u.parts for p in part.flagged]
        out.record.update(uclass=str(u), flagged=flagged)
        out.line(str(u))
        for part in u.parts:
            for j, d in part.flagged:
                out.line(f"flagged {part.sign} j={j} d={d}")
        return EXIT_OK
    c = LexChain.parse(a.chain)
    sp = strongly_pointed_part(c)
    out.record["chain"] = str(c)
    if sp.kinds == (Kind.Z, Kind.Z):
        norm, iso = shift_normalize(sp)
        out.record.update(normal=str(norm), shear=iso.t)
        out.line(f"{norm} shear={iso.t}")
    else:
        out.record.update(normal=str(sp), shear=None)
        out.line(str(sp))
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON record")
    p = argparse.ArgumentParser(prog="plal", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("check", parents=[common], help="validity of an equation in a chain")
    s.add_argument("--chain", required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--family")
    g.add_argument("--equation", help="raw equation such as 'x v -x >= 0' (search only)")
    s.add_argument("--brute", action="store_true", help="exhaustive search instead of the oracle")
    s.add_argument("--bound", type=int)
    s.set_defaults(run=cmd_check)

    s = sub.add_parser("classify", parents=[common], help="generator, rank and radical")
    s.add_argument("--chain", required=True)
    s.set_defaults(run=cmd_classify)

    s = sub.add_parser("axioms", parents=[common], help="equational basis")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--variety")
    g.add_argument("--zn", type=int)
    s.add_argument("--expand", action="store_true", help="print the equations too")
    s.set_defaults(run=cmd_axioms)

    s = sub.add_parser("member", parents=[common], help="is the chain in the variety")
    s.add_argument("--chain", required=True)
    s.add_argument("--variety", required=True)
    s.set_defaults(run=cmd_member)

    s = sub.add_parser("lattice", parents=[common], help="enumerate the variety lattice")
    s.add_argument("--nmax", type=int, required=True)
    s.add_argument("--side", choices=("pos", "neg", "both"), default="both")
    s.add_argument("--dot", help="write DOT here ('-' for stdout)")
    s.add_argument("--list", action="store_true", help="print every node and cover")
    s.set_defaults(run=cmd_lattice)

    s = sub.add_parser("gamma", parents=[common], help="the MV-algebra of a chain")
    s.add_argument("--chain", required=True)
    s.add_argument("--table", action="store_true")
    s.add_argument("--window", type=int, help="window for infinite carriers")
    s.set_defaults(run=cmd_gamma)

    s = sub.add_parser("embed", parents=[common], help="partial embedding of a window")
    s.add_argument("--from", dest="source", required=True)
    s.add_argument("--to", dest="target", required=True)
    s.add_argument("--window", type=int, required=True)
    s.add_argument("--budget", type=int, required=True)
    s.set_defaults(run=cmd_embed)

    s = sub.add_parser("uclass", parents=[common], help="universal class membership (semi-decision)")
    s.add_argument("--chain", required=True)
    s.add_argument("--class", dest="cls", required=True)
    s.add_argument("--budget", type=int, default=3)
    s.set_defaults(run=cmd_uclass)

    s = sub.add_parser("normalize", parents=[common], help="normal form of a chain or class")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--chain")
    g.add_argument("--class", dest="cls")
    s.set_defaults(run=cmd_normalize)
    return p


def run(argv: Sequence[str], stdout: TextIO = sys.stdout, stderr: TextIO = sys.stderr) -> int:
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    out = _Out(args.verb)
    try:
        code = args.run(args, out)
    except (ChainError, TermSyntaxError, ValueError) as exc:
        print(f"plal {args.verb}: {exc}", file=stderr)
        return EXIT_USAGE
    if args.json:
        out.record["exit"] = code
        stdout.write(json.dumps(out.record, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        for text in out.lines:
            stdout.write(text + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
