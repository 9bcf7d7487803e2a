"""Command-line front end: tables, decompositions, grammar derivations,
enumeration dumps and the identity suite.

Usage:
    python -m stirling_lab table --family N --n 3
    python -m stirling_lab check --identity all --format json
    python -m stirling_lab decompose --family Mq --n 5 --q 1/2
    python -m stirling_lab grammar --spec dumont --start a --steps 2
    python -m stirling_lab enumerate --objects stirling --n 3 --stats ap,lap
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from stirling_lab import __version__, decomp, families, identities, stats
from stirling_lab import grammar as gr
from stirling_lab.config import GRAMMAR_DIR, LabConfig, get_config, use_config
from stirling_lab.exactpoly import Poly

logger = logging.getLogger(__name__)

SCHEMA = "stirling-lab/1"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
RULE = "=" * 80

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def _poly_json(p: Poly) -> Dict[str, Any]:
    return {"text": p.to_text(), **p.to_json()}


def _dumps(payload: Dict[str, Any]) -> str:
    return json.dumps({"schema": SCHEMA, **payload}, indent=2)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
        logger.info("wrote %s", out)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _parse_k(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"k must be a positive integer, got {text!r}") from None
    if k < 1:
        raise argparse.ArgumentTypeError(f"k must be a positive integer, got {text!r}")
    return k


# Subcommands ------------------------------------------------------------

def _key_text(family: str, key: tuple) -> str:
    if isinstance(key[0], str):
        return f"{key[0]}[{','.join(map(str, key[1:]))}]"
    return f"{family}[{','.join(map(str, key))}]"


def cmd_table(args: argparse.Namespace) -> int:
    payload: Dict[str, Any] = {"command": "table", "family": args.family, "n": args.n, "k": args.k}
    if args.family in families.TABLE_TAGS:
        table = families.coeff_table(args.family, args.n, args.k)
        if args.format == "json":
            payload["entries"] = [
                {"key": [str(part) for part in key], "value": _poly_json(c)} for key, c in table.items()
            ]
            text = _dumps(payload)
        else:
            text = "\n".join(f"{_key_text(args.family, key)} = {c}" for key, c in table.items())
    else:
        p = families.build(args.family, args.n, args.k, args.route)
        payload["route"] = args.route
        payload["polynomial"] = _poly_json(p)
        text = _dumps(payload) if args.format == "json" else p.to_text()
    _emit(text, args.out)
    return EXIT_OK


def _check_text(reports: List[identities.IdentityReport], timings: bool) -> str:
    lines = [RULE, "IDENTITY CHECKS", RULE]
    for r in reports:
        mark = "✓" if r.passed else "✗"
        line = f"{mark} {r.id} (bound {r.bound}, {r.method})"
        if timings:
            line += f" {r.wall_time:.2f}s"
        lines.append(line)
        if not r.passed:
            lines.append(f"    counterexample: {r.counterexample}")
    failed = sum(1 for r in reports if not r.passed)
    lines += [RULE, f"{len(reports) - failed}/{len(reports)} identities passed", RULE]
    return "\n".join(lines)


def cmd_check(args: argparse.Namespace) -> int:
    if args.list:
        checks = identities.list_identities()
        if args.format == "json":
            text = _dumps({
                "command": "check --list",
                "identities": [
                    {"id": c.id, "default_bound": c.default_bound, "method": c.method, "claim": c.claim}
                    for c in checks
                ],
            })
        else:
            width = max(len(c.id) for c in checks)
            text = "\n".join(f"{c.id:<{width}}  {c.default_bound:>2}  {c.method:<8}  {c.claim}" for c in checks)
        _emit(text, args.out)
        return EXIT_OK

    ids = None if args.identity == "all" else [args.identity]
    reports = identities.run_all(args.max_n, jobs=args.jobs, ids=ids)
    passed = all(r.passed for r in reports)
    if args.format == "json":
        text = _dumps({
            "command": "check",
            "passed": passed,
            "reports": [r.to_dict(timings=args.timings) for r in reports],
        })
    else:
        text = _check_text(reports, args.timings)
    _emit(text, args.out)
    return EXIT_OK if passed else EXIT_FAILED


def cmd_decompose(args: argparse.Namespace) -> int:
    if args.q is not None and args.family != "Mq":
        raise ValueError(f"--q applies only to family Mq, not {args.family}")
    if args.k is not None and args.family != "Ak":
        raise ValueError(f"--k applies only to family Ak, not {args.family}")
    result = decomp.decompose_family(args.family, args.n, args.k, args.q)

    def polys(values):
        return None if values is None else [_poly_json(v) for v in values]

    payload = {
        "command": "decompose",
        "family": result["family"],
        "n": result["n"],
        "k": args.k,
        "q": None if args.q is None else str(args.q),
        "reference_degree": result["reference_degree"],
        "polynomial": _poly_json(result["polynomial"]),
        "a": _poly_json(result["a"]),
        "b": _poly_json(result["b"]),
        "gamma_a": polys(result["gamma_a"]),
        "gamma_b": polys(result["gamma_b"]),
        "predicates": result["predicates"],
    }
    _emit(_dumps(payload), args.out)
    return EXIT_OK


def _resolve_grammar(spec: str) -> gr.Grammar:
    path = Path(spec)
    if not path.exists():
        named = GRAMMAR_DIR / f"{spec}.gram"
        if not named.exists():
            raise FileNotFoundError(f"no grammar file {spec!r} (also looked for {named})")
        path = named
    return gr.load_grammar(path)


def cmd_grammar(args: argparse.Namespace) -> int:
    g = _resolve_grammar(args.spec)
    start = gr.parse_poly(args.start)
    derived = gr.derive_n(g, start, args.steps)
    bindings = gr.parse_bindings(args.subs) if args.subs else {}
    result = derived.substitute(bindings)
    if args.format == "json":
        text = _dumps({
            "command": "grammar",
            "grammar": g.name,
            "rules": {v: g.rules[v].to_text() for v in g.letters},
            "start": start.to_text(),
            "steps": args.steps,
            "substitution": {v: p.to_text() for v, p in sorted(bindings.items())},
            "result": _poly_json(result),
        })
    else:
        text = result.to_text()
    _emit(text, args.out)
    return EXIT_OK


def _render_object(obj: tuple) -> str:
    return " ".join(map(str, obj))


def cmd_enumerate(args: argparse.Namespace) -> int:
    kind = args.objects
    available = stats.FIELDS_BY_KIND[kind]
    chosen = [s.strip() for s in args.stats.split(",") if s.strip()] if args.stats else list(available)
    unknown = [s for s in chosen if s not in available]
    if unknown:
        raise ValueError(f"unknown {kind} statistics: {', '.join(unknown)}; available: {', '.join(available)}")
    frame = stats.stat_frame(kind, args.n, args.k)
    if args.format == "words":
        text = "\n".join(_render_object(obj) for obj in frame["obj"])
    else:
        table = frame[["obj", *chosen]].assign(obj=frame["obj"].map(_render_object))
        buffer = io.StringIO()
        table.to_csv(buffer, index=False, lineterminator="\n")
        text = buffer.getvalue()
    _emit(text, args.out)
    return EXIT_OK


# Parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    common.add_argument("--out", metavar="FILE", help="write output to FILE instead of stdout")
    common.add_argument("--max-perm-n", type=int, metavar="N", help="largest n for permutation enumeration")
    common.add_argument("--max-signed-n", type=int, metavar="N", help="largest n for signed permutations")
    common.add_argument(
        "--max-stirling-count", type=int, metavar="C", help="largest number of Stirling words to enumerate"
    )

    parser = argparse.ArgumentParser(
        prog="stirling_lab",
        description="Exact-arithmetic workbench for Euler-Stirling statistics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    table = sub.add_parser("table", parents=[common], help="print a family polynomial or coefficient table")
    table.add_argument("--family", required=True, choices=families.FAMILY_TAGS + families.TABLE_TAGS)
    table.add_argument("--n", type=int, required=True)
    table.add_argument("--k", type=_parse_k, help="integer k for Ak and GammaK (default: symbolic k)")
    table.add_argument("--route", choices=families.ROUTES, default="rec")
    table.add_argument("--format", choices=("text", "json"), default="text")
    table.set_defaults(func=cmd_table)

    check = sub.add_parser("check", parents=[common], help="run identity checks")
    check.add_argument("--identity", default="all", help="identity id, or 'all'")
    check.add_argument("--max-n", type=int, metavar="N", help="bound for every selected identity")
    check.add_argument("--format", choices=("text", "json"), default="text")
    check.add_argument("--jobs", type=int, metavar="J", help="worker processes (default: $STIRLING_LAB_JOBS or 1)")
    check.add_argument("--timings", action="store_true", help="include wall times in the report")
    check.add_argument("--list", action="store_true", help="list registered identities and exit")
    check.set_defaults(func=cmd_check)

    dec = sub.add_parser("decompose", parents=[common], help="symmetric decomposition and positivity flags")
    dec.add_argument("--family", required=True, choices=("A", "B", "M", "N", "Ak", "Mq"))
    dec.add_argument("--n", type=int, required=True)
    param = dec.add_mutually_exclusive_group()
    param.add_argument("--k", type=_parse_k, help="integer k for Ak (default: symbolic k)")
    param.add_argument("--q", type=_parse_fraction, help="rational q for Mq, e.g. 1/2")
    dec.set_defaults(func=cmd_decompose)

    gram = sub.add_parser("grammar", parents=[common], help="iterate a grammar derivative")
    gram.add_argument("--spec", required=True, help="grammar file, or the name of a file in grammars/")
    gram.add_argument("--start", required=True, help="starting polynomial, e.g. 'a*b'")
    gram.add_argument("--steps", type=int, required=True)
    gram.add_argument("--subs", help="substitution applied afterwards, e.g. 'a=x, b=1'")
    gram.add_argument("--format", choices=("text", "json"), default="text")
    gram.set_defaults(func=cmd_grammar)

    enum = sub.add_parser("enumerate", parents=[common], help="dump objects and their statistics")
    enum.add_argument("--objects", required=True, choices=("perm", "signed", "stirling"))
    enum.add_argument("--n", type=int, required=True)
    enum.add_argument("--k", type=_parse_k, default=2, help="letter multiplicity for Stirling words")
    enum.add_argument("--stats", help="comma-separated statistics (default: all)")
    enum.add_argument("--format", choices=("csv", "words"), default="csv")
    enum.set_defaults(func=cmd_enumerate)

    return parser


def _command_config(args: argparse.Namespace) -> LabConfig:
    """The active configuration with guard and parallelism flags applied."""
    cfg = get_config()
    guard_changes = {
        name: value
        for name, value in (
            ("max_perm_n", args.max_perm_n),
            ("max_signed_n", args.max_signed_n),
            ("max_stirling_count", args.max_stirling_count),
        )
        if value is not None
    }
    cfg = replace(cfg, guards=replace(cfg.guards, **guard_changes))
    if getattr(args, "jobs", None) is not None:
        cfg = replace(cfg, jobs=args.jobs)
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (None, 0) else EXIT_ERROR
    _configure_logging(args.verbose)

    try:
        with use_config(_command_config(args)):
            return args.func(args)
    except (ValueError, LookupError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        logger.debug("command failed", exc_info=True)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
