"""Command-line front end.

Subcommands: check (model checking), bisim (game solving), charform and
distinguish (characteristic formulae), product (reduced products and Łoś
reports), verify (the property suites), serve (the HTTP game service).
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import charform, games, products, semantics, verify
from . import formulas as fm
from .quantifiers import QuantifierError, parse_quantifier_list
from .structures import (
    StructureError,
    load_structure_file,
    parse_assignment,
    serialize_structure,
)


class CliError(Exception):
    pass


def _load(path: str, with_eq: bool):
    return load_structure_file(path, with_equality=with_eq)


def _registry(args, k: int):
    if getattr(args, "quantifiers", None):
        return parse_quantifier_list(args.quantifiers, k)
    raise CliError("--quantifiers is required (e.g. --quantifiers 'dia[R],all')")


def cmd_check(args) -> int:
    structure = _load(args.structure, args.with_eq)
    alpha = parse_assignment(args.alpha)
    k = len(alpha)
    if args.formula is None and args.formula_file is None:
        raise CliError("check needs --formula or --formula-file")
    if args.formula is not None:
        formulas = [fm.parse_formula(args.formula, k, structure.signature)]
    else:
        with open(args.formula_file, "r", encoding="utf-8") as handle:
            formulas = fm.parse_formula_lines(handle.read(), k, structure.signature)
    all_true = True
    for formula in formulas:
        if args.trace:
            for sub, ext in semantics.subformula_trace(structure, k, formula, oracle=args.oracle):
                tuples = sorted(ext, key=structure.sort_key)
                print(f"  {fm.print_formula(sub)}  =>  {{{', '.join(','.join(t) for t in tuples)}}}")
        verdict = semantics.evaluate(structure, alpha, formula, oracle=args.oracle)
        all_true = all_true and verdict
        print("true" if verdict else "false")
    return 0 if all_true else 1


def cmd_bisim(args) -> int:
    left = _load(args.left, args.with_eq)
    right = _load(args.right, args.with_eq)
    k = args.k
    registry = _registry(args, k)
    if args.rounds is not None:
        relation = games.bisim_rank(left, right, k, args.rounds, registry)
    else:
        relation = games.bisim(left, right, k, registry)
    strategy = games.extract_strategy(left, right, registry, relation)

    if args.alpha is not None or args.beta is not None:
        if args.alpha is None or args.beta is None:
            raise CliError("--alpha and --beta must be given together")
        alpha = parse_assignment(args.alpha)
        beta = parse_assignment(args.beta)
        related = relation.related(alpha, beta)
        failing = relation.least_failing_round(alpha, beta)
        if args.json:
            print(json.dumps({"related": related, "failsAtRound": failing,
                              "stabilized": relation.stabilized,
                              "stabilizationIndex": relation.stabilization_index}))
        elif related:
            horizon = "bisimilar" if args.rounds is None else f"related for {args.rounds} round(s)"
            print(horizon)
        else:
            print(f"not related: Player 1 wins the {failing}-round game")
        if args.strategy:
            print(json.dumps(strategy.to_table(), indent=2))
        return 0 if related else 1

    payload = {
        "levels": [sorted([[list(a), list(b)] for a, b in level]) for level in relation.levels],
        "stabilized": relation.stabilized,
        "stabilizationIndex": relation.stabilization_index,
    }
    if args.strategy:
        payload["strategy"] = strategy.to_table()
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        for r, level in enumerate(relation.levels):
            pairs = ", ".join(
                f"({','.join(a)};{','.join(b)})"
                for a, b in sorted(level, key=lambda p: (left.sort_key(p[0]), right.sort_key(p[1])))
            )
            print(f"~{r}: {pairs}")
        if relation.stabilized:
            print(f"stabilized at round {relation.stabilization_index}")
        if args.strategy:
            print(json.dumps(strategy.to_table(), indent=2))
    return 0


def _context(args, anchors: Sequence, k: int):
    structures = list(anchors)
    for path in getattr(args, "universe", None) or []:
        structures.append(_load(path, args.with_eq))
    registry = _registry(args, k)
    return charform.CharContext(structures, registry, k)


def cmd_charform(args) -> int:
    structure = _load(args.structure, args.with_eq)
    alpha = parse_assignment(args.alpha)
    ctx = _context(args, [structure], len(alpha))
    formula = charform.chi(ctx, structure, alpha, args.rank)
    print(fm.print_formula(formula))
    return 0


def cmd_distinguish(args) -> int:
    left = _load(args.left, args.with_eq)
    right = _load(args.right, args.with_eq)
    alpha = parse_assignment(args.alpha)
    beta = parse_assignment(args.beta)
    ctx = _context(args, [left, right], len(alpha))
    formula = charform.distinguishing_formula(ctx, left, alpha, right, beta)
    if formula is None:
        print("bisimilar")
        return 0
    print(fm.print_formula(formula))
    print(f"# rank {fm.quantifier_rank(formula)}: true at ({args.alpha}), false at ({args.beta})",
          file=sys.stderr)
    return 0


def cmd_product(args) -> int:
    family = [_load(path, args.with_eq) for path in args.structures]
    labels = tuple(str(i) for i in range(len(family)))
    if args.filter is not None and args.principal is not None:
        raise CliError("--filter and --principal are mutually exclusive")
    if args.filter is not None:
        with open(args.filter, "r", encoding="utf-8") as handle:
            filt = products.load_filter(handle.read())
    elif args.principal is not None:
        filt = products.principal_ultrafilter(labels, str(args.principal))
    else:
        filt = products.trivial_filter(labels)

    rp = products.reduced_product(family, filt)
    if args.los:
        if args.formula is None or args.alphas is None:
            raise CliError("--los needs --formula and --alphas (one assignment per component, ';'-separated)")
        assignments = [parse_assignment(part) for part in args.alphas.split(";")]
        k = len(assignments[0])
        formula = fm.parse_formula(args.formula, k, family[0].signature)
        report = products.los_check(family, assignments, filt, formula)
        print(json.dumps(report.to_dict(), indent=2))
        return 0 if report.agree else 1
    payload = {
        "product": rp.structure.to_dict(),
        "filter": filt.to_dict(),
        "classes": {",".join(t): name for t, name in sorted(rp.class_name.items())},
    }
    print(json.dumps(payload, indent=2) if args.json else serialize_structure(rp.structure))
    return 0


def cmd_verify(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.count is not None:
        overrides["count"] = args.count
    if args.max_size is not None:
        overrides["max_size"] = args.max_size
    if args.rank is not None:
        overrides["max_rank"] = args.rank
    if args.probes is not None:
        overrides["probes"] = args.probes
    if args.quantifiers is not None:
        known = set(verify.ALL_FAMILIES)
        families = tuple(f.strip() for f in args.quantifiers.split(",") if f.strip())
        unknown = [f for f in families if f not in known]
        if unknown:
            raise CliError(f"unknown quantifier families {unknown}; known: {sorted(known)}")
        overrides["families"] = families
    report = verify.run_suite(args.suite, **overrides)
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report.summary())
        for failure in report.failures[:5]:
            print(json.dumps(failure, indent=2, default=str))
    return 0 if report.passed else 1


def cmd_serve(args) -> int:
    from .service import run_server

    run_server(host=args.host, port=args.port, state_dir=args.state_dir, static_dir=args.static)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kqlogic",
        description="Workbench for witness-set quantifier logics over finite relational structures.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--with-eq", action="store_true",
                       help="add the binary relation 'eq' interpreted as the diagonal")

    p = sub.add_parser("check", help="evaluate a formula at a pointed structure")
    p.add_argument("structure")
    p.add_argument("--alpha", required=True, help="comma-separated element names (fixes k)")
    p.add_argument("--formula")
    p.add_argument("--formula-file")
    p.add_argument("--trace", action="store_true", help="print the extension of every subformula")
    p.add_argument("--oracle", action="store_true",
                   help="use the powerset-based quantifier reference (universes <= 4)")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bisim", help="solve the bisimulation game")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--rounds", type=int)
    p.add_argument("--quantifiers", required=True, help="comma-separated, e.g. 'dia[R],all'")
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--strategy", action="store_true", help="dump Player 2's strategy as JSON")
    p.add_argument("--json", action="store_true")
    common(p)
    p.set_defaults(func=cmd_bisim)

    p = sub.add_parser("charform", help="characteristic formula of a pointed structure")
    p.add_argument("structure")
    p.add_argument("--alpha", required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--universe", nargs="*", help="additional comparison structures")
    p.add_argument("--quantifiers", required=True)
    common(p)
    p.set_defaults(func=cmd_charform)

    p = sub.add_parser("distinguish", help="minimal-rank separating formula, or 'bisimilar'")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--alpha", required=True)
    p.add_argument("--beta", required=True)
    p.add_argument("--universe", nargs="*")
    p.add_argument("--quantifiers", required=True)
    common(p)
    p.set_defaults(func=cmd_distinguish)

    p = sub.add_parser("product", help="direct/reduced products and Łoś reports")
    p.add_argument("structures", nargs="+")
    p.add_argument("--filter", help="filter document (JSON file)")
    p.add_argument("--principal", help="index label for a principal ultrafilter")
    p.add_argument("--los", action="store_true")
    p.add_argument("--formula")
    p.add_argument("--alphas", help="per-component assignments, ';'-separated")
    p.add_argument("--json", action="store_true")
    common(p)
    p.set_defaults(func=cmd_product)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", choices=sorted(verify.SUITE_NAMES))
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int)
    p.add_argument("--max-size", type=int)
    p.add_argument("--rank", type=int)
    p.add_argument("--probes", type=int)
    p.add_argument("--quantifiers", help="restrict to quantifier families, e.g. 'dia,all,ex_ge'")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("serve", help="run the HTTP game service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--state-dir", help="directory for session snapshots")
    p.add_argument("--static", help="directory with the explorer UI bundle")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, StructureError, QuantifierError, fm.FormulaError,
            semantics.SemanticsError, games.GameError, charform.CharformError,
            products.ProductError, verify.VerifyError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    main()
