"""Batch command-line interface over .alcm model files and theory files.

Exit codes: 0 success / true verdict, 1 false verdict (not entailed, not
satisfied, not a morphism, no countermodel), 2 input error, 3 budget
exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import basis as basis_mod
from . import reasoner as reasoner_mod
from .errors import AlcError, SearchBudgetExceededError
from .models import check_morphism, coarsest_bisimulation, coproduct, parse_individual_map, quotient
from .semantics import (
    Interpretation,
    format_model,
    format_subset,
    lfp,
    gfp,
    parse_model,
    satisfies,
    satisfies_fixpoint,
    Valuation,
)
from .syntax import (
    FixDef,
    Signature,
    format_theory,
    infer_signature,
    parse_concept,
    parse_gci,
    parse_theory,
    render_gci,
    unfold_cycles,
)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        raise AlcError(f"cannot read {path}: {exc.strerror}") from exc


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    except OSError as exc:
        raise AlcError(f"cannot write {path}: {exc.strerror}") from exc


def _load_model(path: str) -> Interpretation:
    return parse_model(_read(path))


def _load_theory(path: str, sig: Signature | None, extra: str = ""):
    text = _read(path)
    if sig is None:
        sig = infer_signature(text, extra)
    return parse_theory(text, sig), sig


def _cmd_eval(args) -> int:
    model = _load_model(args.model)
    concept = parse_concept(args.concept, model.signature)
    from .semantics import eval_concept

    print(format_subset(model, eval_concept(concept, model)))
    return EXIT_OK


def _cmd_check(args) -> int:
    model = _load_model(args.model)
    theory, _ = _load_theory(args.theory, model.signature)
    fixdefs = [g for g in theory if isinstance(g, FixDef)]
    unfolded = {d.defined: u for d, u in zip(fixdefs, unfold_cycles(fixdefs))}
    all_ok = True
    for g in theory:
        if isinstance(g, FixDef):
            ok = satisfies_fixpoint(model, unfolded[g.defined])
        else:
            ok = satisfies(model, g)
        all_ok &= ok
        print(f"{'sat' if ok else 'unsat'}  {render_gci(g)}")
    return EXIT_OK if all_ok else EXIT_FALSE


def _cmd_fixpoint(args) -> int:
    model = _load_model(args.model)
    tag = "gfp" if args.gfp else "lfp"
    definition = parse_gci(f"{tag} {args.definition}", model.signature)
    assert isinstance(definition, FixDef)
    valuation = Valuation.from_interpretation(model, definition.defined)
    compute = gfp if args.gfp else lfp
    result = compute(definition.body, definition.defined, valuation)
    print(format_subset(model, result))
    ok = model.concept_masks[definition.defined] == result
    print("satisfied" if ok else "not satisfied")
    return EXIT_OK if ok else EXIT_FALSE


def _print_basis(report: basis_mod.BasisReport, as_json: bool) -> None:
    if as_json:
        print(json.dumps(report.stats.as_json_record()))
        return
    theory = report.final()
    sys.stdout.write(format_theory(theory) if theory else "")
    print(f"# mode: {report.stats.mode}")
    print(f"# classes: {report.stats.classes}")
    print(f"# raw: {report.stats.raw_count}")
    if report.minimized is not None:
        print(f"# minimized: {report.stats.minimized_count}")


def _cmd_basis(args) -> int:
    model = _load_model(args.model)
    fam = basis_mod.build_family(model, mode=args.mode)
    report = basis_mod.generate_basis(model, fam)
    if args.minimize:
        report = basis_mod.minimize_report(report, budget=args.budget, sig=model.signature)
    _print_basis(report, args.json)
    return EXIT_OK


def _cmd_covariety_basis(args) -> int:
    models = [_load_model(path) for path in args.models]
    report = basis_mod.covariety_basis(
        models, mode=args.mode, minimized=args.minimize, budget=args.budget
    )
    _print_basis(report, args.json)
    return EXIT_OK


def _cmd_morphism(args) -> int:
    src = _load_model(args.src)
    dst = _load_model(args.dst)
    mapping = parse_individual_map(_read(args.mapfile))
    report = check_morphism(mapping, src, dst)
    if report.is_morphism:
        print("morphism" + ("".join(" " + f for f in report.flags)))
        return EXIT_OK
    print("not-a-morphism: " + report.violation.describe())
    return EXIT_FALSE


def _cmd_coproduct(args) -> int:
    models = [_load_model(path) for path in args.models]
    _write(args.output, format_model(coproduct(models)))
    return EXIT_OK


def _cmd_bisim_quotient(args) -> int:
    model = _load_model(args.model)
    q, _ = quotient(model, coarsest_bisimulation(model))
    _write(args.output, format_model(q))
    return EXIT_OK


def _cmd_entails(args) -> int:
    theory_text = _read(args.theory)
    sig = infer_signature(theory_text, args.gci)
    theory = parse_theory(theory_text, sig)
    gci = parse_gci(args.gci, sig)
    result = reasoner_mod.entails(theory, gci, budget=args.budget, sig=sig)
    if result.verdict == "timeout":
        print("timeout")
        return EXIT_BUDGET
    print("entailed" if result.verdict == "entailed" else "not entailed")
    if result.verdict == "not_entailed" and args.show_witness:
        sys.stdout.write(format_model(result.witness))
    return EXIT_OK if result.verdict == "entailed" else EXIT_FALSE


def _cmd_countermodel(args) -> int:
    theory_text = _read(args.theory)
    sig = infer_signature(theory_text, args.gci)
    theory = parse_theory(theory_text, sig)
    gci = parse_gci(args.gci, sig)
    found = reasoner_mod.bounded_countermodel(
        theory, gci, args.max_size, budget=args.budget, sig=sig
    )
    if found is None:
        print("none")
        return EXIT_FALSE
    sys.stdout.write(format_model(found))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alcbasis",
        description="Finite GCI bases, fixpoint semantics, and reasoning over finite ALC models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a concept in a model")
    p.add_argument("model")
    p.add_argument("-c", "--concept", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("check", help="check every GCI of a theory against a model")
    p.add_argument("model")
    p.add_argument("theory")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("fixpoint", help="compute a fixpoint of a cyclic definition")
    p.add_argument("model")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--gfp", action="store_true")
    group.add_argument("--lfp", action="store_true")
    p.add_argument("definition", help='definition of the form "c = CONCEPT"')
    p.set_defaults(func=_cmd_fixpoint)

    p = sub.add_parser("basis", help="compute a finite GCI basis of a model")
    p.add_argument("model")
    p.add_argument("--minimize", action="store_true")
    p.add_argument("--mode", choices=("closure", "separating"))
    p.add_argument("--json", action="store_true")
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=_cmd_basis)

    p = sub.add_parser("covariety-basis", help="basis of the covariety generated by models")
    p.add_argument("models", nargs="+")
    p.add_argument("--minimize", action="store_true")
    p.add_argument("--mode", choices=("closure", "separating"))
    p.add_argument("--json", action="store_true")
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(func=_cmd_covariety_basis)

    p = sub.add_parser("morphism", help="classify a map between two models")
    p.add_argument("src")
    p.add_argument("dst")
    p.add_argument("mapfile", help="lines of the form 'src -> dst'")
    p.set_defaults(func=_cmd_morphism)

    p = sub.add_parser("coproduct", help="write the coproduct of models")
    p.add_argument("models", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_coproduct)

    p = sub.add_parser("bisim-quotient", help="write the quotient by the coarsest bisimulation")
    p.add_argument("model")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=_cmd_bisim_quotient)

    p = sub.add_parser("entails", help="decide entailment of a GCI from a theory")
    p.add_argument("theory")
    p.add_argument("gci")
    p.add_argument("--budget", type=int, default=reasoner_mod.DEFAULT_BUDGET)
    p.add_argument("--show-witness", action="store_true")
    p.set_defaults(func=_cmd_entails)

    p = sub.add_parser("countermodel", help="search for a bounded countermodel")
    p.add_argument("theory")
    p.add_argument("gci")
    p.add_argument("--max-size", type=int, required=True)
    p.add_argument("--budget", type=int, default=reasoner_mod.DEFAULT_SEARCH_BUDGET)
    p.set_defaults(func=_cmd_countermodel)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SearchBudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except AlcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
