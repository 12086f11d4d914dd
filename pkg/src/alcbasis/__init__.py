"""Finite GCI bases, fixpoint semantics, and reasoning over finite ALC models."""

from .basis import (
    BasisReport,
    BasisStats,
    DefinableFamily,
    build_family,
    check_separation,
    covariety_basis,
    definable_closure,
    generate_basis,
    minimize,
    minimize_report,
    representative,
    separating_family,
)
from .errors import AlcError
from .models import (
    BehaviorSignature,
    MorphismReport,
    behavior_signature,
    check_morphism,
    coarsest_bisimulation,
    coproduct,
    fold_map,
    injection_map,
    parse_individual_map,
    preservation_report,
    quotient,
)
from .reasoner import QueryResult, bounded_countermodel, entails, is_satisfiable
from .semantics import (
    Interpretation,
    Valuation,
    eval_concept,
    fixpoint_step,
    format_model,
    format_subset,
    gfp,
    lfp,
    parse_model,
    satisfies,
    satisfies_fixpoint,
)
from .syntax import (
    And,
    BOT,
    Bot,
    Concept,
    Equiv,
    Exists,
    FixDef,
    Forall,
    Gci,
    Name,
    Not,
    Or,
    Signature,
    Subsumes,
    TOP,
    Theory,
    Top,
    format_theory,
    infer_signature,
    negation_parity,
    nnf,
    parse_concept,
    parse_gci,
    parse_theory,
    render,
    render_gci,
    unfold_cycles,
)

__all__ = [
    "AlcError",
    "And",
    "BOT",
    "BasisReport",
    "BasisStats",
    "BehaviorSignature",
    "Bot",
    "Concept",
    "DefinableFamily",
    "Equiv",
    "Exists",
    "FixDef",
    "Forall",
    "Gci",
    "Interpretation",
    "MorphismReport",
    "Name",
    "Not",
    "Or",
    "QueryResult",
    "Signature",
    "Subsumes",
    "TOP",
    "Theory",
    "Top",
    "Valuation",
    "behavior_signature",
    "bounded_countermodel",
    "build_family",
    "check_morphism",
    "check_separation",
    "coarsest_bisimulation",
    "coproduct",
    "covariety_basis",
    "definable_closure",
    "entails",
    "eval_concept",
    "fixpoint_step",
    "fold_map",
    "format_model",
    "format_subset",
    "format_theory",
    "generate_basis",
    "gfp",
    "infer_signature",
    "injection_map",
    "is_satisfiable",
    "lfp",
    "minimize",
    "minimize_report",
    "negation_parity",
    "nnf",
    "parse_concept",
    "parse_gci",
    "parse_individual_map",
    "parse_model",
    "parse_theory",
    "preservation_report",
    "quotient",
    "render",
    "render_gci",
    "representative",
    "satisfies",
    "satisfies_fixpoint",
    "separating_family",
    "unfold_cycles",
]
