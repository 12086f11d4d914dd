"""Finite GCI bases for finite models.

Pipeline: enumerate the definable subsets of a model (or, under the
separation condition, construct a representative concept for every subset
of the carrier), generate the defining equivalences and inclusion axioms
between representatives, then greedily eliminate entailed axioms with the
reasoner. ``covariety_basis`` lifts the construction to a finite family of
models through their coproduct.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Sequence

from .errors import DomainTooLargeError, NotSeparableError
from .models import coproduct
from .semantics import Interpretation, eval_concept
from .syntax import (
    And,
    BOT,
    Concept,
    Equiv,
    Exists,
    Forall,
    Gci,
    Name,
    Not,
    Or,
    Subsumes,
    TOP,
    Theory,
)

DEFAULT_MAX_DOMAIN = 20


@dataclass(frozen=True)
class DefinableFamily:
    """Map from carrier subsets (bitmasks) to witness concepts.

    In ``closure`` mode the family holds exactly the definable subsets, with
    witnesses of minimal construction depth. In ``separating`` mode it is
    total on all 2^|carrier| subsets.
    """

    mode: str  # "closure" | "separating"
    witnesses: dict[int, Concept]

    def masks(self) -> tuple[int, ...]:
        return tuple(sorted(self.witnesses))

    def concept_for(self, mask: int) -> Concept:
        return self.witnesses[mask]

    def __len__(self) -> int:
        return len(self.witnesses)


def definable_closure(i: Interpretation, max_domain: int = DEFAULT_MAX_DOMAIN) -> DefinableFamily:
    """All subsets definable by some concept, each with a minimal-depth witness.

    Breadth-first closure of {empty, full, every name extension} under
    complement, union, intersection, and images of the two restrictions.
    Witness ties within a BFS level are broken by a fixed constructor and
    operand order.
    """
    if i.n > max_domain:
        raise DomainTooLargeError(f"carrier has {i.n} individuals (bound {max_domain})")

    witnesses: dict[int, Concept] = {0: BOT, i.full: TOP}
    order: list[int] = [0, i.full]
    for c in i.signature.concept_names:
        mask = i.concept_masks[c]
        if mask not in witnesses:
            witnesses[mask] = Name(c)
            order.append(mask)

    frontier = list(order)
    while frontier:
        known = list(order)
        fresh: list[int] = []

        def record(mask: int, concept: Concept) -> None:
            if mask not in witnesses:
                witnesses[mask] = concept
                order.append(mask)
                fresh.append(mask)

        for mask in known:
            c = witnesses[mask]
            record(i.full & ~mask, Not(c))
            for r in i.signature.role_names:
                record(eval_concept(Exists(r, c), i), Exists(r, c))
                record(eval_concept(Forall(r, c), i), Forall(r, c))
        for m1 in known:
            for m2 in known:
                if m1 == m2:
                    continue
                record(m1 & m2, And(witnesses[m1], witnesses[m2]))
                record(m1 | m2, Or(witnesses[m1], witnesses[m2]))
        frontier = fresh

    return DefinableFamily("closure", witnesses)


def _r1_mask(i: Interpretation, r: str) -> int:
    """Individuals with at least one outgoing edge of role ``r``."""
    mask = 0
    for x, s in enumerate(i.succ[r]):
        if s:
            mask |= 1 << x
    return mask


def check_separation(i: Interpretation) -> tuple[str, str] | None:
    """Check that same-colored individuals differ on some role's domain.

    Returns None when the model is separable, otherwise the first pair of
    distinct individuals with equal colors and no role whose domain contains
    exactly one of them.
    """
    r1 = {r: _r1_mask(i, r) for r in i.signature.role_names}
    for x in range(i.n):
        for y in range(x + 1, i.n):
            if i.color(x) != i.color(y):
                continue
            if not any((r1[r] >> x & 1) != (r1[r] >> y & 1) for r in i.signature.role_names):
                return (i.carrier[x], i.carrier[y])
    return None


def _conjoin(parts: Sequence[Concept]) -> Concept:
    node = parts[0]
    for p in parts[1:]:
        node = And(node, p)
    return node


def _disjoin(parts: Sequence[Concept]) -> Concept:
    node = parts[0]
    for p in parts[1:]:
        node = Or(node, p)
    return node


def _complement(c: Concept) -> Concept:
    # collapse double negation so printed witnesses stay readable
    return c.arg if isinstance(c, Not) else Not(c)


def _singleton_representative(i: Interpretation, x: int) -> Concept:
    color_x = i.color(x)
    if color_x:
        base = Name(min(color_x))
    elif i.signature.concept_names:
        base = _complement(Name(min(i.signature.concept_names)))
    else:
        base = TOP
    base_ext = eval_concept(base, i)

    parts: list[Concept] = [base]
    r1 = {r: _r1_mask(i, r) for r in i.signature.role_names}
    for y in range(i.n):
        if y == x or not (base_ext >> y & 1):
            continue
        color_y = i.color(y)
        if color_y != color_x:
            only_y = sorted(color_y - color_x)
            if only_y:
                distinguisher: Concept = Name(only_y[0])
            else:  # y's color is strictly below x's: mirror with a complement
                only_x = sorted(color_x - color_y)
                distinguisher = _complement(Name(only_x[0]))
        else:
            role = next(
                (
                    r
                    for r in sorted(i.signature.role_names)
                    if (r1[r] >> x & 1) != (r1[r] >> y & 1)
                ),
                None,
            )
            if role is None:
                raise NotSeparableError((i.carrier[x], i.carrier[y]))
            if r1[role] >> y & 1:
                distinguisher = Exists(role, TOP)
            else:
                distinguisher = _complement(Exists(role, TOP))
        parts.append(_complement(distinguisher))
    return _conjoin(parts)


def representative(i: Interpretation, s: int) -> Concept:
    """A concept whose evaluation in ``i`` is exactly the subset ``s``.

    Requires the separation condition. The empty set maps to bottom; a
    singleton is its base concept name conjoined with distinguishers against
    the other members of the base's extension; larger sets are disjunctions
    of singleton representatives in carrier order.
    """
    if s & ~i.full:
        raise ValueError("subset is not over the carrier")
    if s == 0:
        return BOT
    singles = [_singleton_representative(i, x) for x in range(i.n) if s >> x & 1]
    return _disjoin(singles)


def separating_family(i: Interpretation, max_domain: int = DEFAULT_MAX_DOMAIN) -> DefinableFamily:
    """Representatives for all 2^|carrier| subsets (separation condition required)."""
    if i.n > max_domain:
        raise DomainTooLargeError(f"carrier has {i.n} individuals (bound {max_domain})")
    witness_pair = check_separation(i)
    if witness_pair is not None:
        raise NotSeparableError(witness_pair)
    return DefinableFamily("separating", {s: representative(i, s) for s in range(i.full + 1)})


def build_family(
    i: Interpretation, mode: str | None = None, max_domain: int = DEFAULT_MAX_DOMAIN
) -> DefinableFamily:
    """Family for basis generation; defaults to separating when applicable."""
    if mode is None:
        mode = "separating" if check_separation(i) is None else "closure"
    if mode == "separating":
        return separating_family(i, max_domain)
    if mode == "closure":
        return definable_closure(i, max_domain)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class BasisStats:
    mode: str
    classes: int
    raw_count: int
    kind1_name: int
    kind1_binary: int
    kind1_complement: int
    kind1_quantifier: int
    kind2: int
    minimized_count: int | None = None
    eliminated: int | None = None

    def as_json_record(self) -> dict:
        return {
            "classes": self.classes,
            "raw_count": self.raw_count,
            "minimized_count": self.minimized_count,
            "mode": self.mode,
        }


@dataclass(frozen=True)
class BasisReport:
    raw: Theory
    stats: BasisStats
    minimized: Theory | None = None

    def final(self) -> Theory:
        return self.minimized if self.minimized is not None else self.raw


def generate_basis(i: Interpretation, fam: DefinableFamily) -> BasisReport:
    """Generate the raw basis from a definable family.

    First kind: defining equivalences for concept names, binary operators
    over ordered pairs of distinct representatives, complements, and both
    restrictions of every representative. Second kind: inclusions between
    representatives with strictly nested extensions. Every emitted GCI is
    satisfied by the model; syntactically trivial equations (identical
    sides) are skipped.
    """
    reps = [(mask, fam.concept_for(mask)) for mask in fam.masks()]
    gcis: list[Gci] = []
    counts = {"name": 0, "binary": 0, "complement": 0, "quantifier": 0, "kind2": 0}

    def emit_equiv(lhs: Concept, rhs: Concept, kind: str) -> None:
        if lhs != rhs:
            gcis.append(Equiv(lhs, rhs))
            counts[kind] += 1

    for c in i.signature.concept_names:
        emit_equiv(Name(c), fam.concept_for(i.concept_masks[c]), "name")

    for m1, c1 in reps:
        for m2, c2 in reps:
            if m1 == m2:
                continue
            emit_equiv(And(c1, c2), fam.concept_for(m1 & m2), "binary")
            emit_equiv(Or(c1, c2), fam.concept_for(m1 | m2), "binary")

    for m1, c1 in reps:
        emit_equiv(Not(c1), fam.concept_for(i.full & ~m1), "complement")

    for m1, c1 in reps:
        for r in i.signature.role_names:
            for quant in (Exists, Forall):
                lhs = quant(r, c1)
                emit_equiv(lhs, fam.concept_for(eval_concept(lhs, i)), "quantifier")

    for m1, c1 in reps:
        for m2, c2 in reps:
            if m1 != m2 and m1 & ~m2 == 0:
                gcis.append(Subsumes(c1, c2))
                counts["kind2"] += 1

    stats = BasisStats(
        mode=fam.mode,
        classes=len(reps),
        raw_count=len(gcis),
        kind1_name=counts["name"],
        kind1_binary=counts["binary"],
        kind1_complement=counts["complement"],
        kind1_quantifier=counts["quantifier"],
        kind2=counts["kind2"],
    )
    return BasisReport(raw=tuple(gcis), stats=stats)


def minimize(t: Sequence[Gci], budget: int | None = None, sig=None) -> Theory:
    """Greedy single-pass elimination, in reverse generation order.

    An axiom is dropped when the remaining theory entails it; axioms whose
    entailment check times out are conservatively kept. The result is
    entailment-equivalent to the input.
    """
    from .reasoner import DEFAULT_BUDGET, entails

    if budget is None:
        budget = DEFAULT_BUDGET
    kept = list(t)
    for idx in range(len(kept) - 1, -1, -1):
        candidate = kept[idx]
        rest = kept[:idx] + kept[idx + 1 :]
        result = entails(tuple(rest), candidate, budget=budget, sig=sig)
        if result.verdict == "entailed":
            kept = rest
    return tuple(kept)


def minimize_report(
    report: BasisReport, budget: int | None = None, sig=None
) -> BasisReport:
    """Attach a minimized theory (and updated statistics) to a basis report."""
    minimized = minimize(report.raw, budget=budget, sig=sig)
    stats = dataclasses.replace(
        report.stats,
        minimized_count=len(minimized),
        eliminated=len(report.raw) - len(minimized),
    )
    return BasisReport(raw=report.raw, stats=stats, minimized=minimized)


def covariety_basis(
    models: Sequence[Interpretation],
    mode: str | None = None,
    minimized: bool = False,
    budget: int | None = None,
    max_domain: int = DEFAULT_MAX_DOMAIN,
) -> BasisReport:
    """Basis of the complete covariety generated by a finite family of models.

    Generated from the coproduct of the family: a GCI holds in every member
    iff it holds in the coproduct, so the coproduct's basis is sound and
    complete for the covariety.
    """
    summed = coproduct(models)
    fam = build_family(summed, mode=mode, max_domain=max_domain)
    report = generate_basis(summed, fam)
    if minimized:
        report = minimize_report(report, budget=budget, sig=summed.signature)
    return report
