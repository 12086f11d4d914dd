"""Shared fixtures-in-code: the two-person example model, seeded random
generators for models/concepts/GCIs, construction-based morphisms, and the
brute-force oracles the derived expectations are computed with."""

from __future__ import annotations

import itertools
import random

from alcbasis import (
    And,
    BOT,
    Equiv,
    Exists,
    Forall,
    Interpretation,
    Name,
    Not,
    Or,
    Signature,
    Subsumes,
    TOP,
    check_separation,
    eval_concept,
    parse_model,
    parse_theory,
)

SIMPSONS_ALCM = """\
signature
  concepts Husband Wife Male Female
  roles marriedTo
model
  domain Homer Marge
  concept Husband = { Homer }
  concept Wife = { Marge }
  concept Male = { Homer }
  concept Female = { Marge }
  role marriedTo = { (Homer, Marge) (Marge, Homer) }
"""

# the minimized nine-axiom theory of the worked two-person example
NINE_AXIOMS = """\
Husband == Male
Female == Wife
Male & Wife == bot
~Male == Wife
~(Male | Wife) == bot
exists marriedTo . Wife == Male
forall marriedTo . Wife == Male
exists marriedTo . Male == Wife
forall marriedTo . Male == Wife
"""


def simpsons() -> Interpretation:
    return parse_model(SIMPSONS_ALCM)


def nine_axiom_theory(sig: Signature):
    return parse_theory(NINE_AXIOMS, sig)


def random_interpretation(
    rng: random.Random,
    sig: Signature,
    size: int,
    concept_p: float = 0.5,
    edge_p: float = 0.4,
    prefix: str = "v",
) -> Interpretation:
    carrier = [f"{prefix}{i}" for i in range(size)]
    concept_ext = {
        c: [x for x in carrier if rng.random() < concept_p] for c in sig.concept_names
    }
    role_ext = {
        r: [(x, y) for x in carrier for y in carrier if rng.random() < edge_p]
        for r in sig.role_names
    }
    return Interpretation.build(sig, carrier, concept_ext, role_ext)


def random_separable_interpretation(
    rng: random.Random, sig: Signature, max_size: int, attempts: int = 500
) -> Interpretation:
    for _ in range(attempts):
        size = rng.randint(1, max_size)
        i = random_interpretation(rng, sig, size)
        if check_separation(i) is None:
            return i
    raise AssertionError("could not sample a separable model")


def random_concept(rng: random.Random, sig: Signature, depth: int):
    if depth == 0 or rng.random() < 0.25:
        atoms = [TOP, BOT] + [Name(c) for c in sig.concept_names]
        return rng.choice(atoms)
    kind = rng.randrange(5 if sig.role_names else 3)
    if kind == 0:
        return And(random_concept(rng, sig, depth - 1), random_concept(rng, sig, depth - 1))
    if kind == 1:
        return Or(random_concept(rng, sig, depth - 1), random_concept(rng, sig, depth - 1))
    if kind == 2:
        return Not(random_concept(rng, sig, depth - 1))
    role = rng.choice(sig.role_names)
    ctor = Exists if kind == 3 else Forall
    return ctor(role, random_concept(rng, sig, depth - 1))


def random_gci(rng: random.Random, sig: Signature, depth: int, equiv_p: float = 0.2):
    lhs = random_concept(rng, sig, depth)
    rhs = random_concept(rng, sig, depth)
    return Equiv(lhs, rhs) if rng.random() < equiv_p else Subsumes(lhs, rhs)


def definable_subsets_by_enumeration(i: Interpretation) -> set[int]:
    """Oracle for the definable-closure: enumerate concepts by depth, one
    representative per extension already seen, until a full depth level adds
    no new extension. Evaluation only; independent of the closure code."""
    seen: dict[int, object] = {}
    level = [TOP, BOT] + [Name(c) for c in i.signature.concept_names]
    for c in level:
        seen.setdefault(eval_concept(c, i), c)
    while True:
        basis = list(seen.values())
        candidates = []
        for c in basis:
            candidates.append(Not(c))
            for r in i.signature.role_names:
                candidates.append(Exists(r, c))
                candidates.append(Forall(r, c))
        for c, d in itertools.product(basis, basis):
            candidates.append(And(c, d))
            candidates.append(Or(c, d))
        new = {}
        for c in candidates:
            ext = eval_concept(c, i)
            if ext not in seen and ext not in new:
                new[ext] = c
        if not new:
            return set(seen)
        seen.update(new)


def all_concepts_upto_depth(sig: Signature, depth: int):
    """Every concept of the given depth bound, without any pruning. Only
    usable for tiny signatures and depth <= 2."""
    current = [TOP, BOT] + [Name(c) for c in sig.concept_names]
    for _ in range(depth):
        nxt = list(current)
        for c in current:
            nxt.append(Not(c))
            for r in sig.role_names:
                nxt.append(Exists(r, c))
                nxt.append(Forall(r, c))
        for c, d in itertools.product(current, current):
            nxt.append(And(c, d))
            nxt.append(Or(c, d))
        current = nxt
    return current
