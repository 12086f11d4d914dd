"""Model constructions: morphisms, coproducts, bisimulation quotients,
behavior signatures, and a preservation-theorem harness.

A morphism here is a functional bisimulation: it preserves concept
membership in both directions, preserves role edges forward, and lifts
target role edges backward.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (
    EmptyFamilyError,
    ModelFormatError,
    NotABisimulationPartitionError,
    NotAMorphismError,
    SignatureMismatchError,
)
from .semantics import Interpretation, satisfies
from .syntax import Gci

IndividualMap = Mapping[str, str]

Partition = tuple[tuple[str, ...], ...]


@dataclass(frozen=True, slots=True)
class Violation:
    """Concrete witness of a failed morphism condition."""

    condition: str  # "concept-membership" | "role-forward" | "role-back"
    name: str
    individuals: tuple[str, ...]

    def describe(self) -> str:
        return f"{self.condition} fails for {self.name!r} at ({', '.join(self.individuals)})"


@dataclass(frozen=True, slots=True)
class MorphismReport:
    is_morphism: bool
    violation: Violation | None = None
    mono: bool = False
    epi: bool = False
    iso: bool = False

    @property
    def flags(self) -> tuple[str, ...]:
        return tuple(f for f, on in (("mono", self.mono), ("epi", self.epi), ("iso", self.iso)) if on)


def parse_individual_map(text: str) -> dict[str, str]:
    """Read an individual map from lines of the form ``src -> dst``."""
    mapping: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        kept = []
        for tok in raw.split():
            if tok.startswith("#"):  # comment starts only at a token boundary
                break
            kept.append(tok)
        line = " ".join(kept)
        if not line:
            continue
        if "->" not in line:
            raise ModelFormatError("expected 'src -> dst'", line=lineno)
        src, _, dst = line.partition("->")
        src, dst = src.strip(), dst.strip()
        if not src or not dst:
            raise ModelFormatError("expected 'src -> dst'", line=lineno)
        if src in mapping:
            raise ModelFormatError(f"duplicate mapping for {src!r}", line=lineno)
        mapping[src] = dst
    return mapping


def check_morphism(m: IndividualMap, src: Interpretation, dst: Interpretation) -> MorphismReport:
    """Check the three morphism conditions; classify mono/epi/iso on success.

    On failure the report carries a concrete witness: the first violated
    condition in concept-membership, role-forward, role-back order.
    """
    if src.signature != dst.signature:
        raise SignatureMismatchError("source and target must share a signature")
    for a in src.carrier:
        if a not in m:
            raise ValueError(f"map is not total: no image for {a!r}")
        if m[a] not in dst.carrier:
            raise ValueError(f"image {m[a]!r} of {a!r} is not in the target carrier")

    img = {a: dst.index(m[a]) for a in src.carrier}

    for c in src.signature.concept_names:
        src_mask = src.concept_masks[c]
        dst_mask = dst.concept_masks[c]
        for x, a in enumerate(src.carrier):
            if bool(src_mask >> x & 1) != bool(dst_mask >> img[a] & 1):
                return MorphismReport(False, Violation("concept-membership", c, (a,)))

    for r in src.signature.role_names:
        dst_pairs = dst.role_pairs[r]
        for x, y in sorted(src.role_pairs[r]):
            a, b = src.carrier[x], src.carrier[y]
            if (img[a], img[b]) not in dst_pairs:
                return MorphismReport(False, Violation("role-forward", r, (a, b)))

    for r in src.signature.role_names:
        for a in src.carrier:
            targets = dst.succ[r][img[a]]
            covered = 0
            for y_src in _bits(src.succ[r][src.index(a)]):
                covered |= 1 << img[src.carrier[y_src]]
            if targets & ~covered:
                missing = next(
                    dst.carrier[y] for y in _bits(targets & ~covered)
                )
                return MorphismReport(False, Violation("role-back", r, (a, missing)))

    images = {m[a] for a in src.carrier}
    mono = len(images) == len(src.carrier)
    epi = len(images) == len(dst.carrier)
    return MorphismReport(True, None, mono=mono, epi=epi, iso=mono and epi)


def _bits(mask: int):
    while mask:
        lsb = mask & -mask
        yield lsb.bit_length() - 1
        mask ^= lsb


def coproduct(models: Sequence[Interpretation]) -> Interpretation:
    """Tagged disjoint union; individuals are renamed to ``i#name``."""
    if not models:
        raise EmptyFamilyError("coproduct of an empty family has an empty carrier")
    sig = models[0].signature
    for m in models[1:]:
        if m.signature != sig:
            raise SignatureMismatchError("coproduct components must share a signature")
    carrier = [f"{i}#{a}" for i, m in enumerate(models) for a in m.carrier]
    concept_ext = {
        c: [f"{i}#{a}" for i, m in enumerate(models) for a in m.names(m.concept_masks[c])]
        for c in sig.concept_names
    }
    role_ext = {
        r: [
            (f"{i}#{m.carrier[x]}", f"{i}#{m.carrier[y]}")
            for i, m in enumerate(models)
            for x, y in sorted(m.role_pairs[r])
        ]
        for r in sig.role_names
    }
    return Interpretation.build(sig, carrier, concept_ext, role_ext)


def injection_map(models: Sequence[Interpretation], component: int) -> dict[str, str]:
    """The canonical injection of one component into the coproduct carrier."""
    return {a: f"{component}#{a}" for a in models[component].carrier}


def fold_map(models: Sequence[Interpretation]) -> dict[str, str]:
    """The fold ``(i, a) -> a`` from a coproduct of copies of one model."""
    return {f"{i}#{a}": a for i, m in enumerate(models) for a in m.carrier}


def coarsest_bisimulation(i: Interpretation) -> Partition:
    """The coarsest partition refining the coloring and respecting successors.

    Iterated splitting on (block, per-role successor-block sets) until
    stable; blocks are ordered by their smallest member index.
    """
    block_of = {}
    colors: dict[frozenset[str], int] = {}
    for x in range(i.n):
        col = i.color(x)
        if col not in colors:
            colors[col] = len(colors)
        block_of[x] = colors[col]

    roles = i.signature.role_names
    while True:
        keys: dict[tuple, int] = {}
        new_block_of = {}
        for x in range(i.n):
            key = (
                block_of[x],
                tuple(frozenset(block_of[y] for y in _bits(i.succ[r][x])) for r in roles),
            )
            if key not in keys:
                keys[key] = len(keys)
            new_block_of[x] = keys[key]
        if len(keys) == len(set(block_of.values())):
            break
        block_of = new_block_of

    grouped: dict[int, list[int]] = {}
    for x in range(i.n):
        grouped.setdefault(block_of[x], []).append(x)
    blocks = sorted(grouped.values(), key=lambda xs: xs[0])
    return tuple(tuple(i.carrier[x] for x in xs) for xs in blocks)


def quotient(i: Interpretation, p: Partition) -> tuple[Interpretation, dict[str, str]]:
    """Quotient by a partition; returns the image model and the projection.

    The projection must pass check_morphism (it is an epimorphism by
    construction when it is a morphism at all); otherwise the partition does
    not respect colors/successors and NotABisimulationPartitionError is
    raised with the witness.
    """
    seen: set[str] = set()
    for block in p:
        if not block:
            raise ModelFormatError("partition contains an empty block")
        for a in block:
            if a in seen:
                raise ModelFormatError(f"individual {a!r} occurs in two blocks")
            if a not in i.carrier:
                raise ModelFormatError(f"individual {a!r} is not in the carrier")
            seen.add(a)
    if len(seen) != i.n:
        raise ModelFormatError("partition does not cover the carrier")

    ordered = sorted(p, key=lambda block: min(i.index(a) for a in block))
    block_name = {}
    for block in ordered:
        rep = min(block, key=i.index)
        for a in block:
            block_name[a] = rep
    carrier = [min(block, key=i.index) for block in ordered]

    concept_ext = {
        c: sorted({block_name[a] for a in i.names(i.concept_masks[c])}, key=i.index)
        for c in i.signature.concept_names
    }
    role_ext = {
        r: sorted(
            {(block_name[i.carrier[x]], block_name[i.carrier[y]]) for x, y in i.role_pairs[r]},
            key=lambda ab: (i.index(ab[0]), i.index(ab[1])),
        )
        for r in i.signature.role_names
    }
    q = Interpretation.build(i.signature, carrier, concept_ext, role_ext)
    projection = dict(block_name)
    report = check_morphism(projection, i, q)
    if not report.is_morphism:
        raise NotABisimulationPartitionError(report.violation.describe())
    return q, projection


@dataclass(frozen=True)
class BehaviorSignature:
    """Role-words of length <= depth realizable from an individual.

    ``words[w]`` is the set of colors of the individuals reachable along
    ``w`` (colors collected setwise per word, not per path).
    """

    individual: str
    depth: int
    words: Mapping[tuple[str, ...], frozenset[frozenset[str]]]

    __hash__ = None  # type: ignore[assignment]


def behavior_signature(i: Interpretation, a: str, k: int) -> BehaviorSignature:
    if k < 0:
        raise ValueError("depth must be >= 0")
    start = 1 << i.index(a)
    frontier: dict[tuple[str, ...], int] = {(): start}
    words: dict[tuple[str, ...], frozenset[frozenset[str]]] = {}
    for _ in range(k + 1):
        next_frontier: dict[tuple[str, ...], int] = {}
        for word, mask in frontier.items():
            words[word] = frozenset(i.color(x) for x in _bits(mask))
            if len(word) < k:
                for r in i.signature.role_names:
                    reach = 0
                    for x in _bits(mask):
                        reach |= i.succ[r][x]
                    if reach:
                        next_frontier[word + (r,)] = reach
        frontier = next_frontier
        if not frontier:
            break
    return BehaviorSignature(a, k, words)


@dataclass(frozen=True)
class PreservationEntry:
    gci: Gci
    in_src: bool
    in_dst: bool


@dataclass(frozen=True)
class PreservationReport:
    morphism: MorphismReport
    entries: tuple[PreservationEntry, ...]
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def preservation_report(
    src: Interpretation,
    dst: Interpretation,
    m: IndividualMap,
    gcis: Iterable[Gci],
) -> PreservationReport:
    """Record satisfaction of each GCI on both sides of a morphism.

    Checks that dst-satisfaction implies src-satisfaction, and equivalence
    when the morphism is an epimorphism. Any listed violation indicates an
    implementation bug, not a property of the inputs.
    """
    report = check_morphism(m, src, dst)
    if not report.is_morphism:
        raise NotAMorphismError(report.violation.describe())
    entries = []
    violations = []
    for g in gcis:
        in_src = satisfies(src, g)
        in_dst = satisfies(dst, g)
        entries.append(PreservationEntry(g, in_src, in_dst))
        if in_dst and not in_src:
            violations.append(f"target satisfies but source does not: {g!r}")
        if report.epi and in_src != in_dst:
            violations.append(f"epimorphism with disagreeing satisfaction: {g!r}")
    return PreservationReport(report, tuple(entries), tuple(violations))
