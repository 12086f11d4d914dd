"""Finite models, concept evaluation, GCI satisfaction, and the fixpoint engine.

Subsets of the carrier are represented as int bitmasks indexed by carrier
order, so the subset enumeration in the basis machinery gets O(1) set
operations. ``Interpretation.names`` converts a mask back to individuals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import (
    ModelFormatError,
    NonMonotoneBodyError,
    UnknownNameError,
    WrongGciKindError,
)
from .syntax import (
    And,
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
    Top,
    negation_parity,
)


@dataclass(frozen=True, eq=False)
class Interpretation:
    """A finite model: carrier plus extensions of every signature name.

    ``concept_masks[c]`` is the bitmask of ``c``'s extension; ``succ[r][x]``
    is the bitmask of ``r``-successors of individual ``x``.
    """

    signature: Signature
    carrier: tuple[str, ...]
    concept_masks: Mapping[str, int]
    role_pairs: Mapping[str, frozenset[tuple[int, int]]]
    succ: Mapping[str, tuple[int, ...]] = field(repr=False)
    _index: Mapping[str, int] = field(repr=False)

    @classmethod
    def build(
        cls,
        sig: Signature,
        carrier: Iterable[str],
        concept_ext: Mapping[str, Iterable[str]] | None = None,
        role_ext: Mapping[str, Iterable[tuple[str, str]]] | None = None,
    ) -> "Interpretation":
        """Construct and validate a model from name-based extensions.

        Signature names without an entry get an empty extension; names not in
        the signature are rejected.
        """
        carrier = tuple(carrier)
        if not carrier:
            raise ModelFormatError("carrier must be nonempty")
        if len(set(carrier)) != len(carrier):
            raise ModelFormatError("carrier contains duplicate individuals")
        index = {a: i for i, a in enumerate(carrier)}
        concept_ext = dict(concept_ext or {})
        role_ext = dict(role_ext or {})
        for name in concept_ext:
            if name not in sig.concept_names:
                raise ModelFormatError(f"{name!r} is not a concept name of the signature")
        for name in role_ext:
            if name not in sig.role_names:
                raise ModelFormatError(f"{name!r} is not a role name of the signature")

        masks: dict[str, int] = {}
        for name in sig.concept_names:
            mask = 0
            for a in concept_ext.get(name, ()):
                if a not in index:
                    raise ModelFormatError(f"individual {a!r} not in the carrier")
                mask |= 1 << index[a]
            masks[name] = mask

        pairs: dict[str, frozenset[tuple[int, int]]] = {}
        succ: dict[str, tuple[int, ...]] = {}
        for name in sig.role_names:
            ps = set()
            for a, b in role_ext.get(name, ()):
                if a not in index or b not in index:
                    raise ModelFormatError(f"role pair ({a!r}, {b!r}) not over the carrier")
                ps.add((index[a], index[b]))
            pairs[name] = frozenset(ps)
            masks_by_src = [0] * len(carrier)
            for x, y in ps:
                masks_by_src[x] |= 1 << y
            succ[name] = tuple(masks_by_src)

        return cls(sig, carrier, masks, pairs, succ, index)

    @property
    def n(self) -> int:
        return len(self.carrier)

    @property
    def full(self) -> int:
        return (1 << len(self.carrier)) - 1

    def index(self, individual: str) -> int:
        return self._index[individual]

    def names(self, mask: int) -> tuple[str, ...]:
        """Individuals of a bitmask, in carrier declaration order."""
        return tuple(a for i, a in enumerate(self.carrier) if mask >> i & 1)

    def mask_of(self, individuals: Iterable[str]) -> int:
        mask = 0
        for a in individuals:
            mask |= 1 << self._index[a]
        return mask

    def color(self, x: int) -> frozenset[str]:
        """The set of concept names holding at individual ``x``."""
        return frozenset(c for c in self.signature.concept_names if self.concept_masks[c] >> x & 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Interpretation):
            return NotImplemented
        return (
            self.signature == other.signature
            and self.carrier == other.carrier
            and dict(self.concept_masks) == dict(other.concept_masks)
            and dict(self.role_pairs) == dict(other.role_pairs)
        )

    __hash__ = None  # type: ignore[assignment]


def _eval(
    c: Concept,
    full: int,
    concept_masks: Mapping[str, int],
    succ: Mapping[str, tuple[int, ...]],
    override: tuple[str, int] | None = None,
) -> int:
    match c:
        case Top():
            return full
        case Bot():
            return 0
        case Name(name):
            if override is not None and name == override[0]:
                return override[1]
            try:
                return concept_masks[name]
            except KeyError:
                raise UnknownNameError(name) from None
        case And(l, r):
            return _eval(l, full, concept_masks, succ, override) & _eval(
                r, full, concept_masks, succ, override
            )
        case Or(l, r):
            return _eval(l, full, concept_masks, succ, override) | _eval(
                r, full, concept_masks, succ, override
            )
        case Not(arg):
            return full & ~_eval(arg, full, concept_masks, succ, override)
        case Exists(role, arg):
            t = _eval(arg, full, concept_masks, succ, override)
            try:
                by_src = succ[role]
            except KeyError:
                raise UnknownNameError(role) from None
            mask = 0
            for x, s in enumerate(by_src):
                if s & t:
                    mask |= 1 << x
            return mask
        case Forall(role, arg):
            t = _eval(arg, full, concept_masks, succ, override)
            try:
                by_src = succ[role]
            except KeyError:
                raise UnknownNameError(role) from None
            mask = 0
            for x, s in enumerate(by_src):
                if s & ~t == 0:
                    mask |= 1 << x
            return mask
    raise TypeError(f"not a concept: {c!r}")


def eval_concept(c: Concept, i: Interpretation) -> int:
    """Evaluate a concept in a model; returns the extension as a bitmask."""
    return _eval(c, i.full, i.concept_masks, i.succ)


def satisfies(i: Interpretation, g: Gci) -> bool:
    """Model satisfaction of a subsumption or equivalence."""
    match g:
        case Subsumes(lhs, rhs):
            return eval_concept(lhs, i) & ~eval_concept(rhs, i) == 0
        case Equiv(lhs, rhs):
            return eval_concept(lhs, i) == eval_concept(rhs, i)
        case FixDef():
            raise WrongGciKindError("fixpoint definitions are checked by satisfies_fixpoint")
    raise TypeError(f"not a GCI: {g!r}")


@dataclass(frozen=True)
class Valuation:
    """Assignment of extensions over a plain domain, used by the fixpoint engine."""

    domain: tuple[str, ...]
    concept_masks: Mapping[str, int]
    succ: Mapping[str, tuple[int, ...]]

    @property
    def full(self) -> int:
        return (1 << len(self.domain)) - 1

    @classmethod
    def from_interpretation(cls, i: Interpretation, fixname: str) -> "Valuation":
        """The valuation of a model, with the defined name zeroed out."""
        masks = dict(i.concept_masks)
        masks[fixname] = 0
        return cls(i.carrier, masks, i.succ)


def fixpoint_step(body: Concept, fixname: str, v: Valuation, x: int) -> int:
    """One application of the map underlying a cyclic definition.

    ``fixname`` evaluates to ``x``; every other name through the valuation.
    """
    return _eval(body, v.full, v.concept_masks, v.succ, override=(fixname, x))


def _check_monotone(body: Concept, fixname: str) -> None:
    parity = negation_parity(fixname, body)
    if parity not in ("absent", "even"):
        raise NonMonotoneBodyError(
            f"occurrences of {fixname!r} have parity {parity!r}; fixpoint undefined"
        )


def lfp(body: Concept, fixname: str, v: Valuation) -> int:
    """Least fixpoint by Kleene iteration from the empty set."""
    _check_monotone(body, fixname)
    x = 0
    for _ in range(len(v.domain) + 1):
        y = fixpoint_step(body, fixname, v, x)
        if y == x:
            return x
        x = y
    raise AssertionError("fixpoint iteration failed to stabilize")


def gfp(body: Concept, fixname: str, v: Valuation) -> int:
    """Greatest fixpoint by Kleene iteration from the full domain."""
    _check_monotone(body, fixname)
    x = v.full
    for _ in range(len(v.domain) + 1):
        y = fixpoint_step(body, fixname, v, x)
        if y == x:
            return x
        x = y
    raise AssertionError("fixpoint iteration failed to stabilize")


def satisfies_fixpoint(i: Interpretation, g: FixDef) -> bool:
    """True iff the defined name's extension equals the lfp/gfp of its body."""
    if not isinstance(g, FixDef):
        raise WrongGciKindError("satisfies_fixpoint expects a fixpoint definition")
    v = Valuation.from_interpretation(i, g.defined)
    target = lfp(g.body, g.defined, v) if g.semantics == "lfp" else gfp(g.body, g.defined, v)
    return i.concept_masks[g.defined] == target


def format_subset(i: Interpretation, mask: int) -> str:
    """Render a carrier subset as ``{a, b}`` in declaration order."""
    return "{" + ", ".join(i.names(mask)) + "}"


# ---------------------------------------------------------------------------
# Model file format (.alcm)
# ---------------------------------------------------------------------------
#
#   signature
#     concepts Husband Wife Male Female
#     roles marriedTo
#   model
#     domain Homer Marge
#     concept Male = { Homer }
#     role marriedTo = { (Homer, Marge) (Marge, Homer) }
#
# '#' starts a comment only at the start of a token, so tagged individuals
# like "0#Homer" (coproduct output) survive a round-trip.

_ALCM_TOKEN_RE = re.compile(r"[(){},=]|[^\s(){},=]+")


def _alcm_tokens(line: str) -> list[str]:
    tokens = []
    for m in _ALCM_TOKEN_RE.finditer(line):
        tok = m.group()
        if tok.startswith("#"):
            break
        tokens.append(tok)
    return tokens


def parse_model(text: str) -> Interpretation:
    """Parse an ``.alcm`` model file into an Interpretation."""
    section = None
    concepts: list[str] | None = None
    roles: list[str] | None = None
    domain: list[str] | None = None
    concept_lines: dict[str, list[str]] = {}
    role_lines: dict[str, list[tuple[str, str]]] = {}

    def parse_set(tokens: list[str], lineno: int) -> list[str]:
        if not tokens or tokens[0] != "{" or tokens[-1] != "}":
            raise ModelFormatError("expected '{ ... }'", line=lineno)
        return [t for t in tokens[1:-1] if t != ","]

    def parse_pairs(tokens: list[str], lineno: int) -> list[tuple[str, str]]:
        if not tokens or tokens[0] != "{" or tokens[-1] != "}":
            raise ModelFormatError("expected '{ ... }'", line=lineno)
        body = tokens[1:-1]
        pairs = []
        i = 0
        while i < len(body):
            if len(body) - i >= 5 and body[i] == "(" and body[i + 2] == "," and body[i + 4] == ")":
                pairs.append((body[i + 1], body[i + 3]))
                i += 5
            else:
                raise ModelFormatError("expected '(a, b)' pair", line=lineno)
        return pairs

    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = _alcm_tokens(raw)
        if not tokens:
            continue
        head = tokens[0]
        if head == "signature":
            if section is not None:
                raise ModelFormatError("'signature' must come first", line=lineno)
            section = "signature"
        elif head == "model":
            if section != "signature":
                raise ModelFormatError("'model' must follow the signature section", line=lineno)
            section = "model"
        elif head == "concepts":
            if section != "signature":
                raise ModelFormatError("'concepts' belongs in the signature section", line=lineno)
            if concepts is not None:
                raise ModelFormatError("duplicate 'concepts' line", line=lineno)
            concepts = tokens[1:]
        elif head == "roles":
            if section != "signature":
                raise ModelFormatError("'roles' belongs in the signature section", line=lineno)
            if roles is not None:
                raise ModelFormatError("duplicate 'roles' line", line=lineno)
            roles = tokens[1:]
        elif head == "domain":
            if section != "model":
                raise ModelFormatError("'domain' belongs in the model section", line=lineno)
            if domain is not None:
                raise ModelFormatError("duplicate 'domain' line", line=lineno)
            domain = tokens[1:]
        elif head == "concept":
            if section != "model" or domain is None:
                raise ModelFormatError("'concept' lines must follow 'domain'", line=lineno)
            if len(tokens) < 3 or tokens[2] != "=":
                raise ModelFormatError("expected 'concept NAME = { ... }'", line=lineno)
            name = tokens[1]
            if name in concept_lines:
                raise ModelFormatError(f"duplicate extension for concept {name!r}", line=lineno)
            concept_lines[name] = parse_set(tokens[3:], lineno)
        elif head == "role":
            if section != "model" or domain is None:
                raise ModelFormatError("'role' lines must follow 'domain'", line=lineno)
            if len(tokens) < 3 or tokens[2] != "=":
                raise ModelFormatError("expected 'role NAME = { ... }'", line=lineno)
            name = tokens[1]
            if name in role_lines:
                raise ModelFormatError(f"duplicate extension for role {name!r}", line=lineno)
            role_lines[name] = parse_pairs(tokens[3:], lineno)
        else:
            raise ModelFormatError(f"unexpected directive {head!r}", line=lineno)

    if concepts is None or roles is None:
        raise ModelFormatError("missing 'concepts' or 'roles' line")
    if domain is None:
        raise ModelFormatError("missing 'domain' line")
    try:
        sig = Signature(tuple(concepts), tuple(roles))
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc

    missing = [c for c in sig.concept_names if c not in concept_lines]
    missing += [r for r in sig.role_names if r not in role_lines]
    if missing:
        raise ModelFormatError(f"missing extension lines for: {', '.join(missing)}")
    unknown = [c for c in concept_lines if c not in sig.concept_names]
    unknown += [r for r in role_lines if r not in sig.role_names]
    if unknown:
        raise ModelFormatError(f"extension lines for undeclared names: {', '.join(unknown)}")

    return Interpretation.build(sig, domain, concept_lines, role_lines)


def format_model(i: Interpretation) -> str:
    """Serialize a model in ``.alcm`` format (canonical, round-trips)."""
    lines = ["signature"]
    lines.append(("  concepts " + " ".join(i.signature.concept_names)).rstrip())
    lines.append(("  roles " + " ".join(i.signature.role_names)).rstrip())
    lines.append("model")
    lines.append("  domain " + " ".join(i.carrier))
    for c in i.signature.concept_names:
        members = " ".join(i.names(i.concept_masks[c]))
        lines.append(f"  concept {c} = {{ {members} }}".replace("{  }", "{ }"))
    for r in i.signature.role_names:
        pairs = sorted(i.role_pairs[r])
        rendered = " ".join(f"({i.carrier[x]}, {i.carrier[y]})" for x, y in pairs)
        lines.append(f"  role {r} = {{ {rendered} }}".replace("{  }", "{ }"))
    return "\n".join(lines) + "\n"
