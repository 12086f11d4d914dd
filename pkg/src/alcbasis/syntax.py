"""Concept and GCI syntax: signatures, ASTs, parsing, printing, normal forms.

Concrete grammar (whitespace-insensitive, ``#`` line comments)::

    gci      := concept ("<=" | "==") concept
    fixdef   := ("lfp" | "gfp") NAME "=" concept
    concept  := disj
    disj     := conj ("|" conj)*
    conj     := unary ("&" unary)*
    unary    := "~" unary | "exists" NAME "." unary | "forall" NAME "." unary | atom
    atom     := "top" | "bot" | NAME | "(" concept ")"
    NAME     := [A-Za-z_][A-Za-z0-9_]*

A quantifier binds exactly one unary term; precedence is ``~`` > ``&`` > ``|``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import IllFormedSystemError, ParseError, UnknownNameError

RESERVED_WORDS = frozenset({"top", "bot", "exists", "forall", "lfp", "gfp"})

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


@dataclass(frozen=True, slots=True)
class Signature:
    """Vocabulary: concept names and role names, in declaration order."""

    concept_names: tuple[str, ...]
    role_names: tuple[str, ...]

    def __post_init__(self):
        seen: set[str] = set()
        for name in self.concept_names + self.role_names:
            if not _IDENT_RE.match(name):
                raise ValueError(f"invalid identifier {name!r}")
            if name in RESERVED_WORDS:
                raise ValueError(f"{name!r} is a reserved word")
            if name in seen:
                raise ValueError(f"duplicate name {name!r} in signature")
            seen.add(name)

    def __contains__(self, name: str) -> bool:
        return name in self.concept_names or name in self.role_names


class Concept:
    """Base class of concept AST nodes. Structural equality, no normalization."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Top(Concept):
    pass


@dataclass(frozen=True, slots=True)
class Bot(Concept):
    pass


@dataclass(frozen=True, slots=True)
class Name(Concept):
    name: str


@dataclass(frozen=True, slots=True)
class Not(Concept):
    arg: Concept


@dataclass(frozen=True, slots=True)
class And(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True, slots=True)
class Or(Concept):
    left: Concept
    right: Concept


@dataclass(frozen=True, slots=True)
class Exists(Concept):
    role: str
    arg: Concept


@dataclass(frozen=True, slots=True)
class Forall(Concept):
    role: str
    arg: Concept


TOP = Top()
BOT = Bot()


class Gci:
    """Base class of general concept inclusions."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Subsumes(Gci):
    lhs: Concept
    rhs: Concept


@dataclass(frozen=True, slots=True)
class Equiv(Gci):
    lhs: Concept
    rhs: Concept


@dataclass(frozen=True, slots=True)
class FixDef(Gci):
    """Cyclic concept definition with a fixpoint semantics tag ("lfp" or "gfp")."""

    defined: str
    body: Concept
    semantics: str

    def __post_init__(self):
        if self.semantics not in ("lfp", "gfp"):
            raise ValueError(f"semantics must be 'lfp' or 'gfp', got {self.semantics!r}")


Theory = tuple[Gci, ...]


# ---------------------------------------------------------------------------
# Tokenizer and parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>\#[^\n]*)
  | (?P<op><=|==|[&|~.()=])
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<bad>.)
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        if kind in ("ws", "comment"):
            continue
        if kind == "bad":
            raise ParseError(f"unexpected character {m.group()!r}", position=m.start())
        tokens.append((kind, m.group(), m.start()))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.sig = sig
        self.text = text

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", position=len(self.text))
        self.pos += 1
        return tok

    def expect(self, value: str) -> tuple[str, str, int]:
        tok = self.next()
        if tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1]!r}", position=tok[2])
        return tok

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def concept(self) -> Concept:
        return self.disj()

    def disj(self) -> Concept:
        node = self.conj()
        while (tok := self.peek()) is not None and tok[1] == "|":
            self.next()
            node = Or(node, self.conj())
        return node

    def conj(self) -> Concept:
        node = self.unary()
        while (tok := self.peek()) is not None and tok[1] == "&":
            self.next()
            node = And(node, self.unary())
        return node

    def unary(self) -> Concept:
        tok = self.next()
        kind, value, pos = tok
        if value == "~":
            return Not(self.unary())
        if value in ("exists", "forall"):
            role_tok = self.next()
            if role_tok[0] != "name" or role_tok[1] in RESERVED_WORDS:
                raise ParseError(f"expected role name after {value!r}", position=role_tok[2])
            role = role_tok[1]
            if role not in self.sig.role_names:
                raise UnknownNameError(role, position=role_tok[2])
            self.expect(".")
            body = self.unary()
            return Exists(role, body) if value == "exists" else Forall(role, body)
        return self.atom(tok)

    def atom(self, tok: tuple[str, str, int]) -> Concept:
        kind, value, pos = tok
        if value == "top":
            return TOP
        if value == "bot":
            return BOT
        if value == "(":
            node = self.concept()
            self.expect(")")
            return node
        if kind == "name":
            if value in RESERVED_WORDS:
                raise ParseError(f"reserved word {value!r} cannot be used here", position=pos)
            if value not in self.sig.concept_names:
                raise UnknownNameError(value, position=pos)
            return Name(value)
        raise ParseError(f"unexpected token {value!r}", position=pos)


def parse_concept(text: str, sig: Signature) -> Concept:
    """Parse a concept description, resolving identifiers against ``sig``."""
    parser = _Parser(text, sig)
    node = parser.concept()
    if not parser.at_end():
        tok = parser.peek()
        raise ParseError(f"trailing input {tok[1]!r}", position=tok[2])
    return node


def parse_gci(text: str, sig: Signature) -> Gci:
    """Parse a single GCI line: ``C <= D``, ``C == D``, or ``lfp/gfp c = C``."""
    parser = _Parser(text, sig)
    tok = parser.peek()
    if tok is None:
        raise ParseError("empty GCI", position=0)
    if tok[1] in ("lfp", "gfp"):
        parser.next()
        name_tok = parser.next()
        if name_tok[0] != "name" or name_tok[1] in RESERVED_WORDS:
            raise ParseError("expected defined concept name", position=name_tok[2])
        if name_tok[1] not in sig.concept_names:
            raise UnknownNameError(name_tok[1], position=name_tok[2])
        parser.expect("=")
        body = parser.concept()
        if not parser.at_end():
            bad = parser.peek()
            raise ParseError(f"trailing input {bad[1]!r}", position=bad[2])
        return FixDef(name_tok[1], body, tok[1])
    lhs = parser.concept()
    op = parser.next()
    if op[1] not in ("<=", "=="):
        raise ParseError(f"expected '<=' or '==', found {op[1]!r}", position=op[2])
    rhs = parser.concept()
    if not parser.at_end():
        bad = parser.peek()
        raise ParseError(f"trailing input {bad[1]!r}", position=bad[2])
    return Subsumes(lhs, rhs) if op[1] == "<=" else Equiv(lhs, rhs)


def parse_theory(text: str, sig: Signature) -> Theory:
    """Parse a theory file: one GCI or fixpoint definition per line."""
    gcis = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        try:
            gcis.append(parse_gci(stripped, sig))
        except ParseError as exc:
            raise ParseError(str(exc), line=lineno) from exc
    return tuple(gcis)


def infer_signature(*texts: str) -> Signature:
    """Derive a signature from raw theory/GCI text.

    Names in role position (between ``exists``/``forall`` and ``.``) become
    role names; every other name becomes a concept name, in first-occurrence
    order. A name used in both positions is an error.
    """
    concepts: list[str] = []
    roles: list[str] = []
    for text in texts:
        for line in text.splitlines():
            tokens = _tokenize(line.split("#", 1)[0])
            i = 0
            while i < len(tokens):
                kind, value, pos = tokens[i]
                if kind == "name" and value in ("exists", "forall"):
                    if i + 1 < len(tokens) and tokens[i + 1][0] == "name":
                        role = tokens[i + 1][1]
                        if role in concepts:
                            raise ParseError(
                                f"{role!r} used both as concept and role", position=tokens[i + 1][2]
                            )
                        if role not in roles:
                            roles.append(role)
                        i += 2
                        continue
                elif kind == "name" and value in ("lfp", "gfp"):
                    pass
                elif kind == "name" and value not in RESERVED_WORDS:
                    if value in roles:
                        raise ParseError(f"{value!r} used both as concept and role", position=pos)
                    if value not in concepts:
                        concepts.append(value)
                i += 1
    return Signature(tuple(concepts), tuple(roles))


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def _level(c: Concept) -> int:
    if isinstance(c, Or):
        return 0
    if isinstance(c, And):
        return 1
    return 2


def _render(c: Concept, min_level: int) -> str:
    match c:
        case Top():
            s = "top"
        case Bot():
            s = "bot"
        case Name(name):
            s = name
        case Not(arg):
            s = "~" + _render(arg, 2)
        case Exists(role, arg):
            s = f"exists {role} . " + _render(arg, 2)
        case Forall(role, arg):
            s = f"forall {role} . " + _render(arg, 2)
        case And(left, right):
            s = _render(left, 1) + " & " + _render(right, 2)
        case Or(left, right):
            s = _render(left, 0) + " | " + _render(right, 1)
        case _:
            raise TypeError(f"not a concept: {c!r}")
    if _level(c) < min_level:
        return "(" + s + ")"
    return s


def render(c: Concept) -> str:
    """Print a concept so that ``parse_concept(render(c), sig) == c``."""
    return _render(c, 0)


def render_gci(g: Gci) -> str:
    match g:
        case Subsumes(lhs, rhs):
            return f"{render(lhs)} <= {render(rhs)}"
        case Equiv(lhs, rhs):
            return f"{render(lhs)} == {render(rhs)}"
        case FixDef(defined, body, semantics):
            return f"{semantics} {defined} = {render(body)}"
    raise TypeError(f"not a GCI: {g!r}")


def format_theory(gcis: Iterable[Gci]) -> str:
    return "\n".join(render_gci(g) for g in gcis) + "\n"


# ---------------------------------------------------------------------------
# Normal forms and occurrence analysis
# ---------------------------------------------------------------------------

def nnf(c: Concept) -> Concept:
    """Negation normal form: complements pushed down to concept names.

    ``~top``/``~bot`` simplify to ``bot``/``top``; double negation is removed.
    The result evaluates to the same set as the input in every model.
    """
    match c:
        case Top() | Bot() | Name(_):
            return c
        case And(l, r):
            return And(nnf(l), nnf(r))
        case Or(l, r):
            return Or(nnf(l), nnf(r))
        case Exists(role, a):
            return Exists(role, nnf(a))
        case Forall(role, a):
            return Forall(role, nnf(a))
        case Not(arg):
            match arg:
                case Top():
                    return BOT
                case Bot():
                    return TOP
                case Name(_):
                    return c
                case Not(inner):
                    return nnf(inner)
                case And(l, r):
                    return Or(nnf(Not(l)), nnf(Not(r)))
                case Or(l, r):
                    return And(nnf(Not(l)), nnf(Not(r)))
                case Exists(role, a):
                    return Forall(role, nnf(Not(a)))
                case Forall(role, a):
                    return Exists(role, nnf(Not(a)))
    raise TypeError(f"not a concept: {c!r}")


def negation_parity(name: str, c: Concept) -> str:
    """Classify occurrences of ``name`` in ``c`` by the parity of enclosing ``~``.

    Returns one of ``"absent"``, ``"even"``, ``"odd"``, ``"mixed"``.
    """
    parities: set[int] = set()

    def walk(node: Concept, depth: int) -> None:
        match node:
            case Name(n):
                if n == name:
                    parities.add(depth % 2)
            case Not(arg):
                walk(arg, depth + 1)
            case And(l, r) | Or(l, r):
                walk(l, depth)
                walk(r, depth)
            case Exists(_, a) | Forall(_, a):
                walk(a, depth)
            case _:
                pass

    walk(c, 0)
    if not parities:
        return "absent"
    if parities == {0}:
        return "even"
    if parities == {1}:
        return "odd"
    return "mixed"


def substitute(c: Concept, name: str, replacement: Concept) -> Concept:
    """Replace every occurrence of the concept name ``name`` with ``replacement``."""
    match c:
        case Name(n):
            return replacement if n == name else c
        case Not(arg):
            return Not(substitute(arg, name, replacement))
        case And(l, r):
            return And(substitute(l, name, replacement), substitute(r, name, replacement))
        case Or(l, r):
            return Or(substitute(l, name, replacement), substitute(r, name, replacement))
        case Exists(role, a):
            return Exists(role, substitute(a, name, replacement))
        case Forall(role, a):
            return Forall(role, substitute(a, name, replacement))
        case _:
            return c


def concept_names_in(c: Concept) -> set[str]:
    match c:
        case Name(n):
            return {n}
        case Not(arg):
            return concept_names_in(arg)
        case And(l, r) | Or(l, r):
            return concept_names_in(l) | concept_names_in(r)
        case Exists(_, a) | Forall(_, a):
            return concept_names_in(a)
        case _:
            return set()


def role_names_in(c: Concept) -> set[str]:
    match c:
        case Exists(role, a) | Forall(role, a):
            return {role} | role_names_in(a)
        case Not(arg):
            return role_names_in(arg)
        case And(l, r) | Or(l, r):
            return role_names_in(l) | role_names_in(r)
        case _:
            return set()


def unfold_cycles(defs: Sequence[FixDef]) -> tuple[FixDef, ...]:
    """Reduce a system of mutually cyclic definitions to simple self-cycles.

    Each defined name occurring in another definition's body is replaced by
    its (original) defining body, round by round, until every body mentions
    no defined name but its own. Semantics tags are preserved.
    """
    by_name: dict[str, FixDef] = {}
    for d in defs:
        if d.defined in by_name:
            raise IllFormedSystemError(f"{d.defined!r} is defined twice")
        by_name[d.defined] = d

    out = []
    for d in defs:
        body = d.body
        seen_foreign: set[frozenset[str]] = set()
        while True:
            foreign = frozenset(concept_names_in(body) & by_name.keys() - {d.defined})
            if not foreign:
                break
            if foreign in seen_foreign:
                raise IllFormedSystemError(
                    f"definition of {d.defined!r} cannot be reduced to a self-cycle"
                )
            seen_foreign.add(foreign)
            for other in sorted(foreign):
                body = substitute(body, other, by_name[other].body)
        out.append(FixDef(d.defined, body, d.semantics))
    return tuple(out)
