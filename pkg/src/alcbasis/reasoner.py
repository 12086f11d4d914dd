"""ALC satisfiability and entailment with general TBoxes.

The tableau internalizes the TBox as a set of global clauses (the flattened
disjuncts of ``nnf(~C | D)`` per axiom) that every node must satisfy.
Termination comes from subset blocking: a prospective successor whose label
is contained in an ancestor's label is not expanded; its edge loops back.
Budgets count expansion steps, so runs are deterministic.

Internally every subconcept in play is interned to a small integer, so node
labels are sets of ints and the saturation loop stays cheap.

``bounded_countermodel`` is an independent oracle: a backtracking search
over all interpretations up to a given carrier size, pruned with
three-valued concept bounds, that never consults the tableau.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import SearchBudgetExceededError, UnsupportedAxiomError
from .semantics import Interpretation
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
    concept_names_in,
    nnf,
    role_names_in,
)

DEFAULT_BUDGET = 100_000
DEFAULT_SEARCH_BUDGET = 5_000_000


@dataclass(frozen=True)
class QueryResult:
    verdict: str  # "sat" | "unsat" | "entailed" | "not_entailed" | "timeout"
    witness: Interpretation | None = None


class _BudgetExhausted(Exception):
    pass


class _Budget:
    __slots__ = ("left",)

    def __init__(self, limit: int):
        self.left = limit

    def spend(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise _BudgetExhausted()


def signature_for(concepts: Sequence[Concept], sig: Signature | None = None) -> Signature:
    """Signature covering the given concepts (sorted names) unless one is supplied."""
    if sig is not None:
        return sig
    cnames: set[str] = set()
    rnames: set[str] = set()
    for c in concepts:
        cnames |= concept_names_in(c)
        rnames |= role_names_in(c)
    return Signature(tuple(sorted(cnames)), tuple(sorted(rnames)))


def _axiom_concepts(t: Sequence[Gci]) -> list[Concept]:
    out = []
    for g in t:
        match g:
            case Subsumes(lhs, rhs):
                out.append(nnf(Or(Not(lhs), rhs)))
            case Equiv(lhs, rhs):
                out.append(nnf(Or(Not(lhs), rhs)))
                out.append(nnf(Or(Not(rhs), lhs)))
            case FixDef():
                raise UnsupportedAxiomError(
                    "fixpoint definitions must be model-checked, not given to the reasoner"
                )
            case _:
                raise TypeError(f"not a GCI: {g!r}")
    return out


class _Pool:
    """Interning pool: every NNF subconcept in play gets a dense integer id.

    Labels, clauses, and blocking sets are plain int sets over this pool.
    Ids are assigned in first-interning order, which makes rule application
    order deterministic for identical inputs.
    """

    __slots__ = (
        "ids", "kind", "payload", "negation", "TOP", "BOT",
    )

    def __init__(self):
        self.ids: dict[Concept, int] = {}
        self.kind: list[str] = []
        self.payload: list[object] = []
        self.negation: dict[int, int] = {}  # name id <-> its negation id
        self.TOP = self.intern(Top())
        self.BOT = self.intern(Bot())

    def intern(self, c: Concept) -> int:
        existing = self.ids.get(c)
        if existing is not None:
            return existing
        match c:
            case Top():
                kind, payload = "top", None
            case Bot():
                kind, payload = "bot", None
            case Name(name):
                kind, payload = "name", name
            case Not(arg):
                if not isinstance(arg, Name):
                    raise AssertionError("pool expects NNF concepts")
                kind, payload = "not", self.intern(arg)
            case And(l, r):
                kind, payload = "and", (self.intern(l), self.intern(r))
            case Or(_, _):
                disjuncts = tuple(dict.fromkeys(self.intern(d) for d in _flatten_or(c)))
                kind, payload = "or", disjuncts
            case Exists(role, arg):
                kind, payload = "exists", (role, self.intern(arg))
            case Forall(role, arg):
                kind, payload = "forall", (role, self.intern(arg))
            case _:
                raise TypeError(f"not a concept: {c!r}")
        new_id = len(self.kind)
        self.ids[c] = new_id
        self.kind.append(kind)
        self.payload.append(payload)
        if kind == "not":
            self.negation[payload] = new_id
            self.negation[new_id] = payload
        return new_id

    def clause_of(self, i: int) -> tuple[int, ...] | None:
        """Live disjunct ids of a clause concept; None when trivially true."""
        disjuncts = self.payload[i] if self.kind[i] == "or" else (i,)
        out = []
        for d in disjuncts:
            k = self.kind[d]
            if k == "top":
                return None
            if k == "bot":
                continue
            out.append(d)
        return tuple(out)


def _flatten_or(c: Concept) -> Iterator[Concept]:
    if isinstance(c, Or):
        yield from _flatten_or(c.left)
        yield from _flatten_or(c.right)
    else:
        yield c


class _ClauseEngine:
    """Label completion with counter-based unit propagation.

    The interning pool is closed before expansion starts (every concept that
    can ever enter a label is a subconcept of the root or of a clause), so
    occurrence lists are static. Meta clauses hold at every node; a label
    clause is activated when its disjunction enters the label.
    """

    __slots__ = (
        "pool", "disjuncts", "always_true", "trigger_of", "clause_of_or",
        "occ_sat", "occ_kill", "scan_order", "n_meta",
    )

    def __init__(self, pool: _Pool, meta: Sequence[tuple[int, ...]]):
        self.pool = pool
        kind = pool.kind
        raw: list[tuple[int, ...]] = list(meta)
        self.trigger_of: list[int | None] = [None] * len(meta)
        self.clause_of_or: dict[int, int] = {}
        or_ids = sorted(i for i in range(len(kind)) if kind[i] == "or")
        for oid in or_ids:
            self.clause_of_or[oid] = len(raw)
            raw.append(pool.payload[oid])
            self.trigger_of.append(oid)
        self.n_meta = len(meta)

        self.disjuncts: list[tuple[int, ...]] = []
        self.always_true: list[bool] = []
        for clause in raw:
            filtered = tuple(d for d in clause if kind[d] != "bot")
            self.always_true.append(any(kind[d] == "top" for d in filtered))
            self.disjuncts.append(filtered)

        self.occ_sat: dict[int, list[int]] = {}
        self.occ_kill: dict[int, list[int]] = {}
        for ci, clause in enumerate(self.disjuncts):
            if self.always_true[ci]:
                continue
            for d in clause:
                self.occ_sat.setdefault(d, []).append(ci)
                nd = pool.negation.get(d)
                if nd is not None:
                    self.occ_kill.setdefault(nd, []).append(ci)

        # branch scan order: label clauses (by disjunction id), then meta
        self.scan_order = [self.clause_of_or[oid] for oid in or_ids] + list(range(self.n_meta))

    def _propagate(self, state: tuple, ids: list[int], units: list[int]) -> bool:
        """Push ids (and queued unit clauses) into the state; False on clash.

        Counters stay exact: label growth marks containing clauses satisfied
        and decrements live counts of clauses holding the pushed concept's
        negation; clauses dropping to one live disjunct are queued as units.
        """
        pool = self.pool
        kind = pool.kind
        payload = pool.payload
        negation = pool.negation
        bot = pool.BOT
        disjuncts = self.disjuncts
        label, satisfied, live, active = state
        stack = list(ids)
        while stack or units:
            if not stack:
                ci = units.pop()
                if satisfied[ci] or not active[ci]:
                    continue
                # exactly one live disjunct remains (live counts are monotone)
                for d in disjuncts[ci]:
                    if d in label:
                        break
                    nd = negation.get(d)
                    if nd is None or nd not in label:
                        stack.append(d)
                        break
                continue
            j = stack.pop()
            if j in label:
                continue
            if j == bot:
                return False
            neg = negation.get(j)
            if neg is not None and neg in label:
                return False
            label.add(j)
            if kind[j] == "and":
                stack.extend(payload[j])
            elif kind[j] == "or":
                ci = self.clause_of_or[j]
                if not active[ci]:
                    active[ci] = True
                    if self.always_true[ci]:
                        satisfied[ci] = True
                    else:
                        count = 0
                        sat = False
                        for d in disjuncts[ci]:
                            if d in label:
                                sat = True
                                break
                            nd = negation.get(d)
                            if nd is None or nd not in label:
                                count += 1
                        if sat:
                            satisfied[ci] = True
                        elif count == 0:
                            return False
                        else:
                            live[ci] = count
                            if count == 1:
                                units.append(ci)
            for ci in self.occ_sat.get(j, ()):
                satisfied[ci] = True
            for ci in self.occ_kill.get(j, ()):
                live[ci] -= 1
                if active[ci] and not satisfied[ci]:
                    if live[ci] == 0:
                        return False
                    if live[ci] == 1:
                        units.append(ci)
        return True

    def completions(self, seed: frozenset[int], budget: _Budget) -> Iterator[frozenset[int]]:
        """All clash-free fully-expanded labels extending ``seed``;
        backtracking over disjunction choices, left branch first."""
        negation = self.pool.negation
        disjuncts = self.disjuncts
        n = len(disjuncts)

        init_satisfied = [False] * n
        init_live = [len(c) for c in disjuncts]
        init_active = [ci < self.n_meta for ci in range(n)]
        init_units = []
        for ci in range(self.n_meta):
            if self.always_true[ci]:
                init_satisfied[ci] = True
            elif init_live[ci] == 0:
                return  # trivially unsatisfiable theory
            elif init_live[ci] == 1:
                init_units.append(ci)

        work: list[tuple[tuple, list[int], list[int]]] = [
            ((set(), init_satisfied, init_live, init_active), sorted(seed), init_units)
        ]
        while work:
            state, pending, units = work.pop()
            budget.spend()
            if not self._propagate(state, pending, units):
                continue
            label, satisfied, live, active = state
            branch_clause = -1
            for ci in self.scan_order:
                if active[ci] and not satisfied[ci]:
                    branch_clause = ci
                    break
            if branch_clause < 0:
                yield frozenset(label)
                continue
            alternatives = [
                d
                for d in disjuncts[branch_clause]
                if d not in label
                and (negation.get(d) is None or negation.get(d) not in label)
            ]
            for d in reversed(alternatives):
                work.append(
                    (
                        (set(label), list(satisfied), list(live), list(active)),
                        [d],
                        [],
                    )
                )


class _Node:
    __slots__ = ("label", "edges")

    def __init__(self, label: frozenset[int]):
        self.label = label
        self.edges: list[tuple[str, object]] = []  # (role, _Node | ancestor depth)


def _expand(
    engine: _ClauseEngine,
    label: frozenset[int],
    path: tuple[frozenset[int], ...],
    budget: _Budget,
) -> _Node | None:
    kind = engine.pool.kind
    payload = engine.pool.payload
    for full_label in engine.completions(label, budget):
        node = _Node(full_label)
        ancestors = path + (full_label,)
        ok = True
        for ex in sorted(i for i in full_label if kind[i] == "exists"):
            role, arg = payload[ex]
            succ_label = {arg}
            for f in full_label:
                if kind[f] == "forall" and payload[f][0] == role:
                    succ_label.add(payload[f][1])
            succ_frozen = frozenset(succ_label)
            blocked = next((k for k, anc in enumerate(ancestors) if succ_frozen <= anc), None)
            if blocked is not None:
                node.edges.append((role, blocked))
                continue
            child = _expand(engine, succ_frozen, ancestors, budget)
            if child is None:
                ok = False
                break
            node.edges.append((role, child))
        if ok:
            return node
    return None


def _witness_from_tree(pool: _Pool, root: _Node, sig: Signature) -> Interpretation:
    name_ids = {c: pool.ids.get(Name(c)) for c in sig.concept_names}
    carrier: list[str] = []
    concept_ext: dict[str, list[str]] = {c: [] for c in sig.concept_names}
    role_ext: dict[str, list[tuple[str, str]]] = {r: [] for r in sig.role_names}

    def visit(node: _Node, stack: list[str]) -> str:
        name = f"n{len(carrier)}"
        carrier.append(name)
        for c, cid in name_ids.items():
            if cid is not None and cid in node.label:
                concept_ext[c].append(name)
        stack = stack + [name]
        for role, target in node.edges:
            if isinstance(target, int):
                role_ext[role].append((name, stack[target]))
            else:
                child_name = visit(target, stack)
                role_ext[role].append((name, child_name))
        return name

    visit(root, [])
    return Interpretation.build(sig, carrier, concept_ext, role_ext)


def is_satisfiable(
    c: Concept,
    t: Sequence[Gci] = (),
    budget: int = DEFAULT_BUDGET,
    sig: Signature | None = None,
) -> QueryResult:
    """Tableau satisfiability of ``c`` under the axioms of ``t``.

    On sat, the witness is a finite model extracted from the clash-free
    completion (blocked successors loop back to their blocking ancestor).
    """
    axioms = _axiom_concepts(t)
    sig = signature_for([c] + axioms, sig)
    pool = _Pool()
    root_id = pool.intern(nnf(c))
    clauses: list[tuple[int, ...]] = []
    seen = set()
    for concept in axioms:
        clause = pool.clause_of(pool.intern(concept))
        if clause is None:
            continue
        if not clause:
            return QueryResult("unsat")
        if clause not in seen:
            seen.add(clause)
            clauses.append(clause)
    engine = _ClauseEngine(pool, clauses)
    counter = _Budget(budget)
    try:
        root = _expand(engine, frozenset({root_id}), (), counter)
    except _BudgetExhausted:
        return QueryResult("timeout")
    if root is None:
        return QueryResult("unsat")
    return QueryResult("sat", _witness_from_tree(pool, root, sig))


def entails(
    t: Sequence[Gci],
    g: Gci,
    budget: int = DEFAULT_BUDGET,
    sig: Signature | None = None,
) -> QueryResult:
    """Semantical consequence via refutation: T entails C <= D iff
    C & ~D is unsatisfiable under T. Equivalences check both directions;
    a countermodel witness accompanies a not_entailed verdict."""
    directions = _directions(g)
    if sig is None:
        sig = signature_for([d for pair in directions for d in pair] + _axiom_concepts(t))
    timed_out = False
    for lhs, rhs in directions:
        result = is_satisfiable(And(lhs, nnf(Not(rhs))), t, budget=budget, sig=sig)
        if result.verdict == "sat":
            return QueryResult("not_entailed", result.witness)
        if result.verdict == "timeout":
            timed_out = True
    if timed_out:
        return QueryResult("timeout")
    return QueryResult("entailed")


def _directions(g: Gci) -> list[tuple[Concept, Concept]]:
    match g:
        case Subsumes(lhs, rhs):
            return [(lhs, rhs)]
        case Equiv(lhs, rhs):
            return [(lhs, rhs), (rhs, lhs)]
        case FixDef():
            raise UnsupportedAxiomError(
                "fixpoint definitions must be model-checked, not given to the reasoner"
            )
    raise TypeError(f"not a GCI: {g!r}")


# ---------------------------------------------------------------------------
# Bounded countermodel search (independent oracle)
# ---------------------------------------------------------------------------


@dataclass
class _PartialModel:
    """Three-valued structure over a fixed carrier size.

    For each concept name a (lower, upper) extension pair; for each role a
    per-source (lower, upper) successor-mask pair. lower <= truth <= upper.
    """

    size: int
    concept_lo: dict[str, int]
    concept_hi: dict[str, int]
    succ_lo: dict[str, list[int]]
    succ_hi: dict[str, list[int]]

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    def bounds(self, c: Concept) -> tuple[int, int]:
        full = self.full
        match c:
            case Top():
                return full, full
            case Bot():
                return 0, 0
            case Name(name):
                return self.concept_lo[name], self.concept_hi[name]
            case And(l, r):
                ll, lh = self.bounds(l)
                rl, rh = self.bounds(r)
                return ll & rl, lh & rh
            case Or(l, r):
                ll, lh = self.bounds(l)
                rl, rh = self.bounds(r)
                return ll | rl, lh | rh
            case Not(a):
                lo, hi = self.bounds(a)
                return full & ~hi, full & ~lo
            case Exists(role, a):
                lo, hi = self.bounds(a)
                slo, shi = self.succ_lo[role], self.succ_hi[role]
                out_lo = out_hi = 0
                for x in range(self.size):
                    if slo[x] & lo:
                        out_lo |= 1 << x
                    if shi[x] & hi:
                        out_hi |= 1 << x
                return out_lo, out_hi
            case Forall(role, a):
                lo, hi = self.bounds(a)
                slo, shi = self.succ_lo[role], self.succ_hi[role]
                out_lo = out_hi = 0
                for x in range(self.size):
                    if shi[x] & ~lo == 0:
                        out_lo |= 1 << x
                    if slo[x] & ~hi == 0:
                        out_hi |= 1 << x
                return out_lo, out_hi
        raise TypeError(f"not a concept: {c!r}")


def _color_int(pm: _PartialModel, sig: Signature, x: int) -> int:
    value = 0
    for k, c in enumerate(sig.concept_names):
        if pm.concept_lo[c] >> x & 1:
            value |= 1 << k
    return value


def _search(
    size: int,
    sig: Signature,
    global_constraints: Sequence[Concept],
    goal: Concept,
    budget: _Budget,
) -> Interpretation | None:
    """DFS over all models of the given carrier size with individual 0 in the
    goal; colors of individuals 1.. are required to be sorted to prune
    renaming symmetry."""
    variables: list[tuple] = []
    for x in range(size):
        for c in sig.concept_names:
            variables.append(("c", c, x))
    for r in sig.role_names:
        for x in range(size):
            for y in range(size):
                variables.append(("r", r, x, y))
    color_vars_end = size * len(sig.concept_names)

    pm = _PartialModel(
        size,
        {c: 0 for c in sig.concept_names},
        {c: (1 << size) - 1 for c in sig.concept_names},
        {r: [0] * size for r in sig.role_names},
        {r: [(1 << size) - 1] * size for r in sig.role_names},
    )
    full = pm.full

    def consistent() -> bool:
        for g in global_constraints:
            _, hi = pm.bounds(g)
            if hi != full:
                return False
        _, hi = pm.bounds(goal)
        return bool(hi & 1)

    def assign(idx: int) -> Interpretation | None:
        budget.spend()
        if not consistent():
            return None
        if idx == color_vars_end and size > 1:
            prev = _color_int(pm, sig, 1)
            for x in range(2, size):
                cur = _color_int(pm, sig, x)
                if cur < prev:
                    return None
                prev = cur
        if idx == len(variables):
            carrier = [f"x{k}" for k in range(size)]
            concept_ext = {
                c: [carrier[x] for x in range(size) if pm.concept_lo[c] >> x & 1]
                for c in sig.concept_names
            }
            role_ext = {
                r: [
                    (carrier[x], carrier[y])
                    for x in range(size)
                    for y in range(size)
                    if pm.succ_lo[r][x] >> y & 1
                ]
                for r in sig.role_names
            }
            return Interpretation.build(sig, carrier, concept_ext, role_ext)

        var = variables[idx]
        if var[0] == "c":
            _, cname, x = var
            bit = 1 << x
            for value in (False, True):
                if value:
                    pm.concept_lo[cname] |= bit
                else:
                    pm.concept_hi[cname] &= ~bit
                found = assign(idx + 1)
                if found is not None:
                    return found
                if value:
                    pm.concept_lo[cname] &= ~bit
                else:
                    pm.concept_hi[cname] |= bit
        else:
            _, rname, x, y = var
            bit = 1 << y
            for value in (False, True):
                if value:
                    pm.succ_lo[rname][x] |= bit
                else:
                    pm.succ_hi[rname][x] &= ~bit
                found = assign(idx + 1)
                if found is not None:
                    return found
                if value:
                    pm.succ_lo[rname][x] &= ~bit
                else:
                    pm.succ_hi[rname][x] |= bit
        return None

    return assign(0)


def bounded_countermodel(
    t: Sequence[Gci],
    g: Gci,
    n: int,
    budget: int = DEFAULT_SEARCH_BUDGET,
    sig: Signature | None = None,
) -> Interpretation | None:
    """Exhaustive search (modulo renaming) for a model of ``t`` violating ``g``
    with carrier size at most ``n``. Independent of the tableau."""
    if n < 1:
        raise ValueError("carrier bound must be >= 1")
    directions = _directions(g)
    constraints = _axiom_concepts(t)
    if sig is None:
        sig = signature_for([d for pair in directions for d in pair] + constraints)
    counter = _Budget(budget)
    try:
        for size in range(1, n + 1):
            for lhs, rhs in directions:
                goal = nnf(And(lhs, Not(rhs)))
                found = _search(size, sig, constraints, goal, counter)
                if found is not None:
                    return found
    except _BudgetExhausted:
        raise SearchBudgetExceededError(
            f"bounded search exceeded its budget of {budget} steps"
        ) from None
    return None
