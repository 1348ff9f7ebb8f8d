"""PPDDL subset: parsing, serialization, grounding and state semantics.

Supported: ``:typing``, ``:negative-preconditions``, ``:probabilistic-effects``.
Preconditions are conjunctions of literals over action parameters; effects are
a deterministic conjunction plus at most one flat ``probabilistic`` block.
Everything is normalized to a list of (probability, add, delete) branches.

Atoms are plain tuples ``(predicate, arg1, ..., argn)``; lifted atoms use
``?var`` arguments.  A state is a ``frozenset`` of ground atoms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

PROB_TOL = 1e-9
SUPPORTED_REQUIREMENTS = frozenset(
    {":strips", ":typing", ":negative-preconditions", ":probabilistic-effects"}
)
UNSUPPORTED_KEYWORDS = {
    "when": "conditional effect",
    "forall": "universally quantified formula",
    "or": "disjunctive formula",
    "imply": "implication",
    "increase": "numeric fluent effect",
    "decrease": "numeric fluent effect",
    "assign": "numeric fluent effect",
}

Atom = tuple
State = frozenset


class PPDDLError(ValueError):
    """Raised for malformed or semantically invalid PPDDL input."""


class PPDDLSyntaxError(PPDDLError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class UnsupportedFeatureError(PPDDLError):
    def __init__(self, construct: str):
        super().__init__(f"unsupported PPDDL feature: {construct}")
        self.construct = construct


class ProbabilitySumError(PPDDLError):
    pass


# --------------------------------------------------------------------------
# s-expressions


class _Tok(str):
    line: int
    col: int


def _tok(text: str, line: int, col: int) -> _Tok:
    t = _Tok(text)
    t.line, t.col = line, col
    return t


class _List(list):
    line: int = 0
    col: int = 0


def read_sexpr(text: str) -> _List:
    """Parse ``text`` into nested lists of lower-cased tokens."""
    stack: list[_List] = []
    root: _List | None = None
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch.isspace():
            i, col = i + 1, col + 1
            continue
        if ch == "(":
            lst = _List()
            lst.line, lst.col = line, col
            if stack:
                stack[-1].append(lst)
            elif root is not None:
                raise PPDDLSyntaxError("content after top-level expression", line, col)
            stack.append(lst)
            i, col = i + 1, col + 1
            continue
        if ch == ")":
            if not stack:
                raise PPDDLSyntaxError("unbalanced ')'", line, col)
            done = stack.pop()
            if not stack:
                root = done
            i, col = i + 1, col + 1
            continue
        start, scol = i, col
        while i < n and not text[i].isspace() and text[i] not in "();":
            i, col = i + 1, col + 1
        word = text[start:i].lower()
        if not stack:
            raise PPDDLSyntaxError(f"unexpected token {word!r} outside expression", line, scol)
        stack[-1].append(_tok(word, line, scol))
    if stack:
        raise PPDDLSyntaxError("unbalanced '(' (unexpected end of input)", stack[-1].line, stack[-1].col)
    if root is None:
        raise PPDDLSyntaxError("empty input", line, col)
    return root


def _pos(x) -> tuple[int, int]:
    return getattr(x, "line", 0), getattr(x, "col", 0)


def _expect_list(x, what: str) -> _List:
    if not isinstance(x, list):
        raise PPDDLSyntaxError(f"expected {what}, got {x!r}", *_pos(x))
    return x


def _expect_tok(x, what: str) -> str:
    if isinstance(x, list):
        raise PPDDLSyntaxError(f"expected {what}, got a list", *_pos(x))
    return x


def _typed_list(items: Sequence) -> list[tuple[str, str]]:
    """``a b - t c`` -> [(a, t), (b, t), (c, object)]."""
    out: list[tuple[str, str]] = []
    pending: list[str] = []
    idx = 0
    while idx < len(items):
        tok = _expect_tok(items[idx], "name")
        if tok == "-":
            if idx + 1 >= len(items):
                raise PPDDLSyntaxError("missing type after '-'", *_pos(tok))
            typ = _expect_tok(items[idx + 1], "type name")
            if not pending:
                raise PPDDLSyntaxError("type given without names", *_pos(tok))
            out.extend((p, typ) for p in pending)
            pending = []
            idx += 2
            continue
        pending.append(tok)
        idx += 1
    out.extend((p, "object") for p in pending)
    return out


# --------------------------------------------------------------------------
# domain types


@dataclass(frozen=True)
class PredicateSchema:
    name: str
    params: tuple[tuple[str, str], ...]

    @property
    def arity(self) -> int:
        return len(self.params)


class Literal(NamedTuple):
    atom: Atom
    positive: bool = True

    def __str__(self) -> str:
        s = "(" + " ".join(self.atom) + ")"
        return s if self.positive else f"(not {s})"


@dataclass(frozen=True)
class Effect:
    add: frozenset = frozenset()
    delete: frozenset = frozenset()

    def normalized(self) -> "Effect":
        return Effect(frozenset(self.add), frozenset(self.delete) - frozenset(self.add))


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[tuple[str, str], ...]
    pre: tuple[Literal, ...]
    prob: tuple[float, ...]
    eff: tuple[Effect, ...]

    def __post_init__(self):
        if len(self.prob) != len(self.eff):
            raise PPDDLError(f"{self.name}: |prob| != |eff|")
        if any(p < -PROB_TOL or p > 1 + PROB_TOL for p in self.prob):
            raise ProbabilitySumError(f"{self.name}: probability outside [0, 1]")
        if abs(sum(self.prob) - 1.0) > PROB_TOL:
            raise ProbabilitySumError(f"{self.name}: effect probabilities sum to {sum(self.prob)}")
        names = [v for v, _ in self.params]
        if len(set(names)) != len(names):
            raise PPDDLError(f"{self.name}: duplicate parameter names")

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.params)

    def key(self):
        """Order-insensitive structural key used for equality checks."""
        effs = sorted(
            (round(p, 12), tuple(sorted(e.add)), tuple(sorted(e.delete)))
            for p, e in zip(self.prob, self.eff)
        )
        return (self.name, self.params, tuple(sorted(self.pre)), tuple(effs))


@dataclass(frozen=True)
class LiftedDomain:
    name: str
    types: Mapping[str, str]  # child -> parent
    predicates: Mapping[str, PredicateSchema]
    actions: Mapping[str, ActionSchema]

    def __post_init__(self):
        for a in self.actions.values():
            atoms = [l.atom for l in a.pre] + [x for e in a.eff for x in (*e.add, *e.delete)]
            vars_ = set(a.variables)
            for atom in atoms:
                pred = self.predicates.get(atom[0])
                if pred is None:
                    raise PPDDLError(f"action {a.name} references undeclared predicate {atom[0]}")
                if len(atom) - 1 != pred.arity:
                    raise PPDDLError(f"action {a.name}: arity mismatch for {atom[0]}")
                for arg in atom[1:]:
                    if arg not in vars_:
                        raise PPDDLError(f"action {a.name}: unknown variable {arg}")

    def is_subtype(self, t: str, of: str) -> bool:
        seen = set()
        while True:
            if t == of:
                return True
            if t in seen or t == "object":
                return of == "object"
            seen.add(t)
            t = self.types.get(t, "object")

    def key(self):
        return (
            tuple(sorted(self.predicates.items(), key=lambda kv: kv[0])),
            tuple(sorted((a.key() for a in self.actions.values()))),
        )

    def equivalent(self, other: "LiftedDomain") -> bool:
        return self.key() == other.key()

    def replace_action(self, action: ActionSchema) -> "LiftedDomain":
        acts = dict(self.actions)
        acts[action.name] = action
        return LiftedDomain(self.name, self.types, self.predicates, acts)


@dataclass(frozen=True)
class ExistsGoal:
    variables: tuple[tuple[str, str], ...]
    literals: tuple[Literal, ...]
    candidates: tuple[tuple[str, ...], ...] = ()  # objects per variable


@dataclass(frozen=True)
class Goal:
    literals: tuple[Literal, ...] = ()
    exists: tuple[ExistsGoal, ...] = ()

    def __str__(self) -> str:
        parts = [str(l) for l in self.literals]
        for ex in self.exists:
            vs = " ".join(f"{v} - {t}" for v, t in ex.variables)
            body = " ".join(str(l) for l in ex.literals)
            parts.append(f"(exists ({vs}) (and {body}))")
        return "(and " + " ".join(parts) + ")"


@dataclass(frozen=True)
class TaskSpec:
    name: str
    domain_name: str
    objects: Mapping[str, str]  # object -> type
    init: State
    goal: Goal
    gamma: float = 0.9
    horizon: int = 40

    def key(self):
        return (
            tuple(sorted(self.objects.items())),
            tuple(sorted(self.init)),
            (tuple(sorted(self.goal.literals)), self.goal.exists),
        )


# --------------------------------------------------------------------------
# parsing


def _check_unsupported(expr) -> None:
    if isinstance(expr, list) and expr and not isinstance(expr[0], list):
        head = expr[0]
        if head in UNSUPPORTED_KEYWORDS:
            raise UnsupportedFeatureError(f"{UNSUPPORTED_KEYWORDS[head]} ({head})")


def _parse_atom(expr, predicates: Mapping[str, PredicateSchema], variables=None) -> Atom:
    expr = _expect_list(expr, "atom")
    if not expr:
        raise PPDDLSyntaxError("empty atom", *_pos(expr))
    _check_unsupported(expr)
    name = _expect_tok(expr[0], "predicate name")
    if name not in predicates:
        raise PPDDLError(f"undeclared predicate {name!r} (line {_pos(expr)[0]})")
    args = tuple(_expect_tok(a, "argument") for a in expr[1:])
    if len(args) != predicates[name].arity:
        raise PPDDLError(
            f"predicate {name} expects {predicates[name].arity} arguments, got {len(args)} "
            f"(line {_pos(expr)[0]})"
        )
    if variables is not None:
        for a in args:
            if a.startswith("?") and a not in variables:
                raise PPDDLError(f"unbound variable {a} in {name} (line {_pos(expr)[0]})")
    return (name, *args)


def _parse_literal(expr, predicates, variables=None) -> Literal:
    expr = _expect_list(expr, "literal")
    if expr and expr[0] == "not":
        if len(expr) != 2:
            raise PPDDLSyntaxError("'not' takes exactly one argument", *_pos(expr))
        return Literal(_parse_atom(expr[1], predicates, variables), False)
    return Literal(_parse_atom(expr, predicates, variables), True)


def _conjuncts(expr) -> list:
    expr = _expect_list(expr, "formula")
    if not expr:
        return []
    if expr[0] == "and":
        return list(expr[1:])
    return [expr]


def _parse_precondition(expr, predicates, variables) -> tuple[Literal, ...]:
    lits = []
    for c in _conjuncts(expr):
        _check_unsupported(c)
        if isinstance(c, list) and c and c[0] == "exists":
            raise UnsupportedFeatureError("existential precondition (exists)")
        if isinstance(c, list) and c and c[0] == "and":
            lits.extend(_parse_precondition(c, predicates, variables))
            continue
        lits.append(_parse_literal(c, predicates, variables))
    return tuple(dict.fromkeys(lits))


def _parse_number(tok) -> float:
    tok = _expect_tok(tok, "probability")
    try:
        return float(Fraction(tok))
    except (ValueError, ZeroDivisionError):
        raise PPDDLSyntaxError(f"bad probability {tok!r}", *_pos(tok)) from None


def _parse_simple_effect(exprs, predicates, variables) -> tuple[set, set]:
    add, delete = set(), set()
    for c in exprs:
        _check_unsupported(c)
        c = _expect_list(c, "effect")
        if c and c[0] == "probabilistic":
            raise UnsupportedFeatureError("nested probabilistic effect")
        if c and c[0] == "and":
            a, d = _parse_simple_effect(c[1:], predicates, variables)
            add |= a
            delete |= d
            continue
        lit = _parse_literal(c, predicates, variables)
        (add if lit.positive else delete).add(lit.atom)
    return add, delete


def _parse_effect(expr, predicates, variables, action_name: str):
    det_add, det_del = set(), set()
    branches: list[tuple[float, set, set]] | None = None
    for c in _conjuncts(expr):
        _check_unsupported(c)
        c = _expect_list(c, "effect")
        if c and c[0] == "probabilistic":
            if branches is not None:
                raise UnsupportedFeatureError("multiple probabilistic blocks in one effect")
            body = c[1:]
            if len(body) % 2:
                raise PPDDLSyntaxError("probabilistic expects probability/effect pairs", *_pos(c))
            branches = []
            for k in range(0, len(body), 2):
                p = _parse_number(body[k])
                a, d = _parse_simple_effect(_conjuncts(body[k + 1]), predicates, variables)
                branches.append((p, a, d))
            continue
        a, d = _parse_simple_effect([c], predicates, variables)
        det_add |= a
        det_del |= d
    if branches is None:
        branches = [(1.0, set(), set())]
    total = sum(p for p, _, _ in branches)
    if total > 1 + PROB_TOL:
        raise ProbabilitySumError(f"{action_name}: effect probabilities sum to {total:g} > 1")
    if total < 1 - PROB_TOL:
        branches.append((1.0 - total, set(), set()))
    probs, effs = [], []
    for p, a, d in branches:
        probs.append(p)
        effs.append(Effect(frozenset(det_add | a), frozenset(det_del | d)).normalized())
    return tuple(probs), tuple(effs)


def _section(expr) -> str | None:
    if isinstance(expr, list) and expr and not isinstance(expr[0], list):
        return expr[0]
    return None


def parse_domain(text: str) -> LiftedDomain:
    root = read_sexpr(text)
    if len(root) < 2 or root[0] != "define":
        raise PPDDLSyntaxError("expected (define (domain ...) ...)", *_pos(root))
    head = _expect_list(root[1], "(domain NAME)")
    if len(head) != 2 or head[0] != "domain":
        raise PPDDLSyntaxError("expected (domain NAME)", *_pos(head))
    name = _expect_tok(head[1], "domain name")
    types: dict[str, str] = {}
    predicates: dict[str, PredicateSchema] = {}
    actions: dict[str, ActionSchema] = {}
    for sec in root[2:]:
        kind = _section(sec)
        if kind == ":requirements":
            for req in sec[1:]:
                if _expect_tok(req, "requirement") not in SUPPORTED_REQUIREMENTS:
                    raise UnsupportedFeatureError(f"requirement {req}")
        elif kind == ":types":
            for t, parent in _typed_list(sec[1:]):
                if t in types:
                    raise PPDDLError(f"duplicate type {t}")
                types[t] = parent
        elif kind == ":predicates":
            for p in sec[1:]:
                p = _expect_list(p, "predicate declaration")
                pname = _expect_tok(p[0], "predicate name")
                if pname in predicates:
                    raise PPDDLError(f"duplicate predicate {pname}")
                params = tuple(_typed_list(p[1:]))
                if len({v for v, _ in params}) != len(params):
                    raise PPDDLError(f"predicate {pname}: duplicate parameter names")
                predicates[pname] = PredicateSchema(pname, params)
        elif kind == ":action":
            act = _parse_action(sec, predicates)
            if act.name in actions:
                raise PPDDLError(f"duplicate action {act.name}")
            actions[act.name] = act
        elif kind in (":constants", ":functions", ":derived"):
            raise UnsupportedFeatureError(kind)
        else:
            raise PPDDLSyntaxError(f"unknown domain section {kind!r}", *_pos(sec))
    return LiftedDomain(name, types, predicates, actions)


def _parse_action(sec, predicates) -> ActionSchema:
    name = _expect_tok(sec[1], "action name")
    fields: dict[str, object] = {}
    k = 2
    while k < len(sec):
        key = _expect_tok(sec[k], "action field")
        if k + 1 >= len(sec):
            raise PPDDLSyntaxError(f"missing value for {key}", *_pos(sec[k]))
        fields[key] = sec[k + 1]
        k += 2
    for key in fields:
        if key not in (":parameters", ":precondition", ":effect"):
            raise UnsupportedFeatureError(f"action field {key}")
    params = tuple(_typed_list(_expect_list(fields.get(":parameters", _List()), "parameter list")))
    variables = {v for v, _ in params}
    pre = _parse_precondition(fields.get(":precondition", _List()), predicates, variables)
    prob, eff = _parse_effect(fields.get(":effect", _List()), predicates, variables, name)
    return ActionSchema(name, params, pre, prob, eff)


def _bind_goal(expr, domain: LiftedDomain, objects: Mapping[str, str]) -> Goal:
    lits: list[Literal] = []
    exists: list[ExistsGoal] = []
    for c in _conjuncts(expr):
        _check_unsupported(c)
        if isinstance(c, list) and c and c[0] == "exists":
            vs = tuple(_typed_list(_expect_list(c[1], "variable list")))
            body = tuple(
                _parse_literal(x, domain.predicates, {v for v, _ in vs}) for x in _conjuncts(c[2])
            )
            cands = tuple(
                tuple(sorted(o for o, ot in objects.items() if domain.is_subtype(ot, t))) for _, t in vs
            )
            for l in body:
                _check_ground_args(l.atom, objects, domain, set(dict(vs)))
            exists.append(ExistsGoal(vs, body, cands))
            continue
        lit = _parse_literal(c, domain.predicates)
        _check_ground_args(lit.atom, objects, domain)
        lits.append(lit)
    return Goal(tuple(dict.fromkeys(lits)), tuple(exists))


def _check_ground_args(atom: Atom, objects, domain: LiftedDomain, allowed_vars=frozenset()) -> None:
    pred = domain.predicates[atom[0]]
    for arg, (_, ptype) in zip(atom[1:], pred.params):
        if arg in allowed_vars:
            continue
        if arg not in objects:
            raise PPDDLError(f"undeclared object {arg!r} in {atom[0]}")
        if not domain.is_subtype(objects[arg], ptype):
            raise PPDDLError(f"type mismatch: {arg} is {objects[arg]}, {atom[0]} expects {ptype}")


def parse_problem(text: str, domain: LiftedDomain) -> TaskSpec:
    root = read_sexpr(text)
    if len(root) < 2 or root[0] != "define":
        raise PPDDLSyntaxError("expected (define (problem ...) ...)", *_pos(root))
    head = _expect_list(root[1], "(problem NAME)")
    if len(head) != 2 or head[0] != "problem":
        raise PPDDLSyntaxError("expected (problem NAME)", *_pos(head))
    name = _expect_tok(head[1], "problem name")
    objects: dict[str, str] = {}
    init: set = set()
    goal_expr = None
    gamma, horizon = 0.9, 40
    domain_name = domain.name
    for sec in root[2:]:
        kind = _section(sec)
        if kind == ":domain":
            domain_name = _expect_tok(sec[1], "domain name")
            if domain_name != domain.name:
                raise PPDDLError(f"problem is for domain {domain_name}, not {domain.name}")
        elif kind == ":objects":
            for o, t in _typed_list(sec[1:]):
                if t != "object" and t not in domain.types:
                    raise PPDDLError(f"undeclared type {t!r} for object {o}")
                objects[o] = t
        elif kind == ":init":
            for a in sec[1:]:
                lit = _parse_literal(a, domain.predicates)
                if not lit.positive:
                    continue  # closed world
                init.add(lit.atom)
        elif kind == ":goal":
            goal_expr = sec[1] if len(sec) > 1 else _List()
        elif kind == ":horizon":
            horizon = int(_expect_tok(sec[1], "horizon"))
        elif kind == ":discount":
            gamma = float(_expect_tok(sec[1], "discount"))
        else:
            raise PPDDLSyntaxError(f"unknown problem section {kind!r}", *_pos(sec))
    for atom in init:
        _check_ground_args(atom, objects, domain)
    goal = _bind_goal(goal_expr if goal_expr is not None else _List(), domain, objects)
    if not 0 <= gamma < 1:
        raise PPDDLError("discount must lie in [0, 1)")
    if horizon < 1:
        raise PPDDLError("horizon must be positive")
    return TaskSpec(name, domain_name, objects, frozenset(init), goal, gamma, horizon)


# --------------------------------------------------------------------------
# serialization


def _fmt_num(p: float) -> str:
    s = repr(float(p))
    return s[:-2] if s.endswith(".0") else s


def _fmt_typed(params) -> str:
    return " ".join(f"{v} - {t}" for v, t in params)


def _fmt_conj(lits: Iterable[Literal]) -> str:
    lits = sorted(lits)
    return "(and " + " ".join(str(l) for l in lits) + ")" if lits else "(and)"


def _fmt_effect(e: Effect) -> str:
    return _fmt_conj([Literal(a, True) for a in e.add] + [Literal(d, False) for d in e.delete])


def serialize_action(a: ActionSchema) -> str:
    lines = [f"  (:action {a.name}", f"    :parameters ({_fmt_typed(a.params)})"]
    lines.append(f"    :precondition {_fmt_conj(a.pre)}")
    if len(a.eff) == 1:
        lines.append(f"    :effect {_fmt_effect(a.eff[0])}")
    else:
        body = " ".join(f"{_fmt_num(p)} {_fmt_effect(e)}" for p, e in zip(a.prob, a.eff))
        lines.append(f"    :effect (probabilistic {body})")
    return "\n".join(lines) + ")"


def serialize_domain(d: LiftedDomain) -> str:
    out = [f"(define (domain {d.name})"]
    out.append("  (:requirements :typing :negative-preconditions :probabilistic-effects)")
    if d.types:
        out.append("  (:types " + " ".join(f"{t} - {p}" for t, p in sorted(d.types.items())) + ")")
    preds = " ".join(
        "(" + " ".join([p.name, _fmt_typed(p.params)]).strip() + ")" for p in d.predicates.values()
    )
    out.append(f"  (:predicates {preds})")
    for a in d.actions.values():
        out.append(serialize_action(a))
    return "\n".join(out) + ")\n"


def serialize_problem(t: TaskSpec) -> str:
    objs = " ".join(f"{o} - {ty}" for o, ty in sorted(t.objects.items()))
    init = " ".join("(" + " ".join(a) + ")" for a in sorted(t.init))
    return (
        f"(define (problem {t.name})\n  (:domain {t.domain_name})\n  (:objects {objs})\n"
        f"  (:init {init})\n  (:goal {t.goal})\n  (:horizon {t.horizon})\n"
        f"  (:discount {_fmt_num(t.gamma)}))\n"
    )


# --------------------------------------------------------------------------
# grounding and semantics


class GroundAction(NamedTuple):
    name: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        return "(" + " ".join((self.name, *self.args)) + ")"


def substitute(atom: Atom, binding: Mapping[str, str]) -> Atom:
    return (atom[0], *(binding.get(x, x) for x in atom[1:]))


@dataclass
class GroundSpace:
    objects: Mapping[str, str]
    atoms: tuple[Atom, ...]
    actions: tuple[GroundAction, ...]
    schemas: Mapping[str, ActionSchema] = field(repr=False, default_factory=dict)

    def lift(self, ga: GroundAction) -> tuple[ActionSchema, dict[str, str]]:
        """Inverse of grounding: the schema plus its substitution."""
        schema = self.schemas[ga.name]
        return schema, dict(zip(schema.variables, ga.args))

    def atom_set(self) -> frozenset:
        return frozenset(self.atoms)


def objects_of_type(objects: Mapping[str, str], domain: LiftedDomain, t: str) -> list[str]:
    return sorted(o for o, ot in objects.items() if domain.is_subtype(ot, t))


def _groundings(params, objects, domain) -> Iterable[tuple[str, ...]]:
    pools = [objects_of_type(objects, domain, t) for _, t in params]
    return itertools.product(*pools)


def ground(domain: LiftedDomain, objects: Mapping[str, str]) -> GroundSpace:
    atoms = []
    for p in domain.predicates.values():
        for args in _groundings(p.params, objects, domain):
            atoms.append((p.name, *args))
    actions = []
    for a in domain.actions.values():
        for args in _groundings(a.params, objects, domain):
            actions.append(GroundAction(a.name, tuple(args)))
    actions.sort()
    return GroundSpace(dict(objects), tuple(sorted(atoms)), tuple(actions), dict(domain.actions))


def ground_literals(lits: Iterable[Literal], binding: Mapping[str, str]) -> tuple[Literal, ...]:
    return tuple(Literal(substitute(l.atom, binding), l.positive) for l in lits)


def ground_effect(e: Effect, binding: Mapping[str, str]) -> Effect:
    add = frozenset(substitute(x, binding) for x in e.add)
    delete = frozenset(substitute(x, binding) for x in e.delete)
    return Effect(add, delete - add)


def _holds_literals(state: State, lits: Iterable[Literal]) -> bool:
    return all((l.atom in state) == l.positive for l in lits)


def holds(state: State, formula) -> bool:
    """Closed-world satisfaction of a literal conjunction or a :class:`Goal`."""
    if isinstance(formula, Literal):
        return (formula.atom in state) == formula.positive
    if isinstance(formula, Goal):
        if not _holds_literals(state, formula.literals):
            return False
        for ex in formula.exists:
            names = [v for v, _ in ex.variables]
            if not any(
                _holds_literals(state, ground_literals(ex.literals, dict(zip(names, combo))))
                for combo in itertools.product(*ex.candidates)
            ):
                return False
        return True
    return _holds_literals(state, formula)


def apply_effect(state: State, effect: Effect) -> State:
    return (frozenset(state) - effect.delete) | effect.add


def atom_str(atom: Atom) -> str:
    return "(" + " ".join(atom) + ")"


def state_str(state: State) -> str:
    return " ".join(atom_str(a) for a in sorted(state))
