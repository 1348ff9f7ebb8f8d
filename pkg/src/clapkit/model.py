"""Learned lifted models with per-literal knowledge annotations.

Each action keeps a mode for every lifted literal over its parameters, both
in the precondition and in every effect list.  Modes are ``+`` (positive),
``-`` (negative), ``0`` (absent) and ``?`` (unknown).  Unknown literals are
queued for resolution and take part in no precondition or effect set.
"""

from __future__ import annotations

import copy
import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

from .ppddl import (
    PROB_TOL,
    ActionSchema,
    Effect,
    GroundAction,
    GroundSpace,
    LiftedDomain,
    Literal,
    PredicateSchema,
    State,
    substitute,
)

POS, NEG, ABSENT, UNKNOWN = "+", "-", "0", "?"
ALL_MODES = frozenset({POS, NEG, ABSENT})
PRE = "pre"
DISABLED_ATOM = ("__disabled__",)

Lit = tuple  # lifted atom over action variables


class Target(NamedTuple):
    action: str
    lit: Lit
    loc: object  # PRE or an effect-list index

    def __str__(self) -> str:
        where = "pre" if self.loc == PRE else f"eff[{self.loc}]"
        return f"{self.action}:{where}:(" + " ".join(self.lit) + ")"


class Transition(NamedTuple):
    s: State
    a: GroundAction
    s2: State


@dataclass
class QueueEntry:
    candidates: frozenset = ALL_MODES
    dormant: bool = False
    reference: Transition | None = None
    ref_kind: str | None = None  # "witness" (action executed) or "failure"


@dataclass
class ConsistencyVerdict:
    consistent: bool
    matched_effect: int | None = None
    violations: list[Target] = field(default_factory=list)


def literal_universe(
    params: Sequence[tuple[str, str]],
    predicates: Mapping[str, PredicateSchema],
    is_subtype,
) -> tuple[Lit, ...]:
    """Every predicate bound to distinct, type-compatible action variables."""
    out = []
    for pred in predicates.values():
        pools = [[v for v, vt in params if is_subtype(vt, pt)] for _, pt in pred.params]
        for combo in itertools.product(*pools):
            if len(set(combo)) == len(combo):
                out.append((pred.name, *combo))
    return tuple(sorted(out))


@dataclass
class ActionModel:
    name: str
    params: tuple[tuple[str, str], ...]
    universe: tuple[Lit, ...]
    pre: dict
    effects: list[dict] = field(default_factory=list)
    prob: list[float] = field(default_factory=list)
    stale: bool = False
    deferred: bool = False
    disabled: bool = False  # never applicable; used for navigation copies only

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.params)

    def binding(self, ga: GroundAction) -> dict[str, str]:
        return dict(zip(self.variables, ga.args))

    def known_pre(self) -> tuple[Literal, ...]:
        return tuple(
            Literal(l, m == POS) for l, m in sorted(self.pre.items()) if m in (POS, NEG)
        )

    def known_effect(self, i: int) -> Effect:
        add = frozenset(l for l, m in self.effects[i].items() if m == POS)
        dele = frozenset(l for l, m in self.effects[i].items() if m == NEG)
        return Effect(add, dele - add)

    def has_unknown_pre(self) -> bool:
        return any(m == UNKNOWN for m in self.pre.values())

    def new_effect_list(self) -> dict:
        return {l: ABSENT for l in self.universe}

    def signature(self):
        return (
            tuple(sorted(self.pre.items())),
            tuple(tuple(sorted(e.items())) for e in self.effects),
            tuple(round(p, 12) for p in self.prob),
        )


class GroundedAction(NamedTuple):
    pre_pos: frozenset
    pre_neg: frozenset
    effects: tuple  # tuple[(prob, add, delete)]
    unknown_pre: frozenset  # ground atoms under unknown precondition literals
    unknown_eff: tuple  # per list: frozenset of ground atoms under unknown literals
    covered: frozenset  # ground atoms expressible by the literal universe


def ground_action_model(am: ActionModel, ga: GroundAction) -> GroundedAction:
    b = am.binding(ga)
    pos = frozenset(substitute(l, b) for l, m in am.pre.items() if m == POS)
    if am.disabled:
        pos |= {DISABLED_ATOM}
    neg = frozenset(substitute(l, b) for l, m in am.pre.items() if m == NEG)
    unk = frozenset(substitute(l, b) for l, m in am.pre.items() if m == UNKNOWN)
    effs, unk_eff = [], []
    for i, p in enumerate(am.prob):
        e = am.known_effect(i)
        add = frozenset(substitute(x, b) for x in e.add)
        dele = frozenset(substitute(x, b) for x in e.delete) - add
        effs.append((p, add, dele))
        unk_eff.append(frozenset(substitute(l, b) for l, m in am.effects[i].items() if m == UNKNOWN))
    covered = frozenset(substitute(l, b) for l in am.universe)
    return GroundedAction(pos, neg, tuple(effs), unk, tuple(unk_eff), covered)


class LearnedModel:
    """Lifted model M = {M_a} plus the queue of literals awaiting resolution."""

    def __init__(self, name: str, types, predicates, actions: dict[str, ActionModel]):
        self.name = name
        self.types = dict(types)
        self.predicates = dict(predicates)
        self.actions = actions
        self.queue: dict[Target, QueueEntry] = {}
        self.version = 0
        self._ground_cache: dict = {}

    # construction -----------------------------------------------------

    @staticmethod
    def _shell(domain: LiftedDomain) -> "LearnedModel":
        acts = {}
        for a in domain.actions.values():
            uni = literal_universe(a.params, domain.predicates, domain.is_subtype)
            acts[a.name] = ActionModel(a.name, a.params, uni, {l: ABSENT for l in uni})
        return LearnedModel(domain.name, domain.types, domain.predicates, acts)

    @classmethod
    def empty(cls, domain: LiftedDomain) -> "LearnedModel":
        """Only action names and parameters are known; every precondition literal is queued."""
        m = cls._shell(domain)
        for am in m.actions.values():
            for l in am.universe:
                am.pre[l] = UNKNOWN
                m.queue[Target(am.name, l, PRE)] = QueueEntry()
        return m

    @classmethod
    def from_domain(cls, domain: LiftedDomain) -> "LearnedModel":
        """Fully known model equivalent to ``domain``."""
        m = cls._shell(domain)
        for a in domain.actions.values():
            am = m.actions[a.name]
            for lit in a.pre:
                if lit.atom not in am.pre:
                    raise ValueError(f"{a.name}: literal {lit.atom} outside the literal universe")
                am.pre[lit.atom] = POS if lit.positive else NEG
            for p, e in zip(a.prob, a.eff):
                modes = am.new_effect_list()
                for x in e.delete:
                    modes[x] = NEG
                for x in e.add:
                    modes[x] = POS
                if any(x not in am.pre for x in (*e.add, *e.delete)):
                    raise ValueError(f"{a.name}: effect literal outside the literal universe")
                am.effects.append(modes)
                am.prob.append(float(p))
        return m

    def copy(self) -> "LearnedModel":
        m = LearnedModel(self.name, self.types, self.predicates, copy.deepcopy(self.actions))
        m.queue = {t: copy.copy(e) for t, e in self.queue.items()}
        m.version = self.version
        return m

    # bookkeeping -------------------------------------------------------

    def touch(self) -> None:
        self.version += 1
        self._ground_cache.clear()

    def grounded(self, ga: GroundAction) -> GroundedAction:
        g = self._ground_cache.get(ga)
        if g is None:
            g = ground_action_model(self.actions[ga.name], ga)
            self._ground_cache[ga] = g
        return g

    def mode(self, t: Target) -> str:
        am = self.actions[t.action]
        return am.pre[t.lit] if t.loc == PRE else am.effects[t.loc][t.lit]

    def set_mode(self, t: Target, mode: str) -> None:
        am = self.actions[t.action]
        if t.loc == PRE:
            am.pre[t.lit] = mode
        else:
            am.effects[t.loc][t.lit] = mode
        if mode != UNKNOWN:
            self.queue.pop(t, None)
        self.touch()

    def active_targets(self) -> list[Target]:
        return [t for t, e in self.queue.items() if not e.dormant]

    def signature(self):
        return tuple(sorted((n, a.signature()) for n, a in self.actions.items()))

    def check_probabilities(self) -> None:
        for am in self.actions.values():
            if am.prob and abs(sum(am.prob) - 1.0) > PROB_TOL and not am.stale:
                raise AssertionError(f"{am.name}: probabilities sum to {sum(am.prob)}")

    def mark_unknown_inplace(
        self,
        violations: Iterable[Target],
        reference: Transition | None = None,
        ref_kind: str | None = None,
    ) -> list[Target]:
        """Queue ``violations`` for relearning; returns the newly marked targets."""
        marked = []
        for t in violations:
            if self.mode(t) == UNKNOWN:
                continue
            am = self.actions[t.action]
            cands = ALL_MODES
            if t.loc == PRE and reference is not None:
                val = substitute(t.lit, am.binding(reference.a)) in reference.s
                if ref_kind == "witness":
                    cands = frozenset({POS if val else NEG, ABSENT})
                elif ref_kind == "failure":
                    cands = frozenset({NEG if val else POS, ABSENT})
            self.set_mode(t, UNKNOWN)
            self.queue[t] = QueueEntry(cands, False, reference, ref_kind)
            am.stale = True
            marked.append(t)
        return marked

    # conversions ------------------------------------------------------

    def to_domain(self) -> LiftedDomain:
        """Known part of the model as a plain domain (unknown literals dropped)."""
        acts = {}
        for am in self.actions.values():
            probs = [p for p in am.prob]
            total = sum(probs)
            if not am.effects or total <= 0:
                prob, eff = (1.0,), (Effect(),)
            else:
                prob = tuple(p / total for p in probs)
                eff = tuple(am.known_effect(i) for i in range(len(probs)))
            acts[am.name] = ActionSchema(am.name, am.params, am.known_pre(), prob, eff)
        return LiftedDomain(self.name, self.types, self.predicates, acts)


def mark_unknown(model: LearnedModel, violations: Sequence[Target], **kw) -> LearnedModel:
    if not violations:
        raise ValueError("mark_unknown needs at least one violation")
    m = model.copy()
    m.mark_unknown_inplace(violations, **kw)
    return m


# --------------------------------------------------------------------------
# consistency


def _lifts(am: ActionModel, ga: GroundAction, atom) -> list[Lit]:
    b = am.binding(ga)
    return [l for l in am.universe if l[0] == atom[0] and substitute(l, b) == atom]


def is_consistent(model: LearnedModel, t: Transition) -> ConsistencyVerdict:
    """M-consistency of (s, a, s') with violation extraction on failure."""
    s, ga, s2 = t
    am = model.actions[ga.name]
    g = model.grounded(ga)
    applicable = g.pre_pos <= s and not (g.pre_neg & s)
    if not applicable:
        if s == s2:
            return ConsistencyVerdict(True)
        bad = [x for x in g.pre_pos if x not in s] + [x for x in g.pre_neg if x in s]
        viol = []
        for x in sorted(bad):
            for l in _lifts(am, ga, x):
                if am.pre[l] in (POS, NEG) and ((am.pre[l] == POS) != (x in s)):
                    viol.append(Target(ga.name, l, PRE))
        return ConsistencyVerdict(False, None, viol)
    for i, (p, add, dele) in enumerate(g.effects):
        if p > 0 and (s - dele) | add == s2:
            return ConsistencyVerdict(True, i)
    viol = []
    for x in sorted(s ^ s2):
        added = x in s2
        for i, (p, add, dele) in enumerate(g.effects):
            if p > 0 and ((added and x in add) or (not added and x in dele)):
                break
        else:
            for l in _lifts(am, ga, x):
                for i, modes in enumerate(am.effects):
                    if am.prob[i] > 0 and modes[l] != UNKNOWN and modes[l] != (POS if added else NEG):
                        viol.append(Target(ga.name, l, i))
    return ConsistencyVerdict(False, None, viol)


def possibly_applicable(model: LearnedModel, s: State, ga: GroundAction) -> bool:
    g = model.grounded(ga)
    return g.pre_pos <= s and not (g.pre_neg & s)


def compatible_lists(model: LearnedModel, t: Transition, include_zero: bool = True) -> list[int]:
    """Effect lists that could explain (s, a, s') once unknown literals are filled in."""
    s, ga, s2 = t
    g = model.grounded(ga)
    diff = s ^ s2
    out = []
    for i, (p, add, dele) in enumerate(g.effects):
        if p <= 0 and not include_zero:
            continue
        if not add <= s2 or (dele & s2):
            continue
        unk = g.unknown_eff[i]
        if all(x in add or x in dele or x in unk for x in diff):
            out.append(i)
    return out


def compatible(model: LearnedModel, t: Transition) -> bool:
    """Could (s, a, s') be explained once the unknown literals are filled in?"""
    s, ga, s2 = t
    g = model.grounded(ga)
    known_ok = g.pre_pos <= s and not (g.pre_neg & s)
    if s == s2:
        if not known_ok or g.unknown_pre or not g.effects:
            return True
        return bool(compatible_lists(model, t))
    if not known_ok:
        return False
    return not g.effects or bool(compatible_lists(model, t))


# --------------------------------------------------------------------------
# planning view


class PlanningView:
    """Closed-form transition function derived from a model over a ground space."""

    def __init__(self, model: LearnedModel, space: GroundSpace, include_stale: bool = False):
        self.model = model
        self.space = space
        self.actions = tuple(sorted(space.actions))
        self.include_stale = include_stale
        self._succ: dict = {}

    def _usable(self, ga: GroundAction) -> list[tuple[float, frozenset, frozenset]]:
        am = self.model.actions[ga.name]
        g = self.model.grounded(ga)
        if self.include_stale and am.stale:
            return [(p, add, dele) for p, add, dele in g.effects]
        return [(p, add, dele) for p, add, dele in g.effects if p > 0]

    def applicable(self, s: State, ga: GroundAction) -> bool:
        g = self.model.grounded(ga)
        return bool(self._usable(ga)) and g.pre_pos <= s and not (g.pre_neg & s)

    def successors(self, s: State, ga: GroundAction) -> list[tuple[State, float]]:
        key = (s, ga)
        hit = self._succ.get(key)
        if hit is not None:
            return hit
        if not self.applicable(s, ga):
            out = [(s, 1.0)]
        else:
            effs = self._usable(ga)
            total = sum(p for p, _, _ in effs)
            acc: dict = {}
            for p, add, dele in effs:
                s2 = (s - dele) | add
                acc[s2] = acc.get(s2, 0.0) + (p / total if total > 0 else 1.0 / len(effs))
            out = sorted(acc.items(), key=lambda kv: sorted(kv[0]))
        self._succ[key] = out
        return out

    def outcomes(self, s: State, ga: GroundAction) -> list[tuple[int | None, State]]:
        """Non-deterministic outcomes (probabilities ignored), tagged by effect index."""
        if not self.applicable(s, ga):
            return [(None, s)]
        g = self.model.grounded(ga)
        am = self.model.actions[ga.name]
        out = []
        for i, (p, add, dele) in enumerate(g.effects):
            if p > 0 or (self.include_stale and am.stale):
                out.append((i, (s - dele) | add))
        return out


def to_planning_model(model: LearnedModel, space: GroundSpace) -> PlanningView:
    return PlanningView(model, space)


def reachable_states(view: PlanningView, s0: State, limit: int = 200000) -> list[State]:
    seen = {s0}
    order = [s0]
    todo = deque([s0])
    while todo:
        s = todo.popleft()
        for ga in view.actions:
            for s2, p in view.successors(s, ga):
                if p > 0 and s2 not in seen:
                    seen.add(s2)
                    order.append(s2)
                    todo.append(s2)
                    if len(seen) > limit:
                        raise RuntimeError("state space too large to enumerate")
    return order


def enumerate_transitions(
    states: Iterable[State], space: GroundSpace, models: Sequence[LearnedModel]
) -> list[Transition]:
    """Z: every (s, a, s') with s' a no-op or a successor under any of ``models``."""
    views = [PlanningView(m, space, include_stale=True) for m in models]
    out = []
    for s in states:
        for ga in sorted(space.actions):
            succ = {s}
            for v in views:
                g = v.model.grounded(ga)
                for p, add, dele in g.effects:
                    succ.add((s - dele) | add)
            for s2 in sorted(succ, key=sorted):
                out.append(Transition(s, ga, s2))
    return out


def variational_distance(m1: LearnedModel, m2: LearnedModel, Z: Sequence[Transition]) -> float:
    if not Z:
        raise ValueError("variational distance needs a non-empty transition set")
    diff = sum(
        abs(int(is_consistent(m1, z).consistent) - int(is_consistent(m2, z).consistent)) for z in Z
    )
    return diff / len(Z)


def reachable_vd(
    learned: LearnedModel, truth: LearnedModel, space: GroundSpace, s0: State
) -> float:
    """VD over every transition from states reachable under the true model."""
    states = reachable_states(PlanningView(truth, space), s0)
    return variational_distance(learned, truth, enumerate_transitions(states, space, [learned, truth]))
