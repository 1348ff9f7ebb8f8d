"""Distinguishing-query synthesis as fully observable non-deterministic planning.

Two candidate models that disagree on a single literal are run side by side on
two copies of the state.  A query policy drives the copies apart: once the
copies differ, executing the same policy in the real simulator tells the two
candidates apart.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import NamedTuple

from .model import PRE, LearnedModel, PlanningView, Target
from .ppddl import GroundAction, GroundSpace, State


class MalformedPairError(ValueError):
    """The candidate models must differ in exactly the target literal."""


class Joint(NamedTuple):
    s1: State
    s2: State
    v1: bool  # target action visibly executed under model 1
    v2: bool


@dataclass
class FONDProblem:
    mA: LearnedModel
    mB: LearnedModel
    space: GroundSpace
    start: State
    target: Target
    views: tuple = field(init=False, repr=False)

    def __post_init__(self):
        self.views = (
            PlanningView(self.mA, self.space, include_stale=True),
            PlanningView(self.mB, self.space, include_stale=True),
        )
        self.actions = tuple(sorted(self.space.actions))

    @property
    def init(self) -> Joint:
        return Joint(self.start, self.start, False, False)

    def is_goal(self, j: Joint) -> bool:
        return j.s1 != j.s2 or j.v1 != j.v2

    def outcomes(self, j: Joint, ga: GroundAction) -> list[Joint]:
        """Joint outcomes, paired by effect index; an inapplicable copy stays put."""
        o1 = dict(self.views[0].outcomes(j.s1, ga))
        o2 = dict(self.views[1].outcomes(j.s2, ga))
        is_target = ga.name == self.target.action
        out = []
        if None in o1 or None in o2:
            pairs = [(a, b) for a in o1.values() for b in o2.values()]
        else:
            pairs = [(o1[i], o2[i]) for i in sorted(o1) if i in o2]
        for n1, n2 in pairs:
            v1 = j.v1 or (is_target and n1 != j.s1)
            v2 = j.v2 or (is_target and n2 != j.s2)
            jj = Joint(n1, n2, v1, v2)
            if jj not in out:
                out.append(jj)
        return out

    @property
    def n_atoms(self) -> int:
        """Two copies of every ground atom plus the two execution flags."""
        return 2 * len(self.space.atoms) + 2


def _differences(mA: LearnedModel, mB: LearnedModel) -> list[Target]:
    if set(mA.actions) != set(mB.actions):
        raise MalformedPairError("candidate models have different action sets")
    out = []
    for name, a in mA.actions.items():
        b = mB.actions[name]
        if len(a.effects) != len(b.effects):
            raise MalformedPairError(f"{name}: effect list counts differ")
        for lit in a.universe:
            if a.pre[lit] != b.pre[lit]:
                out.append(Target(name, lit, PRE))
            for i, (ea, eb) in enumerate(zip(a.effects, b.effects)):
                if ea[lit] != eb[lit]:
                    out.append(Target(name, lit, i))
    return out


def compile_query(
    mA: LearnedModel, mB: LearnedModel, space: GroundSpace, start: State, target: Target
) -> FONDProblem:
    diff = _differences(mA, mB)
    if diff != [target]:
        raise MalformedPairError(f"models must differ only in {target}; they differ in {diff}")
    return FONDProblem(mA, mB, space, start, target)


@dataclass
class FONDPolicy:
    mapping: dict[Joint, GroundAction]
    solved: bool = True
    criterion: str = "strong"  # or "strong-cyclic"
    nodes: int = 0


@dataclass
class Unsolvable:
    budget_exhausted: bool = False
    nodes: int = 0
    solved: bool = False


def solve_fond(problem: FONDProblem, node_budget: int = 1_000_000) -> FONDPolicy | Unsolvable:
    """Strong-cyclic AND-OR solve over the explicitly expanded joint graph."""
    init = problem.init
    if problem.is_goal(init):
        return FONDPolicy({}, True, "strong", 1)
    succ: dict[Joint, list[tuple[GroundAction, list[Joint]]]] = {}
    todo = deque([init])
    seen = {init}
    exhausted = False
    while todo:
        j = todo.popleft()
        edges = []
        for ga in problem.actions:
            outs = problem.outcomes(j, ga)
            if outs == [j]:
                continue
            edges.append((ga, outs))
            for o in outs:
                if o not in seen:
                    seen.add(o)
                    if len(seen) > node_budget:
                        exhausted = True
                        break
                    if not problem.is_goal(o):
                        todo.append(o)
            if exhausted:
                break
        succ[j] = edges
        if exhausted:
            break
    if exhausted:
        return Unsolvable(True, len(seen))

    goals = {j for j in seen if problem.is_goal(j)}
    good = set(seen)
    while True:
        # states that can reach the goal via actions whose outcomes all stay in `good`
        level = {g: 0 for g in goals}
        choice: dict[Joint, GroundAction] = {}
        frontier = set(goals)
        depth = 0
        while frontier:
            depth += 1
            new = set()
            for j, edges in succ.items():
                if j in level or j not in good:
                    continue
                for ga, outs in edges:
                    if all(o in good for o in outs) and any(o in frontier for o in outs):
                        choice[j] = ga
                        new.add(j)
                        break
            for j in new:
                level[j] = depth
            frontier = new
        reach = set(level)
        if reach == good:
            break
        good = reach
    if init not in level:
        return Unsolvable(False, len(seen))

    mapping: dict[Joint, GroundAction] = {}
    todo = deque([init])
    visited = {init}
    strong = True
    while todo:
        j = todo.popleft()
        if problem.is_goal(j):
            continue
        ga = choice[j]
        mapping[j] = ga
        outs = dict(succ[j])[ga]
        if any(o not in goals and level[o] >= level[j] for o in outs):
            strong = False
        for o in outs:
            if o not in visited:
                visited.add(o)
                todo.append(o)
    return FONDPolicy(mapping, True, "strong" if strong else "strong-cyclic", len(seen))


def _joint_step(mA, mB, space, j: Joint, ga: GroundAction, target_action: str) -> list[Joint]:
    """Independent re-derivation of joint outcomes straight from the grounded models."""

    def outs(m: LearnedModel, s: State):
        g = m.grounded(ga)
        am = m.actions[ga.name]
        app = g.pre_pos <= s and not (g.pre_neg & s)
        lists = [(i, add, dele) for i, (p, add, dele) in enumerate(g.effects) if p > 0 or am.stale]
        if not app or not lists:
            return None, [s]
        return [i for i, _, _ in lists], [(s - dele) | add for _, add, dele in lists]

    i1, r1 = outs(mA, j.s1)
    i2, r2 = outs(mB, j.s2)
    if i1 is None or i2 is None:
        pairs = [(a, b) for a in r1 for b in r2]
    else:
        d2 = dict(zip(i2, r2))
        pairs = [(a, d2[i]) for i, a in zip(i1, r1) if i in d2]
    t = ga.name == target_action
    return [Joint(a, b, j.v1 or (t and a != j.s1), j.v2 or (t and b != j.s2)) for a, b in pairs]


def check_distinguishing(
    policy: FONDPolicy,
    mA: LearnedModel,
    mB: LearnedModel,
    space: GroundSpace,
    start: State,
    p=None,
    target_action: str | None = None,
) -> bool:
    """True iff along every branch the two traces can still come apart.

    With ``p`` given, divergence means exactly one trace contains ``p``;
    otherwise any differing atom (or a one-sided visible execution) counts.
    """
    if not getattr(policy, "solved", False):
        return False

    def diverged(j: Joint) -> bool:
        if p is not None:
            return (p in j.s1) != (p in j.s2)
        return j.s1 != j.s2 or j.v1 != j.v2

    init = Joint(start, start, False, False)
    graph: dict[Joint, list[Joint]] = {}
    todo = deque([init])
    seen = {init}
    while todo:
        j = todo.popleft()
        if diverged(j):
            graph[j] = []
            continue
        ga = policy.mapping.get(j)
        if ga is None:
            return False  # policy not closed on a non-divergent reachable state
        nxt = _joint_step(mA, mB, space, j, ga, target_action or "")
        graph[j] = nxt
        for o in nxt:
            if o not in seen:
                seen.add(o)
                todo.append(o)
    # every reachable state must still be able to reach a divergent state
    can = {j for j in graph if diverged(j)}
    if not can:
        return False
    changed = True
    while changed:
        changed = False
        for j, nxt in graph.items():
            if j not in can and any(o in can for o in nxt):
                can.add(j)
                changed = True
    return len(can) == len(graph)


# --------------------------------------------------------------------------
# export


def _atom_name(atom, copy: int) -> str:
    return "c%d-%s" % (copy, "-".join(atom))


def _conj(parts: list[str]) -> str:
    return "(and " + " ".join(parts) + ")" if parts else "(and)"


def to_pddl(problem: FONDProblem) -> tuple[str, str]:
    """Ground FOND domain and problem text using ``oneof`` and ``when``.

    Visible execution is approximated by firing a non-empty effect list.
    """
    atoms = problem.space.atoms
    preds = " ".join(f"({_atom_name(a, k)})" for k in (1, 2) for a in atoms)
    lines = [
        f"(define (domain query-{problem.mA.name})",
        "  (:requirements :negative-preconditions :non-deterministic :conditional-effects)",
        f"  (:predicates {preds} (executed-1) (executed-2))",
    ]
    for ga in problem.actions:
        branches = []
        pres, lists = [], []
        for k, m in ((1, problem.mA), (2, problem.mB)):
            g = m.grounded(ga)
            am = m.actions[ga.name]
            pre = [f"({_atom_name(x, k)})" for x in sorted(g.pre_pos)]
            pre += [f"(not ({_atom_name(x, k)}))" for x in sorted(g.pre_neg)]
            pres.append(_conj(pre))
            lists.append([(i, add, dele) for i, (p, add, dele) in enumerate(g.effects) if p > 0 or am.stale])
        for (i, add1, del1), (_, add2, del2) in zip(*lists):
            parts = []
            for k, add, dele, pre in ((1, add1, del1, pres[0]), (2, add2, del2, pres[1])):
                eff = [f"({_atom_name(x, k)})" for x in sorted(add)]
                eff += [f"(not ({_atom_name(x, k)}))" for x in sorted(dele - add)]
                if ga.name == problem.target.action and eff:
                    eff.append(f"(executed-{k})")
                if eff:
                    parts.append(f"(when {pre} {_conj(eff)})")
            branches.append(_conj(parts))
        name = "-".join((ga.name, *ga.args))
        effect = f"(oneof {' '.join(branches)})" if len(branches) > 1 else (branches[0] if branches else "(and)")
        lines.append(f"  (:action {name} :parameters () :precondition (and) :effect {effect})")
    lines.append(")")
    init = " ".join(f"({_atom_name(a, k)})" for k in (1, 2) for a in sorted(problem.start))
    diverge = [
        f"(and ({_atom_name(a, 1)}) (not ({_atom_name(a, 2)})))" for a in atoms
    ] + [f"(and (not ({_atom_name(a, 1)})) ({_atom_name(a, 2)}))" for a in atoms]
    diverge += ["(and (executed-1) (not (executed-2)))", "(and (executed-2) (not (executed-1)))"]
    prob = (
        f"(define (problem query-{problem.target.action})\n"
        f"  (:domain query-{problem.mA.name})\n"
        f"  (:init {init})\n"
        f"  (:goal (or {' '.join(diverge)})))\n"
    )
    return "\n".join(lines) + "\n", prob
