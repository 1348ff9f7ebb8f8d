"""Goal-directed MDP solving over a planning view: LAO* with a value-iteration fallback."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .ppddl import GroundAction, State, holds

GoalTest = Callable[[State], bool]

TIE_TOL = 1e-12


def goal_test(goal) -> GoalTest:
    if callable(goal):
        return goal
    return lambda s: holds(s, goal)


@dataclass
class Policy:
    mapping: dict[State, GroundAction]
    values: dict[State, float]
    gamma: float = 0.9
    horizon: int = 40
    method: str = "lao*"
    expanded: int = 0
    residual: float = 0.0
    goal: GoalTest | None = field(default=None, repr=False)

    def action(self, s: State) -> GroundAction | None:
        return self.mapping.get(s)

    def table(self) -> list[tuple[str, str, float]]:
        """(state hash, action, value) rows for inspection or replay."""
        rows = []
        for s, a in self.mapping.items():
            rows.append((format(hash(tuple(sorted(s))) & 0xFFFFFFFFFFFF, "012x"), str(a), self.values.get(s, 0.0)))
        return sorted(rows)


class Solver:
    def __init__(self, view, is_goal: GoalTest, gamma: float):
        self.view = view
        self._goal_test = is_goal
        self._goal_memo: dict[State, bool] = {}
        self.gamma = gamma
        # actions in lexicographic order of their printed name for deterministic argmax
        self.actions = sorted(view.actions, key=str)
        self.succ: dict[State, list[tuple[GroundAction, list[tuple[State, float]]]]] = {}
        self.V: dict[State, float] = {}
        self.choice: dict[State, GroundAction] = {}
        self.sticky = 0.0

    def is_goal(self, s: State) -> bool:
        g = self._goal_memo.get(s)
        if g is None:
            g = self._goal_memo[s] = bool(self._goal_test(s))
        return g

    def h(self, s: State) -> float:
        return 0.0 if self.is_goal(s) else -1.0

    def value(self, s: State) -> float:
        v = self.V.get(s)
        return self.h(s) if v is None else v

    def expand(self, s: State) -> None:
        if s in self.succ:
            return
        if self.is_goal(s):
            self.succ[s] = []
        else:
            edges = []
            stay = None
            for a in self.actions:
                outs = self.view.successors(s, a)
                if len(outs) == 1 and outs[0][0] == s:
                    # a pure self-loop is never strictly better than any other action
                    stay = stay or (a, outs)
                    continue
                edges.append((a, outs))
            self.succ[s] = edges or [stay]
        self.V.setdefault(s, self.h(s))

    def backup(self, s: State) -> tuple[float, GroundAction | None]:
        if self.is_goal(s):
            return 0.0, None
        best, arg = None, None
        for a, outs in self.succ[s]:
            q = -1.0 + self.gamma * sum(p * self.value(s2) for s2, p in outs)
            if best is None or q > best + TIE_TOL:
                best, arg = q, a
        return best, arg

    def sweep(self, states, tol: float, max_iter: int = 100000) -> float:
        res = 0.0
        for _ in range(max_iter):
            res = 0.0
            for s in states:
                v, _ = self.backup(s)
                res = max(res, abs(v - self.V[s]))
                self.V[s] = v
            if res < tol:
                break
        return res

    def greedy(self, s: State) -> GroundAction | None:
        """Greedy action; the previous choice stands unless beaten by more than ``sticky``.

        Without this, actions tied within the convergence tolerance swap the
        envelope back and forth and the termination test never settles.
        """
        best, arg = self.backup(s)
        cur = self.choice.get(s)
        if cur is not None and cur != arg and self.sticky > 0:
            for a, outs in self.succ[s]:
                if a == cur:
                    q = -1.0 + self.gamma * sum(p * self.value(s2) for s2, p in outs)
                    if q >= best - self.sticky:
                        return cur
                    break
        self.choice[s] = arg
        return arg

    def greedy_envelope(self, s0: State) -> tuple[list[State], list[State]]:
        """States reachable under the greedy policy; second list holds unexpanded tips."""
        seen = {s0}
        order, tips = [], []
        todo = deque([s0])
        while todo:
            s = todo.popleft()
            if s not in self.succ:
                tips.append(s)
                continue
            order.append(s)
            a = self.greedy(s)
            if a is None:
                continue
            for s2, p in dict(self.succ[s])[a]:
                if p > 0 and s2 not in seen:
                    seen.add(s2)
                    todo.append(s2)
        return order, tips

    def solve(self, s0: State, goal, horizon: int = 40, epsilon_vi: float = 1e-6, node_cap: int = 200_000) -> Policy:
        """LAO* from ``s0``; expansions and values carry over between calls."""
        tol = epsilon_vi * (1 - self.gamma) / max(self.gamma, 1e-12)
        self.expand(s0)
        self.sticky = tol
        while True:
            env, tips = self.greedy_envelope(s0)
            if tips:
                for s in tips:
                    self.expand(s)
                if len(self.succ) > node_cap:
                    pol = value_iteration(self.view, s0, goal, self.gamma, epsilon_vi)
                    pol.horizon = horizon
                    return pol
                self.sweep(env + tips, tol, max_iter=50)
                continue
            res = self.sweep(env, tol)
            env2, tips2 = self.greedy_envelope(s0)
            if not tips2 and set(env2) == set(env) and res < tol:
                mapping = _extract(self, env2)
                return Policy(mapping, dict(self.V), self.gamma, horizon, "lao*", len(self.succ), res, self._goal_test)


def _extract(solver: Solver, states) -> dict[State, GroundAction]:
    out = {}
    for s in states:
        a = solver.greedy(s)
        if a is not None:
            out[s] = a
    return out


def reachable(view, s0: State, is_goal: GoalTest, cap: int) -> list[State] | None:
    seen = {s0}
    order = [s0]
    todo = deque([s0])
    while todo:
        s = todo.popleft()
        if is_goal(s):
            continue
        for a in view.actions:
            for s2, p in view.successors(s, a):
                if p > 0 and s2 not in seen:
                    seen.add(s2)
                    order.append(s2)
                    if len(order) > cap:
                        return None
                    todo.append(s2)
    return order


def value_iteration(view, s0: State, goal, gamma: float = 0.9, epsilon_vi: float = 1e-6, cap: int = 2_000_000) -> Policy:
    """Dense value iteration over every state reachable from ``s0``."""
    is_goal = goal_test(goal)
    solver = Solver(view, is_goal, gamma)
    states = reachable(view, s0, is_goal, cap)
    if states is None:
        raise RuntimeError(f"more than {cap} reachable states")
    for s in states:
        solver.expand(s)
    tol = epsilon_vi * (1 - gamma) / max(gamma, 1e-12)
    res = solver.sweep(states, tol)
    mapping = _extract(solver, states)
    return Policy(mapping, dict(solver.V), gamma, 40, "vi", len(states), res, is_goal)


def plan(
    view,
    s0: State,
    goal,
    gamma: float = 0.9,
    horizon: int = 40,
    epsilon_vi: float = 1e-6,
    node_cap: int = 200_000,
) -> Policy:
    """Greedy policy for the discounted goal-reaching MDP (reward -1 per non-goal step).

    Values are converged tightly enough that they lie within ``epsilon_vi`` of
    the fixed point on the policy's envelope.
    """
    solver = Solver(view, goal_test(goal), gamma)
    return solver.solve(s0, goal, horizon, epsilon_vi, node_cap)


def unreachable_goal(policy: Policy, view, s0: State, goal=None) -> bool:
    """True iff no goal state is reachable from ``s0`` following ``policy`` in ``view``."""
    is_goal = goal_test(goal) if goal is not None else policy.goal
    seen = {s0}
    todo = deque([s0])
    while todo:
        s = todo.popleft()
        if is_goal(s):
            return False
        a = policy.action(s)
        if a is None:
            continue
        for s2, p in view.successors(s, a):
            if p > 0 and s2 not in seen:
                seen.add(s2)
                todo.append(s2)
    return True


class ViewSampler:
    """Treat a planning view as a simulator for rollouts."""

    def __init__(self, view, s0: State, seed: int = 0):
        self.view = view
        self.s0 = s0
        self.rng = random.Random(seed)
        self.current = s0

    def reset(self) -> State:
        self.current = self.s0
        return self.current

    def step(self, a: GroundAction) -> State:
        outs = self.view.successors(self.current, a)
        u, acc = self.rng.random(), 0.0
        nxt = outs[-1][0]
        for s2, p in outs:
            acc += p
            if u < acc:
                nxt = s2
                break
        self.current = nxt
        return nxt


def evaluate_policy(
    policy: Policy,
    sim,
    traces: int = 10,
    horizon: int = 40,
    goal=None,
    fallback: Callable[[State], GroundAction | None] | None = None,
) -> float:
    """Mean undiscounted reward over ``traces`` horizon-capped rollouts from s0.

    ``sim`` must be an off-budget simulator clone or a :class:`ViewSampler`.
    States missing from the policy use ``fallback``; with no action available
    the rollout stops and is charged the remaining horizon.
    """
    is_goal = goal_test(goal) if goal is not None else policy.goal
    total = 0.0
    for _ in range(traces):
        s = sim.reset()
        reward = 0
        for _ in range(horizon):
            if is_goal(s):
                break
            a = policy.action(s)
            if a is None and fallback is not None:
                a = fallback(s)
            if a is None:
                reward = -horizon
                break
            s = sim.step(a)
            reward -= 1
        total += reward
    return total / traces
