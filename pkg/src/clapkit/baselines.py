"""Reference agents: tabular Q-learning (no transfer) and a true-model planner."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .metrics import RunMetrics
from .model import LearnedModel, PlanningView
from .ppddl import GroundAction, State, TaskSpec
from .solve import evaluate_policy, goal_test, plan
from .world import BudgetExhausted


@dataclass
class QConfig:
    alpha: float = 0.3
    epsilon: float = 0.1
    gamma: float = 0.9
    horizon: int = 40
    eval_every: int = 100
    eval_traces: int = 10
    seed: int = 0


@dataclass
class QTable:
    alpha: float = 0.3
    gamma: float = 0.9
    values: dict[tuple[State, GroundAction], float] = field(default_factory=dict)

    def get(self, s: State, a: GroundAction) -> float:
        return self.values.get((s, a), 0.0)

    def best(self, s: State, actions) -> float:
        return max(self.get(s, a) for a in actions) if actions else 0.0

    def greedy(self, s: State, actions) -> GroundAction:
        """Highest-valued action; ties go to the lexicographically first name."""
        best, arg = None, None
        for a in actions:
            q = self.get(s, a)
            if best is None or q > best:
                best, arg = q, a
        return arg


def q_update(table: QTable, s: State, a: GroundAction, r: float, s2: State, actions, terminal: bool = False) -> QTable:
    """Q(s,a) <- (1-alpha) Q(s,a) + alpha (r + gamma max_a' Q(s',a')); max is 0 at a goal."""
    nxt = 0.0 if terminal else table.best(s2, actions)
    table.values[(s, a)] = (1 - table.alpha) * table.get(s, a) + table.alpha * (r + table.gamma * nxt)
    return table


class _QPolicy:
    """Frozen greedy view of a Q-table, shaped like a planning policy."""

    def __init__(self, table: QTable, actions):
        self.table = table
        self.actions = actions

    def action(self, s: State) -> GroundAction:
        return self.table.greedy(s, self.actions)


def qlearning_run(
    task: TaskSpec,
    sim,
    config: QConfig,
    metrics: RunMetrics | None = None,
    task_index: int = 0,
) -> RunMetrics:
    """Epsilon-greedy episodes until the budget is spent; the table starts empty."""
    metrics = metrics or RunMetrics("qlearning", config.seed, sim.budget)
    metrics.task_ids.append(task.name)
    rng = random.Random(config.seed * 7919 + task_index)
    actions = sorted(sim.space.actions, key=str)
    table = QTable(config.alpha, config.gamma)
    is_goal = goal_test(task.goal)
    offset = task_index * sim.budget
    H = config.horizon
    next_eval = config.eval_every
    policy = _QPolicy(table, actions)

    def evaluate_until(step: int) -> None:
        nonlocal next_eval
        while next_eval <= step:
            fork = sim.fork(config.seed * 1_000_003 + offset + next_eval)
            r = evaluate_policy(policy, fork, config.eval_traces, H, is_goal)
            metrics.evaluations.append((task_index, offset + next_eval, r))
            next_eval += config.eval_every

    sim.reset()
    h = 0
    while sim.remaining > 0:
        s = sim.current
        if rng.random() < config.epsilon:
            a = rng.choice(actions)
        else:
            a = table.greedy(s, actions)
        try:
            s2 = sim.step(a)
        except BudgetExhausted:
            break
        h += 1
        done = is_goal(s2)
        q_update(table, s, a, 0.0 if is_goal(s) else -1.0, s2, actions, terminal=done)
        if done:
            metrics.record_goal(task_index, offset + sim.steps_used)
            metrics.episodes.append((task_index, offset + sim.steps_used, -h, True))
            sim.reset()
            h = 0
        elif h >= H:
            metrics.episodes.append((task_index, offset + sim.steps_used, -H, False))
            sim.reset()
            h = 0
        evaluate_until(sim.steps_used)
    evaluate_until(sim.budget)
    metrics.learner_invocations.append(0)
    metrics.replans.append(0)
    return metrics


@dataclass
class OracleConfig:
    gamma: float = 0.9
    horizon: int = 40
    eval_every: int = 100
    eval_traces: int = 10
    seed: int = 0


def oracle_run(
    task: TaskSpec,
    sim,
    true_domain=None,
    config: OracleConfig | None = None,
    metrics: RunMetrics | None = None,
    task_index: int = 0,
) -> RunMetrics:
    """Plan on the simulator's own domain; replan whenever the hidden domain is swapped."""
    config = config or OracleConfig()
    metrics = metrics or RunMetrics("oracle", config.seed, sim.budget)
    metrics.task_ids.append(task.name)
    is_goal = goal_test(task.goal)
    s0 = frozenset(task.init)
    offset = task_index * sim.budget
    H = config.horizon
    replans = 0
    epoch = None
    policy = view = None

    def refresh(force_domain=None):
        nonlocal policy, view, epoch, replans
        dom = force_domain or sim.hidden_domain()
        view = PlanningView(LearnedModel.from_domain(dom), sim.space)
        policy = plan(view, s0, is_goal, config.gamma, H)
        epoch = sim.epoch
        replans += 1

    def act(s: State):
        a = policy.action(s)
        if a is None and not is_goal(s):
            sub = plan(view, s, is_goal, config.gamma, H)
            for k, v in sub.mapping.items():
                policy.mapping.setdefault(k, v)
            a = policy.action(s)
        return a

    refresh(true_domain)
    next_eval = config.eval_every

    def evaluate_until(step: int) -> None:
        nonlocal next_eval
        while next_eval <= step:
            fork = sim.fork(config.seed * 1_000_003 + offset + next_eval)
            r = evaluate_policy(policy, fork, config.eval_traces, H, is_goal, act)
            metrics.evaluations.append((task_index, offset + next_eval, r))
            next_eval += config.eval_every

    sim.reset()
    h = 0
    while sim.remaining > 0:
        if sim.epoch != epoch:
            refresh()
        a = act(sim.current)
        try:
            if a is None:
                # goal unreachable: idle out the episode on the cheapest no-op
                a = sorted(sim.space.actions, key=str)[0]
            s2 = sim.step(a)
        except BudgetExhausted:
            break
        h += 1
        if is_goal(s2):
            metrics.record_goal(task_index, offset + sim.steps_used)
            metrics.episodes.append((task_index, offset + sim.steps_used, -h, True))
            sim.reset()
            h = 0
        elif h >= H:
            metrics.episodes.append((task_index, offset + sim.steps_used, -H, False))
            sim.reset()
            h = 0
        evaluate_until(sim.steps_used)
    evaluate_until(sim.budget)
    metrics.learner_invocations.append(0)
    metrics.replans.append(replans)
    return metrics
