"""The continual learning-and-planning loop."""

from __future__ import annotations

from dataclasses import dataclass

from . import monitor
from .learner import Learner, LearnerConfig, explore, needs_learning
from .metrics import RunMetrics
from .model import LearnedModel, PlanningView, Transition
from .ppddl import GroundAction, State, TaskSpec
from .solve import Policy, Solver, evaluate_policy, goal_test, unreachable_goal
from .world import BudgetExhausted


@dataclass
class ClapConfig:
    horizon: int = 40
    eta: int = 100
    theta: float = 0.05
    beta: int = 10
    walk_length: int = 40
    gamma: float = 0.9
    eval_every: int = 100
    eval_traces: int = 10
    seed: int = 0
    gof: bool = True
    comprehensive: bool = False

    def __post_init__(self):
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.beta < 0:
            raise ValueError("failure threshold must be non-negative")
        if not 0 < self.theta < 1:
            raise ValueError("theta must lie in (0, 1)")

    def learner_config(self) -> LearnerConfig:
        return LearnerConfig(
            eta=self.eta,
            walk_length=self.walk_length,
            comprehensive=self.comprehensive,
            seed=self.seed,
        )


class Planner:
    """Current policy for a model; replans only when the model version moves."""

    def __init__(self, model: LearnedModel, space, goal, s0: State, gamma: float, horizon: int):
        self.space = space
        self.goal = goal_test(goal)
        self.s0 = s0
        self.gamma = gamma
        self.horizon = horizon
        self.replans = 0
        self.set_model(model)

    def set_model(self, model: LearnedModel) -> None:
        self.model = model
        self.version = model.version
        self.view = PlanningView(model, self.space, include_stale=True)
        # one solver per model version, so off-envelope replans reuse its expansions
        self.solver = Solver(self.view, self.goal, self.gamma)
        self.policy: Policy = self.solver.solve(self.s0, self.goal, self.horizon)
        self._unreachable = unreachable_goal(self.policy, self.view, self.s0)
        self.replans += 1

    def refresh(self) -> bool:
        if self.model.version != self.version:
            self.set_model(self.model)
            return True
        return False

    def unreachable(self) -> bool:
        return self._unreachable

    def action(self, s: State) -> GroundAction | None:
        a = self.policy.action(s)
        if a is None and not self.goal(s):
            sub = self.solver.solve(s, self.goal, self.horizon)
            for k, v in sub.mapping.items():
                self.policy.mapping.setdefault(k, v)
            a = self.policy.action(s)
        return a


def run_task(
    task: TaskSpec,
    sim,
    model: LearnedModel,
    config: ClapConfig,
    learner: Learner | None = None,
    metrics: RunMetrics | None = None,
    task_index: int = 0,
) -> tuple[LearnedModel, RunMetrics]:
    """One task of the stream: plan, act, monitor, explore and relearn until the budget runs out."""
    learner = learner or Learner(config.learner_config())
    learner.begin_task()
    metrics = metrics or RunMetrics("clap", config.seed, sim.budget)
    metrics.task_ids.append(task.name)
    offset = task_index * sim.budget
    H = config.horizon
    s0 = frozenset(task.init)
    table = monitor.FreqTable()
    shapes: dict[str, tuple] = {}
    invocations = learner.invocations
    n_events = len(learner.events)

    sim.reset()
    agent = Planner(model, sim.space, task.goal, s0, config.gamma, H)
    next_eval = config.eval_every

    def evaluate_until(step: int, policy_agent: Planner) -> None:
        nonlocal next_eval
        while next_eval <= step:
            fork = sim.fork(config.seed * 1_000_003 + offset + next_eval)
            r = evaluate_policy(
                policy_agent.policy, fork, config.eval_traces, H, policy_agent.goal, policy_agent.action
            )
            metrics.evaluations.append((task_index, offset + next_eval, r))
            next_eval += config.eval_every

    h = f = 0
    while sim.remaining > 0:
        try:
            if f > config.beta or agent.unreachable():
                explore(learner, model, sim, config.walk_length)
                sim.reset()
                h = f = 0
            if needs_learning(model):
                frozen = agent
                model = learner.learn(model, sim)
                evaluate_until(sim.steps_used, frozen)
                agent = Planner(model, sim.space, task.goal, s0, config.gamma, H)
                agent.replans += frozen.replans
                h = 0
                continue
            s = sim.current
            a = agent.action(s)
            if a is None:
                f = config.beta + 1
                continue
            s2 = sim.step(a)
            h += 1
            verdict = learner.observe(model, Transition(s, a, s2), sim)
            if config.gof and verdict.consistent and verdict.matched_effect is not None:
                _gof(model, table, shapes, a.name, verdict.matched_effect, config.theta, learner, sim)
            if agent.goal(sim.current):
                metrics.record_goal(task_index, offset + sim.steps_used)
                metrics.episodes.append((task_index, offset + sim.steps_used, -h, True))
                sim.reset()
                h = f = 0
            elif h >= H:
                metrics.episodes.append((task_index, offset + sim.steps_used, -H, False))
                f += 1
                sim.reset()
                h = 0
            agent.refresh()
        except BudgetExhausted:
            break
        evaluate_until(sim.steps_used, agent)
    evaluate_until(sim.budget, agent)
    metrics.learner_invocations.append(learner.invocations - invocations)
    metrics.learner_events.extend({"task": task_index, **e} for e in learner.events[n_events:])
    metrics.replans.append(agent.replans)
    return model, metrics


def _gof(model, table, shapes, action, matched, theta, learner, sim) -> None:
    am = model.actions[action]
    if am.stale:
        return
    shape = tuple(tuple(sorted(e.items())) for e in am.effects)
    if shapes.get(action) != shape:
        shapes[action] = shape
        table.reset(action)
    table.ensure(action, len(am.effects))
    table.observe(action, matched)
    verdict, p = monitor.gof_test(table.counts[action], am.prob, theta)
    if verdict == monitor.FAIL:
        counts = list(table.counts[action])
        monitor.refit(model, table, action)
        learner.log(sim, "gof_refit", action=action, counts=counts, p=p, prob=list(am.prob))


def run_stream(
    tasks,
    sim,
    config: ClapConfig,
    model: LearnedModel,
    method: str = "clap",
    schedules=None,
) -> tuple[LearnedModel, RunMetrics]:
    """Run every (task, domain) pair in order, carrying model and learner across tasks."""
    learner = Learner(config.learner_config())
    metrics = RunMetrics(method, config.seed, sim.budget)
    for i, (task, domain) in enumerate(tasks):
        if i > 0:
            sim.load(task, domain, sim.budget, (schedules or {}).get(i))
        model, metrics = run_task(task, sim, model, config, learner, metrics, i)
    return model, metrics
