"""Simulator over a hidden ground-truth domain, with scheduled domain swaps."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .ppddl import (
    GroundAction,
    GroundSpace,
    LiftedDomain,
    PPDDLError,
    State,
    TaskSpec,
    apply_effect,
    ground,
    ground_effect,
    ground_literals,
    holds,
    parse_domain,
)


class BudgetExhausted(RuntimeError):
    """The simulator step budget is used up."""


@dataclass
class ChangeSchedule:
    entries: list[tuple[int, LiftedDomain]] = field(default_factory=list)

    def __post_init__(self):
        steps = [t for t, _ in self.entries]
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise ValueError("change schedule triggers must be strictly increasing")

    def at(self, step: int) -> LiftedDomain | None:
        for t, d in self.entries:
            if t == step:
                return d
        return None


def load_schedule(path: str | Path) -> ChangeSchedule:
    """Read ``<step> <domain-file>`` lines; relative paths resolve next to the manifest."""
    path = Path(path)
    entries = []
    for raw in path.read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        step, dom_file = line.split(None, 1)
        dom_path = Path(dom_file)
        if not dom_path.is_absolute():
            dom_path = path.parent / dom_path
        entries.append((int(step), parse_domain(dom_path.read_text())))
    return ChangeSchedule(entries)


@dataclass
class TaskStream:
    tasks: list[tuple[TaskSpec, LiftedDomain]]

    def __post_init__(self):
        for (t1, d1), (t2, d2) in zip(self.tasks, self.tasks[1:]):
            if t1.key() == t2.key() and d1.equivalent(d2):
                raise ValueError(f"consecutive tasks {t1.name} and {t2.name} are equal")

    def __iter__(self):
        return iter(self.tasks)

    def __len__(self):
        return len(self.tasks)


def check_task(task: TaskSpec, domain: LiftedDomain) -> None:
    for o, t in task.objects.items():
        if t != "object" and t not in domain.types:
            raise PPDDLError(f"object {o} has type {t} unknown to domain {domain.name}")
    for atom in task.init:
        if atom[0] not in domain.predicates:
            raise PPDDLError(f"init atom {atom} uses a predicate unknown to {domain.name}")


class Simulator:
    """Samples successors from a hidden domain and charges every step.

    Learners should only use :meth:`step`, :meth:`reset`, :attr:`current`,
    :attr:`steps_used`, :attr:`remaining` and :attr:`space`.
    """

    def __init__(
        self,
        domain: LiftedDomain,
        task: TaskSpec,
        budget: int,
        seed: int = 0,
        schedule: ChangeSchedule | None = None,
    ):
        self.seed = seed
        self.rng = random.Random(seed)
        self.epoch = 0
        self.load(task, domain, budget, schedule)

    def load(
        self,
        task: TaskSpec,
        domain: LiftedDomain,
        budget: int,
        schedule: ChangeSchedule | None = None,
    ) -> State:
        check_task(task, domain)
        self.task = task
        self._domain = domain
        self._schedule = schedule or ChangeSchedule()
        self.space: GroundSpace = ground(domain, task.objects)
        self._cache: dict[GroundAction, tuple] = {}
        self.budget = int(budget)
        self.steps_used = 0
        self.current: State = frozenset(task.init)
        self.epoch += 1
        return self.current

    @property
    def remaining(self) -> int:
        return self.budget - self.steps_used

    def hidden_domain(self) -> LiftedDomain:
        """Ground truth; for the experiment harness and the oracle only."""
        return self._domain

    def _swap(self, domain: LiftedDomain) -> None:
        self._domain = domain
        self.space = ground(domain, self.task.objects)
        self._cache.clear()
        self.epoch += 1

    def _compiled(self, ga: GroundAction):
        c = self._cache.get(ga)
        if c is None:
            schema = self._domain.actions[ga.name]
            binding = dict(zip(schema.variables, ga.args))
            cum, acc = [], 0.0
            for p in schema.prob:
                acc += p
                cum.append(acc)
            c = (
                ground_literals(schema.pre, binding),
                cum,
                [ground_effect(e, binding) for e in schema.eff],
            )
            self._cache[ga] = c
        return c

    def sample(self, state: State, ga: GroundAction) -> State:
        pre, cum, effs = self._compiled(ga)
        if not holds(state, pre):
            return state
        u = self.rng.random()
        for c, e in zip(cum, effs):
            if u < c:
                return apply_effect(state, e)
        return apply_effect(state, effs[-1])

    def step(self, ga: GroundAction) -> State:
        if self.steps_used >= self.budget:
            raise BudgetExhausted(f"budget of {self.budget} steps exhausted")
        self.current = self.sample(self.current, ga)
        self.steps_used += 1
        swap = self._schedule.at(self.steps_used)
        if swap is not None:
            self._swap(swap)
        return self.current

    def reset(self) -> State:
        self.current = frozenset(self.task.init)
        return self.current

    def fork(self, seed: int) -> "Simulator":
        """Independent clone for off-budget evaluation rollouts."""
        clone = Simulator.__new__(Simulator)
        clone.seed = seed
        clone.rng = random.Random(seed)
        clone.epoch = self.epoch
        clone.task = self.task
        clone._domain = self._domain
        clone._schedule = ChangeSchedule()
        clone.space = self.space
        clone._cache = {}
        clone.budget = float("inf")
        clone.steps_used = 0
        clone.current = frozenset(self.task.init)
        return clone


def action_names(actions: Sequence[GroundAction]) -> list[str]:
    return [str(a) for a in actions]
