"""Task streams: fresh init/goal pairs found by breadth-first search."""

from __future__ import annotations

import random
import warnings
from collections import deque

from ..model import LearnedModel, PlanningView
from ..ppddl import Goal, LiftedDomain, Literal, TaskSpec, ground
from ..world import TaskStream


def _bfs(view: PlanningView, start, limit: int = 100000) -> dict:
    """Distance (in steps, positive-probability edges) to every reachable state."""
    dist = {start: 0}
    todo = deque([start])
    while todo:
        s = todo.popleft()
        for a in view.actions:
            for s2, p in view.successors(s, a):
                if p > 0 and s2 not in dist:
                    dist[s2] = dist[s] + 1
                    if len(dist) > limit:
                        return dist
                    todo.append(s2)
    return dist


def draw_task(
    domain: LiftedDomain, rng: random.Random, base: TaskSpec, depth: int, name: str,
    prev: TaskSpec | None = None, tries: int = 50, max_states: int = 100000,
) -> TaskSpec | None:
    """A task over ``base``'s objects whose goal lies at least ``depth`` steps from its init.

    Inits are drawn from the states ``domain`` reaches from ``base.init``;
    returns None when no such task turns up (or only one equal to ``prev``),
    or when more than ``max_states`` states are reachable.
    """
    space = ground(domain, base.objects)
    view = PlanningView(LearnedModel.from_domain(domain), space)
    reachable = _bfs(view, frozenset(base.init), max_states)
    if len(reachable) > max_states:
        return None
    reachable = sorted(reachable, key=sorted)
    for _ in range(tries):
        init = rng.choice(reachable)
        dist = _bfs(view, init)
        far = sorted((s for s, d in dist.items() if d >= depth), key=sorted)
        if not far:
            continue
        target = rng.choice(far)
        fresh = sorted(target - init)
        if not fresh:
            continue
        k = rng.randint(1, len(fresh))
        atoms = sorted(rng.sample(fresh, k))
        goal = Goal(tuple(Literal(a) for a in atoms))
        task = TaskSpec(name, base.domain_name, dict(base.objects), init, goal, base.gamma, base.horizon)
        if prev is None or task.key() != prev.key():
            return task
    return None


def generate_tasks(
    domain: LiftedDomain,
    count: int,
    rng: random.Random,
    base: TaskSpec,
    depth: int = 4,
) -> TaskStream:
    """``base`` first, then tasks whose goals lie at least ``depth`` steps from their init."""
    if count < 1:
        raise ValueError("count must be at least 1")
    tasks = [(base, domain)]
    while len(tasks) < count:
        task = draw_task(domain, rng, base, depth, f"{base.name}-g{len(tasks)}", tasks[-1][0])
        if task is None:
            break
        tasks.append((task, domain))
    if len(tasks) < count:
        warnings.warn(f"only {len(tasks)} of {count} tasks could be generated")
    return TaskStream(tasks)
