"""Per-run measurements shared by CLaP and the baselines."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field


@dataclass
class RunMetrics:
    method: str
    seed: int
    budget: int = 0
    task_ids: list[str] = field(default_factory=list)
    goals: list[tuple[int, int, int]] = field(default_factory=list)  # (task, global step, cumulative goals)
    evaluations: list[tuple[int, int, float]] = field(default_factory=list)  # (task, global step, avg reward)
    episodes: list[tuple[int, int, int, bool]] = field(default_factory=list)  # (task, global step, reward, goal)
    learner_events: list[dict] = field(default_factory=list)
    learner_invocations: list[int] = field(default_factory=list)  # per task
    adaptive_delay: list[float] = field(default_factory=list)  # per task
    replans: list[int] = field(default_factory=list)  # per task
    error: str | None = None

    @property
    def total_goals(self) -> int:
        return self.goals[-1][2] if self.goals else 0

    def goals_in_task(self, task: int) -> int:
        before = [g for t, _, g in self.goals if t < task]
        upto = [g for t, _, g in self.goals if t <= task]
        return (upto[-1] if upto else 0) - (before[-1] if before else 0)

    def record_goal(self, task: int, step: int) -> None:
        self.goals.append((task, step, self.total_goals + 1))

    def to_records(self) -> list[dict]:
        """Flat JSON-lines records: one summary line followed by series lines."""
        head = {
            "kind": "run",
            "method": self.method,
            "seed": self.seed,
            "budget": self.budget,
            "tasks": self.task_ids,
            "total_goals": self.total_goals,
            "learner_invocations": self.learner_invocations,
            "adaptive_delay": [d if d != float("inf") else "inf" for d in self.adaptive_delay],
            "replans": self.replans,
            "error": self.error,
        }
        out = [head]
        base = {"method": self.method, "seed": self.seed}
        out += [{"kind": "goal", **base, "task": t, "step": s, "goals": g} for t, s, g in self.goals]
        out += [{"kind": "eval", **base, "task": t, "step": s, "reward": r} for t, s, r in self.evaluations]
        out += [
            {"kind": "episode", **base, "task": t, "step": s, "reward": r, "goal": g}
            for t, s, r, g in self.episodes
        ]
        out += [{"kind": "learner", **base, **e} for e in self.learner_events]
        return out

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.to_records())

    def as_dict(self) -> dict:
        return asdict(self)


def read_jsonl(text: str) -> list[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]
