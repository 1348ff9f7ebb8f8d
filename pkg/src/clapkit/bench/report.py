"""Aggregate CSV tables and SVG figures from run metrics."""

from __future__ import annotations

import bisect
import csv
import math
import statistics
from pathlib import Path

from ..metrics import RunMetrics, read_jsonl

METHOD_ORDER = ("clap", "comprehensive", "qlearning", "oracle")


def runs_from_records(records: list[dict]) -> list[RunMetrics]:
    runs: dict[tuple[str, int], RunMetrics] = {}
    for r in records:
        key = (r["method"], r["seed"])
        if r["kind"] == "run":
            m = RunMetrics(r["method"], r["seed"], r["budget"], list(r["tasks"]))
            m.learner_invocations = list(r["learner_invocations"])
            m.adaptive_delay = [math.inf if d == "inf" else d for d in r["adaptive_delay"]]
            m.replans = list(r["replans"])
            m.error = r["error"]
            runs[key] = m
            continue
        m = runs[key]
        if r["kind"] == "goal":
            m.goals.append((r["task"], r["step"], r["goals"]))
        elif r["kind"] == "eval":
            m.evaluations.append((r["task"], r["step"], r["reward"]))
        elif r["kind"] == "episode":
            m.episodes.append((r["task"], r["step"], r["reward"], r["goal"]))
        elif r["kind"] == "learner":
            e = {k: v for k, v in r.items() if k not in ("kind", "method", "seed")}
            m.learner_events.append(e)
    return list(runs.values())


def load_runs(path: str | Path) -> list[RunMetrics]:
    return runs_from_records(read_jsonl(Path(path).read_text()))


def _mean_std(xs: list[float]) -> tuple[float, float]:
    if not xs:
        return math.nan, math.nan
    return statistics.fmean(xs), statistics.pstdev(xs) if len(xs) > 1 else 0.0


def goals_at(run: RunMetrics, step: int) -> int:
    steps = [s for _, s, _ in run.goals]
    k = bisect.bisect_right(steps, step)
    return run.goals[k - 1][2] if k else 0


def _methods(runs) -> list[str]:
    present = {r.method for r in runs}
    return [m for m in METHOD_ORDER if m in present] + sorted(present - set(METHOD_ORDER))


def aggregate(runs: list[RunMetrics]) -> list[dict]:
    """Mean and std over seeds of cumulative goals and evaluation reward at each evaluation step."""
    rows = []
    for method in _methods(runs):
        ok = [r for r in runs if r.method == method and not r.error]
        steps = sorted({(t, s) for r in ok for t, s, _ in r.evaluations}, key=lambda x: x[1])
        for task, step in steps:
            rewards = [v for r in ok for t, s, v in r.evaluations if s == step]
            goals = [goals_at(r, step) for r in ok]
            gm, gs = _mean_std(goals)
            rm, rs = _mean_std(rewards)
            rows.append({
                "method": method, "task": task, "step": step, "goals_mean": gm, "goals_std": gs,
                "reward_mean": rm, "reward_std": rs, "n": len(ok),
            })
    return rows


def summary(runs: list[RunMetrics]) -> list[dict]:
    rows = []
    for r in sorted(runs, key=lambda r: (_methods(runs).index(r.method), r.seed)):
        n = len(r.task_ids)
        rows.append({
            "method": r.method,
            "seed": r.seed,
            "total_goals": r.total_goals,
            "goals_per_task": " ".join(str(r.goals_in_task(k)) for k in range(n)),
            "adaptive_delay": " ".join("inf" if d == math.inf else f"{d:g}" for d in r.adaptive_delay),
            "learner_invocations": " ".join(map(str, r.learner_invocations)),
            "replans": " ".join(map(str, r.replans)),
            "error": (r.error or "").strip().splitlines()[-1] if r.error else "",
        })
    return rows


def delays(runs: list[RunMetrics]) -> list[dict]:
    """Adaptive delay of each method's seed-mean curve, one row per (method, task)."""
    from .experiment import mean_delays

    budget = max((r.budget for r in runs), default=0)
    n_tasks = max((len(r.task_ids) for r in runs), default=0)
    table = mean_delays(runs, n_tasks, budget)
    return [
        {"method": m, "task": k, "adaptive_delay": "inf" if d == math.inf else d}
        for m in _methods(runs) if m in table for k, d in enumerate(table[m])
    ]


def _write_csv(path: Path, rows: list[dict]) -> None:
    with path.open("w", newline="") as fh:
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: (f"{v:.6g}" if isinstance(v, float) else v) for k, v in row.items()})


def plot(runs: list[RunMetrics], out: Path) -> list[Path]:
    """Three panels: cumulative goals, evaluation reward, adaptive delay per task."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "clapkit"
    rows = aggregate(runs)
    methods = _methods(runs)
    fig, axes = plt.subplots(1, 3, figsize=(15, 4))
    for method in methods:
        mine = [r for r in rows if r["method"] == method]
        if not mine:
            continue
        x = [r["step"] for r in mine]
        for ax, key in ((axes[0], "goals"), (axes[1], "reward")):
            mu = [r[f"{key}_mean"] for r in mine]
            sd = [r[f"{key}_std"] for r in mine]
            ax.plot(x, mu, label=method)
            ax.fill_between(x, [m - s for m, s in zip(mu, sd)], [m + s for m, s in zip(mu, sd)], alpha=0.2)
    budget = max((r.budget for r in runs), default=0)
    n_tasks = max((len(r.task_ids) for r in runs), default=0)
    for ax in axes[:2]:
        for k in range(1, n_tasks):
            ax.axvline(k * budget, color="grey", lw=0.5, ls=":")
        ax.set_xlabel("environment steps")
    axes[0].set_ylabel("goals reached (cumulative)")
    axes[1].set_ylabel("average evaluation reward")
    width = 0.8 / max(1, len(methods))
    table = delays(runs)
    for j, method in enumerate(m for m in methods if m != "oracle"):
        vals = [r["adaptive_delay"] for r in table if r["method"] == method]
        if not vals:
            continue
        heights = [budget if d == "inf" else d for d in vals]
        axes[2].bar([k + j * width for k in range(len(heights))], heights, width, label=method)
    axes[2].set_xlabel("task")
    axes[2].set_ylabel("adaptive delay of mean curve (steps; budget if never)")
    for ax in axes:
        if ax.get_legend_handles_labels()[0]:
            ax.legend(fontsize=8)
    fig.tight_layout()
    path = out / "figure.svg"
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return [path]


def write_outputs(runs: list[RunMetrics], out: Path, figures: bool = True) -> dict[str, Path]:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "metrics": out / "metrics.jsonl", "aggregate": out / "aggregate.csv",
        "summary": out / "summary.csv", "delays": out / "delays.csv",
    }
    paths["metrics"].write_text("".join(r.to_jsonl() for r in runs))
    _write_csv(paths["aggregate"], aggregate(runs))
    _write_csv(paths["summary"], summary(runs))
    _write_csv(paths["delays"], delays(runs))
    if figures:
        paths["figure"] = plot(runs, out)[0]
    return paths
