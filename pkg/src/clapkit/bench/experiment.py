"""Manifest-driven experiments: every (method, seed) run over one task stream."""

from __future__ import annotations

import math
import random
import statistics
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .. import domains
from ..baselines import OracleConfig, QConfig, oracle_run, qlearning_run
from ..clap import ClapConfig, run_stream
from ..metrics import RunMetrics
from ..model import LearnedModel
from ..ppddl import LiftedDomain, TaskSpec, parse_domain, parse_problem
from ..world import Simulator
from .mutate import mutate_domain
from .tasks import draw_task, generate_tasks

METHODS = ("clap", "comprehensive", "qlearning", "oracle")

INT_KEYS = {
    "tasks", "budget", "eta", "beta", "horizon", "walk_length", "eval_every", "eval_traces",
    "depth", "task_seed", "workers", "max_states",
}
FLOAT_KEYS = {"theta", "gamma", "alpha", "epsilon"}


@dataclass
class Manifest:
    domain: str = "warehouse"
    problem: str | None = None
    tasks: int = 1
    mutate: bool = False
    shift_domain: str | None = None
    task_domains: list[str] = field(default_factory=list)
    budget: int = 1000
    methods: list[str] = field(default_factory=lambda: list(METHODS))
    seeds: list[int] = field(default_factory=lambda: [0])
    eta: int = 100
    theta: float = 0.05
    beta: int = 10
    horizon: int = 40
    walk_length: int = 40
    gamma: float = 0.9
    alpha: float = 0.3
    epsilon: float = 0.1
    eval_every: int = 100
    eval_traces: int = 10
    depth: int = 4
    task_seed: int = 0
    max_states: int = 2000
    initial_model: str = "empty"
    workers: int = 1
    out: str = "results"
    base_dir: str = "."


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def parse_manifest(text: str, base_dir: str = ".") -> Manifest:
    """``key = value`` lines; ``#`` starts a comment."""
    m = Manifest(base_dir=base_dir)
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"manifest line {n}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        key = key.replace("-", "_")
        if not hasattr(m, key) or key == "base_dir":
            raise ValueError(f"manifest line {n}: unknown key {key!r}")
        if key in INT_KEYS:
            setattr(m, key, int(value))
        elif key in FLOAT_KEYS:
            setattr(m, key, float(value))
        elif key == "seeds":
            m.seeds = _int_list(value)
        elif key in ("methods", "task_domains"):
            setattr(m, key, [v.strip() for v in value.split(",") if v.strip()])
        elif key == "mutate":
            m.mutate = value.lower() in ("1", "true", "yes", "on")
        else:
            setattr(m, key, value)
    bad = [x for x in m.methods if x not in METHODS]
    if bad:
        raise ValueError(f"unknown methods {bad}; choose from {METHODS}")
    return m


def _load_domain(name: str, base_dir: str) -> LiftedDomain:
    path = Path(base_dir) / name
    if not path.exists() and domains.is_bundled(name):
        return domains.load_domain(name)
    return parse_domain(path.read_text())


def build_stream(m: Manifest) -> list[tuple[TaskSpec, LiftedDomain]]:
    d0 = _load_domain(m.domain, m.base_dir)
    if m.problem:
        base = parse_problem((Path(m.base_dir) / m.problem).read_text(), d0)
    else:
        base = domains.load_problem(m.domain, d0)
    if m.shift_domain:
        d1 = _load_domain(m.shift_domain, m.base_dir)
        return [(base, d0 if i % 2 == 0 else d1) for i in range(max(2, m.tasks))]
    if m.mutate and not m.task_domains:
        return _mutated_stream(m, d0, base)
    stream = list(generate_tasks(d0, m.tasks, random.Random(m.task_seed), base, m.depth))
    if m.task_domains:
        doms = [_load_domain(x, m.base_dir) for x in m.task_domains]
        stream = [(t, doms[min(i, len(doms) - 1)]) for i, (t, _) in enumerate(stream)]
    return stream


def _mutated_stream(m: Manifest, d0: LiftedDomain, base: TaskSpec, redraws: int = 20):
    """Each task runs under a fresh mutation of the previous domain.

    A mutation that leaves no task with a goal ``depth`` steps away is
    redrawn, so no method faces an unsolvable task; so is one whose world
    grows past ``max_states`` reachable states.
    """
    rng = random.Random(m.task_seed)
    stream = [(base, d0)]
    while len(stream) < m.tasks:
        prev_task, prev_dom = stream[-1]
        for _ in range(redraws):
            dom, _ = mutate_domain(prev_dom, rng, seed=m.task_seed)
            task = draw_task(
                dom, rng, base, m.depth, f"{base.name}-g{len(stream)}", prev_task, max_states=m.max_states
            )
            if task is not None:
                stream.append((task, dom))
                break
        else:
            raise ValueError(f"no solvable mutation of task {len(stream)} after {redraws} draws")
    return stream


def run_one(method: str, seed: int, m: Manifest, stream) -> RunMetrics:
    task0, dom0 = stream[0]
    sim = Simulator(dom0, task0, m.budget, seed=seed)
    try:
        if method in ("clap", "comprehensive"):
            comp = method == "comprehensive"
            cfg = ClapConfig(
                horizon=m.horizon, eta=m.eta, theta=m.theta, beta=m.beta, walk_length=m.walk_length,
                gamma=m.gamma, eval_every=m.eval_every, eval_traces=m.eval_traces, seed=seed,
                gof=not comp, comprehensive=comp,
            )
            model = LearnedModel.from_domain(dom0) if m.initial_model == "true" else LearnedModel.empty(dom0)
            _, metrics = run_stream(stream, sim, cfg, model, method)
            return metrics
        metrics = RunMetrics(method, seed, m.budget)
        for i, (task, dom) in enumerate(stream):
            if i > 0:
                sim.load(task, dom, m.budget)
            if method == "qlearning":
                qc = QConfig(m.alpha, m.epsilon, m.gamma, m.horizon, m.eval_every, m.eval_traces, seed)
                qlearning_run(task, sim, qc, metrics, i)
            else:
                oc = OracleConfig(m.gamma, m.horizon, m.eval_every, m.eval_traces, seed)
                oracle_run(task, sim, dom, oc, metrics, i)
        return metrics
    except Exception:  # isolate per-run failures; the aggregate is still produced
        metrics = RunMetrics(method, seed, m.budget)
        metrics.error = traceback.format_exc(limit=5)
        return metrics


def _job(args):
    method, seed, m = args
    return run_one(method, seed, m, build_stream(m))


def adaptive_delay(series, oracle_batch, sigma_window: int = 5) -> float:
    """First step from which every point of ``series`` stays within 2 sigma of the Oracle.

    ``series`` is a list of (step, value); ``oracle_batch`` is a list of such
    series (one per Oracle seed), aligned on steps.  With a single Oracle
    series, sigma comes from a centred window of ``sigma_window`` points.
    Only shortfalls count: exceeding the Oracle band is sampling noise.
    Returns ``inf`` when the last point is outside the band.
    """
    if not series:
        raise ValueError("empty series")
    if oracle_batch and isinstance(oracle_batch[0], tuple):
        oracle_batch = [oracle_batch]
    if not oracle_batch or not oracle_batch[0]:
        raise ValueError("empty oracle series")
    by_step: dict[int, list[float]] = {}
    for run in oracle_batch:
        for step, v in run:
            by_step.setdefault(step, []).append(v)
    steps = sorted(by_step)
    mean = {s: statistics.fmean(v) for s, v in by_step.items()}
    if len(oracle_batch) > 1:
        sigma = {s: statistics.pstdev(v) for s, v in by_step.items()}
    else:
        sigma = {}
        for k, s in enumerate(steps):
            lo, hi = max(0, k - sigma_window // 2), min(len(steps), k + sigma_window // 2 + 1)
            window = [mean[x] for x in steps[lo:hi]]
            sigma[s] = statistics.pstdev(window) if len(window) > 1 else 0.0
    ordered = sorted(series)
    delay = ordered[0][0]
    for step, v in ordered:
        ref = step if step in mean else min(steps, key=lambda x: abs(x - step))
        if v < mean[ref] - 2 * sigma[ref] - 1e-9:
            delay = math.inf
        elif delay == math.inf:
            delay = step
    return delay


def attach_delays(runs: list[RunMetrics], n_tasks: int, budget: int) -> None:
    oracle = [r for r in runs if r.method == "oracle" and not r.error]
    for r in runs:
        r.adaptive_delay = []
        if not oracle or r.error:
            continue
        for k in range(n_tasks):
            mine = [(s, v) for t, s, v in r.evaluations if t == k]
            ref = [[(s, v) for t, s, v in o.evaluations if t == k] for o in oracle]
            if not mine or not any(ref):
                r.adaptive_delay.append(math.inf)
                continue
            start = k * budget
            d = adaptive_delay(mine, [x for x in ref if x])
            # the first evaluation sits one cadence into the task; count from the task start
            first = min(s for s, _ in mine)
            r.adaptive_delay.append(0.0 if d == first else d - start)


def mean_delays(runs: list[RunMetrics], n_tasks: int, budget: int) -> dict[str, list[float]]:
    """Adaptive delay of each method's seed-mean evaluation curve, per task.

    Single-seed curves average only a handful of traces per point and cross
    a pointwise band by chance; the mean over seeds is what the delay is
    meant to describe.
    """
    oracle = [r for r in runs if r.method == "oracle" and not r.error]
    out: dict[str, list[float]] = {}
    if not oracle:
        return out
    for method in sorted({r.method for r in runs}):
        mine = [r for r in runs if r.method == method and not r.error]
        if not mine:
            continue
        delays = []
        for k in range(n_tasks):
            by_step: dict[int, list[float]] = {}
            for r in mine:
                for t, s, v in r.evaluations:
                    if t == k:
                        by_step.setdefault(s, []).append(v)
            series = [(s, statistics.fmean(v)) for s, v in sorted(by_step.items())]
            ref = [[(s, v) for t, s, v in o.evaluations if t == k] for o in oracle]
            ref = [x for x in ref if x]
            if not series or not ref:
                delays.append(math.inf)
                continue
            d = adaptive_delay(series, ref)
            delays.append(0.0 if d == series[0][0] else d - k * budget)
        out[method] = delays
    return out


def run_experiment(m: Manifest, write: bool = True) -> list[RunMetrics]:
    stream = build_stream(m)
    jobs = [(meth, seed) for meth in m.methods for seed in m.seeds]
    if m.workers > 1:
        with ProcessPoolExecutor(m.workers) as ex:
            runs = list(ex.map(_job, [(a, b, m) for a, b in jobs]))
    else:
        runs = [run_one(meth, seed, m, stream) for meth, seed in jobs]
    attach_delays(runs, len(stream), m.budget)
    if write:
        from .report import write_outputs

        write_outputs(runs, Path(m.out))
    return runs
