import pytest

from clapkit import domains
from clapkit.clap import ClapConfig, Planner, run_stream, run_task
from clapkit.model import LearnedModel, reachable_vd
from clapkit.ppddl import ground
from clapkit.world import Simulator


def _run(name="warehouse", budget=3000, seed=0, **kw):
    dom, task = domains.load(name)
    sim = Simulator(dom, task, budget, seed=seed)
    cfg = ClapConfig(eta=kw.pop("eta", 50), seed=seed, **kw)
    model, metrics = run_task(task, sim, LearnedModel.empty(dom), cfg)
    return dom, task, model, metrics


def test_config_validation():
    with pytest.raises(ValueError):
        ClapConfig(horizon=0)
    with pytest.raises(ValueError):
        ClapConfig(theta=1.5)
    with pytest.raises(ValueError):
        ClapConfig(beta=-1)
    assert ClapConfig(eta=7, comprehensive=True).learner_config().comprehensive


def test_run_from_empty_model():
    dom, task, model, metrics = _run()
    assert reachable_vd(model, LearnedModel.from_domain(dom), ground(dom, task.objects), task.init) == 0.0
    assert metrics.total_goals > 0
    assert metrics.learner_invocations[0] >= 1
    steps = [s for _, s, _ in metrics.evaluations]
    assert steps == list(range(100, 3001, 100))
    cum = [g for _, _, g in metrics.goals]
    assert cum == sorted(cum) and cum == list(range(1, len(cum) + 1))
    assert all(s <= 3000 for _, s, _ in metrics.goals)


def test_runs_are_reproducible():
    a = _run(seed=4, budget=1500)[3]
    b = _run(seed=4, budget=1500)[3]
    assert a.to_jsonl() == b.to_jsonl()


def test_known_model_needs_no_learning():
    dom, task = domains.load("warehouse")
    sim = Simulator(dom, task, 1000, seed=1)
    _, metrics = run_task(task, sim, LearnedModel.from_domain(dom), ClapConfig())
    assert metrics.learner_invocations == [0]
    assert metrics.total_goals > 50


def test_planner_replans_only_on_version_change():
    dom, task = domains.load("warehouse")
    model = LearnedModel.from_domain(dom)
    agent = Planner(model, ground(dom, task.objects), task.goal, task.init, 0.9, 40)
    assert not agent.refresh() and agent.replans == 1
    model.touch()
    assert agent.refresh() and agent.replans == 2
    assert not agent.unreachable()


def test_probability_drift_is_refit():
    dom = domains.load_domain("bandit")
    shift = domains.load_domain("bandit-shift")
    task = domains.load_problem("bandit", dom)
    sim = Simulator(dom, task, 1000, seed=0)
    model, metrics = run_stream([(task, dom), (task, shift)], sim, ClapConfig(eta=10), LearnedModel.from_domain(dom))
    refits = [e for e in metrics.learner_events if e["event"] == "gof_refit" and e["task"] == 1]
    assert refits
    agent = Planner(model, sim.space, task.goal, task.init, 0.9, 40)
    assert agent.action(task.init).name == "pull-lever-2"
