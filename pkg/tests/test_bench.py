import math
import random
import warnings

import pytest

from clapkit import domains
from clapkit.bench import (
    adaptive_delay,
    build_stream,
    generate_tasks,
    literal_diff,
    load_runs,
    mean_delays,
    mutate_chain,
    mutate_domain,
    parse_manifest,
    run_experiment,
)
from clapkit.bench.cli import main
from clapkit.bench.experiment import Manifest
from clapkit.bench.tasks import draw_task
from clapkit.bench.mutate import Edit, mutate_action
from clapkit.metrics import RunMetrics
from clapkit.model import LearnedModel, PlanningView, reachable_states
from clapkit.ppddl import Literal, ground, holds, parse_domain, serialize_domain
from clapkit.solve import plan, unreachable_goal


def test_deleting_one_precondition_shows_in_diff():
    dom = domains.load_domain("warehouse")
    a = dom.actions["pick-up"]
    pre = tuple(l for l in a.pre if l.atom != ("handempty", "?r"))
    d2 = dom.replace_action(type(a)(a.name, a.params, pre, a.prob, a.eff))
    assert literal_diff(dom, d2) == {("pick-up", "pre", str(Literal(("handempty", "?r"))))}


@pytest.mark.parametrize("seed", range(40))
def test_mutation_is_valid_and_bounded(seed):
    dom = domains.load_domain(random.Random(seed).choice(["warehouse", "blocksworld", "tireworld"]))
    d2, spec = mutate_domain(dom, random.Random(seed), seed=seed)
    assert spec.changed and 1 <= len(spec.edits) <= 6
    diff = literal_diff(dom, d2)
    assert 1 <= len(diff) <= 6
    assert {name for name, _, _ in diff} == {spec.action}
    again = parse_domain(serialize_domain(d2))
    assert again.equivalent(d2)


def test_mutation_edit_counts_follow_request():
    dom = domains.load_domain("blocksworld")
    a, edits = mutate_action(dom.actions["stack"], dom, random.Random(1), n_pre=2, n_eff=0)
    assert [e.location for e in edits] == ["pre", "pre"]
    assert all(isinstance(e, Edit) for e in edits)


def test_chain_drifts_from_original():
    dom = domains.load_domain("blocksworld")
    chain = mutate_chain(dom, 7, 5)
    assert len(chain) == 5
    assert literal_diff(dom, chain[-1][0])
    assert [d.equivalent(dom) for d, _ in chain].count(True) <= 1


def test_mutation_needs_an_action():
    with pytest.raises(ValueError):
        mutate_domain(parse_domain("(define (domain d) (:predicates (p)))"), random.Random(0))


def test_generated_tasks_are_solvable_and_distinct():
    dom, base = domains.load("warehouse")
    stream = generate_tasks(dom, 2, random.Random(0), base)
    assert len(stream) == 2
    (t0, _), (t1, _) = stream.tasks
    assert t0 is base and t1.key() != t0.key()
    view = PlanningView(LearnedModel.from_domain(dom), ground(dom, t1.objects))
    for t in (t0, t1):
        pol = plan(view, t.init, t.goal)
        assert not unreachable_goal(pol, view, t.init)
        assert not holds(t.init, t.goal)
    assert all(l.positive for l in t1.goal.literals)
    assert len(generate_tasks(dom, 1, random.Random(0), base)) == 1


def test_task_shortfall_warns():
    dom = parse_domain("(define (domain d) (:predicates (p)) (:action a :parameters () :effect (and)))")
    from clapkit.ppddl import parse_problem

    base = parse_problem("(define (problem q) (:domain d) (:init) (:goal (and (p))))", dom)
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        stream = generate_tasks(dom, 3, random.Random(0), base)
    assert len(stream) == 1 and w


def test_adaptive_delay_examples():
    oracle = [(s, -2.0) for s in range(100, 1001, 100)]
    assert adaptive_delay(oracle, oracle) == 100  # first evaluation point
    bad = [(s, -40.0) for s in range(100, 1001, 100)]
    assert adaptive_delay(bad, oracle) == math.inf
    late = [(s, -40.0 if s < 500 else -2.0) for s in range(100, 1001, 100)]
    assert adaptive_delay(late, oracle) == 500
    with pytest.raises(ValueError):
        adaptive_delay([], oracle)
    with pytest.raises(ValueError):
        adaptive_delay(oracle, [])


def test_adaptive_delay_uses_oracle_batch_sigma():
    rng = random.Random(0)
    batch = [[(s, -2.0 + rng.gauss(0, 0.3)) for s in range(100, 1001, 100)] for _ in range(10)]
    other = [(s, -2.0 + rng.gauss(0, 0.1)) for s in range(100, 1001, 100)]
    assert adaptive_delay(other, batch) == 100


def _evals(method, seed, values):
    r = RunMetrics(method, seed, 500, ["t0"])
    r.evaluations = [(0, 100 * (i + 1), v) for i, v in enumerate(values)]
    return r


def test_mean_curve_delay_smooths_single_seed_dips():
    oracle = [_evals("oracle", 0, [-5, -6, -5, -6, -5]), _evals("oracle", 1, [-6, -5, -6, -5, -6])]
    a = _evals("clap", 0, [-40, -40, -5, -6, -5])
    b = _evals("clap", 1, [-40, -9, -6, -5, -7])  # alone, b ends below mean - 2 sigma = -6.5
    pairs = [[(s, v) for _, s, v in r.evaluations] for r in (b, *oracle)]
    assert adaptive_delay(pairs[0], pairs[1:]) == math.inf
    assert mean_delays(oracle + [a, b], 1, 500) == {"clap": [300], "oracle": [0.0]}


def test_manifest_parsing(tmp_path):
    m = parse_manifest("domain = bandit  # two levers\nseeds = 0-2, 5\nmethods = clap, oracle\ntheta=0.01\n", ".")
    assert m.seeds == [0, 1, 2, 5] and m.methods == ["clap", "oracle"] and m.theta == 0.01
    with pytest.raises(ValueError):
        parse_manifest("colour = blue\n")
    with pytest.raises(ValueError):
        parse_manifest("methods = clap, magic\n")
    with pytest.raises(ValueError):
        parse_manifest("just words\n")


def test_bandit_stream_alternates_domains():
    stream = build_stream(parse_manifest("domain = bandit\nshift_domain = bandit-shift\ntasks = 2\n"))
    assert [d.name for _, d in stream] == ["bandit", "bandit"]
    assert not stream[0][1].equivalent(stream[1][1])


def _manifest(tmp_path, extra=""):
    text = (
        "domain = warehouse\ntasks = 2\nmutate = true\nbudget = 400\neta = 20\n"
        f"methods = clap,qlearning,oracle\nseeds = 0\nout = {tmp_path / 'out'}\n" + extra
    )
    return parse_manifest(text, str(tmp_path))


def test_run_experiment_outputs(tmp_path):
    runs = run_experiment(_manifest(tmp_path))
    out = tmp_path / "out"
    for name in ("metrics.jsonl", "aggregate.csv", "summary.csv", "delays.csv", "figure.svg"):
        assert (out / name).exists()
    assert {r.method for r in runs} == {"clap", "qlearning", "oracle"}
    rows = (out / "aggregate.csv").read_text().splitlines()
    assert rows[0].startswith("method,task,step,goals_mean,goals_std")
    assert all(r.split(",")[4] == "0" for r in rows[1:])  # one seed: std 0
    oracle = next(r for r in runs if r.method == "oracle")
    assert oracle.adaptive_delay == [0.0, 0.0]
    reloaded = load_runs(out / "metrics.jsonl")
    assert [r.to_jsonl() for r in reloaded] == [r.to_jsonl() for r in runs]
    for r in runs:
        g = [x for _, _, x in r.goals]
        assert g == sorted(g)


def test_runs_are_byte_identical(tmp_path):
    run_experiment(_manifest(tmp_path / "a"))
    run_experiment(_manifest(tmp_path / "b", "workers = 2\n"))
    for name in ("metrics.jsonl", "aggregate.csv", "summary.csv", "delays.csv", "figure.svg"):
        assert (tmp_path / "a/out" / name).read_bytes() == (tmp_path / "b/out" / name).read_bytes()


def test_failed_run_is_isolated(tmp_path, monkeypatch):
    import clapkit.bench.experiment as ex

    def boom(*a, **k):
        raise RuntimeError("planner crashed")

    monkeypatch.setattr(ex, "qlearning_run", boom)
    runs = run_experiment(_manifest(tmp_path))
    failed = [r for r in runs if r.error]
    assert [r.method for r in failed] == ["qlearning"]
    assert "planner crashed" in failed[0].error
    assert (tmp_path / "out/aggregate.csv").exists()


def test_cli(tmp_path, capsys):
    (tmp_path / "m.txt").write_text(
        "domain = bandit\nshift_domain = bandit-shift\ntasks = 2\nbudget = 300\nmethods = oracle\nseeds = 0\nout = res\n"
    )
    assert main(["run", "--manifest", str(tmp_path / "m.txt")]) == 0
    assert (tmp_path / "res/metrics.jsonl").exists()
    assert main(["report", "--in", str(tmp_path / "res/metrics.jsonl"), "--out", str(tmp_path / "rep/agg.csv")]) == 0
    assert (tmp_path / "rep/agg.csv").exists() and (tmp_path / "rep/figure.svg").exists()
    assert main(["plot", "--in", str(tmp_path / "res/metrics.jsonl"), "--out", str(tmp_path / "fig")]) == 0
    capsys.readouterr()
    assert main(["mutate", "--domain", "warehouse", "--seed", "3", "--chain", "2", "--out", str(tmp_path / "mut")]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 2 and '"action"' in lines[0]
    parse_domain((tmp_path / "mut/domain-2.pddl").read_text())


def test_draw_task_refuses_worlds_past_the_state_cap():
    dom, base = domains.load("blocksworld")
    rng = random.Random(0)
    assert draw_task(dom, rng, base, 2, "small", max_states=21) is None
    task = draw_task(dom, rng, base, 2, "ok", max_states=22)
    assert task is not None and not holds(task.init, task.goal)


def test_mutated_stream_stays_micro_scale():
    m = Manifest(domain="blocksworld", tasks=3, mutate=True, max_states=100)
    for task, dom in build_stream(m):
        view = PlanningView(LearnedModel.from_domain(dom), ground(dom, task.objects))
        assert len(reachable_states(view, frozenset(task.init))) <= 100
