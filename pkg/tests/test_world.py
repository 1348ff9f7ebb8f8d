import pytest
from scipy import stats

from clapkit import domains
from clapkit.ppddl import GroundAction, serialize_domain
from clapkit.world import BudgetExhausted, ChangeSchedule, Simulator, TaskStream, load_schedule

PICK = GroundAction("pick-up", ("r1", "l2", "b1"))
MOVE = GroundAction("move-from", ("r1", "l1", "l2"))


def _at_box(sim):
    sim.reset()
    sim.step(MOVE)
    return sim.current


def test_effect_frequency_concentrates():
    dom, task = domains.load("warehouse")
    sim = Simulator(dom, task, 10**6, seed=11)
    s = _at_box(sim)
    hits = 0
    for _ in range(10_000):
        sim.current = s
        hits += ("holding", "r1", "b1") in sim.step(PICK)
    assert 0.88 <= hits / 10_000 <= 0.92
    chi = stats.chisquare([hits, 10_000 - hits], [9000, 1000])
    assert chi.pvalue > 0.01


def test_inapplicable_action_still_charged():
    dom, task = domains.load("warehouse")
    sim = Simulator(dom, task, 10)
    s0 = sim.current
    assert sim.step(PICK) == s0  # robot is not at l2
    assert sim.steps_used == 1


def test_budget_exhaustion():
    dom, task = domains.load("warehouse")
    sim = Simulator(dom, task, 2)
    sim.step(MOVE)
    sim.step(MOVE)
    with pytest.raises(BudgetExhausted):
        sim.step(MOVE)
    assert sim.steps_used == 2


def test_reset_is_free_and_idempotent():
    dom, task = domains.load("warehouse")
    sim = Simulator(dom, task, 10)
    sim.step(MOVE)
    used = sim.steps_used
    assert sim.reset() == task.init
    assert sim.reset() == task.init
    assert sim.steps_used == used


def test_load_zeroes_counter():
    dom, task = domains.load("warehouse")
    t1 = domains.load_problem("warehouse", dom, 1)
    sim = Simulator(dom, task, 5)
    sim.step(MOVE)
    assert sim.load(t1, dom, 100_000) == t1.init
    assert sim.steps_used == 0 and sim.remaining == 100_000
    sim.load(t1, dom, 0)
    with pytest.raises(BudgetExhausted):
        sim.step(MOVE)


def _trace(seed, task, dom, actions):
    sim = Simulator(dom, task, 1000, seed=seed)
    out = []
    for a in actions:
        out.append(sim.step(a))
    return out


def test_determinism_per_seed():
    dom, task = domains.load("warehouse")
    actions = [MOVE, PICK, PICK, GroundAction("move-from", ("r1", "l2", "l1"))] * 20
    assert _trace(3, task, dom, actions) == _trace(3, task, dom, actions)


def test_schedule_swaps_hidden_domain(tmp_path):
    dom, task = domains.load("warehouse")
    # the replacement always fails to pick up
    broken = dom.actions["pick-up"]
    from clapkit.ppddl import ActionSchema, Effect

    never = ActionSchema(broken.name, broken.params, broken.pre, (1.0,), (Effect(),))
    d2 = dom.replace_action(never)
    (tmp_path / "d2.pddl").write_text(serialize_domain(d2))
    (tmp_path / "sched.txt").write_text("# step file\n2 d2.pddl\n")
    sched = load_schedule(tmp_path / "sched.txt")
    assert sched.entries[0][0] == 2
    sim = Simulator(dom, task, 1000, seed=0, schedule=sched)
    epoch = sim.epoch
    sim.step(MOVE)
    sim.step(MOVE)  # triggers the swap
    assert sim.epoch == epoch + 1
    sim.reset()
    sim.step(MOVE)
    for _ in range(50):
        assert sim.step(PICK) == sim.current
        assert ("holding", "r1", "b1") not in sim.current


def test_schedule_must_increase():
    dom = domains.load_domain("warehouse")
    with pytest.raises(ValueError):
        ChangeSchedule([(5, dom), (5, dom)])


def test_fork_is_off_budget():
    dom, task = domains.load("warehouse")
    sim = Simulator(dom, task, 3)
    f = sim.fork(99)
    for _ in range(20):
        f.step(MOVE)
    assert sim.steps_used == 0 and sim.current == task.init


def test_task_stream_rejects_equal_neighbours():
    dom, task = domains.load("warehouse")
    with pytest.raises(ValueError):
        TaskStream([(task, dom), (task, dom)])
    import random

    from clapkit.bench.mutate import mutate_domain

    d2, _ = mutate_domain(dom, random.Random(0))
    assert len(TaskStream([(task, dom), (task, d2)])) == 2
