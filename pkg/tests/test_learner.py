import pytest

from clapkit import domains
from clapkit.learner import Learner, LearnerConfig, candidates, needs_learning, required_mode
from clapkit.model import ABSENT, NEG, POS, PRE, LearnedModel, Target, mark_unknown, reachable_vd
from clapkit.ppddl import ground
from clapkit.world import Simulator

HOLDING0 = Target("pick-up", ("holding", "?r", "?b"), 0)
HANDEMPTY = Target("put-down", ("handempty", "?r"), PRE)


def _world(name="warehouse", seed=0, budget=20000):
    dom, task = domains.load(name)
    return dom, task, Simulator(dom, task, budget, seed=seed)


def _vd(model, dom, task):
    return reachable_vd(model, LearnedModel.from_domain(dom), ground(dom, task.objects), task.init)


def test_candidate_triple():
    dom, _, _ = _world()
    m = mark_unknown(LearnedModel.from_domain(dom), [HANDEMPTY])
    tri = candidates(m, HANDEMPTY)
    assert [tri.by_mode(x).mode(HANDEMPTY) for x in (POS, NEG, ABSENT)] == [POS, NEG, ABSENT]
    for x in (POS, NEG, ABSENT):
        other = tri.by_mode(x)
        for name in ("pick-up", "move-from"):
            assert other.actions[name].signature() == m.actions[name].signature()
        assert other.actions["put-down"].effects == m.actions["put-down"].effects
    again = candidates(m, HANDEMPTY)
    assert [again.by_mode(x).signature() for x in (POS, NEG, ABSENT)] == [
        tri.by_mode(x).signature() for x in (POS, NEG, ABSENT)
    ]
    with pytest.raises(KeyError):
        candidates(LearnedModel.from_domain(dom), HANDEMPTY)


def test_effect_target_triple_differs_only_in_that_list():
    dom, _, _ = _world()
    m = mark_unknown(LearnedModel.from_domain(dom), [HOLDING0])
    tri = candidates(m, HOLDING0)
    assert tri.by_mode(NEG).actions["pick-up"].pre == m.actions["pick-up"].pre
    assert tri.by_mode(NEG).actions["pick-up"].effects[1] == m.actions["pick-up"].effects[1]


def test_needs_learning():
    dom, _, _ = _world()
    assert needs_learning(LearnedModel.empty(dom))
    full = LearnedModel.from_domain(dom)
    assert not needs_learning(full)
    parked = mark_unknown(full, [HANDEMPTY])
    parked.actions["put-down"].stale = False
    parked.queue[HANDEMPTY].dormant = True
    assert not needs_learning(parked)
    assert required_mode(True) == POS and required_mode(False) == NEG


def test_learn_from_empty_converges():
    dom, task, sim = _world()
    learner = Learner(LearnerConfig(eta=100, seed=0))
    m = learner.learn(LearnedModel.empty(dom), sim)
    assert _vd(m, dom, task) == 0.0
    assert not needs_learning(m)
    assert 0.80 <= m.actions["pick-up"].prob[0] <= 0.98
    assert m.actions["move-from"].prob == [1.0]
    for q in learner.queries:
        if q.solved:
            assert q.distinguishing


def test_resolve_effect_literal():
    dom, task, sim = _world()
    m = mark_unknown(LearnedModel.from_domain(dom), [HOLDING0])
    m = Learner(LearnerConfig(eta=20)).learn(m, sim)
    assert m.mode(HOLDING0) == POS


def test_need_based_scope():
    dom, task, sim = _world()
    base = LearnedModel.from_domain(dom)
    m = mark_unknown(base, [HANDEMPTY])
    learner = Learner(LearnerConfig(eta=20))
    out = learner.learn(m, sim)
    for name in ("pick-up", "move-from"):
        assert out.actions[name].signature() == base.actions[name].signature()
    for lit, mode in base.actions["put-down"].pre.items():
        if lit != HANDEMPTY.lit:
            assert out.actions["put-down"].pre[lit] == mode
    assert out.actions["put-down"].effects == base.actions["put-down"].effects
    resolved = {e["target"] for e in learner.events if e["event"] == "resolve"}
    assert resolved <= {str(HANDEMPTY)}


def test_empty_queue_unchanged():
    dom, task, sim = _world()
    base = LearnedModel.from_domain(dom)
    out = Learner().learn(base.copy(), sim)
    assert out.signature() == base.signature()
    assert sim.steps_used == 0


@pytest.mark.parametrize("seed", range(5))
def test_estimate_probabilities_binomial_band(seed):
    dom, task, sim = _world(seed=seed)
    m = LearnedModel.from_domain(dom)
    m.actions["pick-up"].prob = [0.5, 0.5]
    m.actions["pick-up"].stale = True
    learner = Learner(LearnerConfig(eta=100, seed=seed))
    learner.estimate_probabilities(m, "pick-up", sim, 100)
    assert 0.80 <= m.actions["pick-up"].prob[0] <= 0.98
    assert abs(sum(m.actions["pick-up"].prob) - 1) < 1e-12


def test_single_sample_estimate_is_one_hot():
    dom, task, sim = _world()
    m = LearnedModel.from_domain(dom)
    Learner(LearnerConfig(eta=1)).estimate_probabilities(m, "pick-up", sim, 1)
    assert sorted(m.actions["pick-up"].prob) == [0.0, 1.0]


def test_comprehensive_mode_converges():
    dom, task, sim = _world()
    m = mark_unknown(LearnedModel.from_domain(dom), [HANDEMPTY])
    learner = Learner(LearnerConfig(eta=50, comprehensive=True))
    out = learner.learn(m, sim)
    assert _vd(out, dom, task) == 0.0
    assert any(e["event"] == "relearn" for e in learner.events)
    touched = {e["action"] for e in learner.events if e["event"] == "resolve"}
    assert touched == set(dom.actions)


def test_unsolvable_pair_parks_literal_as_dormant_absent():
    # once goal-reached holds a pull changes nothing, so "-" and "0" cannot be told apart
    dom, task, sim = _world("bandit")
    m = Learner(LearnerConfig(eta=100)).learn(LearnedModel.empty(dom), sim)
    assert _vd(m, dom, task) == 0.0
    for name in ("pull-lever-1", "pull-lever-2"):
        t = Target(name, ("goal-reached",), PRE)
        assert m.mode(t) == ABSENT and m.queue[t].dormant
    assert not needs_learning(m)
