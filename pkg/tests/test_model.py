import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from clapkit import domains
from clapkit.model import (
    ABSENT,
    NEG,
    POS,
    PRE,
    UNKNOWN,
    LearnedModel,
    Target,
    Transition,
    is_consistent,
    literal_universe,
    mark_unknown,
    reachable_vd,
    to_planning_model,
    variational_distance,
)
from clapkit.ppddl import GroundAction, ground
from randmodels import OBJECTS, TINY, oracle_consistent, random_model, random_state

PICK_L2 = GroundAction("pick-up", ("r1", "l2", "b1"))
PUT_L1 = GroundAction("put-down", ("r1", "l1", "b1"))
S_AT_BOX = frozenset({("handempty", "r1"), ("robot-at", "r1", "l2"), ("box-at", "b1", "l2")})
S_PICKED = frozenset({("robot-at", "r1", "l2"), ("holding", "r1", "b1")})


@pytest.fixture
def truth():
    dom, task = domains.load("warehouse")
    return LearnedModel.from_domain(dom), ground(dom, task.objects), task


def test_universe_uses_distinct_typed_variables():
    dom = domains.load_domain("warehouse")
    a = dom.actions["move-from"]
    uni = literal_universe(a.params, dom.predicates, dom.is_subtype)
    assert ("robot-at", "?r", "?from") in uni and ("robot-at", "?r", "?to") in uni
    assert all(l[0] != "box-at" for l in uni)  # move-from has no box parameter
    assert len(uni) == 3  # robot-at x2, handempty


def test_pick_up_matches_first_list(truth):
    m, _, _ = truth
    v = is_consistent(m, Transition(S_AT_BOX, PICK_L2, S_PICKED))
    assert v.consistent and v.matched_effect == 0 and v.violations == []
    v = is_consistent(m, Transition(S_AT_BOX, PICK_L2, S_AT_BOX))
    assert v.consistent and v.matched_effect == 1


def test_inapplicable_noop_is_consistent(truth):
    m, _, task = truth
    v = is_consistent(m, Transition(task.init, PICK_L2, task.init))
    assert v.consistent and v.matched_effect is None


def test_negative_precondition_violation(truth):
    m, _, _ = truth
    am = m.actions["put-down"]
    am.pre[("handempty", "?r")] = NEG
    m.touch()
    s = frozenset({("robot-at", "r1", "l1"), ("holding", "r1", "b1"), ("handempty", "r1")})
    s2 = frozenset({("robot-at", "r1", "l1"), ("box-at", "b1", "l1"), ("handempty", "r1")})
    v = is_consistent(m, Transition(s, PUT_L1, s2))
    assert not v.consistent
    assert Target("put-down", ("handempty", "?r"), PRE) in v.violations


def test_unexplained_effect_blames_every_list(truth):
    m, _, _ = truth
    # gripper drops the box at the robot's feet: nothing explains robot-at vanishing
    s2 = frozenset({("handempty", "r1"), ("box-at", "b1", "l2")})
    v = is_consistent(m, Transition(S_AT_BOX, PICK_L2, s2))
    assert not v.consistent
    assert set(v.violations) == {
        Target("pick-up", ("robot-at", "?r", "?l"), 0),
        Target("pick-up", ("robot-at", "?r", "?l"), 1),
    }


def test_mark_unknown(truth):
    m, _, _ = truth
    t = Target("pick-up", ("handempty", "?r"), PRE)
    m2 = mark_unknown(m, [t])
    assert m2.mode(t) == UNKNOWN
    assert ("handempty", "?r") not in {l.atom for l in m2.actions["pick-up"].known_pre()}
    assert set(m2.queue) == {t}
    assert m2.actions["pick-up"].stale
    assert m.mode(t) == POS  # input untouched
    m3 = mark_unknown(m2, [t])
    assert set(m3.queue) == {t} and m3.mode(t) == UNKNOWN
    with pytest.raises(ValueError):
        mark_unknown(m, [])


def test_mark_unknown_clears_violation(truth):
    m, _, _ = truth
    m.actions["put-down"].pre[("handempty", "?r")] = NEG
    m.touch()
    s = frozenset({("robot-at", "r1", "l1"), ("holding", "r1", "b1"), ("handempty", "r1")})
    s2 = frozenset({("robot-at", "r1", "l1"), ("box-at", "b1", "l1"), ("handempty", "r1")})
    z = Transition(s, PUT_L1, s2)
    v = is_consistent(m, z)
    m2 = mark_unknown(m, v.violations)
    assert not set(v.violations) & set(is_consistent(m2, z).violations)


def test_planning_view_examples(truth):
    m, space, task = truth
    view = to_planning_model(m, space)
    assert view.successors(S_AT_BOX, PICK_L2) == sorted(
        [(S_PICKED, 0.9), (S_AT_BOX, 0.1)], key=lambda kv: sorted(kv[0])
    )
    assert view.successors(task.init, PICK_L2) == [(task.init, 1.0)]


def test_identical_successors_merge(truth):
    m, space, _ = truth
    am = m.actions["pick-up"]
    am.effects[1] = dict(am.effects[0])
    m.touch()
    assert to_planning_model(m, space).successors(S_AT_BOX, PICK_L2) == [(S_PICKED, pytest.approx(1.0))]


def _tiny_z(rng, n):
    space = ground(TINY, OBJECTS)
    return space, [Transition(random_state(rng), rng.choice(space.actions), random_state(rng)) for _ in range(n)]


def test_vd_hand_counted():
    rng = random.Random(2)
    m1, m2 = random_model(rng, 0), random_model(rng, 0)
    space = ground(TINY, OBJECTS)
    both, only1 = [], []
    while len(both) < 6 or len(only1) < 4:
        z = Transition(random_state(rng), rng.choice(space.actions), random_state(rng))
        c1, c2 = oracle_consistent(m1, z)[0], oracle_consistent(m2, z)[0]
        if c1 and c2 and len(both) < 6:
            both.append(z)
        elif c1 and not c2 and len(only1) < 4:
            only1.append(z)
    assert variational_distance(m1, m2, both + only1) == pytest.approx(0.4)
    assert variational_distance(m1, m2, only1) == 1.0
    with pytest.raises(ValueError):
        variational_distance(m1, m2, [])


@given(st.integers(0, 10**6))
def test_vd_symmetric_bounded(seed):
    rng = random.Random(seed)
    m1, m2 = random_model(rng), random_model(rng)
    _, z = _tiny_z(rng, 30)
    d = variational_distance(m1, m2, z)
    assert 0.0 <= d <= 1.0
    assert d == variational_distance(m2, m1, z)
    assert variational_distance(m1, m1, z) == 0.0


@given(st.integers(0, 10**6))
def test_successors_sum_to_one(seed):
    rng = random.Random(seed)
    m = random_model(rng)
    view = to_planning_model(m, ground(TINY, OBJECTS))
    for ga in view.actions:
        s = random_state(rng)
        assert abs(sum(p for _, p in view.successors(s, ga)) - 1.0) <= 1e-9


@given(st.integers(0, 10**6))
def test_consistency_matches_oracle(seed):
    rng = random.Random(seed)
    m = random_model(rng)
    space, z = _tiny_z(rng, 20)
    for t in z:
        # also include every successor the model itself predicts
        for s2 in {s for s, _ in to_planning_model(m, space).successors(t.s, t.a)} | {t.s2}:
            tt = Transition(t.s, t.a, s2)
            ok, idx = oracle_consistent(m, tt)
            v = is_consistent(m, tt)
            assert v.consistent == ok
            assert v.matched_effect == idx
            assert (not v.consistent) or v.violations == []


def test_reachable_vd_zero_for_truth(truth):
    m, space, task = truth
    assert reachable_vd(m.copy(), m, space, task.init) == 0.0
    wrong = m.copy()
    wrong.actions["pick-up"].pre[("robot-at", "?r", "?l")] = ABSENT
    wrong.touch()
    assert reachable_vd(wrong, m, space, task.init) > 0.0


def test_empty_model_queues_all_preconditions():
    dom = domains.load_domain("warehouse")
    m = LearnedModel.empty(dom)
    n = sum(len(a.universe) for a in m.actions.values())
    assert len(m.queue) == n
    assert all(t.loc == PRE for t in m.queue)
    m2 = LearnedModel.from_domain(dom)
    assert m2.to_domain().equivalent(dom)
    assert m2.actions["pick-up"].prob == [0.9, 0.1]
    assert set(m2.actions["pick-up"].effects[1].values()) == {ABSENT}
