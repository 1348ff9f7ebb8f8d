import pytest

from clapkit import domains
from clapkit.baselines import OracleConfig, QConfig, QTable, oracle_run, q_update, qlearning_run
from clapkit.ppddl import GroundAction
from clapkit.world import Simulator

A = GroundAction("a", ())
B = GroundAction("b", ())
S, S2 = frozenset(), frozenset({("x",)})


def test_q_update_frozen_values():
    t = QTable(0.3, 0.9)
    q_update(t, S, A, -1.0, S2, [A, B])
    assert t.get(S, A) == pytest.approx(-0.3)
    t.values[(S2, B)] = -2.0
    t.values[(S2, A)] = -1.0
    # -0.3 * 0.7 + 0.3 * (-1 + 0.9 * -1)
    q_update(t, S, A, -1.0, S2, [A, B])
    assert t.get(S, A) == pytest.approx(-0.78)
    q_update(t, S, B, -1.0, S2, [A, B], terminal=True)
    assert t.get(S, B) == pytest.approx(-0.3)


def test_greedy_tie_goes_to_first():
    t = QTable()
    assert t.greedy(S, [A, B]) == A
    t.values[(S, B)] = 0.5
    assert t.greedy(S, [A, B]) == B
    assert t.best(S, []) == 0.0


def test_qlearning_makes_progress_on_bandit():
    dom, task = domains.load("bandit")
    sim = Simulator(dom, task, 2000, seed=0)
    m = qlearning_run(task, sim, QConfig(seed=0))
    assert m.total_goals > 800
    assert len(m.evaluations) == 20
    assert m.learner_invocations == [0]


def test_oracle_is_near_optimal():
    dom, task = domains.load("bandit")
    sim = Simulator(dom, task, 1000, seed=0)
    m = oracle_run(task, sim, config=OracleConfig(eval_traces=200))
    mean = sum(r for _, _, r in m.evaluations) / len(m.evaluations)
    assert mean == pytest.approx(-1.25, abs=0.1)  # geometric with success 0.8
    assert m.replans == [1]


def test_oracle_replans_after_domain_swap():
    from clapkit.world import ChangeSchedule

    dom, task = domains.load("bandit")
    shift = domains.load_domain("bandit-shift")
    sim = Simulator(dom, task, 1000, seed=0, schedule=ChangeSchedule([(500, shift)]))
    m = oracle_run(task, sim)
    assert m.replans == [2]
    late = [r for _, s, r in m.evaluations if s > 500]
    assert sum(late) / len(late) > -1.6
