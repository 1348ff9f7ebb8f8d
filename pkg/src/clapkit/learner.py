"""Active, need-based learning of lifted probabilistic action models.

The learner only ever touches the simulator through ``step``/``reset`` and
the observed states.  Precondition literals are settled by distinguishing
queries (see :mod:`clapkit.fond`); effect lists are discovered from observed
transitions and their probabilities estimated by repeated execution.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import fond
from .model import (
    ABSENT,
    NEG,
    POS,
    PRE,
    UNKNOWN,
    LearnedModel,
    PlanningView,
    QueueEntry,
    Target,
    Transition,
    compatible,
    compatible_lists,
    is_consistent,
    possibly_applicable,
)
from .ppddl import GroundAction, State, substitute
from .solve import plan, unreachable_goal

# chance below which a run of no-ops is no longer put down to the null outcome
NOOP_RUN_LEVEL = 1e-6


@dataclass
class LearnerConfig:
    eta: int = 100
    fond_node_budget: int = 1_000_000
    walk_length: int = 40
    comprehensive: bool = False
    seed: int = 0
    max_query_attempts: int = 6
    discovery_walks: int = 3
    max_passes: int = 3

    def __post_init__(self):
        if self.eta < 1:
            raise ValueError("eta must be at least 1")


@dataclass
class CandidateTriple:
    m_plus: LearnedModel
    m_minus: LearnedModel
    m_absent: LearnedModel

    def by_mode(self, mode: str) -> LearnedModel:
        return {POS: self.m_plus, NEG: self.m_minus, ABSENT: self.m_absent}[mode]


def candidates(model: LearnedModel, target: Target) -> CandidateTriple:
    if target not in model.queue:
        raise KeyError(f"{target} is not awaiting resolution")
    out = []
    for mode in (POS, NEG, ABSENT):
        m = model.copy()
        m.set_mode(target, mode)
        out.append(m)
    return CandidateTriple(*out)


def needs_learning(model: LearnedModel) -> bool:
    if any(not e.dormant for e in model.queue.values()):
        return True
    return any(am.stale and not am.deferred for am in model.actions.values())


def required_mode(value: bool) -> str:
    return POS if value else NEG


@dataclass
class QueryRecord:
    target: str
    pair: tuple[str, str]
    solved: bool
    distinguishing: bool | None
    criterion: str | None


class Learner:
    """Holds the evidence gathered across invocations (witnesses, event log)."""

    def __init__(self, config: LearnerConfig | None = None):
        self.config = config or LearnerConfig()
        self.rng = random.Random(self.config.seed)
        self.events: list[dict] = []
        self.queries: list[QueryRecord] = []
        # lifted literal values seen in states where an action visibly executed
        self.seen: dict[str, dict[tuple, set]] = {}
        self.latest_witness: dict[str, Transition] = {}
        self._in_anomaly = False
        self.invocations = 0
        # literal settled by blocked executions -> (sibling preconditions open at
        # the time, the blocked executions)
        self.failure_settled: dict[Target, tuple[frozenset, list]] = {}
        self._by_failure = False
        self._blocked_at: list = []
        self._noops: tuple = (None, 0)
        # task counter; entries parked during the current task stay eligible for retries
        self.epoch = 0
        self.parked_in: dict[Target, int] = {}

    # -- logging -------------------------------------------------------

    def log(self, sim, event: str, **data) -> None:
        rec = {"event": event, "step": getattr(sim, "steps_used", None)}
        rec.update(data)
        self.events.append(rec)

    # -- evidence ------------------------------------------------------

    def forget_witnesses(self, action: str) -> None:
        self.seen.pop(action, None)
        self.latest_witness.pop(action, None)

    def _record_witness(self, model: LearnedModel, t: Transition) -> None:
        am = model.actions[t.a.name]
        b = am.binding(t.a)
        seen = self.seen.setdefault(am.name, {})
        for lit in am.universe:
            seen.setdefault(lit, set()).add(substitute(lit, b) in t.s)
        self.latest_witness[am.name] = t

    def _eliminate_by_witnesses(self, model: LearnedModel, action: str) -> None:
        seen = self.seen.get(action)
        if not seen:
            return
        for t, e in list(model.queue.items()):
            if t.action != action or t.loc != PRE or model.mode(t) != UNKNOWN:
                continue
            vals = seen.get(t.lit, set())
            cands = set(e.candidates)
            for v in vals:
                cands.discard(required_mode(not v))
            self._narrow(model, t, e, cands)

    def _narrow(self, model: LearnedModel, t: Target, e: QueueEntry, cands: set) -> None:
        if not cands:
            return  # contradictory evidence; leave for an explicit query
        if len(cands) == 1:
            mode = next(iter(cands))
            model.set_mode(t, mode)
            self.log(None, "fixed", target=str(t), action=t.action, mode=mode, how="passive")
        elif frozenset(cands) != e.candidates:
            e.candidates = frozenset(cands)
            e.dormant = False

    def _passive_effects(self, model: LearnedModel, t: Transition, i: int) -> None:
        """Settle unknown literals of effect list ``i`` from a transition attributed to it."""
        am = model.actions[t.a.name]
        b = am.binding(t.a)
        for lit, mode in list(am.effects[i].items()):
            if mode != UNKNOWN:
                continue
            tgt = Target(am.name, lit, i)
            e = model.queue.get(tgt)
            if e is None:
                continue
            x = substitute(lit, b)
            before, after = x in t.s, x in t.s2
            if before != after:
                cands = {POS if after else NEG}
            else:
                cands = set(e.candidates) - {NEG if before else POS}
            self._narrow(model, tgt, e, cands)

    def _reactivate(self, model: LearnedModel, action: str | None = None) -> None:
        for t, e in model.queue.items():
            if action is None or t.action == action:
                e.dormant = False
        for am in model.actions.values():
            if action is None or am.name == action:
                am.deferred = False

    # -- observation -----------------------------------------------------

    def execute(self, model: LearnedModel, sim, ga: GroundAction) -> Transition:
        s = sim.current
        s2 = sim.step(ga)
        t = Transition(s, ga, s2)
        self.observe(model, t, sim)
        return t

    def observe(self, model: LearnedModel, t: Transition, sim=None):
        """Fold one transition into the model; returns the consistency verdict.

        Contradicted literals are queued for relearning, unexplained visible
        outcomes start new effect lists, and unexplained no-ops are probed by
        retrying the action in place.
        """
        s, ga, s2 = t
        am = model.actions[ga.name]
        verdict = is_consistent(model, t)
        if s != s2:
            self._noops = (None, 0)
            if am.name not in self.latest_witness and model.queue:
                self._reactivate(model, am.name)
            self._record_witness(model, t)
        if verdict.consistent:
            if s == s2 and possibly_applicable(model, s, ga):
                lists = compatible_lists(model, t)
                self._noop_run(model, t, sum(am.prob[i] for i in lists), sim)
            if s != s2:
                self._eliminate_by_witnesses(model, am.name)
                if verdict.matched_effect is not None:
                    self._passive_effects(model, t, verdict.matched_effect)
            return verdict
        if verdict.violations:
            if any(v.loc == PRE for v in verdict.violations):
                # the action's applicability changed; earlier witnesses are suspect
                self.forget_witnesses(am.name)
                self._record_witness(model, t)
            kind = "witness" if s != s2 else "failure"
            marked = model.mark_unknown_inplace(verdict.violations, reference=t, ref_kind=kind)
            if marked:
                self.log(sim, "mark_unknown", action=am.name, targets=[str(m) for m in marked])
            self._reactivate(model, am.name)
        if s != s2:
            self._eliminate_by_witnesses(model, am.name)
            if not possibly_applicable(model, s, ga):
                return verdict
            lists = compatible_lists(model, t)
            if lists:
                if model.actions[am.name].prob[lists[0]] <= 0:
                    am.stale = True
                    am.deferred = False
                if len(lists) == 1:
                    self._passive_effects(model, t, lists[0])
                return verdict
            self._new_effect_list(model, t, sim)
            return verdict
        # s == s2 while the model predicted a visible change
        if any(m == UNKNOWN for m in am.pre.values()):
            return verdict
        lists = compatible_lists(model, t)
        if lists:
            am.stale = True
            am.deferred = False
            return verdict
        if sim is not None and not self._in_anomaly:
            self._probe_noop(model, t, sim)
        return verdict

    def _new_effect_list(self, model: LearnedModel, t: Transition, sim) -> None:
        am = model.actions[t.a.name]
        b = am.binding(t.a)
        modes = am.new_effect_list()
        for lit in am.universe:
            x = substitute(lit, b)
            if x in t.s2 and x not in t.s:
                modes[lit] = POS
            elif x in t.s and x not in t.s2:
                modes[lit] = NEG
        am.effects.append(modes)
        am.prob.append(0.0)
        am.stale = True
        am.deferred = False
        model.touch()
        self.log(sim, "effect_list", action=am.name, index=len(am.effects) - 1)

    def _add_null_list(self, model: LearnedModel, action: str, sim) -> None:
        am = model.actions[action]
        for i, e in enumerate(am.effects):
            if all(m == ABSENT for m in e.values()):
                am.stale = True
                am.deferred = False
                return
        am.effects.append(am.new_effect_list())
        am.prob.append(0.0)
        am.stale = True
        am.deferred = False
        model.touch()
        self.log(sim, "effect_list", action=action, index=len(am.effects) - 1, null=True)

    def _noop_run(self, model: LearnedModel, t: Transition, p_null: float, sim) -> None:
        """A null outcome explains one no-op, not a long run of them in one state
        that differs from every witness."""
        key = (t.s, t.a)
        run = self._noops[1] + 1 if self._noops[0] == key else 1
        self._noops = (key, run)
        if not 0.0 < p_null < 1.0 or p_null ** run >= NOOP_RUN_LEVEL:
            return
        self._noops = (None, 0)
        am = model.actions[t.a.name]
        b = am.binding(t.a)
        seen = self.seen.get(am.name, {})
        # only literals in a configuration no witness has shown can explain the run
        suspects = [
            Target(am.name, l, PRE) for l, m in sorted(am.pre.items())
            if m == ABSENT and (substitute(l, b) in t.s) not in seen.get(l, ())
        ]
        if not suspects:
            return
        if len(suspects) == 1 and self._provisional(model, suspects[0]):
            # every other literal has a value some witness executed with: this one blocks
            lit = suspects[0].lit
            mode = NEG if substitute(lit, b) in t.s else POS
            self._settle(model, suspects[0], mode, sim, "blocked")
            return
        self.forget_witnesses(am.name)
        marked = model.mark_unknown_inplace(suspects, reference=t, ref_kind="failure")
        self.log(sim, "anomaly", action=am.name, cause="blocked", run=run,
                 targets=[str(m) for m in marked])

    def _probe_noop(self, model: LearnedModel, t: Transition, sim) -> None:
        """Retry an action that unexpectedly did nothing: null outcome or blocked?"""
        s, ga, _ = t
        self._in_anomaly = True
        try:
            for _ in range(self.config.eta):
                if sim.current != s:
                    break
                t2 = self.execute(model, sim, ga)
                if t2.s2 != t2.s:
                    self._add_null_list(model, ga.name, sim)
                    self.log(sim, "anomaly", action=ga.name, cause="null-outcome")
                    return
            else:
                am = model.actions[ga.name]
                suspects = [Target(ga.name, l, PRE) for l, m in sorted(am.pre.items()) if m == ABSENT]
                self.forget_witnesses(ga.name)
                marked = model.mark_unknown_inplace(suspects, reference=t, ref_kind="failure")
                self.log(
                    sim, "anomaly", action=ga.name, cause="blocked",
                    targets=[str(m) for m in marked],
                )
        finally:
            self._in_anomaly = False

    # -- navigation ----------------------------------------------------

    def navigation_model(self, model: LearnedModel, exclude: Target | None = None) -> LearnedModel:
        """Copy of ``model`` safe to plan with: unknown preconditions are pinned
        to the values of the latest witness, and actions never seen executing
        are disabled."""
        m = model.copy()
        for am in m.actions.values():
            unk = [
                l for l, mode in am.pre.items()
                if mode == UNKNOWN and not (exclude is not None and exclude.loc == PRE
                                            and exclude.action == am.name and exclude.lit == l)
            ]
            if not unk:
                continue
            w = self.latest_witness.get(am.name)
            if w is None:
                am.disabled = True
                continue
            b = am.binding(w.a)
            for l in unk:
                am.pre[l] = required_mode(substitute(l, b) in w.s)
        m.touch()
        return m

    def _goto(self, model: LearnedModel, sim, is_target, max_steps: int | None = None) -> bool:
        """Drive the simulator into a state satisfying ``is_target`` using the model.

        Resetting is free, so the walk starts from s0 whenever that is no worse.
        """
        H = self.config.walk_length
        nav = self.navigation_model(model)
        view = PlanningView(nav, sim.space, include_stale=True)
        s0 = frozenset(sim.task.init)
        for _ in range(2):
            if is_target(sim.current):
                return True
            pol = plan(view, sim.current, is_target)
            here_ok = not unreachable_goal(pol, view, sim.current)
            if sim.current != s0:
                pol0 = plan(view, s0, is_target)
                if not unreachable_goal(pol0, view, s0) and (
                    not here_ok or pol0.values[s0] > pol.values[sim.current]
                ):
                    sim.reset()
                    pol, here_ok = pol0, True
            if not here_ok:
                return is_target(sim.current)
            for _ in range(max_steps or H):
                a = pol.action(sim.current)
                if a is None:
                    break
                version = model.version
                self.execute(model, sim, a)
                if is_target(sim.current):
                    return True
                if model.version != version:
                    break
        return is_target(sim.current)

    # -- resolution ----------------------------------------------------

    def _pair(self, cands: set, tried: set) -> tuple[str, str] | None:
        order = [(POS, ABSENT), (NEG, ABSENT), (POS, NEG)]
        for x, y in order:
            if x in cands and y in cands and (x, y) not in tried:
                return x, y
        return None

    def _settle(self, model: LearnedModel, t: Target, mode: str, sim, how: str) -> None:
        model.set_mode(t, mode)
        if t.loc != PRE:
            model.actions[t.action].stale = True
        self.log(sim, "fixed", target=str(t), action=t.action, mode=mode, how=how)

    @staticmethod
    def _provisional(model: LearnedModel, t: Target) -> bool:
        e = model.queue.get(t)
        return e is not None and e.dormant

    def _park(self, model: LearnedModel, t: Target, cands: set, sim) -> None:
        mode = ABSENT if ABSENT in cands else sorted(cands)[0]
        model.set_mode(t, mode)
        model.queue[t] = QueueEntry(frozenset(cands), True, None, None)
        self.parked_in[t] = self.epoch
        self.log(sim, "dormant", target=str(t), action=t.action, mode=mode)

    def discover(self, model: LearnedModel, sim, action: str) -> bool:
        """Random walks from s0 that favour ``action`` until it visibly executes."""
        mine = [g for g in sim.space.actions if g.name == action]
        every = list(sim.space.actions)
        if not mine:
            return False
        self.log(sim, "discover", action=action)
        for _ in range(self.config.discovery_walks):
            sim.reset()
            for _ in range(self.config.walk_length):
                ga = self.rng.choice(mine if self.rng.random() < 0.5 else every)
                self.execute(model, sim, ga)
                if action in self.latest_witness:
                    return True
        return action in self.latest_witness

    def resolve(self, model: LearnedModel, t: Target, sim) -> bool:
        """Settle one queued literal; returns False when it had to be parked."""
        self.log(sim, "resolve", target=str(t), action=t.action)
        if t.loc == PRE:
            self._eliminate_by_witnesses(model, t.action)
            if t not in model.queue:
                return True
            if t.action not in self.latest_witness and not self.discover(model, sim, t.action):
                self._park(model, t, set(model.queue[t].candidates), sim)
                return False
        tried: set = set()
        for _ in range(self.config.max_query_attempts):
            e = model.queue.get(t)
            if e is None:
                return True
            cands = set(e.candidates)
            if len(cands) == 1:
                self._settle(model, t, next(iter(cands)), sim, "query")
                return True
            pair = self._pair(cands, tried)
            if pair is None:
                self._park(model, t, cands, sim)
                return False
            self._by_failure = False
            self._blocked_at = []
            outcome = self._query(model, t, pair, sim)
            if self._by_failure:
                self._note_failure_evidence(model, t)
            if outcome is None:
                tried.add(pair)
                continue
            e = model.queue.get(t)
            if e is None:
                return True
            left = cands - outcome
            if left:
                e.candidates = frozenset(left)
        e = model.queue.get(t)
        if e is None:
            return True
        self._park(model, t, set(e.candidates), sim)
        return False

    def _note_failure_evidence(self, model: LearnedModel, t: Target) -> None:
        """A blocked execution may be due to a sibling precondition whose mode is
        still provisional; remember which ones so ``t`` can be rechecked later."""
        open_ = frozenset(
            q for q in model.queue if q.action == t.action and q.loc == PRE and q != t
        )
        if open_:
            self.failure_settled[t] = (open_, list(self._blocked_at))

    def _reopen_failure_settled(self, model: LearnedModel, sim) -> None:
        for t, (open_, blocked) in list(self.failure_settled.items()):
            if any(q in model.queue and not model.queue[q].dormant for q in open_):
                continue
            if not any(q in model.queue for q in open_):
                del self.failure_settled[t]
            am = model.actions[t.action]
            # the evidence stands if every settled sibling held in each blocked state
            explained = any(
                am.pre[q.lit] in (POS, NEG)
                and (substitute(q.lit, am.binding(ga)) in s) != (am.pre[q.lit] == POS)
                for s, ga in blocked for q in open_
            )
            if explained and t not in model.queue:
                self.failure_settled.pop(t, None)
                marked = model.mark_unknown_inplace([t])
                if marked:
                    self.log(sim, "reopen", target=str(t), action=t.action)

    def _query(self, model: LearnedModel, t: Target, pair, sim) -> set | None:
        """Run one distinguishing query; returns eliminated modes or None if unsolvable."""
        x, y = pair
        base = self.navigation_model(model, exclude=t)
        mA, mB = base.copy(), base.copy()
        for m, mode in ((mA, x), (mB, y)):
            am = m.actions[t.action]
            if t.loc == PRE:
                am.pre[t.lit] = mode
            else:
                am.effects[t.loc][t.lit] = mode
            m.touch()
        pol = prob = None
        starts = [sim.current]
        if sim.current != sim.task.init:
            starts.append(frozenset(sim.task.init))
        for start in starts:
            if start != sim.current:
                sim.reset()
            prob = fond.compile_query(mA, mB, sim.space, start, t)
            pol = fond.solve_fond(prob, self.config.fond_node_budget)
            if pol.solved:
                break
        if not pol.solved:
            self.queries.append(QueryRecord(str(t), pair, False, None, None))
            self.log(sim, "query", target=str(t), action=t.action, pair=list(pair), solved=False,
                     budget_exhausted=pol.budget_exhausted)
            return None
        ok = fond.check_distinguishing(pol, mA, mB, sim.space, prob.start, target_action=t.action)
        self.queries.append(QueryRecord(str(t), pair, True, ok, pol.criterion))
        self.log(sim, "query", target=str(t), action=t.action, pair=list(pair), solved=True,
                 distinguishing=ok, criterion=pol.criterion)
        if not ok:
            return None
        return self._run_query(model, t, prob, pol, mA, mB, x, y, sim)

    def _run_query(self, model, t, prob, pol, mA, mB, x, y, sim) -> set:
        eta = self.config.eta
        blocked = 0
        limit = 4 * self.config.walk_length + 3 * eta
        for _ in range(limit):
            s = sim.current
            j = fond.Joint(s, s, False, False)
            ga = pol.mapping.get(j)
            if ga is None:
                return set()
            expected = {o.s1 for o in prob.outcomes(j, ga)} | {o.s2 for o in prob.outcomes(j, ga)}
            tr = self.execute(model, sim, ga)
            if t not in model.queue:
                return set()
            if ga.name == t.action:
                elim = set()
                if tr.s != tr.s2:
                    for c, mc in ((x, mA), (y, mB)):
                        if not compatible(mc, tr):
                            elim.add(c)
                elif t.loc == PRE:
                    appA = possibly_applicable(mA, s, ga)
                    appB = possibly_applicable(mB, s, ga)
                    if appA != appB:
                        blocked += 1
                        self._blocked_at.append((s, ga))
                        if blocked >= eta:
                            elim.add(x if appA else y)
                            self._by_failure = True
                else:
                    for c, mc in ((x, mA), (y, mB)):
                        if not compatible(mc, tr):
                            elim.add(c)
                if len(elim) == 1:
                    self.log(sim, "eliminated", target=str(t), action=t.action, modes=sorted(elim))
                    return elim
            if tr.s2 not in expected:
                return set()
        return set()

    # -- probabilities -------------------------------------------------

    def _informative(self, model: LearnedModel, ga: GroundAction, s: State) -> bool:
        nav = self._nav_cache
        if not possibly_applicable(nav, s, ga):
            return False
        g = model.grounded(ga)
        outs = [(s - dele) | add for _, add, dele in g.effects]
        if len(outs) == 1:
            return outs[0] != s  # a lone list must show a visible change
        return len(set(outs)) == len(outs)

    def estimate_probabilities(self, model: LearnedModel, action: str, sim, eta: int | None = None) -> LearnedModel:
        eta = eta or self.config.eta
        am = model.actions[action]
        if not am.effects:
            am.stale = False
            return model
        grounds = [g for g in sim.space.actions if g.name == action]
        shape = am.signature()[:2]
        counts = [0] * len(am.effects)
        n = 0
        guard = 0
        while n < eta:
            guard += 1
            if guard > 4 * eta + 20:
                break
            self._nav_cache = self.navigation_model(model)
            here = [g for g in grounds if self._informative(model, g, sim.current)]
            if not here:
                ok = self._goto(model, sim, lambda s: any(self._informative(model, g, s) for g in grounds))
                if not ok:
                    am.deferred = True
                    self.log(sim, "estimate_deferred", action=action)
                    return model
                continue
            ga = here[0]
            g = model.grounded(ga)
            s = sim.current
            tr = self.execute(model, sim, ga)
            if model.actions[action].signature()[:2] != shape:
                am = model.actions[action]
                shape = am.signature()[:2]
                counts = [0] * len(am.effects)
                n = 0
                continue
            if tr.s2 == s and not possibly_applicable(model, s, ga):
                continue
            for i, (_, add, dele) in enumerate(g.effects):
                if (s - dele) | add == tr.s2:
                    counts[i] += 1
                    n += 1
                    break
        if n == 0:
            am.deferred = True
            return model
        am.prob = [c / n for c in counts]
        am.stale = False
        am.deferred = False
        model.touch()
        self.log(sim, "estimate", action=action, prob=am.prob, samples=n)
        return model

    # -- top level -----------------------------------------------------

    def _ordered_targets(self, model: LearnedModel) -> list[Target]:
        first: dict[str, int] = {}
        for k, t in enumerate(model.queue):
            first.setdefault(t.action, k)
        active = [(first[t.action], t.loc != PRE, k, t) for k, (t, e) in enumerate(model.queue.items()) if not e.dormant]
        return [t for *_, t in sorted(active, key=lambda r: r[:3])]

    def begin_task(self) -> None:
        self.epoch += 1

    def _retryable(self, t: Target, scope: set) -> bool:
        return t.action in scope or self.parked_in.get(t) == self.epoch

    def learn(self, model: LearnedModel, sim) -> LearnedModel:
        """Resolve what the queue asks for (or everything, in comprehensive mode)."""
        self.invocations += 1
        m = model.copy()
        if self.config.comprehensive:
            m = _blank_like(m)
            self.seen.clear()
            self.latest_witness.clear()
            self.failure_settled.clear()
            self.log(sim, "relearn", actions=sorted(m.actions))
        self._reopen_failure_settled(m, sim)
        self.log(sim, "learn_start", queue=len(m.queue))
        passes = 0
        rounds = 0
        limit = 20 * (sum(len(a.universe) * (1 + len(a.effects)) for a in m.actions.values()) + 10)
        # parked entries are retried only for actions this invocation works on
        scope: set[str] = set()
        while rounds < limit:
            rounds += 1
            progressed = False
            scope |= {t.action for t, e in m.queue.items() if not e.dormant}
            scope |= {am.name for am in m.actions.values() if am.stale and not am.deferred}
            for t in self._ordered_targets(m):
                if t in m.queue and not m.queue[t].dormant:
                    if self.resolve(m, t, sim):
                        progressed = True
                    self._reopen_failure_settled(m, sim)
            for am in list(m.actions.values()):
                if am.stale and not am.deferred and not any(
                    t.action == am.name and not e.dormant for t, e in m.queue.items()
                ):
                    self.estimate_probabilities(m, am.name, sim)
                    progressed = True
            if needs_learning(m):
                continue
            dormant = [t for t, e in m.queue.items() if e.dormant and self._retryable(t, scope)]
            if progressed and dormant and passes < self.config.max_passes:
                passes += 1
                for a in sorted(scope):
                    self._reactivate(m, a)
                for t in dormant:
                    m.queue[t].dormant = False
                continue
            break
        sim.reset()
        self.log(sim, "learn_end", queue=len(m.queue))
        return m


def _blank_like(model: LearnedModel) -> LearnedModel:
    m = model.copy()
    m.queue.clear()
    for am in m.actions.values():
        am.effects, am.prob = [], []
        am.stale = am.deferred = False
        for l in am.universe:
            am.pre[l] = UNKNOWN
            m.queue[Target(am.name, l, PRE)] = QueueEntry()
    m.touch()
    return m


def explore(learner: Learner, model: LearnedModel, sim, walk_length: int) -> list[Transition]:
    """Uniform random walk from the current state; every transition is checked."""
    out = []
    actions = list(sim.space.actions)
    for _ in range(walk_length):
        if sim.remaining <= 0:
            break
        out.append(learner.execute(model, sim, learner.rng.choice(actions)))
    return out
