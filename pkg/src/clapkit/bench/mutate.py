"""Random edits to one action schema, for non-stationary task streams."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..model import literal_universe
from ..ppddl import ActionSchema, Effect, LiftedDomain, Literal

EDIT_KINDS = ("add", "delete", "modify")


@dataclass(frozen=True)
class Edit:
    location: str  # "pre" or "eff"
    index: int | None  # effect-list index for effect edits
    kind: str
    before: str | None
    after: str | None


@dataclass
class MutationSpec:
    seed: int | None
    action: str
    edits: list[Edit] = field(default_factory=list)

    @property
    def changed(self) -> bool:
        return len(self.edits) >= 1


def _fmt(atom, sign: str = "") -> str:
    return sign + "(" + " ".join(atom) + ")"


def _rebind(atom, universe, rng) -> tuple | None:
    """Swap one argument for another parameter so the result stays in the universe."""
    options = [u for u in universe if u[0] == atom[0] and u != atom and sum(x != y for x, y in zip(u[1:], atom[1:])) == 1]
    return rng.choice(options) if options else None


def _edit_pre(pre: list[Literal], universe, rng) -> Edit | None:
    kinds = list(EDIT_KINDS)
    rng.shuffle(kinds)
    used = {l.atom for l in pre}
    for kind in kinds:
        if kind == "add":
            free = [u for u in universe if u not in used]
            if not free:
                continue
            atom = rng.choice(free)
            lit = Literal(atom, rng.random() < 0.5)
            pre.append(lit)
            return Edit("pre", None, "add", None, str(lit))
        if not pre:
            continue
        k = rng.randrange(len(pre))
        old = pre[k]
        if kind == "delete":
            del pre[k]
            return Edit("pre", None, "delete", str(old), None)
        if rng.random() < 0.5:
            new = Literal(old.atom, not old.positive)
        else:
            atom = _rebind(old.atom, [u for u in universe if u not in used], rng)
            if atom is None:
                new = Literal(old.atom, not old.positive)
            else:
                new = Literal(atom, old.positive)
        pre[k] = new
        return Edit("pre", None, "modify", str(old), str(new))
    return None


def _edit_eff(effects: list[tuple[set, set]], universe, rng) -> Edit | None:
    i = rng.randrange(len(effects))
    add, dele = effects[i]
    kinds = list(EDIT_KINDS)
    rng.shuffle(kinds)
    for kind in kinds:
        if kind == "add":
            free = [u for u in universe if u not in add and u not in dele]
            if not free:
                continue
            atom = rng.choice(free)
            if rng.random() < 0.5:
                add.add(atom)
                return Edit("eff", i, "add", None, _fmt(atom))
            dele.add(atom)
            return Edit("eff", i, "add", None, _fmt(atom, "not "))
        pool = [(a, True) for a in sorted(add)] + [(a, False) for a in sorted(dele)]
        if not pool:
            continue
        atom, positive = rng.choice(pool)
        before = _fmt(atom, "" if positive else "not ")
        (add if positive else dele).discard(atom)
        if kind == "delete":
            return Edit("eff", i, "delete", before, None)
        target = _rebind(atom, [u for u in universe if u not in add and u not in dele], rng)
        if target is None or rng.random() < 0.5:
            target, positive = atom, not positive
        (add if positive else dele).add(target)
        return Edit("eff", i, "modify", before, _fmt(target, "" if positive else "not "))
    return None


def mutate_action(
    action: ActionSchema,
    domain: LiftedDomain,
    rng: random.Random,
    n_pre: int | None = None,
    n_eff: int | None = None,
) -> tuple[ActionSchema, list[Edit]]:
    universe = literal_universe(action.params, domain.predicates, domain.is_subtype)
    while True:
        k_pre = rng.randint(0, 3) if n_pre is None else n_pre
        k_eff = rng.randint(0, 3) if n_eff is None else n_eff
        if k_pre + k_eff >= 1:
            break
    pre = list(action.pre)
    effects = [(set(e.add), set(e.delete)) for e in action.eff]
    edits = []
    for _ in range(k_pre):
        e = _edit_pre(pre, universe, rng)
        if e:
            edits.append(e)
    for _ in range(k_eff):
        e = _edit_eff(effects, universe, rng)
        if e:
            edits.append(e)
    eff = tuple(Effect(frozenset(a), frozenset(d)).normalized() for a, d in effects)
    return ActionSchema(action.name, action.params, tuple(pre), action.prob, eff), edits


def mutate_domain(
    domain: LiftedDomain,
    rng: random.Random,
    n_pre: int | None = None,
    n_eff: int | None = None,
    seed: int | None = None,
) -> tuple[LiftedDomain, MutationSpec]:
    """Edit one uniformly chosen action; retries until the schema actually changes."""
    if not domain.actions:
        raise ValueError("domain has no actions to mutate")
    names = sorted(domain.actions)
    for _ in range(1000):
        name = rng.choice(names)
        old = domain.actions[name]
        new, edits = mutate_action(old, domain, rng, n_pre, n_eff)
        if edits and new.key() != old.key():
            return domain.replace_action(new), MutationSpec(seed, name, edits)
    raise RuntimeError("could not produce an effective mutation")


def mutate_chain(domain: LiftedDomain, seed: int, length: int) -> list[tuple[LiftedDomain, MutationSpec]]:
    rng = random.Random(seed)
    out, cur = [], domain
    for _ in range(length):
        cur, spec = mutate_domain(cur, rng, seed=seed)
        out.append((cur, spec))
    return out


def literal_diff(d1: LiftedDomain, d2: LiftedDomain) -> set[tuple]:
    """Literal-level differences (action, location, literal) between two domains."""
    out = set()
    for name in sorted(set(d1.actions) | set(d2.actions)):
        a, b = d1.actions.get(name), d2.actions.get(name)
        if a is None or b is None:
            out.add((name, "action", None))
            continue
        out |= {(name, "pre", str(l)) for l in set(a.pre) ^ set(b.pre)}
        for i in range(max(len(a.eff), len(b.eff))):
            ea = a.eff[i] if i < len(a.eff) else Effect()
            eb = b.eff[i] if i < len(b.eff) else Effect()
            out |= {(name, i, _fmt(x)) for x in ea.add ^ eb.add}
            out |= {(name, i, _fmt(x, "not ")) for x in ea.delete ^ eb.delete}
    return out
