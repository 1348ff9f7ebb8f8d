"""Bundled micro-domains small enough for exhaustive checks."""

from __future__ import annotations

from importlib import resources

from ..ppddl import LiftedDomain, TaskSpec, parse_domain, parse_problem

BUNDLED = ("warehouse", "bandit", "blocksworld", "tireworld")


def read_text(name: str) -> str:
    return resources.files(__package__).joinpath(name).read_text(encoding="utf-8")


def is_bundled(name: str) -> bool:
    return resources.files(__package__).joinpath(f"{name}.pddl").is_file()


def load_domain(name: str) -> LiftedDomain:
    return parse_domain(read_text(f"{name}.pddl"))


def load_problem(name: str, domain: LiftedDomain, index: int = 0) -> TaskSpec:
    return parse_problem(read_text(f"{name}-p{index}.pddl"), domain)


def load(name: str, index: int = 0) -> tuple[LiftedDomain, TaskSpec]:
    dom = load_domain(name)
    return dom, load_problem(name, dom, index)
