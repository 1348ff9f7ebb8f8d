"""Effect-frequency tables and the Pearson chi-square goodness-of-fit check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .model import LearnedModel

MIN_OBSERVATIONS = 100  # the test runs only once F exceeds this

_EPS = 1e-15
_TINY = 1e-300


def _gamma_series(a: float, x: float) -> float:
    """Lower regularized P(a, x) by its power series; good for x < a + 1."""
    term = total = 1.0 / a
    ap = a
    for _ in range(10000):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf(a: float, x: float) -> float:
    """Upper regularized Q(a, x) by a modified Lentz continued fraction; x >= a + 1."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def gammaincc(a: float, x: float) -> float:
    """Upper regularized incomplete gamma Q(a, x)."""
    if a <= 0:
        raise ValueError("shape must be positive")
    if x < 0:
        raise ValueError("x must be non-negative")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cf(a, x)


def chi2_sf(x: float, df: int) -> float:
    """Upper tail P(X >= x) of the chi-square distribution with ``df`` degrees of freedom."""
    if df < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if x <= 0:
        return 1.0
    return gammaincc(df / 2.0, x / 2.0)


@dataclass
class FreqTable:
    """Per-action effect counts since the last reset."""

    counts: dict[str, list[int]] = field(default_factory=dict)

    def total(self, action: str) -> int:
        return sum(self.counts.get(action, ()))

    def ensure(self, action: str, n_effects: int) -> list[int]:
        row = self.counts.get(action)
        if row is None or len(row) != n_effects:
            row = [0] * n_effects
            self.counts[action] = row
        return row

    def observe(self, action: str, matched_effect: int, n_effects: int | None = None) -> "FreqTable":
        if n_effects is not None:
            self.ensure(action, n_effects)
        row = self.counts.get(action)
        if row is None or not 0 <= matched_effect < len(row):
            raise IndexError(f"{action}: effect index {matched_effect} out of range")
        row[matched_effect] += 1
        return self

    def reset(self, action: str | None = None) -> None:
        if action is None:
            self.counts.clear()
        elif action in self.counts:
            self.counts[action] = [0] * len(self.counts[action])


PASS, FAIL, SKIPPED = "pass", "fail", "skipped"


def chi_square(freq, prob) -> tuple[float, int]:
    """Pearson statistic and degrees of freedom; zero-probability cells are left out."""
    F = sum(freq)
    stat, cells = 0.0, 0
    for f, p in zip(freq, prob):
        if p <= 0:
            continue
        e = F * p
        stat += (f - e) ** 2 / e
        cells += 1
    return stat, max(1, cells - 1)


def gof_test(freq, prob, theta: float = 0.05) -> tuple[str, float | None]:
    """Returns (verdict, p-value); skipped while F <= 100."""
    if len(freq) != len(prob):
        raise ValueError("frequency and probability lists differ in length")
    if sum(freq) <= MIN_OBSERVATIONS:
        return SKIPPED, None
    stat, df = chi_square(freq, prob)
    p = chi2_sf(stat, df)
    return (FAIL if p < theta else PASS), p


def refit(model: LearnedModel, table: FreqTable, action: str) -> LearnedModel:
    """Maximum-likelihood refit of an action's probabilities; the window restarts."""
    row = table.counts.get(action)
    F = sum(row) if row else 0
    if F == 0:
        raise ValueError(f"{action}: no observations to refit from")
    am = model.actions[action]
    am.prob = [c / F for c in row]
    am.stale = False
    model.touch()
    table.reset(action)
    return model
