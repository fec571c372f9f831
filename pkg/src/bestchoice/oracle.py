"""Brute-force ground truth for small horizons.

Every arrival order of ``n <= 8`` items is enumerated. A rule is a set of
positions: it solicits the first candidate whose position is in the set and,
after a refusal, keeps going. With refusals, each solicited candidate accepts
independently with probability ``p``, so the outcome weights over acceptance
patterns are ``p (1-p)^i`` for accepting the ``i``-th solicited candidate and
``(1-p)^m`` for refusals throughout.

Probabilities are accumulated as exact fractions of ``n!``; the payoff
weights and ``p`` enter as the exact rationals of their float values.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from bestchoice.model import ProblemParams

MAX_N = 8


@dataclass(frozen=True)
class RuleSpec:
    stop_set: frozenset

    def __post_init__(self):
        if not self.stop_set:
            raise ValueError("stop set must be nonempty")

    @classmethod
    def threshold(cls, n: int, k: int) -> "RuleSpec":
        return cls(frozenset(range(k, n + 1)))

    def is_up_closed(self, n: int) -> bool:
        return self.stop_set == frozenset(range(min(self.stop_set), n + 1))

    def mask(self, n: int) -> int:
        return sum(1 << (k - 1) for k in self.stop_set)


@dataclass(frozen=True)
class ExactResult:
    value: Fraction
    win: Fraction
    wrong: Fraction
    none: Fraction
    mean_duration: Fraction

    def __float__(self):
        return float(self.value)


def _guard(n):
    if n > MAX_N:
        raise ValueError(f"oracle enumerates n! orders; n={n} exceeds the cap {MAX_N}")
    if n < 1:
        raise ValueError("n must be positive")


@lru_cache(maxsize=None)
def candidate_histogram(n: int):
    """Count arrival orders by their candidate pattern.

    Returns ``{pattern: count}`` where bit ``k-1`` of ``pattern`` is set when
    position ``k`` holds the best item seen so far. The overall best item is
    always the last candidate.
    """
    _guard(n)
    hist = {}
    for perm in itertools.permutations(range(n)):
        best = -1
        pattern = 0
        for pos, item in enumerate(perm):
            if item > best:
                best = item
                pattern |= 1 << pos
        hist[pattern] = hist.get(pattern, 0) + 1
    return hist


@lru_cache(maxsize=None)
def _rule_table(n: int, p: Fraction, mask: int):
    total = math.factorial(n)
    q = 1 - p
    win = wrong = none = dur = Fraction(0)
    for pattern, count in candidate_histogram(n).items():
        last = pattern.bit_length()
        solicited = [k for k in range(1, n + 1) if pattern & mask & (1 << (k - 1))]
        reach = Fraction(count, total)  # weight of orders still searching
        for k in solicited:
            take = reach * p
            if k == last:
                win += take
            else:
                wrong += take
            dur += take * k
            reach *= q
        none += reach
        dur += reach * n
    return win, wrong, none, dur


def exact_value(rule: RuleSpec, params: ProblemParams) -> ExactResult:
    n = params.n
    _guard(n)
    if not rule.stop_set <= frozenset(range(1, n + 1)):
        raise ValueError(f"stop set must be a subset of 1..{n}")
    win, wrong, none, dur = _rule_table(n, Fraction(params.p), rule.mask(n))
    a, b, g = (Fraction(x) for x in (params.alpha, params.beta, params.gamma))
    return ExactResult(a * win - b * wrong - g * none, win, wrong, none, dur)


@lru_cache(maxsize=None)
def _all_rules(n: int, p: Fraction):
    masks = list(range(1, 1 << n))
    rows = [_rule_table(n, p, m) for m in masks]
    probs = np.array([[float(w), float(x), float(z)] for w, x, z, _ in rows])
    return masks, probs


def _mask_to_rule(mask: int) -> RuleSpec:
    return RuleSpec(frozenset(k + 1 for k in range(mask.bit_length()) if mask >> k & 1))


def best_rule(params: ProblemParams):
    """Search all 2^n - 1 nonempty stop sets; return ``(rule, value)``.

    Ties are broken toward the up-closed set with the smallest first position,
    then toward the smallest mask.
    """
    n = params.n
    _guard(n)
    masks, probs = _all_rules(n, Fraction(params.p))
    approx = probs @ np.array([params.alpha, -params.beta, -params.gamma])
    top = approx.max()
    near = [masks[i] for i in np.flatnonzero(approx >= top - 1e-9)]
    exact = {m: exact_value(_mask_to_rule(m), params).value for m in near}
    best = max(exact.values())
    winners = [m for m in near if exact[m] == best]
    ups = [m for m in winners if _mask_to_rule(m).is_up_closed(n)]
    chosen = max(ups) if ups else min(winners)  # largest up-closed mask = earliest threshold
    return _mask_to_rule(chosen), float(best)


def rule_values(params: ProblemParams) -> dict:
    """Float value of every nonempty stop set, keyed by frozenset."""
    masks, probs = _all_rules(params.n, Fraction(params.p))
    approx = probs @ np.array([params.alpha, -params.beta, -params.gamma])
    return {_mask_to_rule(m).stop_set: float(v) for m, v in zip(masks, approx)}


def mean_duration(rule: RuleSpec, params: ProblemParams) -> float:
    return float(exact_value(rule, params).mean_duration)


# -- closed-form cross-checks -------------------------------------------------

REPORT_POINTS = ((1.0, 0.0, 0.0), (1.0, 1.0, 0.0), (1.0, 0.5, 0.5), (1.0, 0.75, 0.25), (1.0, 0.25, 0.75))


def _tail(k, n):
    return sum(Fraction(1, j) for j in range(k, n))


def discrepancy_rows(ns=(4, 8), points=REPORT_POINTS):
    """Oracle quantities next to two index conventions of their closed forms.

    For a rule that skips the first ``k-1`` items, the "printed" column uses
    H_{k,n} and the "shifted" column uses H_{k-1,n}. Rows where the optimal
    rule stops at position 1 are skipped, since neither form covers them.
    """
    from bestchoice.dp import solve_certain

    rows = []
    for n in ns:
        for alpha, beta, gamma in points:
            params = ProblemParams(alpha, beta, gamma, n)
            k = solve_certain(params).threshold
            if k < 2:
                continue
            res = exact_value(RuleSpec.threshold(n, k), params)
            a, b, g = (Fraction(x) for x in (alpha, beta, gamma))
            lead = Fraction(k - 1, n)
            rows.append({
                "n": n, "alpha": alpha, "beta": beta, "gamma": gamma, "threshold": k,
                "value_oracle": res.value,
                "value_printed": lead * ((a + b) * _tail(k, n) + b - g) - b,
                "value_shifted": lead * ((a + b) * _tail(k - 1, n) + b - g) - b,
                "win_oracle": res.win,
                "stop_oracle": 1 - res.none,
                "stop_printed": lead * _tail(k, n),
                "win_shifted": lead * _tail(k - 1, n),
                "duration_oracle": res.mean_duration,
                "duration_printed": k * _tail(k, n) + k,
                "duration_shifted": (k - 1) * _tail(k - 1, n) + (k - 1),
            })
    return rows


def format_report(rows) -> str:
    def fr(x):
        return f"{float(x):.6f} ({x})"

    lines = [
        "# Closed-form adjudication against exhaustive enumeration",
        "",
        "k* = optimal threshold; printed = form with H_{k*,N}; shifted = form with H_{k*-1,N}.",
        "",
        "## Optimal value",
        "",
        "| n | alpha | beta | gamma | k* | oracle | printed H_{k*,N} | shifted H_{k*-1,N} | match |",
        "|---|---|---|---|---|---|---|---|---|",
    ]
    for r in rows:
        match = "shifted" if r["value_shifted"] == r["value_oracle"] else (
            "printed" if r["value_printed"] == r["value_oracle"] else "neither")
        lines.append(
            f"| {r['n']} | {r['alpha']} | {r['beta']} | {r['gamma']} | {r['threshold']} | "
            f"{fr(r['value_oracle'])} | {fr(r['value_printed'])} | {fr(r['value_shifted'])} | {match} |"
        )
    lines += [
        "",
        "## Which event does ((k*-1)/N) H_{k*,N} measure?",
        "",
        "| n | alpha | beta | gamma | k* | ((k*-1)/N)H_{k*,N} | oracle P(stop) | oracle P(win) | ((k*-1)/N)H_{k*-1,N} |",
        "|---|---|---|---|---|---|---|---|---|",
    ]
    for r in rows:
        lines.append(
            f"| {r['n']} | {r['alpha']} | {r['beta']} | {r['gamma']} | {r['threshold']} | "
            f"{fr(r['stop_printed'])} | {fr(r['stop_oracle'])} | {fr(r['win_oracle'])} | {fr(r['win_shifted'])} |"
        )
    lines += [
        "",
        "## Mean termination index (no pick counts as N)",
        "",
        "| n | alpha | beta | gamma | k* | oracle | k* H_{k*,N} + k* | (k*-1) H_{k*-1,N} + k*-1 |",
        "|---|---|---|---|---|---|---|---|",
    ]
    for r in rows:
        lines.append(
            f"| {r['n']} | {r['alpha']} | {r['beta']} | {r['gamma']} | {r['threshold']} | "
            f"{fr(r['duration_oracle'])} | {fr(r['duration_printed'])} | {fr(r['duration_shifted'])} |"
        )
    return "\n".join(lines) + "\n"
