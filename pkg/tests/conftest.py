import itertools
import math
from fractions import Fraction

import pytest

ACCEPTANCE_LINES = []
REPORTS = []

QUARTERS = (0.0, 0.25, 0.5, 0.75, 1.0)


def weight_grid(values=QUARTERS):
    return [(a, b, g) for a, b, g in itertools.product(values, repeat=3) if a + b > 0]


def enumerate_rule(n, stop_set, alpha, beta, gamma, p=1):
    """Literal enumeration over arrival orders and accept/refuse patterns.

    Returns exact (value, win, wrong, none, mean_duration). Kept apart from
    bestchoice.oracle so the two can check each other.
    """
    p = Fraction(p)
    total = Fraction(0)
    win = wrong = none = dur = Fraction(0)
    perms = list(itertools.permutations(range(n)))
    for perm in perms:
        cands = [k + 1 for k in range(n) if perm[k] == max(perm[: k + 1])]
        best_pos = perm.index(n - 1) + 1
        solicited = [k for k in cands if k in stop_set]
        for pattern in itertools.product((True, False), repeat=len(solicited)):
            weight = Fraction(1)
            for ok in pattern:
                weight *= p if ok else 1 - p
            if weight == 0:
                continue
            picked = next((k for k, ok in zip(solicited, pattern) if ok), None)
            weight /= len(perms)
            total += weight
            if picked is None:
                none += weight
                dur += weight * n
            elif picked == best_pos:
                win += weight
                dur += weight * picked
            else:
                wrong += weight
                dur += weight * picked
    assert total == 1
    a, b, g = (Fraction(x) for x in (alpha, beta, gamma))
    return a * win - b * wrong - g * none, win, wrong, none, dur


@pytest.fixture(scope="session")
def record_criterion():
    def record(number, name, ok, detail=""):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] AC{number} {name}" + (f" :: {detail}" if detail else ""))
    return record


@pytest.fixture(scope="session")
def record_report():
    return REPORTS.append


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("AC")[1].split()[0])):
            terminalreporter.write_line(line)
    for text in REPORTS:
        terminalreporter.section("closed-form adjudication report")
        for line in text.splitlines():
            terminalreporter.write_line(line)
