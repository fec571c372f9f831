"""Backward induction over the candidate chain.

Every quantity here follows the same pattern. For a candidate at position
``k`` that is passed over (or that refuses), the process moves to the next
candidate ``j > k`` with probability ``k / (j (j - 1))`` or is absorbed with
probability ``k / n``, so

    cont(k) = k * sum_{j > k} h(j) / (j (j - 1)) + absorb * k / n

where ``h(j)`` is the quantity's value on arriving at candidate ``j``. The
inner sum is carried as a running suffix, which keeps each pass O(n).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from bestchoice.model import InvalidParams, Model, ProblemParams, harmonic_tails

# relative slack for declaring stop and continue equal; ties resolve to STOP
TIE_TOL = 1e-12


@dataclass(frozen=True)
class DurationTable:
    """Expected termination index under a fixed stopping policy.

    ``m[k - 1]`` is the expected index at which the process ends given that
    position ``k`` is reached with no stop made yet; a run with no pick counts
    as ending at ``n``. ``passed[r - 1]`` is the same expectation measured from
    a candidate at ``r`` that was passed over or refused.
    """

    m: np.ndarray
    passed: np.ndarray
    threshold: int
    start_mean: float

    @property
    def n(self) -> int:
        return len(self.m)

    def __getitem__(self, k: int) -> float:
        return float(self.m[k - 1])


@dataclass(frozen=True)
class DpSolution:
    params: ProblemParams
    model: Model
    values: np.ndarray
    continuation: np.ndarray
    stops: np.ndarray
    threshold: int
    start_value: float
    win_prob: float
    wrong_prob: float
    none_prob: float
    duration: DurationTable = field(repr=False)

    def value(self, k: int) -> float:
        return float(self.values[k - 1])

    @property
    def monotone(self) -> bool:
        """True when the stop set is exactly {threshold, ..., n}."""
        return bool(self.stops[self.threshold - 1:].all() and not self.stops[: self.threshold - 1].any())

    def to_dict(self, include_values: bool = True) -> dict:
        out = {
            "model": self.model.value,
            "n": self.params.n,
            "alpha": self.params.alpha,
            "beta": self.params.beta,
            "gamma": self.params.gamma,
            "p": self.params.p,
            "threshold": self.threshold,
            "threshold_fraction": self.threshold / self.params.n,
            "start_value": self.start_value,
            "win_prob": self.win_prob,
            "wrong_prob": self.wrong_prob,
            "none_prob": self.none_prob,
            "mean_duration": self.duration.start_mean,
            "mean_duration_fraction": self.duration.start_mean / self.params.n,
        }
        if include_values:
            out["values"] = [float(v) for v in self.values]
        return out


def threshold_mask(n: int, threshold: int) -> np.ndarray:
    if not 1 <= threshold <= n:
        raise ValueError(f"threshold must lie in 1..{n}, got {threshold}")
    stops = np.zeros(n, dtype=bool)
    stops[threshold - 1:] = True
    return stops


def _bellman(params: ProblemParams):
    n, p = params.n, params.p
    scale = params.alpha + params.beta
    tol = TIE_TOL * (params.alpha + params.beta + params.gamma)
    values = np.empty(n)
    cont = np.empty(n)
    stops = np.zeros(n, dtype=bool)
    suffix = 0.0
    for k in range(n, 0, -1):
        c = k * suffix - params.gamma * k / n
        g = scale * k / n - params.beta
        if g >= c - tol:
            u = p * g + (1.0 - p) * c
            stops[k - 1] = True
        else:
            u = c
        values[k - 1] = u
        cont[k - 1] = c
        if k > 1:
            suffix += u / (k * (k - 1))
    return values, cont, stops


def policy_outcomes(params: ProblemParams, stops: np.ndarray):
    """Exact (win, wrong, none) probabilities and durations for a stop set.

    The policy solicits the first candidate whose position is in ``stops``;
    a refusal (probability ``1 - p``) resumes the search.
    """
    n, p = params.n, params.p
    stops = np.asarray(stops, dtype=bool)
    if stops.shape != (n,):
        raise ValueError(f"stop mask must have length {n}")
    q = 1.0 - p
    s_win = s_wrong = s_none = s_dur = 0.0
    passed = np.empty(n)
    h = None
    for k in range(n, 0, -1):
        c_win = k * s_win
        c_wrong = k * s_wrong
        c_none = k * s_none + k / n
        c_dur = k * s_dur + k
        passed[k - 1] = c_dur
        if stops[k - 1]:
            best = k / n
            h = (p * best + q * c_win, p * (1.0 - best) + q * c_wrong, q * c_none, p * k + q * c_dur)
        else:
            h = (c_win, c_wrong, c_none, c_dur)
        if k > 1:
            w = 1.0 / (k * (k - 1))
            s_win += h[0] * w
            s_wrong += h[1] * w
            s_none += h[2] * w
            s_dur += h[3] * w
    win, wrong, none, start_dur = h
    # arriving at position k >= 2 with the search open is, for the future,
    # the same as having just passed a candidate at k - 1
    m = np.empty(n)
    m[0] = start_dur
    m[1:] = passed[:-1]
    return win, wrong, none, m, passed


def _solve(params: ProblemParams) -> DpSolution:
    values, cont, stops = _bellman(params)
    threshold = int(np.argmax(stops)) + 1
    win, wrong, none, m, passed = policy_outcomes(params, stops)
    duration = DurationTable(m=m, passed=passed, threshold=threshold, start_mean=float(m[0]))
    return DpSolution(
        params=params,
        model=params.model,
        values=values,
        continuation=cont,
        stops=stops,
        threshold=threshold,
        start_value=float(values[0]),
        win_prob=float(win),
        wrong_prob=float(wrong),
        none_prob=float(none),
        duration=duration,
    )


def solve_certain(params: ProblemParams) -> DpSolution:
    """Optimal policy when every solicited candidate accepts."""
    if params.p != 1:
        raise InvalidParams(f"solve_certain needs p = 1, got p={params.p}")
    return _solve(params)


def solve_uncertain(params: ProblemParams) -> DpSolution:
    """Optimal policy when a solicited candidate accepts with probability p.

    Stopping at candidate k yields ``p g(k) + (1 - p) cont(k)``; the stop
    branch wins exactly when ``g(k) >= cont(k)``. With ``p = 1`` this is the
    same computation as :func:`solve_certain`.
    """
    return _solve(params)


solve = solve_uncertain


def ola_threshold(params: ProblemParams) -> int:
    """Smallest k whose harmonic tail H_{k,n} is at most (alpha+gamma)/(alpha+beta).

    This is the one-step look-ahead rule: stopping at k beats stopping at the
    next candidate exactly on that set, and the set is up-closed.
    """
    if params.p != 1:
        raise InvalidParams(f"ola_threshold needs p = 1, got p={params.p}")
    ratio = params.ratio
    tails = harmonic_tails(params.n)
    slack = TIE_TOL * max(1.0, ratio)
    for k in range(1, params.n + 1):
        if tails[k] <= ratio + slack:
            return k
    return params.n  # unreachable: H_{n,n} = 0


def _duration(params: ProblemParams, threshold: int) -> DurationTable:
    stops = threshold_mask(params.n, threshold)
    _, _, _, m, passed = policy_outcomes(params, stops)
    return DurationTable(m=m, passed=passed, threshold=threshold, start_mean=float(m[0]))


def duration_certain(params: ProblemParams, threshold: int) -> DurationTable:
    """Expected finishing index of the rule "skip the first threshold-1 items".

    From a passed candidate at r >= threshold-1 the next candidate ends the
    process, so ``passed[r-1] = r H_{r,n} + r``.
    """
    if params.p != 1:
        raise InvalidParams(f"duration_certain needs p = 1, got p={params.p}")
    return _duration(params, threshold)


def duration_uncertain(params: ProblemParams, threshold: int) -> DurationTable:
    """As :func:`duration_certain`, with refusals sending the search onward.

    From a passed candidate at r >= threshold-1 the recursion is
    ``passed(r) = sum_j r/(j(j-1)) [p j + (1-p) passed(j)] + r``.
    """
    return _duration(params, threshold)
