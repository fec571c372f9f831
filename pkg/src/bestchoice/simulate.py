"""Monte Carlo estimates for threshold rules.

Trial ``i`` draws from the Philox stream keyed by ``seed`` with counter
``(block, i)``, so a report depends only on ``(params, threshold, trials,
seed)`` and not on how trials are split across workers. Aggregation is done
on integer counts and sums, which makes the reduction exact.

Inside a trial the candidate chain is sampled directly: after a candidate at
``r`` the next candidate lands beyond ``s`` with probability ``r / s``, so
with ``u`` uniform on (0, 1] it sits at ``floor(r / u) + 1``. Round ``t``
consumes block ``t`` of the stream: its first uniform moves the chain, its
second decides whether the candidate reached accepts.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from bestchoice.model import OutcomeKind, ProblemParams
from bestchoice.rng import DOMAIN_RANKS, TrialStream, uniform_pair

CHUNK = 1 << 16  # keeps per-chunk sums of squared durations below 2**64 for n <= 1e7
THREADS_ENV = "BESTCHOICE_THREADS"


@dataclass(frozen=True)
class TrialOutcome:
    stopped_at: int | None
    outcome: OutcomeKind
    payoff: float
    duration: int
    proposals_made: int


@dataclass(frozen=True)
class SimReport:
    trials: int
    seed: int
    threshold: int
    n: int
    count_win: int
    count_wrong: int
    count_none: int
    mean_payoff: float
    se_payoff: float | None
    freq_win: float
    se_win: float | None
    freq_wrong: float
    se_wrong: float | None
    freq_none: float
    se_none: float | None
    mean_duration_fraction: float
    se_duration_fraction: float | None
    mean_proposals: float

    def to_dict(self):
        return asdict(self)


def draw_relative_ranks(n: int, seed: int, index=0) -> np.ndarray:
    """Independent relative ranks Y_1..Y_n with Y_k uniform on {1..k}.

    ``index`` may be an integer (returns shape ``(n,)``) or an array of trial
    indices (returns shape ``(len(index), n)``).
    """
    if n < 1:
        raise ValueError("n must be positive")
    idx = np.atleast_1d(np.asarray(index, dtype=np.uint64))
    blocks = np.arange((n + 1) // 2, dtype=np.uint64)
    u, v = uniform_pair(seed, idx[:, None], blocks[None, :], DOMAIN_RANKS)
    draws = np.stack([u, v], axis=2).reshape(len(idx), -1)[:, :n]
    k = np.arange(1, n + 1, dtype=np.float64)
    ranks = np.ceil(draws * k).astype(np.int64)
    np.clip(ranks, 1, np.arange(1, n + 1), out=ranks)
    return ranks[0] if np.ndim(index) == 0 else ranks


def best_position(ranks) -> int:
    """Position (1-based) of the overall best: the last k with Y_k = 1."""
    ranks = np.asarray(ranks)
    return int(np.flatnonzero(ranks == 1)[-1]) + 1


def _next_candidate(r, u, n):
    # positions beyond n collapse to n + 1, meaning "no further candidate"
    x = np.floor(r / u)
    return np.where(x >= n, n + 1, x + 1).astype(np.int64)


def _next_candidate_scalar(r, u, n):
    x = math.floor(r / u)
    return n + 1 if x >= n else x + 1


def _payoff(outcome, params):
    if outcome is OutcomeKind.WIN:
        return params.alpha
    if outcome is OutcomeKind.WRONG:
        return -params.beta
    return -params.gamma


def run_trial(threshold: int, params: ProblemParams, stream: TrialStream) -> TrialOutcome:
    """One run of "skip the first threshold-1 items, then solicit candidates"."""
    n, p = params.n, params.p
    if not 1 <= threshold <= n:
        raise ValueError(f"threshold must lie in 1..{n}")
    t = 0
    proposals = 0
    s = 1 if threshold == 1 else _next_candidate_scalar(threshold - 1, stream.uniform(0), n)
    while s <= n:
        proposals += 1
        if p == 1 or stream.uniform(2 * t + 1) <= p:
            last = _next_candidate_scalar(s, stream.uniform(2 * t + 2), n) > n
            kind = OutcomeKind.WIN if last else OutcomeKind.WRONG
            return TrialOutcome(s, kind, _payoff(kind, params), s, proposals)
        t += 1
        s = _next_candidate_scalar(s, stream.uniform(2 * t), n)
    return TrialOutcome(None, OutcomeKind.NONE, _payoff(OutcomeKind.NONE, params), n, proposals)


def _run_chunk(params: ProblemParams, threshold: int, seed: int, start: int, stop: int):
    n, p = params.n, params.p
    idx = np.arange(start, stop, dtype=np.uint64)
    size = len(idx)
    outcome = np.full(size, 2, dtype=np.int8)  # 0 win, 1 wrong, 2 none
    duration = np.full(size, n, dtype=np.int64)
    proposals = np.zeros(size, dtype=np.int64)

    jump, acc = uniform_pair(seed, idx, 0)
    if threshold == 1:
        pos = np.ones(size, dtype=np.int64)
    else:
        pos = _next_candidate(float(threshold - 1), jump, n)
    live = np.arange(size)
    t = 0
    while live.size:
        at = pos <= n
        live, pos, acc = live[at], pos[at], acc[at]
        if not live.size:
            break
        proposals[live] += 1
        jump, next_acc = uniform_pair(seed, idx[live], t + 1)
        nxt = _next_candidate(pos.astype(np.float64), jump, n)
        accepted = np.ones(live.size, dtype=bool) if p == 1 else acc <= p
        done = live[accepted]
        outcome[done] = np.where(nxt[accepted] > n, 0, 1)
        duration[done] = pos[accepted]
        keep = ~accepted
        live, pos, acc = live[keep], nxt[keep], next_acc[keep]
        t += 1

    counts = np.bincount(outcome, minlength=3)
    d = duration.astype(np.uint64)
    return (
        int(counts[0]),
        int(counts[1]),
        int(counts[2]),
        int(duration.sum()),
        int((d * d).sum()),
        int(proposals.sum()),
    )


def _workers(workers):
    if workers is None:
        workers = int(os.environ.get(THREADS_ENV, "1") or 1)
    return max(1, int(workers))


def _se_bernoulli(count, trials):
    if trials < 2:
        return None
    f = count / trials
    return math.sqrt(f * (1 - f) / (trials - 1))


def estimate(params: ProblemParams, threshold: int, trials: int, seed: int, workers: int | None = None) -> SimReport:
    """Aggregate ``trials`` independent runs of the threshold rule."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if not 1 <= threshold <= params.n:
        raise ValueError(f"threshold must lie in 1..{params.n}")
    seed = int(seed)
    spans = [(a, min(a + CHUNK, trials)) for a in range(0, trials, CHUNK)]
    workers = _workers(workers)
    if workers == 1 or len(spans) == 1:
        parts = [_run_chunk(params, threshold, seed, a, b) for a, b in spans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: _run_chunk(params, threshold, seed, *ab), spans))
    win, wrong, none, s1, s2, props = (sum(col) for col in zip(*parts))

    a, b, g = params.alpha, params.beta, params.gamma
    mean_payoff = (a * win - b * wrong - g * none) / trials
    n = params.n
    if trials > 1:
        second = (a * a * win + b * b * wrong + g * g * none) / trials
        var = max(second - mean_payoff ** 2, 0.0) * trials / (trials - 1)
        se_payoff = math.sqrt(var / trials)
        dur_var = (trials * s2 - s1 * s1) / (trials * (trials - 1))
        se_dur = math.sqrt(dur_var / trials) / n
    else:
        se_payoff = se_dur = None
    return SimReport(
        trials=trials,
        seed=seed,
        threshold=threshold,
        n=n,
        count_win=win,
        count_wrong=wrong,
        count_none=none,
        mean_payoff=mean_payoff,
        se_payoff=se_payoff,
        freq_win=win / trials,
        se_win=_se_bernoulli(win, trials),
        freq_wrong=wrong / trials,
        se_wrong=_se_bernoulli(wrong, trials),
        freq_none=none / trials,
        se_none=_se_bernoulli(none, trials),
        mean_duration_fraction=s1 / trials / n,
        se_duration_fraction=se_dur,
        mean_proposals=props / trials,
    )
