"""Problem parameters and the candidate-arrival chain.

A *candidate* is an item that is the best among those seen so far. If the
current candidate sits at position ``r``, the next one arrives at position
``s > r`` with probability ``r / (s (s - 1))``; with the remaining
probability ``r / n`` no further candidate ever appears and the chain is
absorbed.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class InvalidParams(ValueError):
    """A parameter violates a model invariant."""


class Model(str, enum.Enum):
    CERTAIN = "certain"
    UNCERTAIN = "uncertain"


class OutcomeKind(str, enum.Enum):
    WIN = "win"
    WRONG = "wrong"
    NONE = "none"


class _Absorbing:
    """Marker for the absorbing state: no further candidate will appear."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ABSORBING"

    def __reduce__(self):
        return (_Absorbing, ())


ABSORBING = _Absorbing()


@dataclass(frozen=True)
class ProblemParams:
    """Payoff weights, horizon and acceptance probability.

    ``alpha`` is paid for picking the overall best, ``beta`` is charged for
    picking anything else and ``gamma`` for ending with no pick. A solicited
    candidate accepts with probability ``p``; ``p = 1`` is the classic
    setting where every offer is taken.
    """

    alpha: float
    beta: float
    gamma: float
    n: int
    p: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma", "p"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise InvalidParams(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise InvalidParams(f"{name} must be finite, got {value!r}")
        for name in ("alpha", "beta", "gamma"):
            if getattr(self, name) < 0:
                raise InvalidParams(f"{name} must be nonnegative, got {getattr(self, name)!r}")
        if self.alpha + self.beta <= 0:
            raise InvalidParams("alpha + beta must be positive")
        if isinstance(self.n, bool) or not isinstance(self.n, int):
            raise InvalidParams(f"n must be an integer, got {self.n!r}")
        if self.n < 1:
            raise InvalidParams(f"n must be at least 1, got {self.n}")
        if not 0 < self.p <= 1:
            raise InvalidParams(f"p must lie in (0, 1], got {self.p!r}")

    @property
    def certain(self) -> bool:
        return self.p == 1

    @property
    def model(self) -> Model:
        return Model.CERTAIN if self.certain else Model.UNCERTAIN

    @property
    def ratio(self) -> float:
        """(alpha + gamma) / (alpha + beta), the quantity every threshold depends on."""
        return (self.alpha + self.gamma) / (self.alpha + self.beta)

    def replace(self, **changes) -> "ProblemParams":
        fields = dict(alpha=self.alpha, beta=self.beta, gamma=self.gamma, n=self.n, p=self.p)
        fields.update(changes)
        return ProblemParams(**fields)


def harmonic_tail(k: int, n: int) -> float:
    """Sum of 1/j for j = k .. n-1, accumulated smallest term first."""
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    total = 0.0
    for j in range(n - 1, k - 1, -1):
        total += 1.0 / j
    return total


def harmonic_tails(n: int) -> list[float]:
    """All tails at once: entry ``k`` holds H_{k,n} for k = 1..n (index 0 unused, +inf)."""
    tails = [0.0] * (n + 1)
    total = 0.0
    for j in range(n - 1, 0, -1):
        total += 1.0 / j
        tails[j] = total
    tails[0] = math.inf
    return tails


def reward(state, params: ProblemParams) -> float:
    """Expected payoff of stopping on a candidate at ``state``.

    A candidate at position k is the overall best with probability k/n.
    """
    if state is ABSORBING:
        return -params.gamma
    k = int(state)
    if not 1 <= k <= params.n:
        raise ValueError(f"state {state!r} outside 1..{params.n}")
    return (params.alpha + params.beta) * k / params.n - params.beta


def transition_prob(r: int, s, n: int) -> float:
    if not 1 <= r <= n:
        raise ValueError(f"need 1 <= r <= n, got r={r}, n={n}")
    if s is ABSORBING:
        # summed smallest-first; telescopes to r / n
        row = 0.0
        for j in range(n, r, -1):
            row += r / (j * (j - 1))
        return 1.0 - row
    s = int(s)
    if r < s <= n:
        return r / (s * (s - 1))
    return 0.0
