"""Large-horizon limits, with time measured as the fraction t = k / n."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from bestchoice.model import InvalidParams, Model


class NonpositiveNumeratorError(ValueError):
    """p*alpha + beta <= (1-p)*gamma: the closed form does not apply.

    In this regime stopping immediately is optimal in the limit; the finite
    horizon solver still handles such instances.
    """

    code = "NONPOSITIVE_NUMERATOR"


def _check_weights(alpha, beta, gamma):
    if min(alpha, beta, gamma) < 0:
        raise InvalidParams("payoff weights must be nonnegative")
    if alpha + beta <= 0:
        raise InvalidParams("alpha + beta must be positive")


def _check_p(p, allow_one=False):
    if not 0 < p <= 1 or (p == 1 and not allow_one):
        bound = "(0, 1]" if allow_one else "(0, 1)"
        raise InvalidParams(f"p must lie in {bound}, got {p!r}")


def _ratio(alpha, beta, gamma):
    _check_weights(alpha, beta, gamma)
    return (alpha + gamma) / (alpha + beta)


# -- every offer accepted ---------------------------------------------------

def threshold_certain(alpha, beta, gamma):
    return math.exp(-_ratio(alpha, beta, gamma))


def value_certain(alpha, beta, gamma):
    return (alpha + beta) * math.exp(-_ratio(alpha, beta, gamma)) - beta


def win_prob_certain(alpha, beta, gamma):
    r = _ratio(alpha, beta, gamma)
    return r * math.exp(-r)


def duration_profile_certain(t, t_star):
    """Limit of m(tn)/n for the threshold rule at t_star."""
    if not 0 < t <= 1 or not 0 < t_star <= 1:
        raise ValueError("t and t_star must lie in (0, 1]")
    s = max(t, t_star)
    return -s * math.log(s) + s


def duration_at_zero_certain(alpha, beta, gamma):
    r = _ratio(alpha, beta, gamma)
    return (1 + r) * math.exp(-r)


# -- offers refused with probability 1 - p ----------------------------------

def _numerator(alpha, beta, gamma, p):
    return p * alpha + beta - (1 - p) * gamma


def continuation_v(t, alpha, beta, gamma, p):
    """Solution of the limiting continuation equation with v(1) = 0.

    v(t) - gamma*t is the limiting value of passing a candidate at time t
    when every later candidate is solicited.
    """
    _check_weights(alpha, beta, gamma)
    _check_p(p)
    if not 0 < t <= 1:
        raise ValueError("t must lie in (0, 1]")
    k = _numerator(alpha, beta, gamma, p) / (1 - p)
    return k * (t ** p - t) + beta * t - beta


def threshold_uncertain(alpha, beta, gamma, p):
    _check_weights(alpha, beta, gamma)
    _check_p(p, allow_one=True)
    if p == 1:
        return threshold_certain(alpha, beta, gamma)
    num = _numerator(alpha, beta, gamma, p)
    if num <= 0:
        raise NonpositiveNumeratorError(
            f"p*alpha + beta - (1-p)*gamma = {num!r} <= 0; stop-immediately regime, closed form inapplicable"
        )
    return (num / (alpha + beta)) ** (1 / (1 - p))


def value_u_uncertain(t, alpha, beta, gamma, p):
    """Limiting optimal value at time t.

    Above the threshold it is the value of soliciting the candidate,
    ``p g(t) + (1-p)(v(t) - gamma t)``, which reduces to
    ``(p alpha + beta - (1-p) gamma) t^p - beta``; below it the value is
    frozen at ``g(t_star)``.
    """
    t_star = threshold_uncertain(alpha, beta, gamma, p)
    if not 0 < t <= 1:
        raise ValueError("t must lie in (0, 1]")
    if t < t_star:
        return (alpha + beta) * t_star - beta
    g = (alpha + beta) * t - beta
    if p == 1:
        return g
    return p * g + (1 - p) * (continuation_v(t, alpha, beta, gamma, p) - gamma * t)


def value_uncertain(alpha, beta, gamma, p):
    if p == 1:
        return value_certain(alpha, beta, gamma)
    return (alpha + beta) * threshold_uncertain(alpha, beta, gamma, p) - beta


def win_prob_profile_uncertain(t, p, t_star):
    """Limiting chance of ending with the overall best from time t.

    Solves w' = p w / t - p with w(1) = 0, frozen below t_star.
    """
    _check_p(p)
    s = max(t, t_star)
    return p * (s ** p - s) / (1 - p)


def win_prob_uncertain(alpha, beta, gamma, p):
    t_star = threshold_uncertain(alpha, beta, gamma, p)
    if p == 1:
        return -t_star * math.log(t_star)
    return win_prob_profile_uncertain(t_star, p, t_star)


def duration_profile_uncertain(t, p, t_star):
    if not 0 < t <= 1 or not 0 < t_star <= 1:
        raise ValueError("t and t_star must lie in (0, 1]")
    _check_p(p)
    s = max(t, t_star)
    return (s ** p - p * s) / (1 - p)


def duration_at_zero_uncertain(alpha, beta, gamma, p):
    t_star = threshold_uncertain(alpha, beta, gamma, p)
    if p == 1:
        return duration_profile_certain(t_star, t_star)
    return duration_profile_uncertain(t_star, p, t_star)


@dataclass(frozen=True)
class AsymptoticSolution:
    t_star: float
    value_at_zero: float
    win_prob: float
    duration_at_zero: float
    model: Model

    def to_dict(self):
        out = asdict(self)
        out["model"] = self.model.value
        return out


def asymptotic_solution(alpha, beta, gamma, p=1.0) -> AsymptoticSolution:
    if p == 1:
        t_star = threshold_certain(alpha, beta, gamma)
        return AsymptoticSolution(
            t_star=t_star,
            value_at_zero=value_certain(alpha, beta, gamma),
            win_prob=win_prob_certain(alpha, beta, gamma),
            duration_at_zero=duration_at_zero_certain(alpha, beta, gamma),
            model=Model.CERTAIN,
        )
    t_star = threshold_uncertain(alpha, beta, gamma, p)
    return AsymptoticSolution(
        t_star=t_star,
        value_at_zero=(alpha + beta) * t_star - beta,
        win_prob=win_prob_profile_uncertain(t_star, p, t_star),
        duration_at_zero=duration_profile_uncertain(t_star, p, t_star),
        model=Model.UNCERTAIN,
    )
