import math
import random

import numpy as np
import pytest
from scipy.integrate import quad

from bestchoice import asymptotics as asy
from bestchoice.dp import solve
from bestchoice.model import InvalidParams, ProblemParams

TABLE1 = [
    (1.0, 0.0, 0.60653, 0.30327),
    (0.75, 0.25, 0.48954, 0.34967),
    (0.5, 0.5, 0.36788, 0.36788),
    (0.25, 0.75, 0.24660, 0.34524),
    (0.0, 1.0, 0.13534, 0.27067),
]


@pytest.mark.parametrize("beta,gamma,t_star,win", TABLE1)
def test_table1(beta, gamma, t_star, win):
    assert round(asy.threshold_certain(1, beta, gamma), 5) == t_star
    assert round(asy.win_prob_certain(1, beta, gamma), 5) == win


@pytest.mark.parametrize("beta0", [0.0, 0.1, 0.9, 3.0])
def test_equal_penalties_give_classic_threshold(beta0):
    assert asy.threshold_certain(1, beta0, beta0) == pytest.approx(math.exp(-1), abs=1e-15)


def test_value_certain_examples():
    assert asy.value_certain(1, 0, 0) == pytest.approx(math.exp(-1), abs=1e-15)
    assert asy.value_certain(1, 1, 0) == pytest.approx(2 * math.exp(-0.5) - 1, abs=1e-15)
    assert asy.value_certain(0.5, 0.5, 0.5) == pytest.approx(math.exp(-1) - 0.5, abs=1e-15)
    # alpha*P(win) - beta*P(wrong), with P(none) = t*
    t = asy.threshold_certain(1, 1, 0)
    w = asy.win_prob_certain(1, 1, 0)
    assert asy.value_certain(1, 1, 0) == pytest.approx(w - (1 - w - t), abs=1e-15)


def test_value_certain_matches_dp():
    sol = solve(ProblemParams(0.5, 0.5, 0.5, 10**5))
    assert abs(sol.start_value - asy.value_certain(0.5, 0.5, 0.5)) <= 1e-3


def test_win_prob_examples():
    assert asy.win_prob_certain(1, 0.75, 0.25) == pytest.approx(5 / 7 * math.exp(-5 / 7), abs=1e-15)
    assert asy.win_prob_certain(1, 0.25, 0.75) == pytest.approx(7 / 5 * math.exp(-7 / 5), abs=1e-15)


def test_win_prob_is_minus_t_log_t():
    rng = random.Random(11)
    for _ in range(100):
        a, b, g = rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(0, 2)
        t = asy.threshold_certain(a, b, g)
        assert abs(asy.win_prob_certain(a, b, g) + t * math.log(t)) <= 1e-12
        sol = asy.asymptotic_solution(a, b, g)
        assert abs(sol.win_prob + sol.t_star * math.log(sol.t_star)) <= 1e-12


def test_weights_validated():
    with pytest.raises(InvalidParams):
        asy.threshold_certain(0, 0, 1)
    with pytest.raises(InvalidParams):
        asy.value_certain(1, -0.1, 0)


# -- limiting continuation equation ---------------------------------------------

PARAM_SETS = [(1, 0.5, 0.25, 0.8), (1, 0, 0, 0.5), (0.4, 0.9, 0.3, 0.3), (2, 0.1, 1.5, 0.95)]


def v_rhs(t, alpha, beta, gamma, p):
    def integrand(s):
        v = asy.continuation_v(s, alpha, beta, gamma, p)
        return t / s ** 2 * (p * ((alpha + beta) * s - beta) + (1 - p) * (v - gamma * s))

    return quad(integrand, t, 1, epsabs=1e-13, epsrel=1e-13)[0]


def test_continuation_boundary():
    for params in PARAM_SETS:
        assert asy.continuation_v(1.0, *params) == pytest.approx(0, abs=1e-15)
    with pytest.raises(InvalidParams):
        asy.continuation_v(0.5, 1, 0, 0, 1.0)


def test_continuation_example_residual():
    t = 0.5
    assert abs(asy.continuation_v(t, 1, 0.5, 0.25, 0.8) - v_rhs(t, 1, 0.5, 0.25, 0.8)) <= 1e-6


@pytest.mark.parametrize("params", PARAM_SETS)
def test_continuation_integral_equation_grid(params):
    for t in np.linspace(0.02, 1.0, 50):
        assert abs(asy.continuation_v(t, *params) - v_rhs(t, *params)) <= 1e-6


@pytest.mark.parametrize("params", PARAM_SETS)
def test_continuation_slope_at_one(params):
    alpha, beta, gamma, p = params
    h = 1e-6
    slope = (asy.continuation_v(1.0, *params) - asy.continuation_v(1.0 - h, *params)) / h
    # d/dt of t * int_t^1 f(s)/s^2 ds at t = 1 is -f(1)
    assert abs(slope + (p * alpha - (1 - p) * gamma)) <= 1e-5


@pytest.mark.parametrize("params", PARAM_SETS)
def test_differential_form(params):
    alpha, beta, gamma, p = params
    h = 1e-5
    for t in np.linspace(0.05, 0.95, 19):
        deriv = (asy.continuation_v(t + h, *params) - asy.continuation_v(t - h, *params)) / (2 * h)
        v = asy.continuation_v(t, *params)
        rhs = p * v / t + p * beta / t - (p * (alpha + beta) - (1 - p) * gamma)
        assert abs(deriv - rhs) <= 1e-6


# -- thresholds with refusals ---------------------------------------------------

def test_threshold_uncertain_examples():
    assert asy.threshold_uncertain(1, 0.3, 0.3, 0.5) == pytest.approx(0.25, abs=1e-15)
    assert asy.threshold_uncertain(1, 0.7, 0.7, 0.95) == pytest.approx(0.95 ** 20, abs=1e-12)
    assert abs(asy.threshold_uncertain(1, 0.5, 0.5, 0.999) - math.exp(-1)) <= 5e-3
    assert asy.threshold_uncertain(1, 0.2, 0.7, 1.0) == asy.threshold_certain(1, 0.2, 0.7)


def test_threshold_uncertain_continuity():
    for a, b, g in [(1, 1, 0), (1, 0.25, 0.75), (0.3, 0.6, 0.1)]:
        assert abs(asy.threshold_uncertain(a, b, g, 1 - 1e-7) - asy.threshold_certain(a, b, g)) <= 1e-5


def test_threshold_uncertain_nonpositive_numerator():
    with pytest.raises(asy.NonpositiveNumeratorError) as info:
        asy.threshold_uncertain(0.1, 0.0, 1.0, 0.2)
    assert info.value.code == "NONPOSITIVE_NUMERATOR"
    # the finite problem is still solvable there
    sol = solve(ProblemParams(0.1, 0.0, 1.0, 200, 0.2))
    assert sol.threshold == 1


def test_equal_penalty_invariance():
    rng = random.Random(5)
    for p in (0.3, 0.6, 0.9):
        for _ in range(20):
            a, c = rng.uniform(0.01, 3), rng.uniform(0, 3)
            assert abs(asy.threshold_uncertain(a, c, c, p) - p ** (1 / (1 - p))) <= 1e-12


def test_threshold_solves_stop_equation():
    for alpha, beta, gamma, p in PARAM_SETS:
        t = asy.threshold_uncertain(alpha, beta, gamma, p)
        g = (alpha + beta) * t - beta
        assert abs(g - (asy.continuation_v(t, alpha, beta, gamma, p) - gamma * t)) <= 1e-12


def test_value_u_examples():
    for alpha, beta, gamma, p in PARAM_SETS:
        t_star = asy.threshold_uncertain(alpha, beta, gamma, p)
        assert asy.value_u_uncertain(1.0, alpha, beta, gamma, p) == pytest.approx(p * alpha - (1 - p) * gamma, abs=1e-12)
        at = asy.value_u_uncertain(t_star, alpha, beta, gamma, p)
        below = asy.value_u_uncertain(t_star * (1 - 1e-12), alpha, beta, gamma, p)
        assert at == pytest.approx((alpha + beta) * t_star - beta, abs=1e-12)
        assert below == pytest.approx(at, abs=1e-12)
        for t in np.linspace(t_star, 1, 7):
            reduced = (p * alpha + beta - (1 - p) * gamma) * t ** p - beta
            assert asy.value_u_uncertain(t, alpha, beta, gamma, p) == pytest.approx(reduced, abs=1e-12)


def test_value_u_matches_dp():
    assert asy.value_u_uncertain(0.25, 1, 0, 0, 0.5) == pytest.approx(0.25)
    sol = solve(ProblemParams(1, 0, 0, 10**5, 0.5))
    assert abs(sol.start_value - asy.value_u_uncertain(0.25, 1, 0, 0, 0.5)) <= 1e-3


@pytest.mark.parametrize("params", [(1, 0.5, 0.25, 0.8), (1, 0.2, 0.6, 0.6), (0.5, 1, 0, 0.4)])
def test_uncertain_limits_match_dp(params):
    alpha, beta, gamma, p = params
    n = 10**5
    sol = solve(ProblemParams(alpha, beta, gamma, n, p))
    lim = asy.asymptotic_solution(alpha, beta, gamma, p)
    assert abs(sol.threshold / n - lim.t_star) <= 2e-3
    assert abs(sol.start_value - lim.value_at_zero) <= 1e-3
    assert abs(sol.win_prob - lim.win_prob) <= 1e-3
    assert abs(sol.duration.start_mean / n - lim.duration_at_zero) <= 1e-3


def test_threshold_monotone_in_penalties():
    grid = np.linspace(0, 1, 9)
    for alpha in (0.5, 1.0):
        for beta in grid:
            for g1, g2 in zip(grid, grid[1:]):
                assert asy.threshold_certain(alpha, beta, g2) < asy.threshold_certain(alpha, beta, g1)
        for gamma in grid:
            for b1, b2 in zip(grid, grid[1:]):
                assert asy.threshold_certain(alpha, b2, gamma) > asy.threshold_certain(alpha, b1, gamma)


# -- durations --------------------------------------------------------------------

def test_duration_certain_examples():
    assert asy.duration_profile_certain(1.0, 0.3) == 1.0
    assert asy.duration_at_zero_certain(1, 0.4, 0.4) == pytest.approx(2 / math.e, abs=1e-12)
    assert asy.duration_at_zero_certain(1, 1, 0) == pytest.approx(1.5 * math.exp(-0.5), abs=1e-12)
    t_star = math.exp(-1)
    assert asy.duration_profile_certain(0.1, t_star) == asy.duration_profile_certain(t_star, t_star)


def test_duration_certain_matches_dp():
    sol = solve(ProblemParams(1, 1, 0, 10**5))
    assert abs(sol.duration.start_mean / 10**5 - asy.duration_at_zero_certain(1, 1, 0)) <= 1e-3


def test_duration_uncertain_examples():
    for p in (0.1, 0.5, 0.9):
        assert asy.duration_profile_uncertain(1.0, p, 0.2) == pytest.approx(1.0, abs=1e-15)
    assert abs(asy.duration_profile_uncertain(0.5, 0.999, 0.1) - asy.duration_profile_certain(0.5, 0.1)) <= 1e-3
    assert asy.duration_at_zero_uncertain(1, 0, 0, 0.5) == pytest.approx(0.75, abs=1e-15)
    with pytest.raises(InvalidParams):
        asy.duration_profile_uncertain(0.5, 1.0, 0.2)


@pytest.mark.parametrize("p", [0.2, 0.5, 0.8])
def test_duration_integral_equation(p):
    t_star = 0.05

    def m_hat(s):
        return asy.duration_profile_uncertain(s, p, t_star)

    for t in np.linspace(0.06, 1.0, 50):
        rhs = -p * t * math.log(t) + t + (1 - p) * quad(lambda s: t / s ** 2 * m_hat(s), t, 1, epsabs=1e-13, epsrel=1e-13)[0]
        assert abs(m_hat(t) - rhs) <= 1e-6
