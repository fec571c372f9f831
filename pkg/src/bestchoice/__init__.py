"""Best-choice (secretary) problem with asymmetric payoffs and refusals.

Exact finite-horizon solutions, large-horizon limits, expected decision
durations, a Monte Carlo engine, and a brute-force permutation oracle.
"""

from bestchoice.model import (
    ABSORBING,
    InvalidParams,
    Model,
    OutcomeKind,
    ProblemParams,
    harmonic_tail,
    reward,
    transition_prob,
)
from bestchoice.dp import (
    DpSolution,
    DurationTable,
    duration_certain,
    duration_uncertain,
    ola_threshold,
    solve,
    solve_certain,
    solve_uncertain,
)
from bestchoice.asymptotics import AsymptoticSolution, NonpositiveNumeratorError, asymptotic_solution
from bestchoice.simulate import SimReport, TrialOutcome, estimate, run_trial

__version__ = "0.1.0"

__all__ = [
    "ABSORBING",
    "AsymptoticSolution",
    "DpSolution",
    "DurationTable",
    "InvalidParams",
    "Model",
    "NonpositiveNumeratorError",
    "OutcomeKind",
    "ProblemParams",
    "SimReport",
    "TrialOutcome",
    "asymptotic_solution",
    "duration_certain",
    "duration_uncertain",
    "estimate",
    "harmonic_tail",
    "ola_threshold",
    "reward",
    "run_trial",
    "solve",
    "solve_certain",
    "solve_uncertain",
    "transition_prob",
]
