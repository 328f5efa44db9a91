"""Kripke games, min-games and their pessimistic equilibria."""

from .core import (
    FiniteGame,
    GameError,
    KripkeGame,
    KripkePlay,
    MinGame,
    MixedStrategy,
    Play,
    block_key,
    expected_payoff,
    kripke_payoff,
    kripke_payoff_table,
    kripke_worst_case,
    min_game_payoff,
    min_game_worst_case,
    specialize,
    validate,
)
from .equilibrium import (
    GapReport,
    SolveConfig,
    SolveResult,
    best_response,
    brute_force_gap_min,
    gap_report,
    solve,
    solve_kripke,
    solve_min_game,
    verify_equilibrium,
)
from .lp import LpSolution, solve_simplex_maxmin, solve_zero_sum
from .reductions import (
    KripkeToMinMap,
    PenaltyConstant,
    RawKripkeGame,
    WorldChooserMap,
    flatten_play,
    kripke_to_min,
    lift_play,
    lowered_play,
    min_to_finite,
    penalty_constant,
    unify_strategy_sets,
)

__version__ = "0.1.0"
