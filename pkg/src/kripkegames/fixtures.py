"""The concrete games worked through by hand in the source material."""

from __future__ import annotations

import numpy as np

from .core import FiniteGame, KripkeGame, KripkePlay, MinGame

ROW, COLUMN = "Row", "Column"

THREE_WORLD_MATRICES = {
    "1": [[-1.0, 1.0], [1.0, -1.0]],
    "2": [[2.0, 0.0], [0.0, 1.0]],
    "3": [[1.0, -1.0], [0.0, 2.0]],
}


def three_world_game() -> KripkeGame:
    """Three worlds; Row cannot tell 1 from 2, Column cannot tell 2 from 3.

    Row maximizes the world matrix, Column minimizes it (negated tensor).
    """
    strategies = {ROW: ("r1", "r2"), COLUMN: ("c1", "c2")}
    payoffs = {
        ROW: {w: np.array(m) for w, m in THREE_WORLD_MATRICES.items()},
        COLUMN: {w: -np.array(m) for w, m in THREE_WORLD_MATRICES.items()},
    }
    partitions = {ROW: [["1", "2"], ["3"]], COLUMN: [["1"], ["2", "3"]]}
    return KripkeGame((ROW, COLUMN), strategies, ("1", "2", "3"), partitions, payoffs)


def three_world_equilibrium() -> KripkePlay:
    return KripkePlay(
        {
            ROW: {"1,2": [0.5, 0.5], "3": [0.0, 1.0]},
            COLUMN: {"1": [0.5, 0.5], "2,3": [0.6, 0.4]},
        }
    )


MIN_GAME_MATRICES = ([[-1.0, 2.0], [1.0, -3.0]], [[2.0, -4.0], [0.0, 5.0]])


def two_matrix_min_game() -> MinGame:
    """Two parallel zero-sum games; Row maximizes, Column minimizes."""
    return MinGame(
        (ROW, COLUMN),
        {ROW: ("r1", "r2"), COLUMN: ("c1", "c2")},
        2,
        {
            ROW: [np.array(m) for m in MIN_GAME_MATRICES],
            COLUMN: [-np.array(m) for m in MIN_GAME_MATRICES],
        },
    )


def one_player_min_game() -> MinGame:
    """u1 = (1, 2), u2 = (3, 0); the best mixture is (1/2, 1/2) with value 3/2."""
    return MinGame(("p",), {"p": ("s1", "s2")}, 2, {"p": [np.array([1.0, 2.0]), np.array([3.0, 0.0])]})


def matching_pennies() -> FiniteGame:
    m = np.array(THREE_WORLD_MATRICES["1"])
    return FiniteGame((ROW, COLUMN), {ROW: ("r1", "r2"), COLUMN: ("c1", "c2")}, {ROW: m, COLUMN: -m})
