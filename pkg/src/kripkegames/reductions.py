"""Structural transformations between game kinds.

* :func:`unify_strategy_sets` pads per-world strategy lists to one common
  list, penalizing absent strategies with ``-A``.
* :func:`kripke_to_min` splits every Kripke player into one player per
  knowledge class and builds a min-``|W|``-game whose payoffs reproduce the
  pessimistic Kripke payoffs.
* :func:`min_to_finite` adds a world-chooser opponent for every player,
  turning a min-game into an ordinary finite game.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

import numpy as np

from .core import (
    FiniteGame,
    GameError,
    KripkeGame,
    KripkePlay,
    MinGame,
    Play,
    block_key,
    validate,
)


@dataclass(frozen=True, eq=False)
class RawKripkeGame:
    """A Kripke game whose strategy lists may differ between worlds.

    ``strategies[p][w]`` is player ``p``'s list in world ``w`` and
    ``payoffs[p][w]`` is indexed by those per-world lists.
    """

    players: tuple
    worlds: tuple
    strategies: Mapping[str, Mapping[str, tuple]]
    partitions: Mapping[str, tuple]
    payoffs: Mapping[str, Mapping[str, np.ndarray]]


class PenaltyConstant(float):
    """A positive constant exceeding every payoff magnitude of its source game."""

    def __new__(cls, value):
        if not value > 0:
            raise ValueError(f"penalty constant must be positive, got {value!r}")
        return super().__new__(cls, value)

    @property
    def value(self) -> float:
        return float(self)


def _all_tensors(game):
    if isinstance(game, FiniteGame):
        return list(game.payoffs.values())
    if isinstance(game, MinGame):
        return [t for ts in game.payoffs.values() for t in ts]
    if isinstance(game, (KripkeGame, RawKripkeGame)):
        return [np.asarray(t, dtype=float) for per in game.payoffs.values() for t in per.values()]
    raise TypeError(f"not a game: {type(game).__name__}")


def penalty_constant(game: Union[FiniteGame, MinGame, KripkeGame, RawKripkeGame]) -> PenaltyConstant:
    """``A = 1 + max |payoff entry|`` over the whole game."""
    biggest = 0.0
    for t in _all_tensors(game):
        if t.size:
            biggest = max(biggest, float(np.abs(t).max()))
    return PenaltyConstant(1.0 + biggest)


def unify_strategy_sets(raw: RawKripkeGame) -> KripkeGame:
    """Give every player one strategy list shared by all worlds.

    The unified list is the first-appearance union over worlds (world order,
    then list order).  In world ``w`` a player who plays a strategy missing
    from her world-``w`` list receives ``-A``; the other players of such a
    profile receive 0, a value no play that avoids padded strategies sees.
    """
    for p in raw.players:
        for w in raw.worlds:
            if len(raw.strategies[p][w]) == 0:
                raise GameError(f"player {p!r} has no strategies in world {w!r}")
    penalty = penalty_constant(raw).value

    unified = {}
    for p in raw.players:
        merged: list = []
        for w in raw.worlds:
            for s in raw.strategies[p][w]:
                if s not in merged:
                    merged.append(s)
        unified[p] = merged
    shape = tuple(len(unified[p]) for p in raw.players)

    payoffs: dict = {p: {} for p in raw.players}
    for w in raw.worlds:
        # position of each unified strategy in the world-w list, or -1
        where = [
            np.array([raw.strategies[p][w].index(s) if s in raw.strategies[p][w] else -1
                      for s in unified[p]])
            for p in raw.players
        ]
        present = np.ones(shape, dtype=bool)
        for axis, pos in enumerate(where):
            view = [1] * len(shape)
            view[axis] = shape[axis]
            present = present & (pos >= 0).reshape(view)
        index = np.ix_(*[np.where(pos >= 0, pos, 0) for pos in where])
        for i, p in enumerate(raw.players):
            source = np.asarray(raw.payoffs[p][w], dtype=float)
            out = np.where(present, source[index], 0.0)
            view = [1] * len(shape)
            view[i] = shape[i]
            absent_own = np.broadcast_to((where[i] < 0).reshape(view), shape)
            out = np.where(absent_own, -penalty, out)
            payoffs[p][w] = out
    return KripkeGame(raw.players, unified, raw.worlds, raw.partitions, payoffs)


# --------------------------------------------------------- Kripke -> min-game


@dataclass(frozen=True, eq=False)
class KripkeToMinMap:
    """A class-split min-game and the bookkeeping back to the Kripke game.

    ``player_map[(p, block_key)]`` is the min-game player for that class;
    tensor ``j`` of every class-player belongs to world ``world_order[j]``.
    ``relevant[class_player][j]`` lists the class-players whose strategies the
    tensor actually depends on (empty for the constant ``+A`` tensors).
    """

    source: KripkeGame
    min_game: MinGame
    player_map: Mapping[tuple, str]
    world_order: tuple
    penalty: float
    relevant: Mapping[str, tuple]

    def owner(self, class_player: str) -> tuple:
        for key, name in self.player_map.items():
            if name == class_player:
                return key
        raise GameError(f"unknown class player {class_player!r}")


def class_player_name(player: str, block) -> str:
    return f"{player}@{{{block_key(block)}}}"


def kripke_to_min(game: KripkeGame) -> KripkeToMinMap:
    """Split each player into one player per knowledge class.

    Class-player ``[w]_p`` gets ``S_p``.  Its tensor for world ``v`` is
    ``u^v_p`` read at the coordinates ``([v]_q)_q`` when ``v`` lies in
    ``[w]_p``, and the constant ``+A`` otherwise.
    """
    problems = validate(game)
    if problems:
        raise GameError("; ".join(problems))
    penalty = penalty_constant(game).value

    names: list = []
    strategies: dict = {}
    player_map: dict = {}
    for p in game.players:
        for key, block in game.blocks(p):
            name = class_player_name(p, block)
            if name in strategies:
                raise GameError(f"class player name collision: {name!r}")
            names.append(name)
            strategies[name] = game.strategies[p]
            player_map[(p, key)] = name
    if set(names) & set(game.players):
        raise GameError("class player names collide with source player names")
    position = {name: i for i, name in enumerate(names)}
    shape = tuple(len(strategies[n]) for n in names)

    # world -> class-player position of each source player
    coords = {
        v: [position[player_map[(q, block_key(game.block_of(q, v)))]] for q in game.players]
        for v in game.worlds
    }

    payoffs: dict = {}
    relevant: dict = {}
    for p in game.players:
        for key, block in game.blocks(p):
            name = player_map[(p, key)]
            tensors, deps = [], []
            for v in game.worlds:
                if v in block:
                    axes = coords[v]
                    # class-players are numbered player-major, so axes increase
                    view = [1] * len(shape)
                    for target in axes:
                        view[target] = shape[target]
                    t = np.asarray(game.payoffs[p][v]).reshape(view)
                    tensors.append(np.broadcast_to(t, shape))
                    deps.append(tuple(names[a] for a in axes))
                else:
                    tensors.append(np.full(shape, penalty))
                    deps.append(())
            payoffs[name] = tensors
            relevant[name] = tuple(deps)

    min_game = MinGame(names, strategies, len(game.worlds), payoffs)
    return KripkeToMinMap(game, min_game, player_map, game.worlds, penalty, relevant)


def lift_play(mapping: KripkeToMinMap, play: Play) -> KripkePlay:
    """Read a min-game play as a behavioral Kripke play."""
    game = mapping.source
    for name in mapping.min_game.players:
        if name not in play.strategies:
            raise GameError(f"play has no strategy for class player {name!r}")
        if len(play[name]) != mapping.min_game.num_strategies(name):
            raise GameError(f"class player {name!r}: wrong strategy dimension")
    out: dict = {p: {} for p in game.players}
    for (p, key), name in mapping.player_map.items():
        out[p][key] = play[name]
    return KripkePlay(out)


def flatten_play(mapping: KripkeToMinMap, kplay: KripkePlay) -> Play:
    """Inverse of :func:`lift_play`."""
    out = {}
    for (p, key), name in mapping.player_map.items():
        try:
            strategy = kplay.strategies[p][key]
        except KeyError:
            raise GameError(f"Kripke play has no strategy for {p!r} on class {key!r}") from None
        if len(strategy) != mapping.source.num_strategies(p):
            raise GameError(f"player {p!r} class {key!r}: wrong strategy dimension")
        out[name] = strategy
    return Play(out)


# --------------------------------------------------- min-game -> finite game


@dataclass(frozen=True, eq=False)
class WorldChooserMap:
    source: MinGame
    finite_game: FiniteGame
    chooser_of: Mapping[str, str]


def chooser_name(player: str) -> str:
    return f"{player}^hat"


def min_to_finite(game: MinGame) -> WorldChooserMap:
    """Add a world-chooser opponent ``p^hat`` for every player ``p``.

    ``p^hat`` picks the component index (strategies ``"w0".."w{k-1}"``);
    ``p`` is paid by that component and ``p^hat`` receives the negation.
    """
    problems = validate(game)
    if problems:
        raise GameError("; ".join(problems))
    n = len(game.players)
    chooser_of = {p: chooser_name(p) for p in game.players}
    if set(chooser_of.values()) & set(game.players):
        raise GameError("world-chooser names collide with player names")
    labels = tuple(f"w{j}" for j in range(game.k))
    players = list(game.players) + [chooser_of[p] for p in game.players]
    strategies = dict(game.strategies)
    for p in game.players:
        strategies[chooser_of[p]] = labels
    base_shape = game.shape()
    shape = base_shape + (game.k,) * n

    payoffs = {}
    for i, p in enumerate(game.players):
        stacked = np.stack(game.payoffs[p], axis=-1)
        view = list(base_shape) + [1] * n
        view[n + i] = game.k
        full = np.broadcast_to(stacked.reshape(view), shape)
        payoffs[p] = full
        payoffs[chooser_of[p]] = -full
    return WorldChooserMap(game, FiniteGame(players, strategies, payoffs), chooser_of)


def lowered_play(mapping: WorldChooserMap, play: Play) -> Play:
    """Drop the world-choosers' strategies."""
    for name in mapping.finite_game.players:
        if name not in play.strategies:
            raise GameError(f"play has no strategy for player {name!r}")
        if len(play[name]) != mapping.finite_game.num_strategies(name):
            raise GameError(f"player {name!r}: wrong strategy dimension")
    return Play({p: play[p] for p in mapping.source.players})
