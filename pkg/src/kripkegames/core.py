"""Game representations and exact payoff evaluation.

Three game kinds share one tensor convention: a payoff tensor has one axis
per player, in declared player order, and axis ``i`` is indexed by the
strategy list of ``players[i]``.  Every player maximizes her own tensor;
a minimizing player in a zero-sum setting is encoded with the negated
tensor.

Kripke mixed strategies are stored in behavioral form, one mixed strategy
per knowledge class.  Any payoff ``E[u^v_p(X(v))]`` reads exactly one class
per player, so a distribution over class-to-strategy maps and the product
of its per-class marginals give the same payoff in every world.

Evaluation enumerates the full pure-profile product, costing ``prod |S_p|``
per tensor.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence, Union

import numpy as np

SUM_TOLERANCE = 1e-6
NEGATIVE_TOLERANCE = 1e-9


class GameError(ValueError):
    """Raised when a play or query does not fit the game it is used with."""


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.setflags(write=False)
    return out


class MixedStrategy:
    """A probability vector over one player's strategy list.

    Inputs whose sum is within 1e-6 of one are renormalized; larger
    deviations and negative entries are rejected.
    """

    __slots__ = ("probabilities",)

    def __init__(self, probabilities):
        p = np.array(probabilities, dtype=float).reshape(-1)
        if p.size == 0:
            raise GameError("mixed strategy must have at least one entry")
        if not np.all(np.isfinite(p)):
            raise GameError(f"mixed strategy has non-finite entries: {p.tolist()}")
        if np.any(p < -NEGATIVE_TOLERANCE):
            raise GameError(f"mixed strategy has negative entries: {p.tolist()}")
        p = np.clip(p, 0.0, None)
        total = p.sum()
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise GameError(f"mixed strategy sums to {total!r}, not 1")
        if total != 1.0:
            p = p / total
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    def __setattr__(self, name, value):
        raise AttributeError("MixedStrategy is immutable")

    @classmethod
    def pure(cls, n: int, index: int) -> "MixedStrategy":
        p = np.zeros(n)
        p[index] = 1.0
        return cls(p)

    @classmethod
    def uniform(cls, n: int) -> "MixedStrategy":
        return cls(np.full(n, 1.0 / n))

    def __len__(self):
        return self.probabilities.size

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.probabilities, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, MixedStrategy):
            return NotImplemented
        return np.array_equal(self.probabilities, other.probabilities)

    def __hash__(self):
        return hash(self.probabilities.tobytes())

    def __repr__(self):
        return f"MixedStrategy({self.probabilities.tolist()})"


def _as_mixed(value) -> MixedStrategy:
    return value if isinstance(value, MixedStrategy) else MixedStrategy(value)


@dataclass(frozen=True)
class Play:
    """An independent product of one mixed strategy per player."""

    strategies: Mapping[str, MixedStrategy]

    def __post_init__(self):
        object.__setattr__(
            self, "strategies", {p: _as_mixed(s) for p, s in self.strategies.items()}
        )

    def __getitem__(self, player: str) -> MixedStrategy:
        return self.strategies[player]

    def replace(self, player: str, strategy) -> "Play":
        """Return the play with ``player``'s mixed strategy swapped out."""
        new = dict(self.strategies)
        new[player] = _as_mixed(strategy)
        return Play(new)

    def vectors(self, players: Sequence[str]) -> list[np.ndarray]:
        return [self.strategies[p].probabilities for p in players]


@dataclass(frozen=True)
class KripkePlay:
    """Behavioral Kripke strategies: ``strategies[player][block_key]``."""

    strategies: Mapping[str, Mapping[str, MixedStrategy]]

    def __post_init__(self):
        object.__setattr__(
            self,
            "strategies",
            {
                p: {b: _as_mixed(s) for b, s in blocks.items()}
                for p, blocks in self.strategies.items()
            },
        )

    def __getitem__(self, player: str) -> Mapping[str, MixedStrategy]:
        return self.strategies[player]


def block_key(block: Sequence[str]) -> str:
    """Canonical name of a knowledge class: its sorted worlds, comma-joined."""
    return ",".join(sorted(block))


@dataclass(frozen=True, eq=False)
class _GameBase:
    players: tuple
    strategies: Mapping[str, tuple]

    def num_strategies(self, player: str) -> int:
        return len(self.strategies[player])

    def shape(self) -> tuple:
        return tuple(len(self.strategies.get(p, ())) for p in self.players)

    def index(self, player: str) -> int:
        try:
            return self.players.index(player)
        except ValueError:
            raise GameError(f"unknown player {player!r}") from None


def _init_base(obj, players, strategies):
    object.__setattr__(obj, "players", tuple(players))
    object.__setattr__(obj, "strategies", {p: tuple(s) for p, s in strategies.items()})


@dataclass(frozen=True, eq=False)
class FiniteGame(_GameBase):
    payoffs: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        _init_base(self, self.players, self.strategies)
        object.__setattr__(
            self, "payoffs", {p: _frozen(t) for p, t in self.payoffs.items()}
        )

    def as_min_game(self) -> "MinGame":
        return MinGame(
            self.players, self.strategies, 1, {p: [t] for p, t in self.payoffs.items()}
        )


@dataclass(frozen=True, eq=False)
class MinGame(_GameBase):
    k: int = 1
    payoffs: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        _init_base(self, self.players, self.strategies)
        object.__setattr__(
            self,
            "payoffs",
            {p: tuple(_frozen(t) for t in ts) for p, ts in self.payoffs.items()},
        )

    def component(self, j: int) -> FiniteGame:
        """The j-th parallel finite game (0-based)."""
        return FiniteGame(
            self.players, self.strategies, {p: ts[j] for p, ts in self.payoffs.items()}
        )


@dataclass(frozen=True, eq=False)
class KripkeGame(_GameBase):
    worlds: tuple = ()
    partitions: Mapping[str, tuple] = field(default_factory=dict)
    payoffs: Mapping[str, Mapping[str, np.ndarray]] = field(default_factory=dict)

    def __post_init__(self):
        _init_base(self, self.players, self.strategies)
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(
            self,
            "partitions",
            {
                p: tuple(tuple(block) for block in blocks)
                for p, blocks in self.partitions.items()
            },
        )
        object.__setattr__(
            self,
            "payoffs",
            {
                p: {w: _frozen(t) for w, t in per_world.items()}
                for p, per_world in self.payoffs.items()
            },
        )

    def blocks(self, player: str) -> list[tuple[str, tuple]]:
        """``(block_key, worlds)`` for each class of ``player``, in partition order."""
        return [(block_key(b), b) for b in self.partitions[player]]

    def block_of(self, player: str, world: str) -> tuple:
        for block in self.partitions[player]:
            if world in block:
                return block
        if world not in self.worlds:
            raise GameError(f"unknown world {world!r}")
        raise GameError(f"world {world!r} is in no class of player {player!r}")


Game = Union[FiniteGame, MinGame, KripkeGame]


# ---------------------------------------------------------------- validation


def _check_ids(kind, ids, path, out):
    for i, x in enumerate(ids):
        if not isinstance(x, str) or not x:
            out.append(f"{path}[{i}]: {kind} id must be a non-empty string, got {x!r}")
    seen = set()
    for x in ids:
        if x in seen:
            out.append(f"{path}: duplicate {kind} id {x!r}")
        seen.add(x)


def _check_tensor(tensor, shape, path, out):
    t = np.asarray(tensor)
    if t.shape != shape:
        out.append(f"{path}: expected shape {shape}, got {t.shape}")
        return
    if not np.all(np.isfinite(t)):
        out.append(f"{path}: payoff entries must be finite")


def _validate_base(game, out):
    _check_ids("player", game.players, "$.players", out)
    if not game.players:
        out.append("$.players: a game needs at least one player")
    for p in game.players:
        strategies = game.strategies.get(p)
        if strategies is None:
            out.append(f"$.strategies.{p}: missing strategy list")
            continue
        if len(strategies) == 0:
            out.append(f"$.strategies.{p}: player needs at least one strategy")
        _check_ids("strategy", strategies, f"$.strategies.{p}", out)
    for p in game.strategies:
        if p not in game.players:
            out.append(f"$.strategies.{p}: not a declared player")


def validate(game: Game) -> list[str]:
    """Return one message per violated invariant; empty when ``game`` is valid.

    Each message starts with a JSON-path-like locator of the offending field.
    """
    out: list[str] = []
    _validate_base(game, out)
    shape = game.shape()
    extra = [p for p in game.payoffs if p not in game.players]
    for p in extra:
        out.append(f"$.payoffs.{p}: not a declared player")

    if isinstance(game, FiniteGame):
        for p in game.players:
            if p not in game.payoffs:
                out.append(f"$.payoffs.{p}: missing payoff tensor")
            else:
                _check_tensor(game.payoffs[p], shape, f"$.payoffs.{p}", out)

    elif isinstance(game, MinGame):
        if not isinstance(game.k, (int, np.integer)) or game.k < 1:
            out.append(f"$.k: must be a positive integer, got {game.k!r}")
        for p in game.players:
            tensors = game.payoffs.get(p)
            if tensors is None:
                out.append(f"$.payoffs.{p}: missing payoff tensors")
                continue
            if len(tensors) != game.k:
                out.append(
                    f"$.payoffs.{p}: arity mismatch, expected k={game.k} tensors, "
                    f"got {len(tensors)}"
                )
            for j, t in enumerate(tensors):
                _check_tensor(t, shape, f"$.payoffs.{p}[{j}]", out)

    elif isinstance(game, KripkeGame):
        _check_ids("world", game.worlds, "$.worlds", out)
        if not game.worlds:
            out.append("$.worlds: a Kripke game needs at least one world")
        for w in game.worlds:
            if isinstance(w, str) and "," in w:
                out.append(f"$.worlds: world id {w!r} must not contain ','")
        world_set = set(game.worlds)
        for p in game.players:
            blocks = game.partitions.get(p)
            path = f"$.partitions.{p}"
            if blocks is None:
                out.append(f"{path}: missing partition")
            else:
                seen: dict = {}
                for i, block in enumerate(blocks):
                    if len(block) == 0:
                        out.append(f"{path}[{i}]: empty block")
                    for w in block:
                        if w not in world_set:
                            out.append(f"{path}[{i}]: unknown world {w!r}")
                        elif w in seen:
                            out.append(
                                f"{path}[{i}]: overlapping blocks, world {w!r} "
                                f"already in block {seen[w]}"
                            )
                        else:
                            seen[w] = i
                missing = [w for w in game.worlds if w not in seen]
                if missing:
                    out.append(f"{path}: blocks do not cover worlds {missing}")
            per_world = game.payoffs.get(p)
            if per_world is None:
                out.append(f"$.payoffs.{p}: missing payoff tensors")
                continue
            for w in game.worlds:
                if w not in per_world:
                    out.append(f"$.payoffs.{p}.{w}: missing payoff tensor")
                else:
                    _check_tensor(per_world[w], shape, f"$.payoffs.{p}.{w}", out)
            for w in per_world:
                if w not in world_set:
                    out.append(f"$.payoffs.{p}.{w}: unknown world")
        for p in game.partitions:
            if p not in game.players:
                out.append(f"$.partitions.{p}: not a declared player")
    else:
        raise TypeError(f"not a game: {type(game).__name__}")
    return out


# ------------------------------------------------------------------ payoffs


def contract(tensor: np.ndarray, vectors: Sequence[np.ndarray]) -> float:
    """Exact multilinear expectation of ``tensor`` under independent ``vectors``."""
    t = tensor
    for v in reversed(vectors):
        t = t @ v
    return float(t)


def contract_except(
    tensor: np.ndarray, vectors: Sequence[np.ndarray], axis: int
) -> np.ndarray:
    """Contract every axis except ``axis``: the payoff of each pure strategy there."""
    t = np.moveaxis(tensor, axis, 0)
    others = [v for i, v in enumerate(vectors) if i != axis]
    for v in reversed(others):
        t = t @ v
    return np.asarray(t, dtype=float)


def _check_play(game, play: Play):
    for p in game.players:
        if p not in play.strategies:
            raise GameError(f"play has no strategy for player {p!r}")
        n = len(play.strategies[p])
        if n != game.num_strategies(p):
            raise GameError(
                f"player {p!r} has {game.num_strategies(p)} strategies, "
                f"play gives {n} probabilities"
            )
    for p in play.strategies:
        if p not in game.players:
            raise GameError(f"play names unknown player {p!r}")


def expected_payoff(game: FiniteGame, play: Play, player: str) -> float:
    """``E[u_p(X)]`` for a play instance ``X`` with law ``play``."""
    _check_play(game, play)
    if player not in game.payoffs:
        raise GameError(f"unknown player {player!r}")
    return contract(game.payoffs[player], play.vectors(game.players))


class WorstCase(NamedTuple):
    value: float
    minimizers: tuple
    components: tuple


def min_game_worst_case(game: MinGame, play: Play, player: str) -> WorstCase:
    """Per-component expected payoffs, their minimum, and the minimizing indices."""
    _check_play(game, play)
    if player not in game.payoffs:
        raise GameError(f"unknown player {player!r}")
    vectors = play.vectors(game.players)
    values = tuple(contract(t, vectors) for t in game.payoffs[player])
    low = min(values)
    return WorstCase(low, tuple(j for j, v in enumerate(values) if v == low), values)


def min_game_payoff(game: MinGame, play: Play, player: str) -> float:
    """The worst of the player's k expected payoffs."""
    return min_game_worst_case(game, play, player).value


def _check_kripke_play(game: KripkeGame, kplay: KripkePlay):
    for p in game.players:
        if p not in kplay.strategies:
            raise GameError(f"Kripke play has no strategies for player {p!r}")
        given = kplay.strategies[p]
        keys = [k for k, _ in game.blocks(p)]
        if set(given) != set(keys):
            raise GameError(
                f"player {p!r}: expected one strategy per class {keys}, got {sorted(given)}"
            )
        for k in keys:
            if len(given[k]) != game.num_strategies(p):
                raise GameError(
                    f"player {p!r} class {k!r}: expected "
                    f"{game.num_strategies(p)} probabilities, got {len(given[k])}"
                )


def specialize(game: KripkeGame, kplay: KripkePlay, world: str) -> Play:
    """The play induced in ``world``: each player uses her strategy for its class."""
    if world not in game.worlds:
        raise GameError(f"unknown world {world!r}")
    _check_kripke_play(game, kplay)
    return Play(
        {p: kplay.strategies[p][block_key(game.block_of(p, world))] for p in game.players}
    )


def kripke_worst_case(
    game: KripkeGame, kplay: KripkePlay, player: str, world: str
) -> WorstCase:
    """Expected payoffs over the player's class of ``world`` and their minimum.

    ``components`` follows the order of worlds in the class; ``minimizers``
    names the worlds attaining the minimum.
    """
    if player not in game.players:
        raise GameError(f"unknown player {player!r}")
    block = game.block_of(player, world)
    values = []
    for v in block:
        play = specialize(game, kplay, v)
        values.append(contract(game.payoffs[player][v], play.vectors(game.players)))
    low = min(values)
    return WorstCase(
        low, tuple(v for v, x in zip(block, values) if x == low), tuple(values)
    )


def kripke_payoff(game: KripkeGame, kplay: KripkePlay, player: str, world: str) -> float:
    """Pessimistic payoff to ``player`` when the true world is ``world``."""
    return kripke_worst_case(game, kplay, player, world).value


def kripke_payoff_table(game: KripkeGame, kplay: KripkePlay) -> dict:
    """``{player: {world: payoff}}`` for every player and world."""
    return {
        p: {w: kripke_payoff(game, kplay, p, w) for w in game.worlds}
        for p in game.players
    }
