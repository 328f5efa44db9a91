"""Canonical JSON documents for games, plays and solver results.

Game documents::

    {"format_version": 1, "kind": "finite" | "min" | "kripke",
     "players": [...], "strategies": {p: [...]},
     "k": int,                                   # min only
     "worlds": [...], "partitions": {p: [[w, ...], ...]},   # kripke only
     "zero_sum": bool,                           # optional, two players
     "payoffs": {p: tensor}                      # finite
                {p: [tensor_1, ..., tensor_k]}   # min
                {p: {world: tensor}}}            # kripke

Tensors are nested arrays whose outermost axis is the first player.  With
``"zero_sum": true`` only the first player's payoffs are written; the
second player's are their negation.

Plays are ``{"kind": "play", "strategies": {p: [prob, ...]}}`` or, for Kripke
games, ``{"kind": "kripke_play", "strategies": {p: {block_key: [...]}}}``
where ``block_key`` is the comma-joined sorted list of worlds of the class.

Output is canonical: keys in the fixed order above, players and worlds in
declared order, floats printed as their shortest round-trip decimal.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Optional, Union

import numpy as np

from .core import (
    FiniteGame,
    GameError,
    KripkeGame,
    KripkePlay,
    MinGame,
    MixedStrategy,
    Play,
    validate,
)

FORMAT_VERSION = 1
GAME_KINDS = ("finite", "min", "kripke")


class FormatError(ValueError):
    """A document could not be parsed; ``path`` locates the offending element."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
        self.message = message


@dataclass(frozen=True, eq=False)
class GameDocument:
    kind: str
    body: Union[FiniteGame, MinGame, KripkeGame]
    format_version: int = FORMAT_VERSION
    zero_sum: bool = False


def document_for(game, zero_sum: bool = False) -> GameDocument:
    if isinstance(game, KripkeGame):
        kind = "kripke"
    elif isinstance(game, MinGame):
        kind = "min"
    elif isinstance(game, FiniteGame):
        kind = "finite"
    else:
        raise TypeError(f"not a game: {type(game).__name__}")
    return GameDocument(kind, game, FORMAT_VERSION, zero_sum)


# ------------------------------------------------------------------ writing


def _number(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite number {x!r}")
    if x.is_integer() and abs(x) < 2**53 and not (x == 0 and math.copysign(1, x) < 0):
        return str(int(x))
    return repr(x)


def _is_inline(value) -> bool:
    if isinstance(value, (list, tuple)):
        return all(_is_inline(v) for v in value)
    return not isinstance(value, dict)


def _dump(value, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f'{pad}  {json.dumps(str(k))}: {_dump(v, indent + 1)}' for k, v in value.items()
        ]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(value, (list, tuple)):
        if _is_inline(value):
            return "[" + ", ".join(_dump(v, indent) for v in value) + "]"
        items = [f"{pad}  {_dump(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return _number(value)
    return json.dumps(value)


def dumps(obj) -> str:
    """Canonical text of a plain JSON-able object."""
    return _dump(obj) + "\n"


def _tensor_list(t) -> list:
    return np.asarray(t, dtype=float).tolist()


def game_to_json(doc: GameDocument) -> dict:
    game = doc.body
    players = list(game.players)
    out: dict[str, Any] = {
        "format_version": doc.format_version,
        "kind": doc.kind,
        "players": players,
        "strategies": {p: list(game.strategies[p]) for p in players},
    }
    if doc.kind == "min":
        out["k"] = int(game.k)
    if doc.kind == "kripke":
        out["worlds"] = list(game.worlds)
        out["partitions"] = {p: [list(b) for b in game.partitions[p]] for p in players}
    written = players
    if doc.zero_sum:
        if not _is_zero_sum(doc):
            raise ValueError("zero_sum documents need a second player with negated payoffs")
        out["zero_sum"] = True
        written = players[:1]
    if doc.kind == "finite":
        out["payoffs"] = {p: _tensor_list(game.payoffs[p]) for p in written}
    elif doc.kind == "min":
        out["payoffs"] = {p: [_tensor_list(t) for t in game.payoffs[p]] for p in written}
    else:
        out["payoffs"] = {
            p: {w: _tensor_list(game.payoffs[p][w]) for w in game.worlds} for p in written
        }
    return out


def _is_zero_sum(doc: GameDocument) -> bool:
    game = doc.body
    if len(game.players) != 2:
        return False
    a, b = game.players
    if doc.kind == "finite":
        pairs = [(game.payoffs[a], game.payoffs[b])]
    elif doc.kind == "min":
        pairs = list(zip(game.payoffs[a], game.payoffs[b]))
    else:
        pairs = [(game.payoffs[a][w], game.payoffs[b][w]) for w in game.worlds]
    return all(_same_tensor(-x, y) for x, y in pairs)


def serialize_game(doc: GameDocument) -> str:
    return dumps(game_to_json(doc))


def play_to_json(play: Union[Play, KripkePlay]) -> dict:
    if isinstance(play, KripkePlay):
        return {
            "kind": "kripke_play",
            "strategies": {
                p: {b: s.probabilities.tolist() for b, s in blocks.items()}
                for p, blocks in play.strategies.items()
            },
        }
    return {
        "kind": "play",
        "strategies": {p: s.probabilities.tolist() for p, s in play.strategies.items()},
    }


def serialize_play(play: Union[Play, KripkePlay]) -> str:
    return dumps(play_to_json(play))


def report_to_json(report) -> dict:
    return {
        "max_gap": report.max_gap,
        "per_player_gap": dict(report.per_player_gap),
        "payoffs": dict(report.payoffs),
        "best_responses": {p: s.probabilities.tolist() for p, s in report.best_responses.items()},
    }


def result_to_json(result) -> dict:
    out = {
        "format_version": FORMAT_VERSION,
        "kind": "solve_result",
        "method": result.method,
        "converged": result.converged,
        "polished": result.polished,
        "iterations_used": result.iterations_used,
        "restarts_used": result.restarts_used,
        "play": play_to_json(result.play),
        "report": report_to_json(result.report),
    }
    if result.kripke_payoffs is not None:
        out["kripke_payoffs"] = {p: dict(v) for p, v in result.kripke_payoffs.items()}
    return out


def serialize_result(result) -> str:
    return dumps(result_to_json(result))


# ------------------------------------------------------------------ reading


def _reject_constant(name):
    raise ValueError(f"non-finite number {name} is not allowed")


def _load(text: str):
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def _require(obj: dict, key: str, kind, path: str):
    if key not in obj:
        raise FormatError(f"missing field {key!r}", path)
    value = obj[key]
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise FormatError(f"expected {_kind_name(kind)}", f"{path}.{key}")
    return value


def _kind_name(kind) -> str:
    names = {dict: "an object", list: "an array", str: "a string", int: "an integer", bool: "a boolean"}
    return names.get(kind, getattr(kind, "__name__", str(kind)))


def _strings(value, path: str) -> list:
    if not isinstance(value, list):
        raise FormatError("expected an array of strings", path)
    for i, x in enumerate(value):
        if not isinstance(x, str):
            raise FormatError("expected a string", f"{path}[{i}]")
    return value


def _check_numbers(value, path: str):
    if isinstance(value, list):
        for i, v in enumerate(value):
            _check_numbers(v, f"{path}[{i}]")
    elif isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(f"expected a number, got {json.dumps(value)}", path)
    elif not math.isfinite(value):
        raise FormatError("non-finite number", path)


def _tensor(value, path: str) -> np.ndarray:
    _check_numbers(value, path)
    try:
        return np.array(value, dtype=float)
    except ValueError:
        raise FormatError("ragged nested array", path) from None


def _vector(value, path: str) -> np.ndarray:
    t = _tensor(value, path)
    if t.ndim != 1:
        raise FormatError("expected a flat array of probabilities", path)
    return t


def game_from_json(obj) -> GameDocument:
    if not isinstance(obj, dict):
        raise FormatError("expected an object")
    version = _require(obj, "format_version", int, "$")
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format_version {version}", "$.format_version")
    kind = _require(obj, "kind", str, "$")
    if kind not in GAME_KINDS:
        raise FormatError(f"unknown kind {kind!r}", "$.kind")
    players = _strings(_require(obj, "players", list, "$"), "$.players")
    strategies_raw = _require(obj, "strategies", dict, "$")
    strategies = {p: _strings(s, f"$.strategies.{p}") for p, s in strategies_raw.items()}
    zero_sum = obj.get("zero_sum", False)
    if not isinstance(zero_sum, bool):
        raise FormatError("expected a boolean", "$.zero_sum")
    payoffs_raw = _require(obj, "payoffs", dict, "$")
    written = list(players)
    if zero_sum:
        if len(players) != 2:
            raise FormatError("zero_sum requires exactly two players", "$.zero_sum")
        written = players[:1]
        if players[1] in payoffs_raw:
            raise FormatError(
                "zero_sum documents give only the first player's payoffs",
                f"$.payoffs.{players[1]}",
            )
    for p in payoffs_raw:
        if p not in written:
            raise FormatError("not a declared player" if p not in players else "unexpected payoffs",
                              f"$.payoffs.{p}")
    for p in written:
        if p not in payoffs_raw:
            raise FormatError("missing payoff entry", f"$.payoffs.{p}")

    if kind == "finite":
        payoffs = {p: _tensor(payoffs_raw[p], f"$.payoffs.{p}") for p in written}
        if zero_sum:
            payoffs[players[1]] = -payoffs[players[0]]
        game = FiniteGame(players, strategies, payoffs)
    elif kind == "min":
        k = _require(obj, "k", int, "$")
        payoffs = {}
        for p in written:
            ts = payoffs_raw[p]
            if not isinstance(ts, list):
                raise FormatError("expected an array of k tensors", f"$.payoffs.{p}")
            payoffs[p] = [_tensor(t, f"$.payoffs.{p}[{j}]") for j, t in enumerate(ts)]
        if zero_sum:
            payoffs[players[1]] = [-t for t in payoffs[players[0]]]
        game = MinGame(players, strategies, k, payoffs)
    else:
        worlds = _strings(_require(obj, "worlds", list, "$"), "$.worlds")
        partitions_raw = _require(obj, "partitions", dict, "$")
        partitions = {}
        for p, blocks in partitions_raw.items():
            if not isinstance(blocks, list):
                raise FormatError("expected an array of blocks", f"$.partitions.{p}")
            partitions[p] = [_strings(b, f"$.partitions.{p}[{i}]") for i, b in enumerate(blocks)]
        payoffs = {}
        for p in written:
            per_world = payoffs_raw[p]
            if not isinstance(per_world, dict):
                raise FormatError("expected an object keyed by world", f"$.payoffs.{p}")
            payoffs[p] = {w: _tensor(t, f"$.payoffs.{p}.{w}") for w, t in per_world.items()}
        if zero_sum:
            payoffs[players[1]] = {w: -t for w, t in payoffs[players[0]].items()}
        game = KripkeGame(players, strategies, worlds, partitions, payoffs)

    problems = validate(game)
    if problems:
        raise FormatError("; ".join(problems), "")
    return GameDocument(kind, game, version, zero_sum)


def parse_game(text: str) -> GameDocument:
    return game_from_json(_load(text))


def play_from_json(obj, game=None) -> Union[Play, KripkePlay]:
    """Read a play document; with ``game`` given, its shape is checked too."""
    if not isinstance(obj, dict):
        raise FormatError("expected an object")
    kind = _require(obj, "kind", str, "$")
    raw = _require(obj, "strategies", dict, "$")
    try:
        if kind == "play":
            play = Play({p: _vector(v, f"$.strategies.{p}") for p, v in raw.items()})
        elif kind == "kripke_play":
            blocks = {}
            for p, per_block in raw.items():
                if not isinstance(per_block, dict):
                    raise FormatError("expected an object keyed by class", f"$.strategies.{p}")
                blocks[p] = {
                    b: _vector(v, f"$.strategies.{p}.{b}") for b, v in per_block.items()
                }
            play = KripkePlay(blocks)
        else:
            raise FormatError(f"unknown play kind {kind!r}", "$.kind")
    except GameError as exc:
        raise FormatError(str(exc), "$.strategies") from None
    if game is not None:
        _check_play_fits(play, game)
    return play


def _check_play_fits(play, game):
    from .core import _check_kripke_play, _check_play

    try:
        if isinstance(game, KripkeGame):
            if not isinstance(play, KripkePlay):
                raise FormatError("a Kripke game needs a kripke_play document", "$.kind")
            _check_kripke_play(game, play)
        else:
            if not isinstance(play, Play):
                raise FormatError("this game needs a play document", "$.kind")
            _check_play(game, play)
    except GameError as exc:
        raise FormatError(str(exc), "$.strategies") from None


def parse_play(text: str, game=None) -> Union[Play, KripkePlay]:
    return play_from_json(_load(text), game)


def result_from_json(obj):
    from .equilibrium import GapReport, SolveResult

    if not isinstance(obj, dict) or obj.get("kind") != "solve_result":
        raise FormatError("expected a solve_result document", "$.kind")
    rep = _require(obj, "report", dict, "$")
    report = GapReport(
        {p: float(v) for p, v in _require(rep, "per_player_gap", dict, "$.report").items()},
        float(rep["max_gap"]),
        {p: MixedStrategy(v) for p, v in _require(rep, "best_responses", dict, "$.report").items()},
        {p: float(v) for p, v in rep.get("payoffs", {}).items()},
    )
    kripke_payoffs: Optional[dict] = obj.get("kripke_payoffs")
    return SolveResult(
        play_from_json(_require(obj, "play", dict, "$")),
        report,
        _require(obj, "converged", bool, "$"),
        _require(obj, "iterations_used", int, "$"),
        _require(obj, "restarts_used", int, "$"),
        _require(obj, "method", str, "$"),
        bool(obj.get("polished", False)),
        kripke_payoffs,
    )


def parse_result(text: str):
    return result_from_json(_load(text))


# ---------------------------------------------------------------- equality


def _same_tensor(a, b) -> bool:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return a.shape == b.shape and a.tobytes() == b.tobytes()


def games_equal(a, b) -> bool:
    """Structural equality with bit-exact payoffs."""
    if type(a) is not type(b):
        return False
    if tuple(a.players) != tuple(b.players) or dict(a.strategies) != dict(b.strategies):
        return False
    if isinstance(a, FiniteGame):
        return all(_same_tensor(a.payoffs[p], b.payoffs[p]) for p in a.players)
    if isinstance(a, MinGame):
        return a.k == b.k and all(
            len(a.payoffs[p]) == len(b.payoffs[p])
            and all(_same_tensor(x, y) for x, y in zip(a.payoffs[p], b.payoffs[p]))
            for p in a.players
        )
    return (
        a.worlds == b.worlds
        and dict(a.partitions) == dict(b.partitions)
        and all(_same_tensor(a.payoffs[p][w], b.payoffs[p][w]) for p in a.players for w in a.worlds)
    )


def documents_equal(a: GameDocument, b: GameDocument) -> bool:
    return (
        a.kind == b.kind
        and a.format_version == b.format_version
        and a.zero_sum == b.zero_sum
        and games_equal(a.body, b.body)
    )
