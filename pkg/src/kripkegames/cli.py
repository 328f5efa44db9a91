"""Command-line entry point.

Exit codes: 0 success, 1 parse or validation error, 2 usage error,
3 solver finished without converging, 4 play rejected by ``verify``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import fixtures
from .core import GameError, KripkeGame, MinGame, kripke_worst_case, min_game_worst_case
from .equilibrium import SolveConfig, best_response, solve, verify_equilibrium
from .io import (
    FormatError,
    document_for,
    dumps,
    game_to_json,
    parse_game,
    parse_play,
    play_to_json,
    report_to_json,
    result_to_json,
    serialize_game,
    serialize_play,
    serialize_result,
)
from .reductions import flatten_play, kripke_to_min, min_to_finite

EXIT_OK, EXIT_INPUT, EXIT_USAGE, EXIT_NOT_CONVERGED, EXIT_REJECTED = 0, 1, 2, 3, 4

EXAMPLES = {
    "section2": lambda: serialize_game(document_for(fixtures.three_world_game(), zero_sum=True)),
    "three-world-equilibrium": lambda: serialize_play(fixtures.three_world_equilibrium()),
    "mingame-sec4": lambda: serialize_game(document_for(fixtures.two_matrix_min_game(), zero_sum=True)),
    "one-player-remark": lambda: serialize_game(document_for(fixtures.one_player_min_game())),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kripkegames", description="Solve and verify Kripke games and min-games.")
    parser.add_argument("--json", action="store_true", help="print JSON documents on stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("payoff", help="evaluate payoffs of a play")
    p.add_argument("--game", required=True)
    p.add_argument("--play", required=True)
    p.add_argument("--player")
    p.add_argument("--world")

    p = sub.add_parser("best-response", help="LP best response of one player")
    p.add_argument("--game", required=True)
    p.add_argument("--play", required=True)
    p.add_argument("--player", required=True)

    p = sub.add_parser("reduce", help="Kripke -> min-game or min-game -> finite game")
    p.add_argument("--game", required=True)
    p.add_argument("--to", required=True, choices=["min", "finite"])
    p.add_argument("--out")

    p = sub.add_parser("solve", help="search for an equilibrium")
    p.add_argument("--game", required=True)
    p.add_argument("--epsilon", type=float, default=SolveConfig.epsilon_target)
    p.add_argument("--seed", type=int, default=SolveConfig.seed)
    p.add_argument("--restarts", type=int, default=SolveConfig.restarts)
    p.add_argument("--out")

    p = sub.add_parser("verify", help="check a play against an epsilon")
    p.add_argument("--game", required=True)
    p.add_argument("--play", required=True)
    p.add_argument("--epsilon", required=True, type=float)

    p = sub.add_parser("example", help="write one of the built-in games")
    p.add_argument("--name", required=True, choices=sorted(EXAMPLES))
    p.add_argument("--out")
    return parser


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}", "") from None


def _load_game(path):
    return parse_game(_read(path))


def _table(rows, header) -> str:
    rows = [[str(c) for c in r] for r in rows]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows]
    return "\n".join(lines)


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def _report_text(report) -> str:
    rows = [
        [p, _fmt(report.payoffs.get(p, float("nan"))), _fmt(g),
         " ".join(_fmt(v) for v in report.best_responses[p].probabilities)]
        for p, g in report.per_player_gap.items()
    ]
    return _table(rows, ["player", "payoff", "gap", "best response"]) + f"\nmax gap: {_fmt(report.max_gap)}"


def _cmd_payoff(args, out):
    doc = _load_game(args.game)
    game = doc.body
    play = parse_play(_read(args.play), game)
    players = [args.player] if args.player else list(game.players)
    for p in players:
        if p not in game.players:
            raise UsageError(f"unknown player {p!r}")
    if isinstance(game, KripkeGame):
        worlds = [args.world] if args.world else list(game.worlds)
        for w in worlds:
            if w not in game.worlds:
                raise UsageError(f"unknown world {w!r}")
        values = {p: {w: kripke_worst_case(game, play, p, w) for w in worlds} for p in players}
        if args.json:
            out(dumps({"kind": "payoffs", "payoffs": {
                p: {w: wc.value for w, wc in per.items()} for p, per in values.items()}}))
        else:
            rows = [[p, w, _fmt(wc.value), ",".join(wc.minimizers)]
                    for p, per in values.items() for w, wc in per.items()]
            out(_table(rows, ["player", "world", "payoff", "worst worlds"]) + "\n")
        return EXIT_OK
    if args.world:
        raise UsageError("--world only applies to Kripke games")
    mgame = game if isinstance(game, MinGame) else game.as_min_game()
    values = {p: min_game_worst_case(mgame, play, p) for p in players}
    if args.json:
        out(dumps({"kind": "payoffs", "payoffs": {p: wc.value for p, wc in values.items()}}))
    else:
        rows = [[p, _fmt(wc.value), " ".join(_fmt(c) for c in wc.components)] for p, wc in values.items()]
        out(_table(rows, ["player", "payoff", "components"]) + "\n")
    return EXIT_OK


def _cmd_best_response(args, out):
    game = _load_game(args.game).body
    play = parse_play(_read(args.play), game)
    if isinstance(game, KripkeGame):
        mapping = kripke_to_min(game)
        mgame, play = mapping.min_game, flatten_play(mapping, play)
        if args.player in game.players:
            targets = [n for (p, _), n in mapping.player_map.items() if p == args.player]
        else:
            targets = [args.player]
    else:
        mgame = game if isinstance(game, MinGame) else game.as_min_game()
        targets = [args.player]
    for t in targets:
        if t not in mgame.players:
            raise UsageError(f"unknown player {t!r}")
    answers = {t: best_response(mgame, play, t) for t in targets}
    if args.json:
        out(dumps({"kind": "best_response", "responses": {
            t: {"strategy": s.probabilities.tolist(), "value": v} for t, (s, v) in answers.items()}}))
    else:
        rows = [[t, " ".join(_fmt(x) for x in s.probabilities), _fmt(v)] for t, (s, v) in answers.items()]
        out(_table(rows, ["player", "best response", "value"]) + "\n")
    return EXIT_OK


def _cmd_reduce(args, out):
    game = _load_game(args.game).body
    doc: dict = {"kind": "reduction"}
    if isinstance(game, KripkeGame):
        mapping = kripke_to_min(game)
        doc["player_map"] = {n: {"player": p, "class": b} for (p, b), n in mapping.player_map.items()}
        doc["world_order"] = list(mapping.world_order)
        doc["penalty"] = mapping.penalty
        reduced = mapping.min_game
        if args.to == "finite":
            chooser = min_to_finite(reduced)
            doc["chooser_of"] = dict(chooser.chooser_of)
            reduced = chooser.finite_game
    elif isinstance(game, MinGame):
        if args.to != "finite":
            raise UsageError("a min-game can only be reduced --to finite")
        chooser = min_to_finite(game)
        doc["chooser_of"] = dict(chooser.chooser_of)
        doc["world_order"] = [f"w{j}" for j in range(game.k)]
        reduced = chooser.finite_game
    else:
        raise UsageError("finite games need no reduction")
    reduced_doc = document_for(reduced)
    doc["game"] = game_to_json(reduced_doc)
    if args.out:
        Path(args.out).write_text(serialize_game(reduced_doc), encoding="utf-8")
    if args.json:
        out(dumps(doc))
    else:
        out(f"reduced to a {reduced_doc.kind} game with {len(reduced.players)} players\n")
        for key in ("player_map", "chooser_of"):
            if key in doc:
                out(f"{key}:\n")
                for name, v in doc[key].items():
                    out(f"  {name} <- {v}\n")
        if "world_order" in doc:
            out(f"world order: {', '.join(doc['world_order'])}\n")
    return EXIT_OK


def _cmd_solve(args, out):
    game = _load_game(args.game).body
    try:
        cfg = SolveConfig(restarts=args.restarts, epsilon_target=args.epsilon, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = solve(game, cfg)
    if args.out:
        Path(args.out).write_text(serialize_result(result), encoding="utf-8")
    if args.json:
        out(dumps(result_to_json(result)))
    else:
        status = "converged" if result.converged else "NOT converged (best effort)"
        out(f"{status} via {result.method}; iterations {result.iterations_used}, "
            f"restarts {result.restarts_used}\n")
        out(dumps(play_to_json(result.play)))
        out(_report_text(result.report) + "\n")
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def _cmd_verify(args, out):
    game = _load_game(args.game).body
    play = parse_play(_read(args.play), game)
    accepted, report = verify_equilibrium(game, play, args.epsilon)
    if args.json:
        out(dumps({"kind": "verification", "accepted": accepted, "epsilon": args.epsilon,
                   "report": report_to_json(report)}))
    else:
        out(("accepted" if accepted else "rejected") + f" at epsilon {_fmt(args.epsilon)}\n")
        out(_report_text(report) + "\n")
    return EXIT_OK if accepted else EXIT_REJECTED


COMMANDS = {
    "payoff": _cmd_payoff,
    "best-response": _cmd_best_response,
    "reduce": _cmd_reduce,
    "solve": _cmd_solve,
    "verify": _cmd_verify,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.command == "example":
            text = EXAMPLES[args.name]()
            if args.out:
                Path(args.out).write_text(text, encoding="utf-8")
            else:
                stdout.write(text)
            return EXIT_OK
        return COMMANDS[args.command](args, stdout.write)
    except UsageError as exc:
        stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (FormatError, GameError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
