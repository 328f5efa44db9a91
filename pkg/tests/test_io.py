import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kripkegames import KripkeGame, KripkePlay, MinGame, Play, kripke_payoff, solve_kripke
from kripkegames.cli import EXAMPLES
from kripkegames.fixtures import (
    matching_pennies,
    one_player_min_game,
    three_world_equilibrium,
    three_world_game,
    two_matrix_min_game,
)
from kripkegames.io import (
    FormatError,
    document_for,
    documents_equal,
    games_equal,
    parse_game,
    parse_play,
    parse_result,
    serialize_game,
    serialize_play,
    serialize_result,
)
from randgames import random_finite_game, random_kripke_game, random_kripke_play, random_min_game, random_play


def three_world_doc() -> dict:
    return json.loads(EXAMPLES["section2"]())


def rejected(obj) -> FormatError:
    with pytest.raises(FormatError) as info:
        parse_game(json.dumps(obj))
    return info.value


# ------------------------------------------------------------------ parsing


def test_three_world_document_parses():
    doc = parse_game(EXAMPLES["section2"]())
    assert doc.kind == "kripke" and doc.zero_sum
    assert isinstance(doc.body, KripkeGame)
    assert games_equal(doc.body, three_world_game())
    eq = three_world_equilibrium()
    assert [kripke_payoff(doc.body, eq, "Row", w) for w in ("1", "2", "3")] == pytest.approx([0, 0, 0.8])


def test_overlapping_blocks_rejected():
    obj = three_world_doc()
    obj["partitions"]["Row"] = [["1", "2"], ["2", "3"]]
    err = rejected(obj)
    assert "overlapping" in str(err) and "$.partitions.Row" in str(err)


def test_min_game_arity_mismatch_rejected():
    obj = json.loads(serialize_game(document_for(two_matrix_min_game())))
    obj["payoffs"]["Row"].append([[0, 0], [0, 0]])
    err = rejected(obj)
    assert "arity" in str(err) and "$.payoffs.Row" in str(err)


@pytest.mark.parametrize(
    "mutate, path",
    [
        (lambda o: o.update(kind="bayesian"), "$.kind"),
        (lambda o: o.pop("worlds"), "$"),
        (lambda o: o.update(format_version=2), "$.format_version"),
        (lambda o: o["strategies"].update(Row=["r1", 2]), "$.strategies.Row[1]"),
        (lambda o: o["payoffs"]["Row"]["1"][0].__setitem__(1, "x"), "$.payoffs.Row.1[0][1]"),
        (lambda o: o["payoffs"]["Row"].__setitem__("2", [[2, 0], [0]]), "$.payoffs.Row.2"),
        (lambda o: o["payoffs"].update(Column={}), "$.payoffs.Column"),
        (lambda o: o.update(zero_sum="yes"), "$.zero_sum"),
    ],
)
def test_rejections_carry_locator(mutate, path):
    obj = three_world_doc()
    mutate(obj)
    err = rejected(obj)
    assert err.path == path or path in str(err)


def test_non_finite_numbers_rejected():
    text = EXAMPLES["section2"]().replace("[[-1, 1], [1, -1]]", "[[NaN, 1], [1, -1]]")
    with pytest.raises(FormatError, match="non-finite"):
        parse_game(text)
    with pytest.raises(FormatError):
        parse_game(EXAMPLES["section2"]().replace("[[2, 0], [0, 1]]", "[[Infinity, 0], [0, 1]]"))


def test_invalid_json_reports_line():
    with pytest.raises(FormatError, match="line 3"):
        parse_game('{\n  "kind": "finite",\n  oops\n}')


def test_zero_sum_synthesizes_negation():
    game = parse_game(EXAMPLES["section2"]()).body
    for w in game.worlds:
        np.testing.assert_array_equal(game.payoffs["Column"][w], -game.payoffs["Row"][w])


def test_zero_sum_needs_two_players():
    obj = json.loads(serialize_game(document_for(one_player_min_game())))
    obj["zero_sum"] = True
    assert rejected(obj).path == "$.zero_sum"


def test_zero_sum_flag_refuses_non_zero_sum_game():
    rng = np.random.default_rng(0)
    game = random_finite_game(rng, max_players=2)
    while len(game.players) != 2:
        game = random_finite_game(rng, max_players=2)
    with pytest.raises(ValueError):
        serialize_game(document_for(game, zero_sum=True))


# ---------------------------------------------------------------- round trip


def test_three_world_byte_identical_after_canonicalization():
    messy = json.dumps(three_world_doc(), indent=None, sort_keys=True)
    once = serialize_game(parse_game(messy))
    assert serialize_game(parse_game(once)) == once
    assert once == EXAMPLES["section2"]()


@pytest.mark.parametrize("name", sorted(n for n in EXAMPLES if n != "three-world-equilibrium"))
def test_examples_are_fixed_points(name):
    text = EXAMPLES[name]()
    assert serialize_game(parse_game(text)) == text


def test_random_min_game_bit_exact():
    rng = np.random.default_rng(1)
    for _ in range(50):
        game = random_min_game(rng)
        # payoffs with full 53-bit mantissas
        game = MinGame(game.players, game.strategies, game.k,
                       {p: [t * np.pi for t in ts] for p, ts in game.payoffs.items()})
        back = parse_game(serialize_game(document_for(game))).body
        assert games_equal(back, game)


@settings(max_examples=50, deadline=None)
@given(values=st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=4, max_size=4))
def test_arbitrary_floats_round_trip(values):
    m = np.array(values).reshape(2, 2)
    game = MinGame(("a", "b"), {"a": ("x", "y"), "b": ("x", "y")}, 1, {"a": [m], "b": [m.T.copy()]})
    assert games_equal(parse_game(serialize_game(document_for(game))).body, game)


def test_negative_zero_survives():
    game = MinGame(("a",), {"a": ("x", "y")}, 1, {"a": [np.array([-0.0, 0.0])]})
    back = parse_game(serialize_game(document_for(game))).body
    assert np.signbit(back.payoffs["a"][0][0]) and not np.signbit(back.payoffs["a"][0][1])


def test_random_documents_of_every_kind():
    rng = np.random.default_rng(2)
    makers = [random_finite_game, random_min_game, random_kripke_game]
    for i in range(60):
        game = makers[i % 3](rng)
        doc = document_for(game)
        assert documents_equal(parse_game(serialize_game(doc)), doc)


def test_play_round_trips():
    rng = np.random.default_rng(3)
    game = random_min_game(rng)
    play = random_play(rng, game)
    assert parse_play(serialize_play(play), game) == play
    kgame = random_kripke_game(rng)
    kplay = random_kripke_play(rng, kgame)
    back = parse_play(serialize_play(kplay), kgame)
    assert isinstance(back, KripkePlay)
    for p in kgame.players:
        assert back[p] == kplay[p]


def test_play_checked_against_game():
    with pytest.raises(FormatError, match=r"\$\.strategies"):
        parse_play(json.dumps({"kind": "play", "strategies": {"Row": [1, 0]}}), matching_pennies())
    with pytest.raises(FormatError):
        parse_play(serialize_play(Play({"Row": [1, 0], "Column": [1, 0]})), three_world_game())
    with pytest.raises(FormatError):
        parse_play(json.dumps({"kind": "play", "strategies": {"Row": [0.7, 0.7]}}))


def test_result_document_contains_gaps_and_method():
    result = solve_kripke(three_world_game())
    text = serialize_result(result)
    obj = json.loads(text)
    assert obj["method"] == result.method
    assert set(obj["report"]["per_player_gap"]) == set(result.report.per_player_gap)
    assert obj["report"]["max_gap"] == result.report.max_gap
    back = parse_result(text)
    assert back.report.per_player_gap == result.report.per_player_gap
    assert (back.converged, back.method, back.iterations_used) == (result.converged, result.method,
                                                                     result.iterations_used)
    assert serialize_result(back) == text
