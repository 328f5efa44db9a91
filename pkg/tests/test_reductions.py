import numpy as np
import pytest

from kripkegames import (
    FiniteGame,
    KripkeGame,
    KripkePlay,
    MixedStrategy,
    Play,
    RawKripkeGame,
    expected_payoff,
    flatten_play,
    kripke_payoff,
    kripke_to_min,
    lift_play,
    lowered_play,
    min_game_payoff,
    min_game_worst_case,
    min_to_finite,
    penalty_constant,
    unify_strategy_sets,
    validate,
)
from kripkegames.fixtures import one_player_min_game, three_world_game, two_matrix_min_game
from randgames import random_kripke_game, random_min_game, random_play, random_simplex


# ----------------------------------------------------------------- penalty


def test_penalty_three_world():
    # entries of the nine tensors span [-2, 2] once Column's negation is included
    assert penalty_constant(three_world_game()) == 3.0


def test_penalty_all_zero_and_large():
    zero = FiniteGame(("a",), {"a": ("x", "y")}, {"a": np.zeros(2)})
    assert penalty_constant(zero) == 1.0
    big = FiniteGame(("a",), {"a": ("x",)}, {"a": np.array([1e6])})
    assert penalty_constant(big) == 1e6 + 1


def test_penalty_exceeds_every_entry():
    rng = np.random.default_rng(0)
    for _ in range(20):
        game = random_kripke_game(rng)
        a = penalty_constant(game).value
        assert all(np.abs(t).max() < a for per in game.payoffs.values() for t in per.values())


# ---------------------------------------------------------- unify strategies


def _raw_two_world():
    return RawKripkeGame(
        players=("Row", "Col"),
        worlds=("1", "2"),
        strategies={"Row": {"1": ("a",), "2": ("b",)}, "Col": {"1": ("x", "y"), "2": ("x", "y")}},
        partitions={"Row": [["1", "2"]], "Col": [["1"], ["2"]]},
        payoffs={
            "Row": {"1": np.array([[1.0, 2.0]]), "2": np.array([[3.0, -4.0]])},
            "Col": {"1": np.array([[0.5, 0.0]]), "2": np.array([[1.0, 1.0]])},
        },
    )


def test_unify_two_worlds():
    raw = _raw_two_world()
    game = unify_strategy_sets(raw)
    a = penalty_constant(raw).value
    assert game.strategies["Row"] == ("a", "b")
    np.testing.assert_array_equal(game.payoffs["Row"]["1"][1], [-a, -a])
    np.testing.assert_array_equal(game.payoffs["Row"]["1"][0], [1.0, 2.0])
    np.testing.assert_array_equal(game.payoffs["Row"]["2"][0], [-a, -a])
    np.testing.assert_array_equal(game.payoffs["Row"]["2"][1], [3.0, -4.0])
    assert validate(game) == []
    assert a > max(np.abs(t).max() for per in raw.payoffs.values() for t in per.values())


def test_unify_noop_when_lists_agree():
    src = three_world_game()
    raw = RawKripkeGame(src.players, src.worlds,
                        {p: {w: src.strategies[p] for w in src.worlds} for p in src.players},
                        src.partitions, src.payoffs)
    game = unify_strategy_sets(raw)
    for p in src.players:
        assert game.strategies[p] == src.strategies[p]
        for w in src.worlds:
            np.testing.assert_array_equal(game.payoffs[p][w], src.payoffs[p][w])


def test_unify_rejects_empty_list():
    raw = _raw_two_world()
    broken = RawKripkeGame(raw.players, raw.worlds,
                           {"Row": {"1": (), "2": ("b",)}, "Col": raw.strategies["Col"]},
                           raw.partitions, raw.payoffs)
    with pytest.raises(ValueError):
        unify_strategy_sets(broken)


def test_unify_soundness_random():
    rng = np.random.default_rng(2)
    for _ in range(30):
        src = random_kripke_game(rng)
        extra = {}
        for p in src.players:
            # world-specific lists: the common list plus a world-specific extra strategy
            extra[p] = {w: src.strategies[p] + (f"only-{w}",) for w in src.worlds}
        payoffs = {}
        for i, p in enumerate(src.players):
            payoffs[p] = {}
            for w in src.worlds:
                shape = tuple(len(extra[q][w]) for q in src.players)
                t = rng.uniform(-5, 5, shape)
                t[tuple(slice(0, len(src.strategies[q])) for q in src.players)] = src.payoffs[p][w]
                payoffs[p][w] = t
        raw = RawKripkeGame(src.players, src.worlds, extra, src.partitions, payoffs)
        game = unify_strategy_sets(raw)
        kplay = KripkePlay({
            p: {key: np.concatenate([random_simplex(rng, src.num_strategies(p)),
                                     np.zeros(len(src.worlds))]) for key, _ in src.blocks(p)}
            for p in src.players
        })
        plain = KripkePlay({p: {key: s.probabilities[: src.num_strategies(p)]
                                for key, s in kplay[p].items()} for p in src.players})
        for p in src.players:
            for w in src.worlds:
                assert kripke_payoff(game, kplay, p, w) == pytest.approx(
                    kripke_payoff(src, plain, p, w), abs=1e-12)


# ----------------------------------------------------------- Kripke -> min


def test_three_world_reduction_shape():
    mapping = kripke_to_min(three_world_game())
    mg = mapping.min_game
    assert mg.k == 3
    assert mg.players == ("Row@{1,2}", "Row@{3}", "Column@{1}", "Column@{2,3}")
    assert all(mg.num_strategies(p) == 2 for p in mg.players)
    assert mapping.world_order == ("1", "2", "3")
    assert mapping.relevant["Row@{1,2}"][1] == ("Row@{1,2}", "Column@{2,3}")
    assert mapping.relevant["Row@{1,2}"][2] == ()


def test_one_world_reduction_is_the_finite_game():
    m = np.array([[3.0, -1.0], [0.0, 2.0]])
    game = KripkeGame(("a", "b"), {"a": ("x", "y"), "b": ("x", "y")}, ("w",),
                      {"a": [["w"]], "b": [["w"]]}, {"a": {"w": m}, "b": {"w": -m}})
    mapping = kripke_to_min(game)
    assert mapping.min_game.k == 1
    np.testing.assert_array_equal(mapping.min_game.payoffs["a@{w}"][0], m)
    np.testing.assert_array_equal(mapping.min_game.payoffs["b@{w}"][0], -m)


def test_identity_partitions_pad_other_worlds():
    rng = np.random.default_rng(3)
    worlds = ("u", "v", "w")
    game = KripkeGame(("a",), {"a": ("x", "y")}, worlds, {"a": [[w] for w in worlds]},
                      {"a": {w: rng.uniform(-1, 1, 2) for w in worlds}})
    mapping = kripke_to_min(game)
    for j, w in enumerate(worlds):
        tensors = mapping.min_game.payoffs[f"a@{{{w}}}"]
        padded = [i for i, t in enumerate(tensors) if np.all(t == mapping.penalty)]
        assert padded == [i for i in range(3) if i != j]


def test_lift_uniform_and_round_trip():
    mapping = kripke_to_min(three_world_game())
    uniform = Play({p: MixedStrategy.uniform(2) for p in mapping.min_game.players})
    lifted = lift_play(mapping, uniform)
    assert all(s == MixedStrategy.uniform(2) for blocks in lifted.strategies.values() for s in blocks.values())
    rng = np.random.default_rng(4)
    play = random_play(rng, mapping.min_game)
    assert flatten_play(mapping, lift_play(mapping, play)) == play


def test_payoff_identity_and_penalty_inertness():
    rng = np.random.default_rng(5)
    for _ in range(60):
        game = random_kripke_game(rng)
        mapping = kripke_to_min(game)
        for _ in range(3):
            play = random_play(rng, mapping.min_game)
            kplay = lift_play(mapping, play)
            for p in game.players:
                for w in game.worlds:
                    name = mapping.player_map[(p, ",".join(sorted(game.block_of(p, w))))]
                    wc = min_game_worst_case(mapping.min_game, play, name)
                    assert kripke_payoff(game, kplay, p, w) == pytest.approx(wc.value, abs=1e-12)
                    assert wc.value < mapping.penalty
                    assert all(mapping.world_order[j] in game.block_of(p, w) for j in wc.minimizers)


# -------------------------------------------------------- min -> finite game


def test_two_matrix_world_chooser_game():
    chooser = min_to_finite(two_matrix_min_game())
    fg = chooser.finite_game
    assert fg.players == ("Row", "Column", "Row^hat", "Column^hat")
    assert fg.strategies["Row^hat"] == ("w0", "w1")
    assert validate(fg) == []
    np.testing.assert_array_equal(fg.payoffs["Row^hat"], -fg.payoffs["Row"])
    # Row's payoff follows Row^hat's choice and ignores Column^hat's
    np.testing.assert_array_equal(fg.payoffs["Row"][:, :, 1, 0], two_matrix_min_game().payoffs["Row"][1])
    np.testing.assert_array_equal(fg.payoffs["Row"][:, :, 1, 1], two_matrix_min_game().payoffs["Row"][1])


def test_k1_choosers_are_trivial():
    rng = np.random.default_rng(6)
    game = random_min_game(rng, max_k=1)
    chooser = min_to_finite(game)
    fg = chooser.finite_game
    n = len(game.players)
    for p in game.players:
        assert fg.num_strategies(chooser.chooser_of[p]) == 1
        np.testing.assert_array_equal(fg.payoffs[p].reshape(game.shape()), game.payoffs[p][0])


def test_one_player_min_game_chooser_indifferent_at_half():
    chooser = min_to_finite(one_player_min_game())
    fg = chooser.finite_game
    for pure in ([1.0, 0.0], [0.0, 1.0]):
        play = Play({"p": [0.5, 0.5], "p^hat": pure})
        assert expected_payoff(fg, play, "p") == 1.5
        assert expected_payoff(fg, play, "p^hat") == -1.5


def _augmented_play(rng, mapping):
    return Play({p: random_simplex(rng, mapping.finite_game.num_strategies(p), sparse=True)
                 for p in mapping.finite_game.players})


def test_lowered_play_inequality_and_equality():
    rng = np.random.default_rng(7)
    for _ in range(80):
        game = random_min_game(rng)
        mapping = min_to_finite(game)
        play = _augmented_play(rng, mapping)
        low = lowered_play(mapping, play)
        for p in game.players:
            wc = min_game_worst_case(game, low, p)
            assert wc.value <= expected_payoff(mapping.finite_game, play, p) + 1e-12
            best = play.replace(mapping.chooser_of[p], MixedStrategy.pure(game.k, wc.minimizers[0]))
            assert expected_payoff(mapping.finite_game, best, p) == pytest.approx(wc.value, abs=1e-12)


def test_lowered_play_k1_equality():
    rng = np.random.default_rng(8)
    for _ in range(30):
        game = random_min_game(rng, max_k=1)
        mapping = min_to_finite(game)
        play = _augmented_play(rng, mapping)
        low = lowered_play(mapping, play)
        for p in game.players:
            assert min_game_payoff(game, low, p) == pytest.approx(
                expected_payoff(mapping.finite_game, play, p), abs=1e-12)


def test_chooser_antagonism():
    rng = np.random.default_rng(9)
    for _ in range(40):
        game = random_min_game(rng)
        mapping = min_to_finite(game)
        play = _augmented_play(rng, mapping)
        for p in game.players:
            hat = mapping.chooser_of[p]
            best = max(expected_payoff(mapping.finite_game, play.replace(hat, MixedStrategy.pure(game.k, j)), hat)
                       for j in range(game.k))
            assert best == pytest.approx(-min_game_payoff(game, lowered_play(mapping, play), p), abs=1e-12)


def test_lowered_play_shape_checked():
    mapping = min_to_finite(two_matrix_min_game())
    with pytest.raises(ValueError):
        lowered_play(mapping, Play({"Row": [1, 0], "Column": [1, 0]}))
