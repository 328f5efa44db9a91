"""Best responses, gap certificates and equilibrium search for min-games.

A player's payoff in a min-game, with everyone else fixed, is the minimum
of finitely many linear functions of her own mixed strategy, so her best
response is a small LP (:func:`kripkegames.lp.solve_simplex_maxmin`).  The
best-response gap of every player is the certificate used throughout: a
play is an epsilon-equilibrium iff every gap is at most epsilon.

Kripke games are handled only through :func:`kripke_to_min`; the min-game
payoff of a class-player equals the Kripke payoff of its owner in every
world of that class, so a min-game certificate is a Kripke certificate.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

import numpy as np
from scipy import optimize

from .core import (
    FiniteGame,
    GameError,
    KripkeGame,
    KripkePlay,
    MinGame,
    MixedStrategy,
    Play,
    _check_play,
    contract_except,
    kripke_payoff_table,
    validate,
)
from .lp import solve_simplex_maxmin, solve_zero_sum
from .reductions import flatten_play, kripke_to_min, lift_play

log = logging.getLogger(__name__)

CHECK_EVERY = 250
GRID_BUDGET = 10**7
GRID_EXHAUSTIVE = 20000
POLISH_SEEDS = 5


@dataclass(frozen=True)
class GapReport:
    per_player_gap: Mapping[str, float]
    max_gap: float
    best_responses: Mapping[str, MixedStrategy]
    payoffs: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class SolveConfig:
    max_iterations: int = 20000
    restarts: int = 32
    epsilon_target: float = 1e-6
    seed: int = 0
    grid_step: float = 0.05

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        if not self.epsilon_target > 0:
            raise ValueError("epsilon_target must be positive")
        if not 0 < self.grid_step <= 1:
            raise ValueError("grid_step must lie in (0, 1]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class SolveResult:
    play: Union[Play, KripkePlay]
    report: GapReport
    converged: bool
    iterations_used: int
    restarts_used: int
    method: str
    polished: bool = False
    kripke_payoffs: Optional[Mapping[str, Mapping[str, float]]] = None


def _as_min_game(game) -> MinGame:
    if isinstance(game, MinGame):
        return game
    if isinstance(game, FiniteGame):
        return game.as_min_game()
    raise TypeError(f"expected a min-game, got {type(game).__name__}")


# ------------------------------------------------------------ best responses


def _gains(game: MinGame, vectors, i: int) -> np.ndarray:
    """``k x m`` matrix: payoff of each pure strategy of player ``i`` per component."""
    return np.stack([contract_except(t, vectors, i) for t in game.payoffs[game.players[i]]])


def _gaps(game: MinGame, vectors):
    gaps, brs, current = [], [], []
    for i in range(len(game.players)):
        g = _gains(game, vectors, i)
        now = float((g @ vectors[i]).min())
        sol = solve_simplex_maxmin(g)
        gaps.append(sol.value - now)
        brs.append(sol.x)
        current.append(now)
    return gaps, brs, current


def best_response(game: MinGame, play: Play, player: str, pure: bool = False) -> tuple[MixedStrategy, float]:
    """Maximize the player's min-game payoff against the rest of ``play``.

    With ``pure=True`` the search is restricted to pure strategies (lowest
    index on ties).  Because the objective is concave rather than linear,
    the pure optimum can be strictly worse than the mixed one.
    """
    game = _as_min_game(game)
    _check_play(game, play)
    i = game.index(player)
    g = _gains(game, play.vectors(game.players), i)
    if pure:
        values = g.min(axis=0)
        best = int(np.argmax(values))
        return MixedStrategy.pure(g.shape[1], best), float(values[best])
    sol = solve_simplex_maxmin(g)
    return MixedStrategy(sol.x), sol.value


def _report(game: MinGame, vectors) -> GapReport:
    gaps, brs, current = _gaps(game, vectors)
    players = game.players
    return GapReport(
        dict(zip(players, gaps)),
        max(gaps),
        {p: MixedStrategy(b) for p, b in zip(players, brs)},
        dict(zip(players, current)),
    )


def gap_report(game: MinGame, play: Play) -> GapReport:
    """Each player's best-response value minus her current payoff."""
    game = _as_min_game(game)
    _check_play(game, play)
    return _report(game, play.vectors(game.players))


def verify_equilibrium(game, play, epsilon: float) -> tuple[bool, GapReport]:
    """Accept ``play`` iff no player can gain more than ``epsilon`` by deviating.

    Kripke plays are checked on the class-split min-game; the report is then
    keyed by class-player names such as ``"Row@{1,2}"``.
    """
    if isinstance(game, KripkeGame):
        mapping = kripke_to_min(game)
        return verify_equilibrium(mapping.min_game, flatten_play(mapping, play), epsilon)
    report = gap_report(_as_min_game(game), play)
    return report.max_gap <= epsilon, report


# --------------------------------------------------------------- refinement


def _support_polish(game: MinGame, vectors, target: float, seen: Optional[set] = None):
    """Solve the indifference system suggested by an approximate equilibrium.

    For each player, strategies with visible mass form the support and the
    nearly-minimal components form the active set.  At an equilibrium some
    weights ``lam`` on the active components make every supported strategy
    equally good against the ``lam``-mixture, and all active components tie.
    That square system is solved by a root finder; the result is kept only
    if the LP certificate accepts it.  Structures already in ``seen`` are
    skipped, and every structure tried is added to it.
    """
    n = len(game.players)
    tried = set() if seen is None else seen
    best = None
    for tol in (1e-3, 1e-2, 1e-4, 5e-2, 1e-6):
        structure = []
        for i in range(n):
            g = _gains(game, vectors, i)
            support = tuple(np.flatnonzero(vectors[i] > tol))
            values = g @ vectors[i]
            active = tuple(np.flatnonzero(values - values.min() <= max(tol, 1e-9)))
            structure.append((support, active))
        key = tuple(structure)
        if key in tried:
            continue
        tried.add(key)
        found = _solve_structure(game, vectors, structure)
        if found is None:
            continue
        gap = max(_gaps(game, found)[0])
        if best is None or gap < best[1]:
            best = (found, gap)
        if gap <= target:
            break
    return best


def _solve_structure(game: MinGame, vectors, structure):
    n = len(game.players)
    sizes = [game.num_strategies(p) for p in game.players]

    z0 = []
    for i, (support, active) in enumerate(structure):
        x = vectors[i][list(support)]
        x = x / x.sum() if x.sum() > 0 else np.full(len(support), 1.0 / len(support))
        g = _gains(game, vectors, i)[np.ix_(active, support)]
        # initial weights: least-squares solution of the indifference equations
        a = np.zeros((len(support) + 1, len(active) + 1))
        a[: len(support), : len(active)] = g.T
        a[: len(support), -1] = -1.0
        a[-1, : len(active)] = 1.0
        rhs = np.zeros(len(support) + 1)
        rhs[-1] = 1.0
        sol = np.linalg.lstsq(a, rhs, rcond=None)[0]
        lam = np.clip(sol[:-1], 0.0, None)
        lam = lam / lam.sum() if lam.sum() > 0 else np.full(len(active), 1.0 / len(active))
        w = float((g @ x).mean())
        z0.extend([*x, *lam, sol[-1], w])
    z0 = np.array(z0)

    def unpack(z):
        out, pos = [], 0
        for i, (support, active) in enumerate(structure):
            s, a = len(support), len(active)
            out.append((z[pos : pos + s], z[pos + s : pos + s + a], z[pos + s + a], z[pos + s + a + 1]))
            pos += s + a + 2
        return out

    def full_vectors(parts):
        vecs = []
        for i, (support, _) in enumerate(structure):
            v = np.zeros(sizes[i])
            v[list(support)] = parts[i][0]
            vecs.append(v)
        return vecs

    def residual(z):
        parts = unpack(z)
        vecs = full_vectors(parts)
        res = []
        for i, (support, active) in enumerate(structure):
            x, lam, v, w = parts[i]
            g = _gains(game, vecs, i)[np.ix_(active, support)]
            res.extend(lam @ g - v)
            res.append(x.sum() - 1.0)
            res.extend(g @ x - w)
            res.append(lam.sum() - 1.0)
        return np.array(res)

    for method in ("hybr", "lm"):
        try:
            sol = optimize.root(residual, z0, method=method, options={"xtol": 1e-14})
        except (ValueError, np.linalg.LinAlgError):
            continue
        parts = unpack(sol.x)
        if any(np.any(p[0] < -1e-9) or np.any(p[1] < -1e-7) for p in parts):
            continue
        vecs = []
        for v in full_vectors(parts):
            v = np.clip(v, 0.0, None)
            vecs.append(v / v.sum())
        if np.max(np.abs(residual(sol.x))) < 1e-8:
            return vecs
    return None


# ---------------------------------------------------------------- the solver


def _detect_zero_sum(game: MinGame) -> bool:
    if game.k != 1 or len(game.players) != 2:
        return False
    a, b = game.players
    return bool(np.array_equal(game.payoffs[a][0], -game.payoffs[b][0]))


class _Tracker:
    def __init__(self, game, target):
        self.game = game
        self.target = target
        self.best = None
        self.best_gap = math.inf
        self.polished = False
        self.stage = "fictitious-play"
        self.best_stage = self.stage
        self.seen_structures = set()

    def offer(self, vectors, polished=False) -> bool:
        gap = max(_gaps(self.game, vectors)[0])
        if gap < self.best_gap:
            self.best, self.best_gap, self.polished = [v.copy() for v in vectors], gap, polished
            self.best_stage = self.stage
        return gap <= self.target

    def polish(self, vectors) -> bool:
        found = _support_polish(self.game, vectors, self.target, self.seen_structures)
        return found is not None and self.offer(found[0], polished=True)


def _best_response_dynamics(game, start, cfg, tracker):
    """Averaged simultaneous best responses with step ``1 / (n + 2)``."""
    x = [v.copy() for v in start]
    n_players = len(game.players)
    for n in range(cfg.max_iterations):
        brs = [solve_simplex_maxmin(_gains(game, x, i)).x for i in range(n_players)]
        eta = 1.0 / (n + 2)
        x = [(1 - eta) * xi + eta * b for xi, b in zip(x, brs)]
        if (n + 1) % CHECK_EVERY == 0 or n + 1 == cfg.max_iterations:
            if tracker.offer(x) or tracker.polish(x):
                return n + 1, True
    return cfg.max_iterations, False


def _grid_points(m: int, step: float):
    parts = int(round(1.0 / step))
    for cuts in itertools.combinations(range(parts + m - 1), m - 1):
        prev, counts = -1, []
        for c in cuts:
            counts.append(c - prev - 1)
            prev = c
        counts.append(parts + m - 2 - prev)
        yield np.array(counts, dtype=float) / parts


def _grid_size(m: int, step: float) -> int:
    parts = int(round(1.0 / step))
    return math.comb(parts + m - 1, m - 1)


def _grid_candidates(sizes, step, rng):
    if math.prod(_grid_size(m, step) for m in sizes) <= GRID_EXHAUSTIVE:
        return itertools.product(*[list(_grid_points(m, step)) for m in sizes])
    return ([rng.dirichlet(np.ones(m)) for m in sizes] for _ in range(GRID_EXHAUSTIVE))


def _grid_then_polish(game, cfg, tracker, rng):
    """Coarse-to-fine grids; the best few points of each level seed the polish."""
    sizes = [game.num_strategies(p) for p in game.players]
    levels = [itertools.product(*[list(np.eye(m)) for m in sizes])] if math.prod(sizes) <= GRID_EXHAUSTIVE else []
    levels += [_grid_candidates(sizes, h, rng) for h in sorted({0.5, 0.25, cfg.grid_step}, reverse=True)]
    best, best_gap = None, math.inf
    for candidates in levels:
        scored = []
        for point in candidates:
            vecs = [np.asarray(v) for v in point]
            scored.append((max(_gaps(game, vecs)[0]), len(scored), vecs))
        scored.sort(key=lambda t: t[:2])
        for gap, _, vecs in scored[:POLISH_SEEDS]:
            if tracker.offer(vecs) or tracker.polish(vecs):
                return True
        if scored[0][0] < best_gap:
            best_gap, best = scored[0][0], scored[0][2]

    # coordinate descent: move the worst player toward her best response
    x = [v.copy() for v in best]
    for t in range(2000):
        gaps, brs, _ = _gaps(game, x)
        worst = int(np.argmax(gaps))
        step = 1.0 / (t + 2)
        x[worst] = (1 - step) * x[worst] + step * brs[worst]
        if tracker.offer(x):
            return True
        if (t + 1) % 100 == 0 and tracker.polish(x):
            return True
    return False


def solve_min_game(game: MinGame, cfg: SolveConfig = SolveConfig()) -> SolveResult:
    """Search for a play whose every best-response gap is below ``cfg.epsilon_target``.

    Two-player zero-sum games with k = 1 are solved exactly by LP.  Otherwise
    each restart runs averaged best-response dynamics from the uniform play
    (restart 0) or a seeded random play, checking the gap every 250 steps and
    trying to refine the current average into an exact solution of its
    indifference system.  If the first restart fails, a coarse-to-fine grid
    search plus coordinate-descent polish runs before the remaining restarts.  The returned report is always the LP
    certificate of the returned play, converged or not.
    """
    game = _as_min_game(game)
    problems = validate(game)
    if problems:
        raise GameError("; ".join(problems))
    players = game.players

    if _detect_zero_sum(game):
        _, row, col = solve_zero_sum(game.payoffs[players[0]][0])
        vecs = [row, col]
        report = _report(game, vecs)
        return SolveResult(
            Play(dict(zip(players, vecs))), report, report.max_gap <= cfg.epsilon_target,
            0, 0, "exact-zero-sum",
        )

    tracker = _Tracker(game, cfg.epsilon_target)
    iterations = restarts = 0
    converged = False
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        if r == 0:
            start = [np.full(game.num_strategies(p), 1.0 / game.num_strategies(p)) for p in players]
        else:
            start = [rng.dirichlet(np.ones(game.num_strategies(p))) for p in players]
        tracker.stage = "fictitious-play"
        used, converged = _best_response_dynamics(game, start, cfg, tracker)
        iterations += used
        restarts += 1
        if converged:
            break
        log.debug("restart %d ended with best gap %.3g", r, tracker.best_gap)
        if r == 0:
            # the grid stage is deterministic and usually cheaper than more restarts
            tracker.stage = "gap-grid-polish"
            converged = _grid_then_polish(game, cfg, tracker, np.random.default_rng([cfg.seed, cfg.restarts]))
            if converged:
                break

    report = _report(game, tracker.best)
    return SolveResult(
        Play(dict(zip(players, tracker.best))),
        report,
        report.max_gap <= cfg.epsilon_target,
        iterations,
        restarts,
        tracker.best_stage,
        tracker.polished,
    )


def solve_kripke(game: KripkeGame, cfg: SolveConfig = SolveConfig()) -> SolveResult:
    """Solve through the class-split min-game and lift the result back."""
    problems = validate(game)
    if problems:
        raise GameError("; ".join(problems))
    mapping = kripke_to_min(game)
    result = solve_min_game(mapping.min_game, cfg)
    kplay = lift_play(mapping, result.play)
    return SolveResult(
        kplay,
        result.report,
        result.converged,
        result.iterations_used,
        result.restarts_used,
        result.method,
        result.polished,
        kripke_payoff_table(game, kplay),
    )


def solve(game, cfg: SolveConfig = SolveConfig()) -> SolveResult:
    if isinstance(game, KripkeGame):
        return solve_kripke(game, cfg)
    return solve_min_game(_as_min_game(game), cfg)


# -------------------------------------------------------------- test oracle


def brute_force_gap_min(game: MinGame, step: float) -> tuple[Play, float]:
    """Exhaustive grid search for the play with the smallest max gap."""
    game = _as_min_game(game)
    sizes = [game.num_strategies(p) for p in game.players]
    total = math.prod(_grid_size(m, step) for m in sizes)
    if total > GRID_BUDGET:
        raise ValueError(f"grid has {total} points, budget is {GRID_BUDGET}")
    grids = [list(_grid_points(m, step)) for m in sizes]
    best, best_gap = None, math.inf
    for point in itertools.product(*grids):
        gap = max(_gaps(game, point)[0])
        if gap < best_gap:
            best, best_gap = point, gap
    return Play(dict(zip(game.players, best))), best_gap
