"""Adaptive curriculum training and target-game fine-tuning.

Phase one trains a freshly initialized policy in the thought game, raising
the opponent difficulty whenever the windowed win rate clears the threshold,
then hardens the finished policy with a short consolidation tail at the top
level (or stops when the iteration budget runs out). Phase two continues
training the transferred policy in the target game at a fixed level,
evaluating greedily every iteration.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .engine import Game, stable_seed
from .errors import InvalidCountError, InvalidCountsError
from .metrics import MetricsRecord
from .opponents import difficulty_table
from .policy import (
    PolicyParams,
    forward,
    greedy_action,
    init_params,
    sample_action,
    save_checkpoint,
)
from .profiles import FidelityProfile
from .techtree import TechTree
from .trainer import ReplayBuffer, TrainerConfig, ppo_update


@dataclass
class CurriculumConfig:
    win_rate_threshold: float = 0.75       # V
    max_difficulty: int = 7                # Z
    target_level: int = 7                  # U
    episodes_per_window: int = 32          # M_m
    target_episodes_per_iter: int = 16     # M_s
    max_iterations: int = 300              # I_m
    target_max_iterations: int = 150       # I_s
    consolidation_iters: int = 160
    consolidation_greedy_streak: int = 3
    eval_games: int = 20
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.win_rate_threshold <= 1.0:
            raise ValueError("win_rate_threshold must be in (0, 1]")
        if self.max_difficulty < 1 or self.target_level < 1:
            raise ValueError("difficulty levels must be >= 1")
        if min(self.episodes_per_window, self.target_episodes_per_iter,
               self.max_iterations, self.target_max_iterations) < 1:
            raise ValueError("episode and iteration budgets must be >= 1")
        if self.consolidation_iters < 0:
            raise ValueError("consolidation_iters must be >= 0")
        if self.eval_games < 1:
            raise ValueError("eval_games must be >= 1")


@dataclass
class CurriculumState:
    difficulty: int = 1
    wins_window: int = 0
    iteration: int = 0
    episodes: int = 0
    history: list = field(default_factory=list)   # (iteration, difficulty, win_rate)
    completed: bool = False
    budget_exhausted: bool = False


@dataclass(frozen=True)
class EvalResult:
    win_rate: float
    wins: int
    losses: int
    draws: int
    mean_episode_length: float


def advance_check(wins: int, window: int, threshold: float) -> bool:
    """Strictly greater-than comparison of the window win rate."""
    if not isinstance(wins, int) or not isinstance(window, int) or isinstance(wins, bool):
        raise InvalidCountsError("wins and window must be integers")
    if window < 1 or not 0 <= wins <= window:
        raise InvalidCountsError(f"need 0 <= wins <= window, got {wins}/{window}")
    return wins / window > threshold


def collect_window(game: Game, params: PolicyParams, difficulty: int, n_episodes: int,
                   seed: int, iteration: int, sample_rng) -> tuple:
    """Roll out n_episodes with sampled actions.

    Returns (buffer, wins, env_steps, illegal_actions). Episode seeds derive
    from (seed, iteration, episode index) so runs are reproducible.
    """
    buffer = ReplayBuffer()
    wins = 0
    steps = 0
    illegal = 0
    featurize = game.featurize
    legal_mask = game.legal_mask
    step = game.step
    for ep in range(n_episodes):
        state = game.reset(difficulty, stable_seed(seed, iteration, ep))
        obs_ready = state.obs is not None
        while not state.done:
            mask = legal_mask(state)
            feats = state.obs if obs_ready else featurize(state)
            probs, value = forward(params, feats, mask)
            action, logp = sample_action(probs, sample_rng)
            reward, done = step(state, action)
            buffer.add(feats, action, logp, reward, value, done, mask)
            steps += 1
        illegal += state.illegal_agent_actions
        if state.winner == "agent":
            wins += 1
    return buffer, wins, steps, illegal


def _greedy_probe_win(game: Game, params: PolicyParams, difficulty: int, seed: int) -> bool:
    """One greedy episode at the given level; used to detect a hardened mode."""
    state = game.reset(difficulty, stable_seed(seed, "greedy-probe"))
    obs_ready = state.obs is not None
    while not state.done:
        mask = game.legal_mask(state)
        feats = state.obs if obs_ready else game.featurize(state)
        probs, _ = forward(params, feats, mask)
        game.step(state, greedy_action(probs))
    return state.winner == "agent"


def run_curriculum(config: CurriculumConfig, tree: TechTree, thought_profile: FidelityProfile,
                   trainer_config: TrainerConfig, *, run_id: str = "acrl",
                   metrics_writer=None, checkpoint_dir=None, collect_fn=collect_window,
                   opponent_table=None, initial_params: PolicyParams | None = None) -> tuple:
    """First training phase; returns (params, CurriculumState, records).

    The difficulty trace never decreases; the run is complete when the top
    level's window clears the threshold, and sets budget_exhausted when the
    iteration budget ends first. After completing the ladder the policy keeps
    training at the top level for a consolidation tail with the entropy bonus
    switched off: the climb produces a stochastic policy that clears windows
    by sampling, and the tail hardens it into one whose greedy mode wins. The
    tail ends once a greedy probe at the top level wins several times in a
    row (or the tail budget runs out), always within max_iterations.
    """
    table = opponent_table if opponent_table is not None else difficulty_table(config.max_difficulty)
    game = Game(tree, thought_profile, table)
    params = initial_params if initial_params is not None else init_params(
        len(thought_profile.feature_schema), seed=stable_seed(config.seed, "init"))
    update_rng = np.random.default_rng(stable_seed(config.seed, "update"))
    sample_rng = np.random.default_rng(stable_seed(config.seed, "sample"))
    cur = CurriculumState()
    records = []
    opt_state = None
    episodes_total = 0
    env_steps_total = 0
    consolidation_left = config.consolidation_iters
    consolidation_config = None
    greedy_streak = 0
    t0 = time.perf_counter()

    for it in range(1, config.max_iterations + 1):
        iter_start = time.perf_counter()
        buffer, wins, steps, illegal = collect_fn(
            game, params, cur.difficulty, config.episodes_per_window, config.seed, it, sample_rng)
        episodes_total += config.episodes_per_window
        env_steps_total += steps
        win_rate = wins / config.episodes_per_window
        d_collected = cur.difficulty
        cur.iteration = it
        cur.wins_window = wins
        cur.episodes = episodes_total
        cur.history.append((it, d_collected, win_rate))
        advanced = advance_check(wins, config.episodes_per_window, config.win_rate_threshold)

        if cur.completed:
            if consolidation_config is None:
                consolidation_config = replace(trainer_config, entropy_coef=0.0)
            active_config = consolidation_config
        else:
            active_config = trainer_config
        params, stats, opt_state = ppo_update(params, buffer, active_config, update_rng, opt_state)

        elapsed = time.perf_counter() - iter_start
        record = MetricsRecord(
            run_id=run_id, phase="thought", iteration=it,
            episodes_total=episodes_total, env_steps_total=env_steps_total,
            difficulty=d_collected, win_rate_window=win_rate, win_rate_eval=None,
            policy_loss=stats["policy_loss"], value_loss=stats["value_loss"],
            entropy=stats["entropy"], clip_fraction=stats["clip_fraction"],
            illegal_action_rate=illegal / steps if steps else 0.0,
            wall_clock_ms=(time.perf_counter() - t0) * 1e3,
            steps_per_second=steps / elapsed if elapsed > 0 else 0.0,
        )
        records.append(record)
        if metrics_writer is not None:
            metrics_writer.write(record)

        if cur.completed:
            consolidation_left -= 1
            if _greedy_probe_win(game, params, config.max_difficulty, config.seed):
                greedy_streak += 1
                if greedy_streak >= config.consolidation_greedy_streak:
                    break
            else:
                greedy_streak = 0
            if consolidation_left <= 0:
                break
            continue

        if advanced:
            if checkpoint_dir is not None:
                save_checkpoint(params, Path(checkpoint_dir) / run_id / f"thought_{it:04d}.ckpt")
            if cur.difficulty >= config.max_difficulty:
                cur.completed = True
                if consolidation_left <= 0:
                    break
            else:
                cur.difficulty += 1

    cur.budget_exhausted = not cur.completed
    if checkpoint_dir is not None:
        save_checkpoint(params, Path(checkpoint_dir) / run_id / "thought_final.ckpt")
    return params, cur, records


def train_target(params: PolicyParams, tree: TechTree, target_profile: FidelityProfile,
                 target_level: int, trainer_config: TrainerConfig, *,
                 episodes_per_iter: int = 16, n_iterations: int = 150, eval_games: int = 20,
                 seed: int = 0, run_id: str = "target", metrics_writer=None,
                 checkpoint_dir=None, opponent_table=None) -> tuple:
    """Second training phase at a fixed target level; returns (params, records).

    Emits an iteration-0 record holding the pre-update greedy evaluation,
    then one record per iteration. n_iterations = 0 returns the policy
    untouched with no records.
    """
    if n_iterations == 0:
        return params, []
    table = opponent_table if opponent_table is not None else difficulty_table(
        max(target_level, 7))
    game = Game(tree, target_profile, table)
    update_rng = np.random.default_rng(stable_seed(seed, "target-update"))
    sample_rng = np.random.default_rng(stable_seed(seed, "target-sample"))
    records = []
    opt_state = None
    episodes_total = 0
    env_steps_total = 0
    t0 = time.perf_counter()

    def emit(iteration, win_rate_window, stats, eval_res, steps, illegal, elapsed):
        record = MetricsRecord(
            run_id=run_id, phase="target", iteration=iteration,
            episodes_total=episodes_total, env_steps_total=env_steps_total,
            difficulty=target_level, win_rate_window=win_rate_window,
            win_rate_eval=eval_res.win_rate,
            policy_loss=stats.get("policy_loss", 0.0), value_loss=stats.get("value_loss", 0.0),
            entropy=stats.get("entropy", 0.0), clip_fraction=stats.get("clip_fraction", 0.0),
            illegal_action_rate=illegal / steps if steps else 0.0,
            wall_clock_ms=(time.perf_counter() - t0) * 1e3,
            steps_per_second=steps / elapsed if elapsed > 0 else 0.0,
        )
        records.append(record)
        if metrics_writer is not None:
            metrics_writer.write(record)

    first_eval = evaluate(params, tree, target_profile, target_level, eval_games,
                          stable_seed(seed, "eval", 0), game=game)
    emit(0, 0.0, {}, first_eval, 0, 0, 0.0)

    for it in range(1, n_iterations + 1):
        iter_start = time.perf_counter()
        buffer, wins, steps, illegal = collect_window(
            game, params, target_level, episodes_per_iter, seed, 1_000_000 + it, sample_rng)
        episodes_total += episodes_per_iter
        env_steps_total += steps
        params, stats, opt_state = ppo_update(params, buffer, trainer_config, update_rng, opt_state)
        eval_res = evaluate(params, tree, target_profile, target_level, eval_games,
                            stable_seed(seed, "eval", it), game=game)
        emit(it, wins / episodes_per_iter, stats, eval_res, steps, illegal,
             time.perf_counter() - iter_start)

    if checkpoint_dir is not None:
        save_checkpoint(params, Path(checkpoint_dir) / run_id / "target_final.ckpt")
    return params, records


def evaluate(params: PolicyParams, tree: TechTree, profile: FidelityProfile, difficulty: int,
             n_games: int, seed: int, *, opponent_table=None, game: Game | None = None) -> EvalResult:
    """Greedy-policy evaluation over n_games seeded episodes."""
    if not isinstance(n_games, int) or isinstance(n_games, bool) or n_games < 1:
        raise InvalidCountError(f"n_games must be a positive integer, got {n_games!r}")
    if game is None:
        table = opponent_table if opponent_table is not None else difficulty_table(
            max(difficulty, 7))
        game = Game(tree, profile, table)
    wins = losses = draws = 0
    total_len = 0
    for i in range(n_games):
        state = game.reset(difficulty, stable_seed(seed, "episode", i))
        obs_ready = state.obs is not None
        while not state.done:
            mask = game.legal_mask(state)
            feats = state.obs if obs_ready else game.featurize(state)
            probs, _ = forward(params, feats, mask)
            game.step(state, greedy_action(probs))
        total_len += state.t
        if state.winner == "agent":
            wins += 1
        elif state.winner == "opponent":
            losses += 1
        else:
            draws += 1
    return EvalResult(win_rate=wins / n_games, wins=wins, losses=losses, draws=draws,
                      mean_episode_length=total_len / n_games)
