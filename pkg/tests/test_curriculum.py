import numpy as np
import pytest

from thoughtcraft import (
    CurriculumConfig,
    N_ACTIONS,
    ReplayBuffer,
    TrainerConfig,
    advance_check,
    evaluate,
    init_params,
    run_curriculum,
    train_target,
)
from thoughtcraft.errors import InvalidCountError, InvalidCountsError


class TestAdvanceCheck:
    def test_threshold_crossing(self):
        assert advance_check(17, 20, 0.8) is True

    def test_strict_inequality_at_one(self):
        assert advance_check(20, 20, 1.0) is False

    def test_zero_wins(self):
        for threshold in (0.01, 0.5, 1.0):
            assert advance_check(0, 32, threshold) is False

    def test_exhaustive_small_ranges(self):
        for window in range(1, 65):
            for wins in range(window + 1):
                for threshold in (0.25, 0.5, 0.75, 0.9):
                    assert advance_check(wins, window, threshold) == (wins / window > threshold)

    def test_large_window_spot_checks(self):
        assert advance_check(7_501, 10_000, 0.75) is True
        assert advance_check(7_500, 10_000, 0.75) is False

    @pytest.mark.parametrize("wins,window", [(-1, 10), (11, 10), (0, 0), (1.5, 10), (3, 2.0)])
    def test_invalid_counts(self, wins, window):
        with pytest.raises(InvalidCountsError):
            advance_check(wins, window, 0.5)


def _stub_collect(wins_fn):
    """Builds a collect_fn whose wins are scripted; buffers stay tiny."""

    def collect(game, params, difficulty, n_episodes, seed, iteration, rng):
        buf = ReplayBuffer()
        mask = np.ones(N_ACTIONS, dtype=bool)
        for t in range(8):
            buf.add(np.zeros(params.input_dim), 0, float(np.log(1 / N_ACTIONS)),
                    0.0, 0.0, t == 7, mask)
        wins = wins_fn(difficulty, iteration)
        return buf, wins, 8, 0

    return collect


class TestRunCurriculum:
    def test_always_winning_stub_reaches_top_in_z_iterations(self, tree, thought_profile):
        config = CurriculumConfig(max_difficulty=7, max_iterations=50,
                                  episodes_per_window=4, consolidation_iters=0, seed=0)
        collect = _stub_collect(lambda d, it: 4)
        params, cur, records = run_curriculum(
            config, tree, thought_profile, TrainerConfig(), collect_fn=collect)
        assert cur.completed
        assert cur.iteration == 7
        assert [h[1] for h in cur.history] == [1, 2, 3, 4, 5, 6, 7]

    def test_threshold_one_never_advances(self, tree, thought_profile):
        config = CurriculumConfig(win_rate_threshold=1.0, max_difficulty=3,
                                  max_iterations=9, episodes_per_window=4,
                                  consolidation_iters=0, seed=0)
        collect = _stub_collect(lambda d, it: 3)  # one loss in every window
        params, cur, records = run_curriculum(
            config, tree, thought_profile, TrainerConfig(), collect_fn=collect)
        assert not cur.completed
        assert cur.budget_exhausted
        assert cur.difficulty == 1
        assert cur.iteration == 9

    def test_difficulty_trace_monotone(self, tree, thought_profile):
        config = CurriculumConfig(max_difficulty=4, max_iterations=40,
                                  episodes_per_window=4, consolidation_iters=0, seed=1)
        collect = _stub_collect(lambda d, it: 4 if it % 2 == 0 else 1)
        params, cur, records = run_curriculum(
            config, tree, thought_profile, TrainerConfig(), collect_fn=collect)
        trace = [h[1] for h in cur.history]
        assert all(b >= a for a, b in zip(trace, trace[1:]))

    def test_metrics_counters_nondecreasing(self, tree, thought_profile):
        config = CurriculumConfig(max_difficulty=3, max_iterations=12,
                                  episodes_per_window=4, consolidation_iters=0, seed=2)
        collect = _stub_collect(lambda d, it: 4 if it >= 3 else 0)
        _, _, records = run_curriculum(
            config, tree, thought_profile, TrainerConfig(), collect_fn=collect)
        for prev, cur_ in zip(records, records[1:]):
            assert cur_.episodes_total >= prev.episodes_total
            assert cur_.env_steps_total >= prev.env_steps_total
            assert cur_.iteration == prev.iteration + 1

    def test_checkpoints_written_on_advance(self, tree, thought_profile, tmp_path):
        config = CurriculumConfig(max_difficulty=2, max_iterations=8,
                                  episodes_per_window=4, consolidation_iters=0, seed=3)
        collect = _stub_collect(lambda d, it: 4)
        run_curriculum(config, tree, thought_profile, TrainerConfig(),
                       run_id="ckpt-test", collect_fn=collect, checkpoint_dir=tmp_path)
        files = sorted(p.name for p in (tmp_path / "ckpt-test").iterdir())
        assert "thought_final.ckpt" in files
        assert any(name.startswith("thought_0") for name in files)

    def test_real_miniature_run_is_deterministic(self, tree, thought_profile):
        config = CurriculumConfig(max_difficulty=2, max_iterations=6,
                                  episodes_per_window=6, consolidation_iters=2, seed=4)
        outs = []
        for _ in range(2):
            params, cur, records = run_curriculum(config, tree, thought_profile, TrainerConfig())
            outs.append((tuple(cur.history),
                         tuple((r.win_rate_window, r.policy_loss, r.entropy) for r in records),
                         params.w1.copy()))
        assert outs[0][0] == outs[1][0]
        assert outs[0][1] == outs[1][1]
        assert np.array_equal(outs[0][2], outs[1][2])


class TestTrainTarget:
    def test_zero_iterations_is_noop(self, tree, target_profile):
        params = init_params(len(target_profile.feature_schema), seed=0)
        before = params.w1.copy()
        out, records = train_target(params, tree, target_profile, 7, TrainerConfig(),
                                    n_iterations=0, seed=0)
        assert records == []
        assert np.array_equal(out.w1, before)

    def test_miniature_run_emits_eval_records(self, tree, target_profile):
        params = init_params(len(target_profile.feature_schema), seed=1)
        _, records = train_target(params, tree, target_profile, 7, TrainerConfig(),
                                  episodes_per_iter=2, n_iterations=2, eval_games=2, seed=1)
        assert len(records) == 3  # iteration 0 evaluation plus two iterations
        assert records[0].iteration == 0
        assert all(r.win_rate_eval is not None for r in records)
        assert all(r.phase == "target" for r in records)


class TestEvaluate:
    def test_invalid_count(self, tree, thought_profile):
        params = init_params(len(thought_profile.feature_schema), seed=0)
        for bad in (0, -5, 2.5):
            with pytest.raises(InvalidCountError):
                evaluate(params, tree, thought_profile, 1, bad, 0)

    def test_counts_partition(self, tree, thought_profile):
        params = init_params(len(thought_profile.feature_schema), seed=2)
        res = evaluate(params, tree, thought_profile, 1, 10, 0)
        assert res.wins + res.losses + res.draws == 10
        assert 0.0 <= res.win_rate <= 1.0
        assert res.mean_episode_length > 0

    def test_passive_policy_loses(self, tree, thought_profile):
        from thoughtcraft.policy import zero_params

        # all-zero parameters: uniform over legal, argmax ties break to NoOp
        params = zero_params(len(thought_profile.feature_schema))
        res = evaluate(params, tree, thought_profile, 7, 5, 0)
        assert res.win_rate == 0.0
        assert res.losses == 5

    def test_reproducible(self, tree, thought_profile):
        params = init_params(len(thought_profile.feature_schema), seed=3)
        r1 = evaluate(params, tree, thought_profile, 2, 8, 42)
        r2 = evaluate(params, tree, thought_profile, 2, 8, 42)
        assert r1 == r2
