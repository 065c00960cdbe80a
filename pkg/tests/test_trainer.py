import numpy as np
import pytest

from thoughtcraft import N_ACTIONS, ReplayBuffer, TrainerConfig, compute_gae, ppo_update
from thoughtcraft.errors import (
    EmptyBufferError,
    LengthMismatchError,
    NonFiniteGradientError,
)
from thoughtcraft.policy import PARAM_NAMES, init_params
from thoughtcraft.trainer import ppo_loss_and_grads

from oracles import gae_bruteforce


class TestComputeGae:
    def test_single_terminal_transition(self):
        adv, ret = compute_gae([1.0], [0.5], [1.0], gamma=0.99, lam=0.95)
        assert adv[0] == pytest.approx(0.5)
        assert ret[0] == pytest.approx(1.0)

    def test_telescoping_with_unit_factors(self):
        rewards = [0.0, 0.0, 0.0, 1.0]
        values = [0.3, -0.2, 0.6, 0.1]
        dones = [0.0, 0.0, 0.0, 1.0]
        adv, _ = compute_gae(rewards, values, dones, gamma=1.0, lam=1.0)
        for t in range(4):
            assert adv[t] == pytest.approx(1.0 - values[t])

    def test_matches_bruteforce_small(self):
        rng = np.random.default_rng(0)
        r = rng.normal(size=5)
        v = rng.normal(size=5)
        d = (rng.random(5) < 0.3).astype(float)
        adv, ret = compute_gae(r, v, d, gamma=0.97, lam=0.9)
        want_adv, want_ret = gae_bruteforce(r, v, d, 0.97, 0.9)
        assert np.max(np.abs(adv - want_adv)) <= 1e-12
        assert np.max(np.abs(ret - want_ret)) <= 1e-12

    def test_matches_bruteforce_many(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            n = int(rng.integers(1, 33))
            r = rng.normal(size=n)
            v = rng.normal(size=n)
            d = (rng.random(n) < 0.2).astype(float)
            if n:
                d[-1] = 1.0
            gamma = float(rng.uniform(0.9, 1.0))
            lam = float(rng.uniform(0.8, 1.0))
            adv, ret = compute_gae(r, v, d, gamma, lam)
            want_adv, want_ret = gae_bruteforce(r, v, d, gamma, lam)
            assert np.max(np.abs(adv - want_adv)) <= 1e-12
            assert np.max(np.abs(ret - want_ret)) <= 1e-12

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            compute_gae([1.0, 0.0], [0.5], [1.0, 0.0], 0.99, 0.95)


def make_buffer(n=10, input_dim=8, seed=0, rewards=None):
    rng = np.random.default_rng(seed)
    buf = ReplayBuffer()
    for t in range(n):
        mask = rng.random(N_ACTIONS) < 0.7
        if not mask.any():
            mask[0] = True
        legal = np.flatnonzero(mask)
        action = int(rng.choice(legal))
        probs = rng.random(N_ACTIONS) * mask
        probs = probs / probs.sum()
        probs[legal[0]] += max(0.0, 1e-3 - probs[legal[0]])
        probs = probs / probs.sum()
        done = t == n - 1
        reward = rewards[t] if rewards is not None else (rng.choice([-1.0, 0.0, 1.0]) if done else 0.0)
        buf.add(rng.uniform(0, 1, input_dim), action,
                float(np.log(probs[action])) if probs[action] > 0 else -5.0,
                reward, float(rng.normal()), done, mask)
    return buf


class TestPpoUpdate:
    def test_empty_buffer(self):
        params = init_params(8, seed=0)
        with pytest.raises(EmptyBufferError):
            ppo_update(params, ReplayBuffer(), TrainerConfig(), np.random.default_rng(0))

    def test_zero_advantages_leave_policy_head_untouched(self):
        # all rewards zero and zero value estimates -> advantages identically zero
        buf = ReplayBuffer()
        rng = np.random.default_rng(1)
        for t in range(12):
            mask = np.ones(N_ACTIONS, dtype=bool)
            buf.add(rng.uniform(0, 1, 8), int(rng.integers(N_ACTIONS)),
                    float(np.log(1.0 / N_ACTIONS)), 0.0, 0.0, t == 11, mask)
        params = init_params(8, seed=2)
        wp_before = params.wp.copy()
        bp_before = params.bp.copy()
        config = TrainerConfig(entropy_coef=0.0)
        ppo_update(params, buf, config, np.random.default_rng(0))
        assert np.array_equal(params.wp, wp_before)
        assert np.array_equal(params.bp, bp_before)

    def test_saturated_clip_gives_zero_policy_gradient(self):
        params = init_params(8, seed=3)
        x = np.linspace(0, 1, 8)
        mask = np.ones(N_ACTIONS, dtype=bool)
        from thoughtcraft.policy import forward

        probs, _ = forward(params, x, mask)
        action = int(np.argmax(probs))
        # choose the behavior log-prob so the ratio is exactly 1.5
        old_logp = float(np.log(probs[action]) - np.log(1.5))
        batch = {
            "features": x[None, :],
            "actions": np.array([action]),
            "log_probs": np.array([old_logp]),
            "advantages": np.array([1.0]),
            "returns": np.array([0.0]),
            "masks": mask[None, :],
        }
        config = TrainerConfig(entropy_coef=0.0, value_coef=0.0, clip_epsilon=0.2)
        _, grads, stats = ppo_loss_and_grads(params, batch, config)
        assert stats["clip_fraction"] == 1.0
        for name in ("wp", "bp", "w1", "b1", "w2", "b2"):
            assert np.all(grads[name] == 0.0), name

    def test_gradients_match_finite_differences(self):
        config = TrainerConfig(entropy_coef=0.013, value_coef=0.5, clip_epsilon=0.2)
        for trial in range(3):
            params = init_params(8, seed=trial)
            buf = make_buffer(n=10, input_dim=8, seed=trial)
            data = buf.arrays()
            adv, ret = compute_gae(data["rewards"], data["values"], data["dones"],
                                   config.gamma, config.gae_lambda)
            adv_n = (adv - adv.mean()) / max(adv.std(), 1e-8)
            batch = {
                "features": data["features"], "actions": data["actions"],
                "log_probs": data["log_probs"], "advantages": adv_n,
                "returns": ret, "masks": data["masks"],
            }
            _, grads, _ = ppo_loss_and_grads(params, batch, config)
            rng = np.random.default_rng(100 + trial)
            worst = 0.0
            for name in PARAM_NAMES:
                arr = getattr(params, name)
                flat = arr.reshape(-1)
                for _ in range(min(10, flat.size)):
                    k = int(rng.integers(flat.size))
                    eps = 1e-5
                    orig = flat[k]
                    flat[k] = orig + eps
                    lp, _, _ = ppo_loss_and_grads(params, batch, config)
                    flat[k] = orig - eps
                    lm, _, _ = ppo_loss_and_grads(params, batch, config)
                    flat[k] = orig
                    fd = (lp - lm) / (2 * eps)
                    analytic = grads[name].reshape(-1)[k]
                    scale = max(abs(fd), abs(analytic), 1e-8)
                    worst = max(worst, abs(fd - analytic) / scale)
            assert worst <= 1e-4, f"trial {trial}: rel err {worst}"

    def test_update_deterministic(self):
        buf = make_buffer(n=40, input_dim=8, seed=5)
        results = []
        for _ in range(2):
            params = init_params(8, seed=6)
            ppo_update(params, buf, TrainerConfig(minibatch_size=16),
                       np.random.default_rng(77))
            results.append({n: getattr(params, n).copy() for n in PARAM_NAMES})
        for name in PARAM_NAMES:
            assert np.array_equal(results[0][name], results[1][name])

    def test_stats_sane(self):
        buf = make_buffer(n=64, input_dim=8, seed=8)
        params = init_params(8, seed=8)
        _, stats, _ = ppo_update(params, buf, TrainerConfig(minibatch_size=32),
                                 np.random.default_rng(0))
        assert 0.0 <= stats["clip_fraction"] <= 1.0
        assert stats["entropy"] >= 0.0
        assert np.isfinite(stats["policy_loss"])
        assert stats["value_loss"] >= 0.0

    def test_non_finite_gradient_raises(self):
        buf = make_buffer(n=8, input_dim=8, seed=9)
        buf.features[3] = np.full(8, np.nan)
        params = init_params(8, seed=9)
        with pytest.raises(NonFiniteGradientError):
            ppo_update(params, buf, TrainerConfig(), np.random.default_rng(0))

    def test_all_finite_after_update(self):
        buf = make_buffer(n=50, input_dim=8, seed=10)
        params = init_params(8, seed=10)
        ppo_update(params, buf, TrainerConfig(), np.random.default_rng(1))
        assert params.all_finite()


class TestTrainerConfig:
    @pytest.mark.parametrize("bad", [
        dict(gamma=0.0), dict(gamma=1.5), dict(gae_lambda=0.0),
        dict(clip_epsilon=0.0), dict(clip_epsilon=1.0),
        dict(learning_rate=0.0), dict(epochs=0), dict(minibatch_size=0),
        dict(optimizer="rmsprop"),
    ])
    def test_validation(self, bad):
        with pytest.raises(ValueError):
            TrainerConfig(**bad)

    def test_from_dict_rejects_unknown(self):
        with pytest.raises(ValueError):
            TrainerConfig.from_dict({"learning_rte": 1e-3})

    def test_sgd_switch(self):
        buf = make_buffer(n=16, input_dim=8, seed=11)
        params = init_params(8, seed=11)
        before = params.w1.copy()
        ppo_update(params, buf, TrainerConfig(optimizer="sgd"), np.random.default_rng(2))
        assert not np.array_equal(params.w1, before)
