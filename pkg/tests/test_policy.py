import collections

import numpy as np
import pytest

from thoughtcraft import (
    N_ACTIONS,
    forward,
    greedy_action,
    init_params,
    load_checkpoint,
    sample_action,
    save_checkpoint,
)
from thoughtcraft.errors import (
    DimensionMismatchError,
    EmptyMaskError,
    InvalidDistributionError,
)
from thoughtcraft.policy import PARAM_NAMES, zero_params

from oracles import forward_plain

FULL = np.ones(N_ACTIONS, dtype=bool)


class TestForward:
    def test_zero_params_uniform(self):
        params = zero_params(16)
        probs, value = forward(params, np.zeros(16), FULL)
        assert np.allclose(probs, 1.0 / N_ACTIONS)
        assert value == 0.0

    def test_single_legal_action(self):
        params = init_params(16, seed=3)
        mask = np.zeros(N_ACTIONS, dtype=bool)
        mask[4] = True
        probs, _ = forward(params, np.linspace(0, 1, 16), mask)
        assert probs[4] == 1.0
        assert probs.sum() == 1.0

    def test_matches_plain_reimplementation(self):
        rng = np.random.default_rng(0)
        for trial in range(50):
            params = init_params(16, seed=trial)
            x = rng.uniform(0, 1, 16)
            mask = rng.random(N_ACTIONS) < 0.7
            if not mask.any():
                mask[0] = True
            probs, value = forward(params, x, mask)
            want_p, want_v = forward_plain(params, x, mask)
            assert np.max(np.abs(probs - want_p)) <= 1e-10
            assert abs(value - want_v) <= 1e-10

    def test_mask_respected_and_normalized(self):
        rng = np.random.default_rng(5)
        params = init_params(16, seed=5)
        for _ in range(200):
            x = rng.uniform(0, 1, 16)
            mask = rng.random(N_ACTIONS) < 0.5
            if not mask.any():
                mask[rng.integers(N_ACTIONS)] = True
            probs, _ = forward(params, x, mask)
            assert abs(probs.sum() - 1.0) <= 1e-6
            assert np.all(probs[~mask] == 0.0)
            assert np.isfinite(probs).all()

    def test_dimension_mismatch(self):
        params = init_params(16, seed=0)
        with pytest.raises(DimensionMismatchError):
            forward(params, np.zeros(24), FULL)
        with pytest.raises(DimensionMismatchError):
            forward(params, np.zeros(16), np.ones(5, dtype=bool))

    def test_empty_mask(self):
        params = init_params(16, seed=0)
        with pytest.raises(EmptyMaskError):
            forward(params, np.zeros(16), np.zeros(N_ACTIONS, dtype=bool))

    def test_deterministic(self):
        params = init_params(16, seed=1)
        x = np.linspace(0, 1, 16)
        p1, v1 = forward(params, x, FULL)
        p2, v2 = forward(params, x, FULL)
        assert np.array_equal(p1, p2) and v1 == v2


class TestSampleAction:
    def test_deterministic_distribution(self):
        probs = np.zeros(N_ACTIONS)
        probs[6] = 1.0
        idx, logp = sample_action(probs, np.random.default_rng(0))
        assert idx == 6 and logp == 0.0

    def test_seeded_reproducible(self):
        probs = np.full(N_ACTIONS, 1.0 / N_ACTIONS)
        draws1 = [sample_action(probs, np.random.default_rng(7))[0] for _ in range(5)]
        draws2 = [sample_action(probs, np.random.default_rng(7))[0] for _ in range(5)]
        assert draws1 == draws2

    def test_empirical_frequencies(self):
        probs = np.array([0.5, 0.2, 0.3])
        rng = np.random.default_rng(11)
        counts = collections.Counter(sample_action(probs, rng)[0] for _ in range(100_000))
        for i, p in enumerate(probs):
            assert abs(counts[i] / 100_000 - p) < 0.01

    def test_log_prob_consistent(self):
        probs = np.array([0.25, 0.75])
        rng = np.random.default_rng(2)
        idx, logp = sample_action(probs, rng)
        assert logp == pytest.approx(np.log(probs[idx]))

    @pytest.mark.parametrize("bad", [
        np.array([0.5, 0.6]),
        np.array([-0.1, 1.1]),
        np.zeros(3),
        np.zeros((2, 2)),
    ])
    def test_invalid_distribution(self, bad):
        with pytest.raises(InvalidDistributionError):
            sample_action(bad, np.random.default_rng(0))

    def test_zero_probability_never_sampled(self):
        probs = np.array([0.0, 1.0, 0.0])
        rng = np.random.default_rng(3)
        assert all(sample_action(probs, rng)[0] == 1 for _ in range(100))

    def test_greedy(self):
        assert greedy_action(np.array([0.1, 0.7, 0.2])) == 1


class TestCheckpoint:
    def test_roundtrip_bit_exact(self, tmp_path):
        params = init_params(24, seed=9)
        path = tmp_path / "ckpt" / "policy.ckpt"
        save_checkpoint(params, path)
        loaded = load_checkpoint(path)
        for name in PARAM_NAMES:
            assert np.array_equal(getattr(params, name), getattr(loaded, name))
            assert getattr(loaded, name).dtype == np.float64

    def test_forward_identical_after_roundtrip(self, tmp_path):
        params = init_params(16, seed=4)
        path = tmp_path / "p.ckpt"
        save_checkpoint(params, path)
        loaded = load_checkpoint(path)
        x = np.linspace(0, 1, 16)
        p1, v1 = forward(params, x, FULL)
        p2, v2 = forward(loaded, x, FULL)
        assert np.array_equal(p1, p2) and v1 == v2
