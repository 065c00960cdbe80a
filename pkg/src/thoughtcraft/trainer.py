"""On-policy trainer: replay buffer, generalized advantage estimation and a
clipped-surrogate policy update with hand-written backprop.

The loss is  -min(r*A, clip(r)*A) + c_v * MSE(value, return) - c_e * entropy,
averaged per minibatch. Gradients flow through a masked log-softmax so
illegal actions contribute nothing. The optimizer is adaptive
moment-estimation with bias correction; a plain-SGD switch exists so gradient
tests see unscaled steps.
"""
from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .errors import (
    EmptyBufferError,
    LengthMismatchError,
    NonFiniteGradientError,
)
from .policy import PARAM_NAMES, PolicyParams

ADV_STD_FLOOR = 1e-8


@dataclass
class TrainerConfig:
    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip_epsilon: float = 0.2
    epochs: int = 4
    minibatch_size: int = 256
    learning_rate: float = 3e-4
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    max_grad_norm: float = 0.5
    optimizer: str = "adam"
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must be in (0, 1]")
        if not 0.0 < self.gae_lambda <= 1.0:
            raise ValueError("gae_lambda must be in (0, 1]")
        if not 0.0 < self.clip_epsilon < 1.0:
            raise ValueError("clip_epsilon must be in (0, 1)")
        if self.learning_rate <= 0.0:
            raise ValueError("learning_rate must be positive")
        if self.epochs < 1 or self.minibatch_size < 1:
            raise ValueError("epochs and minibatch_size must be >= 1")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError("optimizer must be 'adam' or 'sgd'")

    @classmethod
    def from_dict(cls, raw: dict) -> "TrainerConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown trainer fields {sorted(unknown)}")
        return cls(**raw)


class ReplayBuffer:
    """Flat transition storage; episode boundaries are marked by done flags."""

    def __init__(self):
        self.features = []
        self.actions = []
        self.log_probs = []
        self.rewards = []
        self.values = []
        self.dones = []
        self.masks = []

    def add(self, features, action, log_prob, reward, value, done, mask):
        self.features.append(features)
        self.actions.append(action)
        self.log_probs.append(log_prob)
        self.rewards.append(reward)
        self.values.append(value)
        self.dones.append(done)
        self.masks.append(mask)

    def extend(self, other: "ReplayBuffer"):
        self.features.extend(other.features)
        self.actions.extend(other.actions)
        self.log_probs.extend(other.log_probs)
        self.rewards.extend(other.rewards)
        self.values.extend(other.values)
        self.dones.extend(other.dones)
        self.masks.extend(other.masks)

    def __len__(self):
        return len(self.actions)

    def arrays(self) -> dict:
        return {
            "features": np.asarray(self.features, dtype=np.float64),
            "actions": np.asarray(self.actions, dtype=np.int64),
            "log_probs": np.asarray(self.log_probs, dtype=np.float64),
            "rewards": np.asarray(self.rewards, dtype=np.float64),
            "values": np.asarray(self.values, dtype=np.float64),
            "dones": np.asarray(self.dones, dtype=np.float64),
            "masks": np.asarray(self.masks, dtype=bool),
        }


def compute_gae(rewards, values, dones, gamma: float, lam: float) -> tuple:
    """Backward GAE recursion; the value after the last stored transition is
    taken as zero (buffers end on episode boundaries)."""
    r = np.asarray(rewards, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    d = np.asarray(dones, dtype=np.float64)
    if not (r.shape == v.shape == d.shape) or r.ndim != 1:
        raise LengthMismatchError(
            f"rewards/values/dones must be equal-length 1-d sequences, got "
            f"{r.shape}/{v.shape}/{d.shape}")
    n = r.size
    adv = np.empty(n, dtype=np.float64)
    gae = 0.0
    next_value = 0.0
    for t in range(n - 1, -1, -1):
        nonterminal = 1.0 - d[t]
        delta = r[t] + gamma * next_value * nonterminal - v[t]
        gae = delta + gamma * lam * nonterminal * gae
        adv[t] = gae
        next_value = v[t]
    return adv, adv + v


def _forward_batch(params: PolicyParams, x, masks):
    h1 = np.tanh(x @ params.w1 + params.b1)
    h2 = np.tanh(h1 @ params.w2 + params.b2)
    logits = h2 @ params.wp + params.bp
    values = (h2 @ params.wv).ravel() + params.bv[0]
    ml = np.where(masks, logits, -np.inf)
    lmax = ml.max(axis=1, keepdims=True)
    shifted = ml - lmax
    e = np.exp(shifted)
    z = e.sum(axis=1, keepdims=True)
    log_probs = shifted - np.log(z)   # -inf on illegal entries
    probs = e / z
    return h1, h2, probs, log_probs, values


def ppo_loss_and_grads(params: PolicyParams, batch: dict, config: TrainerConfig) -> tuple:
    """Mean loss over a minibatch plus analytic gradients for every parameter.

    batch carries features, actions, old log-probs, normalized advantages,
    returns and legality masks.
    """
    x = batch["features"]
    actions = batch["actions"]
    old_logp = batch["log_probs"]
    adv = batch["advantages"]
    ret = batch["returns"]
    masks = batch["masks"]
    n = x.shape[0]
    rows = np.arange(n)

    h1, h2, probs, log_probs, values = _forward_batch(params, x, masks)
    logp = log_probs[rows, actions]
    ratio = np.exp(logp - old_logp)
    clipped = np.clip(ratio, 1.0 - config.clip_epsilon, 1.0 + config.clip_epsilon)
    surr1 = ratio * adv
    surr2 = clipped * adv
    policy_loss = -np.minimum(surr1, surr2).mean()

    v_err = values - ret
    value_loss = np.mean(v_err ** 2)

    plogp = np.where(probs > 0.0, probs * np.where(np.isfinite(log_probs), log_probs, 0.0), 0.0)
    entropies = -plogp.sum(axis=1)
    entropy = entropies.mean()

    loss = policy_loss + config.value_coef * value_loss - config.entropy_coef * entropy

    # d loss / d logp: only where the unclipped branch is the active minimum
    use_unclipped = surr1 <= surr2
    dlogp = np.where(use_unclipped, -adv * ratio, 0.0) / n

    one_hot = np.zeros_like(probs)
    one_hot[rows, actions] = 1.0
    dlogits = dlogp[:, None] * (one_hot - probs)

    # entropy term: d(-c_e * H)/d logit = c_e * p * (log p + H)
    safe_logp = np.where(probs > 0.0, np.where(np.isfinite(log_probs), log_probs, 0.0), 0.0)
    dlogits += (config.entropy_coef / n) * probs * (safe_logp + entropies[:, None])

    dvalues = (2.0 * config.value_coef / n) * v_err

    grads = {}
    grads["wp"] = h2.T @ dlogits
    grads["bp"] = dlogits.sum(axis=0)
    grads["wv"] = h2.T @ dvalues[:, None]
    grads["bv"] = np.array([dvalues.sum()])
    dh2 = dlogits @ params.wp.T + dvalues[:, None] @ params.wv.T
    da2 = dh2 * (1.0 - h2 ** 2)
    grads["w2"] = h1.T @ da2
    grads["b2"] = da2.sum(axis=0)
    dh1 = da2 @ params.w2.T
    da1 = dh1 * (1.0 - h1 ** 2)
    grads["w1"] = x.T @ da1
    grads["b1"] = da1.sum(axis=0)

    clip_fraction = float(np.mean(np.abs(ratio - 1.0) > config.clip_epsilon))
    stats = {
        "policy_loss": float(policy_loss),
        "value_loss": float(value_loss),
        "entropy": float(entropy),
        "clip_fraction": clip_fraction,
    }
    return float(loss), grads, stats


def clip_grads_(grads: dict, max_norm: float) -> float:
    total = 0.0
    for g in grads.values():
        total += float((g * g).sum())
    norm = total ** 0.5
    if max_norm > 0 and norm > max_norm:
        scale = max_norm / norm
        for g in grads.values():
            g *= scale
    return norm


class OptimizerState:
    """Adaptive-moment accumulators, threaded across updates."""

    def __init__(self, params: PolicyParams):
        self.m = {n: np.zeros_like(getattr(params, n)) for n in PARAM_NAMES}
        self.v = {n: np.zeros_like(getattr(params, n)) for n in PARAM_NAMES}
        self.t = 0


def _apply_step(params: PolicyParams, grads: dict, config: TrainerConfig,
                opt_state: OptimizerState) -> None:
    if config.optimizer == "sgd":
        for name in PARAM_NAMES:
            p = getattr(params, name)
            p -= config.learning_rate * grads[name]
        return
    opt_state.t += 1
    b1, b2 = config.adam_beta1, config.adam_beta2
    correct1 = 1.0 - b1 ** opt_state.t
    correct2 = 1.0 - b2 ** opt_state.t
    for name in PARAM_NAMES:
        g = grads[name]
        m = opt_state.m[name]
        v = opt_state.v[name]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p = getattr(params, name)
        p -= (config.learning_rate / correct1) * m / (np.sqrt(v / correct2) + config.adam_eps)


def ppo_update(params: PolicyParams, buffer: ReplayBuffer, config: TrainerConfig,
               rng: np.random.Generator, opt_state: OptimizerState | None = None) -> tuple:
    """Run the clipped-surrogate update over the buffer; returns
    (params, stats, opt_state). Parameters are updated in place."""
    if len(buffer) == 0:
        raise EmptyBufferError("replay buffer is empty")
    if opt_state is None:
        opt_state = OptimizerState(params)
    data = buffer.arrays()
    adv, ret = compute_gae(data["rewards"], data["values"], data["dones"],
                           config.gamma, config.gae_lambda)
    std = adv.std()
    adv_n = (adv - adv.mean()) / max(std, ADV_STD_FLOOR)

    n = len(buffer)
    agg = {"policy_loss": 0.0, "value_loss": 0.0, "entropy": 0.0, "clip_fraction": 0.0,
           "grad_norm": 0.0}
    batches = 0
    for _ in range(config.epochs):
        perm = rng.permutation(n)
        for start in range(0, n, config.minibatch_size):
            sel = perm[start:start + config.minibatch_size]
            batch = {
                "features": data["features"][sel],
                "actions": data["actions"][sel],
                "log_probs": data["log_probs"][sel],
                "advantages": adv_n[sel],
                "returns": ret[sel],
                "masks": data["masks"][sel],
            }
            _, grads, stats = ppo_loss_and_grads(params, batch, config)
            for g in grads.values():
                if not np.isfinite(g).all():
                    raise NonFiniteGradientError("non-finite gradient encountered")
            agg["grad_norm"] += clip_grads_(grads, config.max_grad_norm)
            _apply_step(params, grads, config, opt_state)
            for k in ("policy_loss", "value_loss", "entropy", "clip_fraction"):
                agg[k] += stats[k]
            batches += 1
    for k in agg:
        agg[k] /= batches
    return params, agg, opt_state
