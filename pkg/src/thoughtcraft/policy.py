"""Small two-hidden-layer tanh policy/value network in plain numpy.

Everything is float64 and hand-rolled so the optimizer's gradients can be
checked against finite differences and the transfer construction is an exact
weight-copy identity.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .actions import N_ACTIONS
from .errors import (
    DimensionMismatchError,
    EmptyMaskError,
    InvalidDistributionError,
    MalformedRecordError,
)

HIDDEN = 64

PARAM_NAMES = ("w1", "b1", "w2", "b2", "wp", "bp", "wv", "bv")


@dataclass
class PolicyParams:
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    wp: np.ndarray
    bp: np.ndarray
    wv: np.ndarray
    bv: np.ndarray

    @property
    def input_dim(self) -> int:
        return self.w1.shape[0]

    @property
    def hidden(self) -> int:
        return self.w1.shape[1]

    @property
    def n_actions(self) -> int:
        return self.wp.shape[1]

    def copy(self) -> "PolicyParams":
        return PolicyParams(*(getattr(self, n).copy() for n in PARAM_NAMES))

    def as_dict(self) -> dict:
        return {n: getattr(self, n) for n in PARAM_NAMES}

    def all_finite(self) -> bool:
        return all(np.isfinite(getattr(self, n)).all() for n in PARAM_NAMES)


def init_params(input_dim: int, n_actions: int = N_ACTIONS, hidden: int = HIDDEN,
                seed: int = 0) -> PolicyParams:
    """Scaled-gaussian init; the policy head starts small so the initial
    distribution is near uniform."""
    rng = np.random.default_rng(seed)
    w1 = rng.standard_normal((input_dim, hidden)) / math.sqrt(input_dim)
    w2 = rng.standard_normal((hidden, hidden)) / math.sqrt(hidden)
    wp = rng.standard_normal((hidden, n_actions)) * (0.01 / math.sqrt(hidden))
    wv = rng.standard_normal((hidden, 1)) / math.sqrt(hidden)
    return PolicyParams(
        w1=w1, b1=np.zeros(hidden),
        w2=w2, b2=np.zeros(hidden),
        wp=wp, bp=np.zeros(n_actions),
        wv=wv, bv=np.zeros(1),
    )


def zero_params(input_dim: int, n_actions: int = N_ACTIONS, hidden: int = HIDDEN) -> PolicyParams:
    return PolicyParams(
        w1=np.zeros((input_dim, hidden)), b1=np.zeros(hidden),
        w2=np.zeros((hidden, hidden)), b2=np.zeros(hidden),
        wp=np.zeros((hidden, n_actions)), bp=np.zeros(n_actions),
        wv=np.zeros((hidden, 1)), bv=np.zeros(1),
    )


def forward(params: PolicyParams, features, mask) -> tuple:
    """(action probabilities, value). Illegal actions get probability zero."""
    x = np.asarray(features, dtype=np.float64)
    if x.shape != (params.input_dim,):
        raise DimensionMismatchError(
            f"expected {params.input_dim} features, got shape {x.shape}")
    m = np.asarray(mask, dtype=bool)
    if m.shape != (params.n_actions,):
        raise DimensionMismatchError(
            f"expected mask of length {params.n_actions}, got shape {m.shape}")
    if not m.any():
        raise EmptyMaskError("no legal action in mask")
    h1 = np.tanh(x @ params.w1 + params.b1)
    h2 = np.tanh(h1 @ params.w2 + params.b2)
    logits = h2 @ params.wp + params.bp
    value = float((h2 @ params.wv + params.bv)[0])
    probs = masked_softmax(logits, m)
    return probs, value


def masked_softmax(logits: np.ndarray, mask: np.ndarray) -> np.ndarray:
    ml = np.where(mask, logits, -np.inf)
    e = np.exp(ml - ml.max())
    return e / e.sum()


def sample_action(probs, rng) -> tuple:
    """Draw an action index from the distribution; returns (index, log-prob)."""
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1 or p.size == 0 or (p < -1e-12).any() or abs(p.sum() - 1.0) > 1e-6:
        raise InvalidDistributionError("probabilities must be nonnegative and sum to 1")
    r = rng.random()
    acc = 0.0
    idx = -1
    for i in range(p.size):
        pi = p[i]
        if pi <= 0.0:
            continue
        acc += pi
        idx = i
        if r < acc:
            break
    return idx, float(np.log(p[idx]))


def greedy_action(probs) -> int:
    return int(np.argmax(probs))


CHECKPOINT_VERSION = 1


def save_checkpoint(params: PolicyParams, path) -> None:
    """Round-trippable JSON checkpoint (row-major nested lists)."""
    blob = {
        "version": CHECKPOINT_VERSION,
        "input_dim": params.input_dim,
        "hidden": params.hidden,
        "n_actions": params.n_actions,
        "shapes": {n: list(getattr(params, n).shape) for n in PARAM_NAMES},
        "arrays": {n: getattr(params, n).tolist() for n in PARAM_NAMES},
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(blob))


def load_checkpoint(path) -> PolicyParams:
    path = Path(path)
    try:
        blob = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedRecordError(f"cannot read checkpoint {path}: {exc}") from exc
    if blob.get("version") != CHECKPOINT_VERSION:
        raise MalformedRecordError(f"unsupported checkpoint version {blob.get('version')!r}")
    arrays = {}
    for name in PARAM_NAMES:
        arr = np.asarray(blob["arrays"][name], dtype=np.float64)
        if list(arr.shape) != blob["shapes"][name]:
            raise MalformedRecordError(f"checkpoint array {name!r} has inconsistent shape")
        arrays[name] = arr
    return PolicyParams(**arrays)
