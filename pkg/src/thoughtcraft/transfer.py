"""Policy transfer between fidelities.

Target states project onto thought states by selecting the shared feature
names (the schemas use identical normalizers, so no value transformation is
needed), actions map by identity, and a thought policy expands to the target
input width by copying rows for shared features and zeroing rows for new
ones. At transfer time the expanded policy is therefore exactly equivalent to
running the thought policy on the projected state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .actions import N_ACTIONS
from .errors import (
    DimensionMismatchError,
    SchemaMismatchError,
    UnknownActionError,
    UnknownFeatureError,
)
from .policy import PolicyParams
from .profiles import FidelityProfile, validate_profile_pair


@dataclass(frozen=True)
class MappingSchema:
    thought_names: tuple
    target_names: tuple
    indices: tuple          # position of each thought feature in the target vector
    action_table: tuple     # identity permutation over the macro vocabulary

    @classmethod
    def build(cls, thought_schema, target_schema) -> "MappingSchema":
        thought_names = tuple(thought_schema)
        target_names = tuple(target_schema)
        pos = {name: i for i, name in enumerate(target_names)}
        indices = []
        for name in thought_names:
            if name not in pos:
                raise UnknownFeatureError(
                    f"thought feature {name!r} is absent from the target schema")
            indices.append(pos[name])
        return cls(thought_names=thought_names, target_names=target_names,
                   indices=tuple(indices), action_table=tuple(range(N_ACTIONS)))

    @classmethod
    def from_profiles(cls, thought: FidelityProfile, target: FidelityProfile) -> "MappingSchema":
        validate_profile_pair(thought, target)
        return cls.build(thought.feature_schema, target.feature_schema)


def map_state(target_features, schema: MappingSchema) -> np.ndarray:
    """Project a target feature vector onto the thought schema."""
    x = np.asarray(target_features, dtype=np.float64)
    if x.shape != (len(schema.target_names),):
        raise DimensionMismatchError(
            f"expected {len(schema.target_names)} target features, got shape {x.shape}")
    return x[list(schema.indices)]


def map_action(action: int) -> int:
    """Identity action mapping; the vocabularies coincide by construction."""
    a = int(action)
    if not 0 <= a < N_ACTIONS:
        raise UnknownActionError(f"action index {action!r} outside the vocabulary")
    return a


def transfer_init(thought_params: PolicyParams, target_schema, schema: MappingSchema) -> PolicyParams:
    """Expand a thought policy to the target input width.

    Rows of the first-layer weights move to the positions of their features
    in the target schema; rows for target-only features start at exactly
    zero; every other parameter is copied verbatim. At initialization the
    result computes identical distributions and values to the thought policy
    on mapped states.
    """
    target_names = tuple(target_schema)
    if target_names != schema.target_names:
        raise SchemaMismatchError("target schema does not match the mapping schema")
    if thought_params.input_dim != len(schema.thought_names):
        raise SchemaMismatchError(
            f"policy input dim {thought_params.input_dim} != thought schema size "
            f"{len(schema.thought_names)}")
    w1 = np.zeros((len(target_names), thought_params.hidden))
    for row, pos in enumerate(schema.indices):
        w1[pos] = thought_params.w1[row]
    return PolicyParams(
        w1=w1,
        b1=thought_params.b1.copy(),
        w2=thought_params.w2.copy(),
        b2=thought_params.b2.copy(),
        wp=thought_params.wp.copy(),
        bp=thought_params.bp.copy(),
        wv=thought_params.wv.copy(),
        bv=thought_params.bv.copy(),
    )
