"""Scripted opponents arranged on a smooth difficulty ladder.

Difficulty cheats only through the economy (an income multiplier, mirroring
how built-in RTS bots get resource bonuses); higher levels also attack
earlier and gather larger armies. The script itself is a fixed priority list
and only ever emits actions that are legal in the given state.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

from .actions import OPPONENT, MacroAction
from .errors import EpisodeFinishedError, InvalidZError

_NOOP = int(MacroAction.NOOP)
_BUILD_WORKER = int(MacroAction.BUILD_WORKER)
_BUILD_SUPPLY = int(MacroAction.BUILD_SUPPLY)
_BUILD_PRODUCER_1 = int(MacroAction.BUILD_PRODUCER_1)
_TRAIN_SOLDIER_1 = int(MacroAction.TRAIN_SOLDIER_1)
_ATTACK = int(MacroAction.ATTACK)

WORKER_CAP = 8


@dataclass(frozen=True)
class DifficultyProfile:
    level: int
    income_multiplier: float
    attack_step: int
    target_army_size: int
    rebuilds: bool

    def to_dict(self) -> dict:
        return asdict(self)


def difficulty_table(z: int) -> list:
    """Monotone ladder of z difficulty profiles.

    Income scales linearly from x1.0 to x1.4, the first attack moves earlier,
    and the army the script gathers before attacking grows.
    """
    if not isinstance(z, int) or isinstance(z, bool) or z < 1:
        raise InvalidZError(f"Z must be a positive integer, got {z!r}")
    table = []
    for d in range(1, z + 1):
        f = (d - 1) / max(1, z - 1)
        table.append(DifficultyProfile(
            level=d,
            income_multiplier=round(1.0 + 0.4 * f, 6),
            attack_step=round(124 - 44 * f),
            target_army_size=2 + round(6 * f),
            rebuilds=f >= 0.5,
        ))
    return table


def opponent_action(game, state, profile: DifficultyProfile, rng, player: int = OPPONENT) -> int:
    """Priority script: keep supply headroom, saturate workers, build
    producers to a level-scaled count, train soldiers, attack on schedule or
    at target army size."""
    if state.done:
        raise EpisodeFinishedError("episode is finished")
    ps = state.players[player]

    worker_i = game.worker_i
    supply_i = game.supply_i
    prod_i = game.producer1_i
    soldier_i = game.soldier_is[0]
    q_worker = q_supply = q_prod = q_army = 0
    for entry in ps.queue:
        i = entry[0]
        if i == soldier_i:
            q_army += 1
        elif i == worker_i:
            q_worker += 1
        elif i == supply_i:
            q_supply += 1
        elif i == prod_i:
            q_prod += 1

    headroom = ps.supply_cap + q_supply * game._supply_provided[supply_i] - ps.supply_used
    if headroom < 2 and game._can_build(ps, supply_i):
        return _BUILD_SUPPLY

    if ps.owned[worker_i] + q_worker < WORKER_CAP and game._can_build(ps, worker_i):
        return _BUILD_WORKER

    want_producers = (profile.level + 2) // 3
    if ps.owned[prod_i] + q_prod < want_producers and game._can_build(ps, prod_i):
        return _BUILD_PRODUCER_1

    # production parallelism scales with level: at most `level` units in
    # flight, so higher bots convert their income bonus into a faster stream
    if q_army < profile.level and ps.owned[prod_i] >= 1 and game._can_build(ps, soldier_i):
        return _TRAIN_SOLDIER_1

    if not ps.attacking and (state.t >= profile.attack_step
                             or ps.army_count >= profile.target_army_size):
        if ps.army_count >= 1:
            return _ATTACK

    return _NOOP
