"""Turn-based tactical battle resolution.

A battle runs in simultaneous rounds: every living unit fires once per round,
each side's damage is pooled and drained through the opposing units in
priority order (army, then workers, then structures), and deaths take effect
at the end of the round. Overkill carries to the next unit in the queue; the
shot's armor/bonus are assessed against the unit it initially lands on. When
the defender has no army left, the attacker's remaining pool in that final
round is reported as surplus damage for the defender's base. An attacker that
arrives with no defending army standing fires a single unopposed volley whose
full pool becomes surplus (anti-structure bonuses apply, since the base is a
building).
"""
from __future__ import annotations

from .errors import UnknownIdError

KIND_CODES = {"worker": 0, "army": 1, "building": 2, "supply": 3, "base": 4}
KIND_WORKER, KIND_ARMY, KIND_BUILDING, KIND_SUPPLY, KIND_BASE = range(5)

# target priority: army first, then workers, then any structure
_PRIORITY = (1, 0, 2, 2, 2)


class CombatUnit:
    """Mutable battle participant; hp is drained during resolution."""

    __slots__ = ("uid", "idx", "kind_code", "hp", "attack", "armor", "bonus")

    def __init__(self, uid, kind_code, hp, attack, armor, bonus=(0.0,) * 5, idx=-1):
        self.uid = uid
        self.idx = idx
        self.kind_code = kind_code
        self.hp = float(hp)
        self.attack = float(attack)
        self.armor = float(armor)
        self.bonus = bonus

    def copy(self):
        return CombatUnit(self.uid, self.kind_code, self.hp, self.attack, self.armor,
                          self.bonus, self.idx)

    def __repr__(self):
        return f"CombatUnit({self.uid}, hp={self.hp:g})"


def unit_from_spec(spec, hp=None, idx=-1) -> CombatUnit:
    bonus = [0.0] * 5
    for kind, extra in spec.bonus_vs.items():
        bonus[KIND_CODES[kind]] = float(extra)
    return CombatUnit(spec.id, KIND_CODES[spec.kind], spec.hp if hp is None else hp,
                      spec.attack, spec.armor, tuple(bonus), idx)


def units_from_counts(tree, owned) -> list:
    """Expand an id->count mapping into fresh units, catalog order."""
    units = []
    for pos, uid in enumerate(tree.topo_order):
        n = owned.get(uid, 0)
        if n:
            spec = tree.specs[uid]
            units.extend(unit_from_spec(spec, idx=pos) for _ in range(n))
    for uid in owned:
        if uid not in tree.specs:
            raise UnknownIdError(f"unknown unit id: {uid!r}")
    return units


def _shot(unit, target_kind, target_armor, scale, dmg_mult, sigma, rng):
    dmg = unit.attack + unit.bonus[target_kind] * scale - target_armor
    if dmg < 1.0:
        dmg = 1.0
    dmg *= dmg_mult
    if sigma > 0.0:
        dmg = round(dmg * rng.uniform(1.0 - sigma, 1.0 + sigma))
        if dmg < 1.0:
            dmg = 1.0
    return dmg


def _volley(shooters, targets, scale, dmg_mult, sigma, rng):
    """One side fires once each; returns (per-target drains, leftover pool)."""
    n = len(targets)
    drains = [0.0] * n
    leftover = 0.0
    ptr = 0
    for u in shooters:
        while ptr < n and targets[ptr].hp - drains[ptr] <= 0.0:
            ptr += 1
        if ptr >= n:
            # nothing left to absorb the shot: it lands on the base (a building)
            leftover += _shot(u, KIND_BUILDING, 0.0, scale, dmg_mult, sigma, rng)
            continue
        t = targets[ptr]
        dmg = _shot(u, t.kind_code, t.armor, scale, dmg_mult, sigma, rng)
        while dmg > 0.0 and ptr < n:
            t = targets[ptr]
            avail = t.hp - drains[ptr]
            if avail > dmg:
                drains[ptr] += dmg
                dmg = 0.0
            else:
                drains[ptr] += avail
                dmg -= avail
                ptr += 1
        leftover += dmg
    return drains, leftover


def _sort_targets(units):
    return sorted(units, key=lambda u: _PRIORITY[u.kind_code])  # stable within class


def _has_army(units):
    for u in units:
        if u.kind_code == KIND_ARMY and u.hp > 0.0:
            return True
    return False


def combat_resolve(attacker_units, defender_units, profile, rng):
    """Resolve one engagement; returns (survivors_a, survivors_b, surplus).

    Inputs are not mutated. With combat_noise 0 the result is a pure function
    of the inputs.
    """
    att = [u.copy() for u in attacker_units]
    dfd = [u.copy() for u in defender_units]
    scale = profile.bonus_damage_scale
    dmg_mult = 1.0 + profile.damage_offset
    sigma = profile.combat_noise
    cap = profile.combat_rounds_cap
    surplus = 0.0

    att_sorted = _sort_targets(att)
    dfd_sorted = _sort_targets(dfd)

    rounds = 0
    while rounds < cap and _has_army(att):
        att_alive = [u for u in att if u.hp > 0.0]
        dfd_alive = [u for u in dfd if u.hp > 0.0]
        if not _has_army(dfd_alive):
            # unopposed volley: drain stragglers, the rest hits the base
            dfd_targets = [u for u in dfd_sorted if u.hp > 0.0]
            drains, leftover = _volley(att_alive, dfd_targets, scale, dmg_mult, sigma, rng)
            for u, d in zip(dfd_targets, drains):
                u.hp -= d
            surplus += leftover
            break
        att_targets = [u for u in att_sorted if u.hp > 0.0]
        dfd_targets = [u for u in dfd_sorted if u.hp > 0.0]
        drains_d, leftover_a = _volley(att_alive, dfd_targets, scale, dmg_mult, sigma, rng)
        drains_a, _ = _volley(dfd_alive, att_targets, scale, dmg_mult, sigma, rng)
        for u, d in zip(dfd_targets, drains_d):
            u.hp -= d
        for u, d in zip(att_targets, drains_a):
            u.hp -= d
        rounds += 1
        if not _has_army(dfd):
            surplus += leftover_a
            break

    survivors_a = [u for u in att if u.hp > 0.0]
    survivors_b = [u for u in dfd if u.hp > 0.0]
    return survivors_a, survivors_b, surplus
