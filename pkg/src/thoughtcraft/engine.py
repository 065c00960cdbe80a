"""Game engine: one rule set instantiated at two fidelity levels.

The engine is deliberately plain Python tuned for throughput; the thought
profile steps in the tens-of-microseconds range so curriculum training can
burn through episodes. The target profile simulates the same rules at a finer
internal tick resolution, with combat noise and income/damage offsets, and
materializes a full observation vector every step the way a real game client
would. That cost difference is the fidelity gap the training pipeline exploits.
"""
from __future__ import annotations

import hashlib
import random

import numpy as np

from .actions import AGENT, OPPONENT
from .combat import KIND_ARMY, KIND_CODES, combat_resolve, unit_from_spec
from .errors import (
    ConfigInvalidError,
    DifficultyOutOfRangeError,
    EpisodeFinishedError,
    UnknownFeatureError,
)
from .opponents import difficulty_table, opponent_action
from .profiles import FidelityProfile
from .techtree import TechTree

_WIN, _LOSS, _DRAW = 1.0, -1.0, 0.0


def stable_seed(*parts) -> int:
    """Deterministic 64-bit seed from arbitrary parts, hash-seed independent."""
    digest = hashlib.sha256(":".join(map(str, parts)).encode()).digest()
    return int.from_bytes(digest[:8], "little")


class PlayerState:
    __slots__ = ("minerals", "gas", "supply_used", "supply_cap", "owned", "queue",
                 "base_hp", "attacking", "income_mult", "army_count")

    def __init__(self, minerals, gas, supply_used, supply_cap, owned, base_hp, income_mult):
        self.minerals = minerals
        self.gas = gas
        self.supply_used = supply_used
        self.supply_cap = supply_cap
        self.owned = owned
        self.queue = []
        self.base_hp = base_hp
        self.attacking = False
        self.income_mult = income_mult
        self.army_count = 0

    def owned_by_id(self, ids) -> dict:
        return {uid: n for uid, n in zip(ids, self.owned) if n}


class GameState:
    __slots__ = ("players", "t", "difficulty", "rng", "done", "winner",
                 "illegal_agent_actions", "obs")

    def __init__(self, players, difficulty, rng):
        self.players = players
        self.t = 0
        self.difficulty = difficulty
        self.rng = rng
        self.done = False
        self.winner = None
        self.illegal_agent_actions = 0
        self.obs = None

    @property
    def agent(self) -> PlayerState:
        return self.players[0]

    @property
    def opponent(self) -> PlayerState:
        return self.players[1]


class Game:
    """Engine instance bound to a catalog, a fidelity profile and an opponent
    difficulty table. Holds no per-episode state; many GameStates can be
    stepped through one Game concurrently as long as each state stays on a
    single worker."""

    def __init__(self, tree: TechTree, profile: FidelityProfile, opponent_table=None):
        self.tree = tree
        self.profile = profile
        self.table = list(opponent_table) if opponent_table is not None else difficulty_table(7)

        ids = list(tree.topo_order)
        self.ids = ids
        self.index = {uid: i for i, uid in enumerate(ids)}
        n = len(ids)
        specs = [tree.specs[uid] for uid in ids]
        self._mineral_cost = [float(s.mineral_cost) for s in specs]
        self._gas_cost = [float(s.gas_cost) for s in specs]
        self._supply_cost = [s.supply_cost for s in specs]
        self._supply_provided = [s.supply_provided for s in specs]
        self._build_time = [s.build_time for s in specs]
        self._kind_code = [KIND_CODES[s.kind] for s in specs]
        self._hp = [s.hp for s in specs]
        self._produced_by = [self.index[s.produced_by] if s.produced_by else -1 for s in specs]
        self._requires = [tuple(self.index[r] for r in s.requires) for s in specs]
        self._proto = [unit_from_spec(s, idx=i) for i, s in enumerate(specs)]

        self._bind_actions(specs)

        self._F = profile.ticks_per_step
        income_factor = 1.0 + profile.income_offset
        self._rate_m_tick = profile.mineral_income_per_worker_per_step * income_factor / self._F
        self._rate_g_tick = profile.gas_income_per_worker_per_step * income_factor / self._F
        self._inv_max_steps = 1.0 / profile.max_steps
        self._emit_obs = profile.name == "target"

        self._extractor_cache = {}
        self._extractors = self._compile_schema(profile.feature_schema)

    # ------------------------------------------------------------------
    # catalog -> macro action binding
    # ------------------------------------------------------------------

    def _bind_actions(self, specs):
        # tier rank = longest prerequisite chain, so soldier/producer slots
        # line up with how deep in the tech tree the unit sits
        depth = {}
        for i in range(len(specs)):  # topo order, prereqs resolve first
            prereqs = list(self._requires[i])
            if self._produced_by[i] >= 0:
                prereqs.append(self._produced_by[i])
            depth[i] = 1 + max((depth[p] for p in prereqs), default=0)

        def tier_key(i):
            s = specs[i]
            return (depth[i], s.mineral_cost + s.gas_cost, s.id)

        workers = [i for i, s in enumerate(specs) if s.kind == "worker"]
        supplies = [i for i, s in enumerate(specs) if s.kind == "supply"]
        army = sorted((i for i, s in enumerate(specs) if s.kind == "army"), key=tier_key)
        produced_by_set = {self._produced_by[i] for i in range(len(specs))} - {-1}
        producers = sorted((i for i, s in enumerate(specs)
                            if s.kind == "building" and i in produced_by_set), key=tier_key)
        techs = [i for i, s in enumerate(specs)
                 if s.kind == "building" and i not in produced_by_set]
        if len(workers) != 1 or len(supplies) != 1:
            raise ConfigInvalidError("catalog must define exactly one worker and one supply structure")
        if len(producers) != 2 or len(techs) != 1:
            raise ConfigInvalidError("catalog must define exactly two producer tiers and one tech structure")
        if len(army) != 3:
            raise ConfigInvalidError("catalog must define exactly three army types")
        self.worker_i = workers[0]
        self.supply_i = supplies[0]
        self.base_i = next(i for i, s in enumerate(specs) if s.kind == "base")
        self.producer1_i, self.producer2_i = producers
        self.tech_i = techs[0]
        self.soldier_is = tuple(army)
        self._army_set = frozenset(army)
        self.action_target = [
            -1, self.worker_i, self.supply_i, self.producer1_i, self.producer2_i,
            self.tech_i, *self.soldier_is, -1, -1,
        ]

    # ------------------------------------------------------------------
    # episode control
    # ------------------------------------------------------------------

    def reset(self, difficulty: int, seed: int) -> GameState:
        """Fresh episode: both players get one base and eight workers."""
        if not isinstance(difficulty, int) or isinstance(difficulty, bool):
            raise DifficultyOutOfRangeError(f"difficulty must be an int, got {difficulty!r}")
        if not 1 <= difficulty <= len(self.table):
            raise DifficultyOutOfRangeError(
                f"difficulty {difficulty} outside [1, {len(self.table)}]")
        rng = random.Random(stable_seed(seed, self.profile.name, difficulty))
        players = []
        for slot in (AGENT, OPPONENT):
            owned = [0] * len(self.ids)
            owned[self.base_i] = 1
            owned[self.worker_i] = 8
            players.append(PlayerState(
                minerals=self.profile.starting_minerals,
                gas=self.profile.starting_gas,
                supply_used=8 * self._supply_cost[self.worker_i],
                supply_cap=self._supply_provided[self.base_i],
                owned=owned,
                base_hp=self._hp[self.base_i],
                income_mult=1.0 if slot == AGENT else self.table[difficulty - 1].income_multiplier,
            ))
        state = GameState(tuple(players), difficulty, rng)
        if self._emit_obs:
            state.obs = self._features(state, self._extractors)
        return state

    def legal_mask(self, state: GameState, player: int = AGENT) -> list:
        """Boolean legality mask over the macro action vocabulary."""
        if state.done:
            raise EpisodeFinishedError("episode is finished")
        ps = state.players[player]
        can = self._can_build
        mask = [True]
        targets = self.action_target
        for a in range(1, 9):
            mask.append(can(ps, targets[a]))
        mask.append(ps.army_count >= 1)
        mask.append(ps.attacking)
        return mask

    def _can_build(self, ps: PlayerState, i: int) -> bool:
        pb = self._produced_by[i]
        if pb >= 0 and ps.owned[pb] < 1:
            return False
        for r in self._requires[i]:
            if ps.owned[r] < 1:
                return False
        if ps.minerals < self._mineral_cost[i]:
            return False
        if ps.gas < self._gas_cost[i]:
            return False
        if ps.supply_cap - ps.supply_used < self._supply_cost[i]:
            return False
        return True

    def _apply_action(self, state: GameState, player: int, action: int, count_illegal: bool):
        ps = state.players[player]
        if action == 0:
            return
        if action == 9:
            if ps.army_count >= 1:
                ps.attacking = True
            elif count_illegal:
                state.illegal_agent_actions += 1
            return
        if action == 10:
            if ps.attacking:
                ps.attacking = False
            elif count_illegal:
                state.illegal_agent_actions += 1
            return
        i = self.action_target[action]
        if self._can_build(ps, i):
            ps.minerals -= self._mineral_cost[i]
            ps.gas -= self._gas_cost[i]
            ps.supply_used += self._supply_cost[i]
            ps.queue.append([i, self._build_time[i] * self._F])
        elif count_illegal:
            state.illegal_agent_actions += 1

    def step(self, state: GameState, agent_action: int, opponent_controller=None):
        """Advance one step; returns (reward, done) from the agent's side.

        Effect order is fixed: agent action, opponent action, economy and
        production, combat, terminal check. Illegal actions fall back to NoOp
        and are counted.
        """
        if state.done:
            raise EpisodeFinishedError("episode is finished")
        self._apply_action(state, AGENT, agent_action, True)
        if opponent_controller is None:
            opp_act = opponent_action(self, state, self.table[state.difficulty - 1],
                                      state.rng, OPPONENT)
        else:
            opp_act = opponent_controller(state)
        self._apply_action(state, OPPONENT, opp_act, False)
        self.economy_tick(state)
        agent, opp = state.players
        if agent.attacking or opp.attacking:
            self._combat_step(state)
        state.t += 1
        reward = _DRAW
        if opp.base_hp <= 0:
            state.done = True
            state.winner = "agent"
            reward = _WIN
        elif agent.base_hp <= 0:
            state.done = True
            state.winner = "opponent"
            reward = _LOSS
        elif state.t >= self.profile.max_steps:
            state.done = True
            state.winner = "none"
        if self._emit_obs:
            state.obs = self._features(state, self._extractors)
        return reward, state.done

    def economy_tick(self, state: GameState):
        """One step of income and production for both players.

        Income counts only completed workers; queued items do not mine. The
        target profile runs the same bookkeeping at sub-step tick resolution
        with per-worker accrual, so finished workers begin mining mid-step.
        """
        F = self._F
        rate_m = self._rate_m_tick
        rate_g = self._rate_g_tick
        worker_i = self.worker_i
        kind_code = self._kind_code
        supply_provided = self._supply_provided
        for ps in state.players:
            mult = ps.income_mult
            if F == 1:
                w = ps.owned[worker_i]
                if w:
                    ps.minerals += w * rate_m * mult
                    ps.gas += w * rate_g * mult
                q = ps.queue
                if q:
                    completed = False
                    for entry in q:
                        entry[1] -= 1
                        if entry[1] <= 0:
                            completed = True
                    if completed:
                        self._complete(ps, q)
            else:
                rm = rate_m * mult
                rg = rate_g * mult
                for _ in range(F):
                    w = ps.owned[worker_i]
                    if w:
                        m = 0.0
                        g = 0.0
                        for _ in range(w):
                            m += rm
                            g += rg
                        ps.minerals += m
                        ps.gas += g
                    q = ps.queue
                    if q:
                        completed = False
                        for entry in q:
                            entry[1] -= 1
                            if entry[1] <= 0:
                                completed = True
                        if completed:
                            self._complete(ps, q)

    def _complete(self, ps: PlayerState, queue):
        finished = [e[0] for e in queue if e[1] <= 0]
        ps.queue = [e for e in queue if e[1] > 0]
        for i in finished:
            ps.owned[i] += 1
            sp = self._supply_provided[i]
            if sp:
                ps.supply_cap += sp
            if self._kind_code[i] == KIND_ARMY:
                ps.army_count += 1

    def _stamp_army(self, ps: PlayerState, armor_bonus: int = 0) -> list:
        units = []
        for i in self.soldier_is:
            n = ps.owned[i]
            if n:
                proto = self._proto[i]
                for _ in range(n):
                    u = proto.copy()
                    u.armor += armor_bonus
                    units.append(u)
        return units

    def _combat_step(self, state: GameState):
        # A side fighting at home (not itself attacking) is entrenched: +1
        # armor, so breaking a defense takes committed numbers. When both
        # sides attack they clash in the field with no bonus on either side.
        agent, opp = state.players
        if agent.attacking:
            att_p, dfd_p = agent, opp
        else:
            att_p, dfd_p = opp, agent
        att_units = self._stamp_army(att_p)
        dfd_units = self._stamp_army(dfd_p, armor_bonus=0 if dfd_p.attacking else 1)
        surv_a, surv_d, surplus = combat_resolve(att_units, dfd_units, self.profile, state.rng)
        self._absorb_losses(att_p, surv_a)
        self._absorb_losses(dfd_p, surv_d)
        if surplus > 0.0:
            dfd_p.base_hp = max(0, dfd_p.base_hp - int(round(surplus)))
        if att_p.army_count == 0:
            att_p.attacking = False
        if dfd_p.army_count == 0:
            dfd_p.attacking = False

    def _absorb_losses(self, ps: PlayerState, survivors):
        alive = {}
        for u in survivors:
            alive[u.idx] = alive.get(u.idx, 0) + 1
        total = 0
        for i in self.soldier_is:
            before = ps.owned[i]
            now = alive.get(i, 0)
            if now != before:
                ps.owned[i] = now
                ps.supply_used -= (before - now) * self._supply_cost[i]
            total += now
        ps.army_count = total

    # ------------------------------------------------------------------
    # features
    # ------------------------------------------------------------------

    def featurize(self, state: GameState, schema=None) -> np.ndarray:
        """Normalized feature vector in [0, 1], agent perspective.

        Any schema drawn from the computable feature set may be passed, which
        is how a thought-schema view of a target-game state is produced.
        """
        if schema is None or tuple(schema) == self.profile.feature_schema:
            extractors = self._extractors
        else:
            key = tuple(schema)
            extractors = self._extractor_cache.get(key)
            if extractors is None:
                extractors = self._compile_schema(key)
                self._extractor_cache[key] = extractors
        return self._features(state, extractors)

    @staticmethod
    def _features(state, extractors) -> np.ndarray:
        return np.fromiter((f(state) for f in extractors), np.float64, count=len(extractors))

    def _compile_schema(self, schema):
        norms = self.profile.normalizers
        extractors = []
        for name in schema:
            if name not in norms:
                raise UnknownFeatureError(f"no normalizer configured for feature {name!r}")
            extractors.append(self._make_extractor(name, 1.0 / norms[name]))
        return tuple(extractors)

    def _make_extractor(self, name: str, inv: float):
        def clamped(fn):
            def f(state):
                v = fn(state)
                if v < 0.0:
                    return 0.0
                return v if v < 1.0 else 1.0
            return f

        if name == "minerals":
            return clamped(lambda s: s.players[0].minerals * inv)
        if name == "gas":
            return clamped(lambda s: s.players[0].gas * inv)
        if name == "supply_used":
            return clamped(lambda s: s.players[0].supply_used * inv)
        if name == "supply_cap":
            return clamped(lambda s: s.players[0].supply_cap * inv)
        if name.startswith("owned_"):
            uid = name[6:]
            if uid not in self.index:
                raise UnknownFeatureError(f"feature {name!r} references unknown unit {uid!r}")
            i = self.index[uid]
            return clamped(lambda s: s.players[0].owned[i] * inv)
        if name == "queue_len":
            return clamped(lambda s: len(s.players[0].queue) * inv)
        if name == "time":
            frac = self._inv_max_steps
            return clamped(lambda s: s.t * frac * inv)
        if name == "attacking":
            return lambda s: 1.0 if s.players[0].attacking else 0.0
        if name == "enemy_army":
            return clamped(lambda s: s.players[1].army_count * inv)
        if name == "income_rate":
            per_step_m = self._rate_m_tick * self._F
            wi = self.worker_i
            return clamped(lambda s: s.players[0].owned[wi] * per_step_m
                           * s.players[0].income_mult * inv)
        if name == "army_hp_total":
            hp = self._hp
            soldiers = self.soldier_is
            return clamped(lambda s: sum(s.players[0].owned[i] * hp[i] for i in soldiers) * inv)
        if name == "enemy_base_hp":
            full = float(self._hp[self.base_i])
            return clamped(lambda s: s.players[1].base_hp / full * inv)
        if name == "own_base_hp":
            full = float(self._hp[self.base_i])
            return clamped(lambda s: s.players[0].base_hp / full * inv)
        if name == "enemy_workers":
            wi = self.worker_i
            return clamped(lambda s: s.players[1].owned[wi] * inv)
        if name == "enemy_producers":
            p1, p2 = self.producer1_i, self.producer2_i
            return clamped(lambda s: (s.players[1].owned[p1] + s.players[1].owned[p2]) * inv)
        if name == "enemy_supply_used":
            return clamped(lambda s: s.players[1].supply_used * inv)
        if name == "enemy_attacking":
            return lambda s: 1.0 if s.players[1].attacking else 0.0
        raise UnknownFeatureError(f"unknown feature {name!r}")
