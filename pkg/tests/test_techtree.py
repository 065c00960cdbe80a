import json
import random

import pytest

from thoughtcraft import buildable, buildable_set, load_specs
from thoughtcraft.errors import (
    DanglingReferenceError,
    DependencyCycleError,
    FileMissingError,
    MalformedRecordError,
    MultipleBasesError,
    NoBaseError,
    UnknownIdError,
)

from oracles import dependency_closure, dfs_has_cycle

AMPLE = dict(minerals=10_000, gas=10_000, supply_free=500)


def _record(uid, kind="building", **over):
    rec = {
        "id": uid, "kind": kind, "mineral_cost": 10, "gas_cost": 0,
        "supply_cost": 0, "supply_provided": 0, "build_time": 5,
        "hp": 50, "attack": 0, "armor": 0,
    }
    rec.update(over)
    return rec


def _write(tmp_path, records, name="catalog.json"):
    path = tmp_path / name
    path.write_text(json.dumps(records))
    return path


class TestLoadSpecs:
    def test_bundled_catalog_zealot(self, tree):
        zealot = tree.spec("zealot")
        assert zealot.produced_by == "gateway"
        assert zealot.build_time == 19
        # producible only once a gateway exists
        owned = {"nexus": 1, "probe": 8}
        assert not buildable(tree, owned, target="zealot", **AMPLE).ok
        owned["gateway"] = 1
        assert buildable(tree, owned, target="zealot", **AMPLE).ok

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileMissingError):
            load_specs(tmp_path / "nope.json")

    def test_empty_catalog_is_no_base(self, tmp_path):
        with pytest.raises(NoBaseError):
            load_specs(_write(tmp_path, []))

    def test_cycle_detected(self, tmp_path):
        a = _record("a", requires=["b"])
        b = _record("b", requires=["a"])
        base = _record("home", kind="base")
        records = [a, b, base]
        edges = {r["id"]: list(r.get("requires", [])) for r in records}
        assert dfs_has_cycle(edges)
        with pytest.raises(DependencyCycleError):
            load_specs(_write(tmp_path, records))

    def test_bundled_catalog_acyclic_by_dfs(self, tree):
        edges = {}
        for uid, spec in tree.specs.items():
            deps = list(spec.requires)
            if spec.produced_by:
                deps.append(spec.produced_by)
            edges[uid] = deps
        assert not dfs_has_cycle(edges)

    def test_topo_order_valid(self, tree):
        position = {uid: i for i, uid in enumerate(tree.topo_order)}
        for uid, spec in tree.specs.items():
            for dep in list(spec.requires) + ([spec.produced_by] if spec.produced_by else []):
                assert position[dep] < position[uid]

    def test_load_deterministic(self):
        from thoughtcraft import default_catalog_path

        t1 = load_specs(default_catalog_path())
        t2 = load_specs(default_catalog_path())
        assert t1.topo_order == t2.topo_order
        assert t1.specs == t2.specs

    def test_dangling_reference(self, tmp_path):
        records = [_record("home", kind="base"), _record("a", requires=["ghost"])]
        with pytest.raises(DanglingReferenceError):
            load_specs(_write(tmp_path, records))

    def test_multiple_bases(self, tmp_path):
        records = [_record("b1", kind="base"), _record("b2", kind="base")]
        with pytest.raises(MultipleBasesError):
            load_specs(_write(tmp_path, records))

    @pytest.mark.parametrize("mutation", [
        {"build_time": 0},
        {"hp": 0},
        {"mineral_cost": -1},
        {"kind": "dragon"},
        {"mineral_cost": "50"},
        {"surprise_field": 1},
        {"bonus_vs": {"dragon": 2}},
        {"bonus_vs": {"army": -1}},
    ])
    def test_malformed_records(self, tmp_path, mutation):
        rec = _record("home", kind="base")
        rec.update(mutation)
        with pytest.raises(MalformedRecordError):
            load_specs(_write(tmp_path, [rec]))

    def test_duplicate_id(self, tmp_path):
        records = [_record("home", kind="base"), _record("home", kind="base")]
        with pytest.raises(MalformedRecordError):
            load_specs(_write(tmp_path, records))

    def test_base_with_producer_rejected(self, tmp_path):
        records = [_record("home", kind="base", produced_by="w"),
                   _record("w", kind="worker", supply_cost=1)]
        with pytest.raises(MalformedRecordError):
            load_specs(_write(tmp_path, records))


class TestBuildable:
    def test_no_producer_reason(self, tree):
        decision = buildable(tree, {"nexus": 1, "probe": 8}, target="zealot", **AMPLE)
        assert not decision.ok
        assert decision.reason == "producer"

    def test_insufficient_minerals(self, tree):
        assert tree.spec("probe").mineral_cost == 50
        decision = buildable(tree, {"nexus": 1}, 0, 0, 10, "probe")
        assert decision.reason == "minerals"

    def test_gas_and_supply_reasons(self, tree):
        owned = {"nexus": 1, "probe": 1, "gateway": 1, "cybernetics_core": 1}
        assert buildable(tree, owned, 10_000, 0, 500, "stalker").reason == "gas"
        assert buildable(tree, owned, 10_000, 10_000, 0, "stalker").reason == "supply"

    def test_tech_reason(self, tree):
        owned = {"nexus": 1, "probe": 1, "gateway": 1}
        assert buildable(tree, owned, target="stalker", **AMPLE).reason == "tech"

    def test_reason_order_producer_first(self, tree):
        # every check fails; the first in the fixed order wins
        decision = buildable(tree, {}, 0, 0, 0, "stalker")
        assert decision.reason == "producer"

    def test_unknown_id(self, tree):
        with pytest.raises(UnknownIdError):
            buildable(tree, {}, 0, 0, 0, "carrier")

    def test_full_closure_everything_buildable(self, tree):
        records = json.loads(open(str(__import__("thoughtcraft").default_catalog_path())).read())
        closure = dependency_closure(records)
        assert closure == set(tree.specs)
        owned = {uid: 1 for uid in closure}
        for uid in tree.topo_order:
            assert buildable(tree, owned, target=uid, **AMPLE).ok

    def test_monotone_in_ownership(self, tree):
        rng = random.Random(7)
        ids = list(tree.topo_order)
        for _ in range(300):
            owned = {uid: rng.randint(0, 2) for uid in rng.sample(ids, rng.randint(0, len(ids)))}
            minerals = rng.choice([0, 30, 60, 10_000])
            gas = rng.choice([0, 20, 10_000])
            supply = rng.choice([0, 2, 500])
            target = rng.choice(ids)
            before = buildable(tree, owned, minerals, gas, supply, target).ok
            extra = dict(owned)
            extra[rng.choice(ids)] = extra.get(rng.choice(ids), 0) + 1
            after = buildable(tree, extra, minerals, gas, supply, target).ok
            if before:
                assert after


class TestBuildableSet:
    def test_initial_ownership(self, tree):
        owned = {"nexus": 1, "probe": 8}
        got = buildable_set(tree, owned, 50, 0, 2)
        assert got == {"probe", "pylon", "gateway"}

    def test_empty_owned_no_resources(self, tree):
        assert buildable_set(tree, {}, 0, 0, 0) == set()

    def test_closure_ample_is_everything(self, tree):
        owned = {uid: 1 for uid in tree.specs}
        assert buildable_set(tree, owned, 10_000, 10_000, 500) == set(tree.specs)

    def test_matches_per_id_filter(self, tree):
        rng = random.Random(13)
        ids = list(tree.topo_order)
        for _ in range(100):
            owned = {uid: rng.randint(0, 3) for uid in rng.sample(ids, rng.randint(0, len(ids)))}
            minerals, gas, supply = rng.randint(0, 300), rng.randint(0, 100), rng.randint(0, 40)
            got = buildable_set(tree, owned, minerals, gas, supply)
            want = {uid for uid in ids if buildable(tree, owned, minerals, gas, supply, uid).ok}
            assert got == want
