"""Unit/building catalog with dependency queries.

The catalog is a JSON list of unit records. Producing an item requires its
producer structure, every listed prerequisite, and enough resources/supply.
"""
from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    DanglingReferenceError,
    DependencyCycleError,
    FileMissingError,
    MalformedRecordError,
    MultipleBasesError,
    NoBaseError,
    UnknownIdError,
)

KINDS = ("worker", "army", "building", "supply", "base")

_REQUIRED_FIELDS = {
    "id": str,
    "kind": str,
    "mineral_cost": int,
    "gas_cost": int,
    "supply_cost": int,
    "supply_provided": int,
    "build_time": int,
    "hp": int,
    "attack": int,
    "armor": int,
}
_OPTIONAL_FIELDS = ("bonus_vs", "produced_by", "requires")


@dataclass(frozen=True)
class UnitSpec:
    id: str
    kind: str
    mineral_cost: int
    gas_cost: int
    supply_cost: int
    supply_provided: int
    build_time: int
    hp: int
    attack: int
    armor: int
    bonus_vs: dict = field(default_factory=dict)
    produced_by: str | None = None
    requires: tuple = ()


@dataclass(frozen=True)
class TechTree:
    specs: dict
    topo_order: tuple

    def spec(self, unit_id: str) -> UnitSpec:
        try:
            return self.specs[unit_id]
        except KeyError:
            raise UnknownIdError(f"unknown unit id: {unit_id!r}") from None

    @property
    def base_id(self) -> str:
        for uid in self.topo_order:
            if self.specs[uid].kind == "base":
                return uid
        raise NoBaseError("tree has no base")  # unreachable after load_specs


@dataclass(frozen=True)
class BuildDecision:
    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def _parse_record(raw: dict) -> UnitSpec:
    if not isinstance(raw, dict):
        raise MalformedRecordError(f"catalog record is not an object: {raw!r}")
    unknown = set(raw) - set(_REQUIRED_FIELDS) - set(_OPTIONAL_FIELDS)
    if unknown:
        raise MalformedRecordError(f"unknown fields {sorted(unknown)} in record {raw.get('id')!r}")
    for name, typ in _REQUIRED_FIELDS.items():
        if name not in raw:
            raise MalformedRecordError(f"missing field {name!r} in record {raw.get('id')!r}")
        if not isinstance(raw[name], typ) or isinstance(raw[name], bool):
            raise MalformedRecordError(f"field {name!r} has wrong type in record {raw.get('id')!r}")
    if raw["kind"] not in KINDS:
        raise MalformedRecordError(f"unknown kind {raw['kind']!r} in record {raw['id']!r}")
    for name in ("mineral_cost", "gas_cost", "supply_cost", "supply_provided", "attack", "armor"):
        if raw[name] < 0:
            raise MalformedRecordError(f"field {name!r} out of range in record {raw['id']!r}")
    if raw["build_time"] < 1:
        raise MalformedRecordError(f"build_time must be >= 1 in record {raw['id']!r}")
    if raw["hp"] < 1:
        raise MalformedRecordError(f"hp must be >= 1 in record {raw['id']!r}")

    bonus_vs = raw.get("bonus_vs", {})
    if not isinstance(bonus_vs, dict):
        raise MalformedRecordError(f"bonus_vs must be an object in record {raw['id']!r}")
    for k, v in bonus_vs.items():
        if k not in KINDS or not isinstance(v, int) or isinstance(v, bool) or v < 0:
            raise MalformedRecordError(f"bad bonus_vs entry {k!r}: {v!r} in record {raw['id']!r}")

    produced_by = raw.get("produced_by")
    if produced_by is not None and not isinstance(produced_by, str):
        raise MalformedRecordError(f"produced_by must be a string in record {raw['id']!r}")
    requires = raw.get("requires", [])
    if not isinstance(requires, list) or not all(isinstance(r, str) for r in requires):
        raise MalformedRecordError(f"requires must be a list of ids in record {raw['id']!r}")

    return UnitSpec(
        id=raw["id"],
        kind=raw["kind"],
        mineral_cost=raw["mineral_cost"],
        gas_cost=raw["gas_cost"],
        supply_cost=raw["supply_cost"],
        supply_provided=raw["supply_provided"],
        build_time=raw["build_time"],
        hp=raw["hp"],
        attack=raw["attack"],
        armor=raw["armor"],
        bonus_vs=dict(bonus_vs),
        produced_by=produced_by,
        requires=tuple(requires),
    )


def _topo_sort(specs: dict) -> tuple:
    # Edges run prerequisite -> dependent; ties broken lexicographically so
    # the order is stable across loads.
    dependents = {uid: [] for uid in specs}
    indegree = {uid: 0 for uid in specs}
    for uid, spec in specs.items():
        prereqs = set(spec.requires)
        if spec.produced_by is not None:
            prereqs.add(spec.produced_by)
        for p in prereqs:
            dependents[p].append(uid)
            indegree[uid] += 1
    ready = [uid for uid, deg in indegree.items() if deg == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        uid = heapq.heappop(ready)
        order.append(uid)
        for dep in dependents[uid]:
            indegree[dep] -= 1
            if indegree[dep] == 0:
                heapq.heappush(ready, dep)
    if len(order) != len(specs):
        stuck = sorted(uid for uid, deg in indegree.items() if deg > 0)
        raise DependencyCycleError(f"prerequisite graph has a cycle involving {stuck}")
    return tuple(order)


def load_specs(path) -> TechTree:
    """Load a catalog file and return a validated TechTree."""
    path = Path(path)
    if not path.is_file():
        raise FileMissingError(f"catalog file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise MalformedRecordError(f"catalog is not valid JSON: {exc}") from exc
    return build_tree(raw)


def build_tree(records) -> TechTree:
    """Validate raw catalog records (a list of dicts) into a TechTree."""
    if not isinstance(records, list):
        raise MalformedRecordError("catalog must be a top-level list of records")
    specs = {}
    for raw in records:
        spec = _parse_record(raw)
        if spec.id in specs:
            raise MalformedRecordError(f"duplicate id {spec.id!r}")
        specs[spec.id] = spec

    bases = [uid for uid, s in specs.items() if s.kind == "base"]
    if len(bases) == 0:
        raise NoBaseError("catalog has no base")
    if len(bases) > 1:
        raise MultipleBasesError(f"catalog has multiple bases: {sorted(bases)}")
    if specs[bases[0]].produced_by is not None:
        raise MalformedRecordError("the starting base must not have produced_by")

    for uid, spec in specs.items():
        refs = list(spec.requires)
        if spec.produced_by is not None:
            refs.append(spec.produced_by)
        for ref in refs:
            if ref not in specs:
                raise DanglingReferenceError(f"record {uid!r} references unknown id {ref!r}")

    topo = _topo_sort(specs)
    return TechTree(specs=specs, topo_order=topo)


_REASON_ORDER = ("producer", "tech", "minerals", "gas", "supply")


def buildable(tree: TechTree, owned, minerals, gas, supply_free, target) -> BuildDecision:
    """Decide whether `target` can be produced right now.

    Checks run in the fixed order producer, tech, minerals, gas, supply and
    the first failure is reported.
    """
    spec = tree.spec(target)
    if spec.produced_by is not None and owned.get(spec.produced_by, 0) < 1:
        return BuildDecision(False, "producer")
    for req in spec.requires:
        if owned.get(req, 0) < 1:
            return BuildDecision(False, "tech")
    if minerals < spec.mineral_cost:
        return BuildDecision(False, "minerals")
    if gas < spec.gas_cost:
        return BuildDecision(False, "gas")
    if supply_free < spec.supply_cost:
        return BuildDecision(False, "supply")
    return BuildDecision(True)


def buildable_set(tree: TechTree, owned, minerals, gas, supply_free) -> set:
    """All ids currently producible; backs the action legality mask."""
    return {
        uid
        for uid in tree.topo_order
        if buildable(tree, owned, minerals, gas, supply_free, uid).ok
    }
