"""JSON encoding of dimensions, instances, cubes and cuboids.

Layout::

    {
      "dimensions": [{"name", "levels": [{"name", "attributes": [{"name", "datatype"}]}],
                      "order": [[child, parent], ...],
                      "hierarchies": [{"name", "levels": [...]}]}],
      "instances": {dimension: {"members": {level: {id: {attr: value}}},
                                "rollups": [{"child", "parent", "pairs": [[c, p], ...]}]}},
      "cubes": [{"name", "dimensions": [{"role", "dimension"}],
                 "measures": [{"name", "aggregate", "datatype"}]}],
      "cuboids": [{"name", "cube", "levels": {role: level},
                   "cells": [{"members": {role: id}, "measures": {measure: number}}]}]
    }

Member ids are strings; decimals are read as ``Decimal``.  ``All`` members and
rollups into ``All`` are implicit and are neither required nor written.
"""

from __future__ import annotations

import json
from decimal import Decimal
from pathlib import Path
from typing import Any

from ..errors import ModelError
from .schema import (
    ALL,
    ALL_ATTRIBUTE,
    Attribute,
    Bundle,
    CubeSchema,
    Cuboid,
    DimensionInstance,
    DimensionSchema,
    Hierarchy,
    Level,
    Measure,
    Role,
)


def _level(obj: dict) -> Level:
    if obj["name"] == ALL and not obj.get("attributes"):
        return Level(ALL, (Attribute(ALL_ATTRIBUTE),))
    attrs = tuple(Attribute(a["name"], a.get("datatype", "string")) if isinstance(a, dict) else Attribute(a)
                  for a in obj.get("attributes", ()))
    return Level(obj["name"], attrs)


def dimension_from_json(obj: dict) -> DimensionSchema:
    return DimensionSchema(
        name=obj["name"],
        levels=tuple(_level(lv) for lv in obj["levels"]),
        order=frozenset((c, p) for c, p in obj.get("order", ())),
        hierarchies=tuple(Hierarchy(h["name"], frozenset(h["levels"])) for h in obj.get("hierarchies", ())),
    )


def _member_values(level: Level, raw: Any) -> tuple:
    if isinstance(raw, dict):
        missing = [a.name for a in level.attributes if a.name not in raw]
        if missing:
            raise ModelError("E_BAD_VALUE", f"member of {level.name} lacks attributes {missing}")
        return tuple(raw[a.name] for a in level.attributes)
    if isinstance(raw, (list, tuple)):
        return tuple(raw)
    return (raw,)


def instance_from_json(dim: DimensionSchema, obj: dict) -> DimensionInstance:
    members = {lv.name: {} for lv in dim.levels if lv.name != ALL}
    for level_name, entries in obj.get("members", {}).items():
        if level_name == ALL:
            continue
        level = dim.level(level_name)
        members[level_name] = {str(mid): _member_values(level, raw) for mid, raw in entries.items()}
    rollups = {}
    for r in obj.get("rollups", ()):
        if r["parent"] == ALL:
            continue
        key = (r["child"], r["parent"])
        rollups[key] = rollups.get(key, frozenset()) | frozenset((str(c), str(p)) for c, p in r["pairs"])
    return DimensionInstance(dim, members, rollups)


def bundle_from_json(obj: dict) -> Bundle:
    b = Bundle()
    for d in obj.get("dimensions", ()):
        dim = dimension_from_json(d)
        b.dimensions[dim.name] = dim
    for name, inst in obj.get("instances", {}).items():
        if name not in b.dimensions:
            raise ModelError("E_UNKNOWN_DIMENSION", f"instance for undeclared dimension {name!r}")
        b.instances[name] = instance_from_json(b.dimensions[name], inst)
    for c in obj.get("cubes", ()):
        roles = []
        for r in c["dimensions"]:
            dname = r.get("dimension", r["role"])
            if dname not in b.dimensions:
                raise ModelError("E_UNKNOWN_DIMENSION", f"cube {c['name']} uses undeclared dimension {dname!r}")
            roles.append(Role(r["role"], b.dimensions[dname]))
        measures = tuple(Measure(m["name"], m.get("aggregate", "SUM"), m.get("datatype", "integer"))
                         for m in c.get("measures", ()))
        b.cubes[c["name"]] = CubeSchema(c["name"], tuple(roles), measures)
    for cb in obj.get("cuboids", ()):
        cube = b.cubes.get(cb["cube"])
        if cube is None:
            raise ModelError("E_UNKNOWN_CUBE", f"cuboid {cb.get('name')} refers to unknown cube {cb['cube']!r}")
        levels = tuple(cb["levels"][r] for r in cube.role_names)
        cells = {}
        for cell in cb.get("cells", ()):
            coords = tuple(str(cell["members"][r]) for r in cube.role_names)
            if coords in cells:
                raise ModelError("E_DUP_CELL", f"duplicate cell {coords}")
            cells[coords] = tuple(cell["measures"][m] for m in cube.measure_names)
        name = cb.get("name") or f"{cube.name}_data"
        b.cuboids[name] = Cuboid(cube, levels, cells, name)
    return b


def loads(text: str) -> Bundle:
    return bundle_from_json(json.loads(text, parse_float=Decimal))


def load(path: str | Path) -> Bundle:
    return loads(Path(path).read_text(encoding="utf-8"))


def _num(v):
    # float repr is the shortest round-trip form, so short decimals survive re-reading
    return float(v) if isinstance(v, Decimal) else v


def bundle_to_json(b: Bundle) -> dict:
    dims = []
    for d in b.dimensions.values():
        dims.append({
            "name": d.name,
            "levels": [{"name": lv.name, "attributes": [{"name": a.name, "datatype": a.datatype}
                                                         for a in lv.attributes]} for lv in d.levels],
            "order": [list(p) for p in sorted(d.order)],
            "hierarchies": [{"name": h.name, "levels": sorted(h.levels)} for h in d.hierarchies],
        })
    insts = {}
    for name, inst in b.instances.items():
        lvls = inst.schema.levels
        insts[name] = {
            "members": {lv.name: {mid: {a.name: _num(v) for a, v in zip(lv.attributes, vals)}
                                  for mid, vals in sorted(inst.members.get(lv.name, {}).items())}
                        for lv in lvls if lv.name in inst.members},
            "rollups": [{"child": c, "parent": p, "pairs": [list(x) for x in sorted(pairs)]}
                        for (c, p), pairs in sorted(inst.rollups.items())],
        }
    cubes = [{"name": c.name,
              "dimensions": [{"role": r.name, "dimension": r.dimension.name} for r in c.roles],
              "measures": [{"name": m.name, "aggregate": m.aggregate, "datatype": m.datatype} for m in c.measures]}
             for c in b.cubes.values()]
    cuboids = []
    for name, cb in b.cuboids.items():
        roles, meas = cb.schema.role_names, cb.schema.measure_names
        cuboids.append({
            "name": name,
            "cube": cb.schema.name,
            "levels": dict(zip(roles, cb.levels)),
            "cells": [{"members": dict(zip(roles, k)), "measures": {m: _num(v) for m, v in zip(meas, vals)}}
                      for k, vals in cb.sorted_cells()],
        })
    return {"dimensions": dims, "instances": insts, "cubes": cubes, "cuboids": cuboids}


def dumps(b: Bundle) -> str:
    return json.dumps(bundle_to_json(b), indent=2, ensure_ascii=False) + "\n"


def cuboid_to_json(cb: Cuboid) -> dict:
    roles, meas = cb.schema.role_names, cb.schema.measure_names
    return {
        "cube": cb.schema.name,
        "levels": dict(zip(roles, cb.levels)),
        "cells": [{"members": dict(zip(roles, k)), "measures": {m: _num(v) for m, v in zip(meas, vals)}}
                  for k, vals in cb.sorted_cells()],
    }
