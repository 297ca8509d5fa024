"""Brute-force in-memory evaluation of the cube operators.

This is the ground truth the SPARQL compiler is checked against.  Roll-up
applies each measure's aggregate directly to the input cells grouped by the
target coordinates, the same computation a single generated query performs.
Rollup relations use join semantics: a child with k parents contributes to
each of them.
"""

from __future__ import annotations

from decimal import Decimal
from typing import Mapping, Sequence

from ..algebra.conditions import AttributeRef, Condition, MeasureRef, MemberRef, bind, evaluate
from ..errors import ModelError
from .lattice import levels_path, preferred_path
from .schema import ALL, Cuboid, DimensionInstance, Number

Instances = Mapping[str, DimensionInstance]  # role name -> instance


def aggregate(func: str, values: Sequence[Number]) -> Number:
    if func == "SUM":
        return sum(values, 0)
    if func == "COUNT":
        return len(values)
    if func == "MIN":
        return min(values)
    if func == "MAX":
        return max(values)
    if func == "AVG":
        total = sum((Decimal(v) for v in values), Decimal(0))
        return total / Decimal(len(values))
    raise ModelError("E_NO_AGG", f"unknown aggregate function {func!r}")


def _ancestors(inst: DimensionInstance, path: Sequence[tuple[str, str]], member: str) -> list[str]:
    """Members reached from ``member`` along ``path``, one entry per distinct chain."""
    frontier = [member]
    for child, parent in path:
        pmap = inst.parent_map(child, parent)
        frontier = [p for m in frontier for p in pmap.get(m, ())]
    return frontier


def rollup_along(c: Cuboid, role: str, path: Sequence[tuple[str, str]], instances: Instances) -> Cuboid:
    if not path:
        return c
    idx = c.schema.role_index(role)
    if path[0][0] != c.levels[idx]:
        raise ModelError("E_NO_PATH", f"path starts at {path[0][0]} but {role} is at {c.levels[idx]}")
    inst = instances[role]
    groups: dict[tuple, list[tuple]] = {}
    for coords, values in c.sorted_cells():
        for target in _ancestors(inst, path, coords[idx]):
            key = coords[:idx] + (target,) + coords[idx + 1:]
            groups.setdefault(key, []).append(values)
    funcs = [m.aggregate for m in c.schema.measures]
    cells = {
        key: tuple(aggregate(f, [row[i] for row in rows]) for i, f in enumerate(funcs))
        for key, rows in groups.items()
    }
    levels = c.levels[:idx] + (path[-1][1],) + c.levels[idx + 1:]
    return Cuboid(c.schema, levels, cells)


def aggregate_adjacent(c: Cuboid, role: str, parent: str, instances: Instances) -> Cuboid:
    current = c.level_of(role)
    dim = c.schema.role(role).dimension
    if (current, parent) not in dim.order:
        raise ModelError("E_NOT_PARENT", f"{parent} is not a direct parent of {current} in {dim.name}")
    return rollup_along(c, role, [(current, parent)], instances)


def oracle_rollup(c: Cuboid, role: str, target: str, instances: Instances,
                  hierarchy: str | None = None) -> Cuboid:
    dim = c.schema.role(role).dimension
    path = levels_path(dim, c.level_of(role), target, hierarchy)
    return rollup_along(c, role, path, instances)


def oracle_drilldown(c: Cuboid, role: str, target: str, bottom: Cuboid, instances: Instances,
                     hierarchy: str | None = None) -> Cuboid:
    """Recompute ``c`` at a finer level of ``role`` by rolling up ``bottom``."""
    if bottom.levels != bottom.schema.bottom_levels():
        raise ModelError("E_NOT_BOTTOM", "drill-down needs the bottom cuboid of the cube instance")
    dim = c.schema.role(role).dimension
    current = c.level_of(role)
    if not dim.reachable(target, current):
        raise ModelError("E_NO_PATH", f"{target} is not below {current} in {dim.name}")
    wanted = list(c.levels)
    wanted[c.schema.role_index(role)] = target
    out = bottom
    for r, lv in zip(c.schema.roles, wanted):
        hint = hierarchy if r.name == role else None
        path = preferred_path(r.dimension, out.level_of(r.name), lv, hint)
        out = rollup_along(out, r.name, path, instances)
    return out


def oracle_dice(c: Cuboid, cond: Condition, instances: Instances) -> Cuboid:
    bound = bind(cond, c.schema, c.levels)

    def keep(coords, values) -> bool:
        def lookup(ref):
            if isinstance(ref, MeasureRef):
                return values[c.schema.measure_index(ref.measure)]
            mid = coords[c.schema.role_index(ref.role)]
            if isinstance(ref, MemberRef):
                return mid
            assert isinstance(ref, AttributeRef)
            return instances[ref.role].attribute_value(ref.level, mid, ref.attribute)

        return evaluate(bound, lookup)

    cells = {k: v for k, v in c.sorted_cells() if keep(k, v)}
    return Cuboid(c.schema, c.levels, cells)


def project(c: Cuboid, role: str) -> Cuboid:
    """Drop a role that already sits at ``All``."""
    idx = c.schema.role_index(role)
    if c.levels[idx] != ALL:
        raise ModelError("E_NOT_AT_ALL", f"cannot project {role}: it is at {c.levels[idx]}, not All")
    cells = {}
    for coords, values in c.sorted_cells():
        key = coords[:idx] + coords[idx + 1:]
        if key in cells:
            raise ModelError("E_DUP_CELL", f"projection of {role} merges cells at {key}")
        cells[key] = values
    return Cuboid(c.schema.without_role(role), c.levels[:idx] + c.levels[idx + 1:], cells)


def drop_measure(c: Cuboid, measure: str) -> Cuboid:
    if len(c.schema.measures) <= 1:
        raise ModelError("E_LAST_MEASURE", "cannot slice away the only measure")
    idx = c.schema.measure_index(measure)
    cells = {k: v[:idx] + v[idx + 1:] for k, v in c.sorted_cells()}
    return Cuboid(c.schema.without_measure(measure), c.levels, cells)


def oracle_slice(c: Cuboid, target: str, instances: Instances, hierarchy: str | None = None) -> Cuboid:
    if target in c.schema.role_names:
        if len(c.schema.roles) <= 1:
            raise ModelError("E_LAST_DIM", "cannot slice away the only dimension")
        dim = c.schema.role(target).dimension
        path = preferred_path(dim, c.level_of(target), ALL, hierarchy)
        return project(rollup_along(c, target, path, instances), target)
    if target in c.schema.measure_names:
        return drop_measure(c, target)
    raise ModelError("E_UNKNOWN_ROLE", f"{target!r} is neither a dimension role nor a measure")
