"""Deterministic random models, programs and conditions for the property tests.

Everything is driven by a ``random.Random`` so a failing case can be
replayed from its seed alone.
"""

from __future__ import annotations

import random
from decimal import Decimal

from qbx.algebra import parse_program, render_condition, typecheck
from qbx.algebra.conditions import And, Comparison, Not, Or
from qbx.algebra.evaluate import evaluate_plan
from qbx.errors import QbxError
from qbx.model import ALL, Bundle
from qbx.model.jsonio import bundle_from_json
from qbx.model.lattice import all_paths
from qbx.qb4olap import Qb4olapCatalog, model_to_graph
from qbx.sparql import compile_plan

BASE = "http://example.org/qbx"
AGGREGATES = ("SUM", "COUNT", "AVG", "MIN", "MAX")
WORDS = ("alpha", "beta", "gamma", "delta")
SHAPES = ("flat", "chain", "chain3", "diamond")
CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------

def _attr_value(rng: random.Random, datatype: str):
    if datatype == "string":
        return rng.choice(WORDS)
    if datatype == "integer":
        return rng.randint(0, 9)
    return Decimal(rng.randint(0, 999)) / 100


def _levels_for(shape: str) -> tuple[list[str], list[tuple[str, str]], list[dict]]:
    if shape == "flat":
        return ["L0"], [("L0", ALL)], []
    if shape == "chain":
        return ["L0", "L1"], [("L0", "L1"), ("L1", ALL)], []
    if shape == "chain3":
        return ["L0", "L1", "L2"], [("L0", "L1"), ("L1", "L2"), ("L2", ALL)], []
    hierarchies = [{"name": "HA", "levels": ["L0", "L1", ALL]}, {"name": "HB", "levels": ["L0", "L2", ALL]}]
    return ["L0", "L1", "L2"], [("L0", "L1"), ("L0", "L2"), ("L1", ALL), ("L2", ALL)], hierarchies


def random_dimension(rng: random.Random, name: str, shape: str | None = None,
                     nonstrict: float = 0.15) -> tuple[dict, dict]:
    """One dimension schema and its instance, as model JSON objects."""
    shape = shape or rng.choice(SHAPES)
    names, order, hierarchies = _levels_for(shape)
    levels, members = [], {}
    for lv in names:
        attrs = [{"name": f"{lv.lower()}{dt[:3].title()}", "datatype": dt}
                 for dt in rng.sample(("string", "integer", "decimal"), rng.randint(1, 2))]
        levels.append({"name": lv, "attributes": attrs})
        count = rng.randint(1, 4) if lv == "L0" else rng.randint(1, 3)
        members[lv] = {f"{name.lower()}{lv.lower()}m{k}": {a["name"]: _attr_value(rng, a["datatype"]) for a in attrs}
                       for k in range(count)}
    levels.append({"name": ALL})
    rollups = []
    for c, p in order:
        if p == ALL:
            continue
        parents = sorted(members[p])
        pairs = []
        for i, m in enumerate(sorted(members[c])):
            # cycle first so every parent gets a child, then randomise
            first = parents[i % len(parents)] if i < len(parents) else rng.choice(parents)
            pairs.append([m, first])
            if len(parents) > 1 and rng.random() < nonstrict:
                pairs.append([m, rng.choice([x for x in parents if x != first])])
        rollups.append({"child": c, "parent": p, "pairs": pairs})
    dim = {"name": name, "levels": levels, "order": [list(x) for x in order], "hierarchies": hierarchies}
    return dim, {"members": members, "rollups": rollups}


def random_bundle(seed: int, *, max_dims: int = 3, max_measures: int = 2, nonstrict: float = 0.15,
                  aggregates=AGGREGATES) -> Bundle:
    rng = random.Random(seed)
    n_dims = rng.randint(1, max_dims)
    dims, insts = [], {}
    for i in range(n_dims):
        d, inst = random_dimension(rng, f"D{i}", nonstrict=nonstrict)
        dims.append(d)
        insts[d["name"]] = inst
    roles = [{"role": f"R{i}", "dimension": d["name"]} for i, d in enumerate(dims)]
    if n_dims < max_dims and rng.random() < 0.25:
        # a second role playing the same dimension
        roles.append({"role": f"R{n_dims}", "dimension": dims[0]["name"]})
    measures = [{"name": f"m{k}", "aggregate": rng.choice(aggregates), "datatype": rng.choice(("integer", "decimal"))}
                for k in range(rng.randint(1, max_measures))]
    bottoms = [sorted(insts[r["dimension"]]["members"]["L0"]) for r in roles]
    combos = [()]
    for ms in bottoms:
        combos = [c + (m,) for c in combos for m in ms]
    chosen = [c for c in combos if rng.random() < 0.6] or [rng.choice(combos)]
    cells = []
    for coords in chosen:
        values = {}
        for m in measures:
            n = rng.randint(0, 60)
            values[m["name"]] = n if m["datatype"] == "integer" else Decimal(n * 25) / 100
        cells.append({"members": {r["role"]: c for r, c in zip(roles, coords)}, "measures": values})
    obj = {
        "dimensions": dims,
        "instances": insts,
        "cubes": [{"name": "Cube", "dimensions": roles, "measures": measures}],
        "cuboids": [{"name": "base", "cube": "Cube", "levels": {r["role"]: "L0" for r in roles}, "cells": cells}],
    }
    return bundle_from_json(obj)


# ---------------------------------------------------------------------------
# conditions
# ---------------------------------------------------------------------------

def random_leaf(rng: random.Random, bundle: Bundle, cube, levels, measures) -> Comparison:
    choices = []
    for role, lv in zip(cube.role_names, levels):
        if lv != ALL:
            choices += ["member", "attribute"]
    choices += ["measure"] * (1 if measures else 0)
    kind = rng.choice(choices)
    if kind == "measure":
        m = cube.measure(rng.choice(measures))
        value = rng.randint(0, 60) if m.datatype == "integer" else Decimal(rng.randint(0, 1500)) / 100
        return Comparison((m.name,), rng.choice(CMP_OPS), value)
    live = [(r, lv) for r, lv in zip(cube.role_names, levels) if lv != ALL]
    role, lv = rng.choice(live)
    inst = bundle.instances[cube.role(role).dimension.name]
    ids = sorted(inst.level_members(lv))
    if kind == "member":
        mid = rng.choice(ids) if rng.random() < 0.85 else "nosuchmember"
        return Comparison((role, lv), rng.choice(("=", "!=")), mid)
    level = cube.role(role).dimension.level(lv)
    attr = rng.choice(level.attributes)
    if rng.random() < 0.7 and ids:
        value = inst.attribute_value(lv, rng.choice(ids), attr.name)
    else:
        value = _attr_value(rng, attr.datatype)
    return Comparison((role, lv, attr.name), rng.choice(CMP_OPS), value)


def random_condition(rng: random.Random, bundle: Bundle, cube, levels, measures, depth: int = 2):
    if depth <= 0 or rng.random() < 0.4:
        return random_leaf(rng, bundle, cube, levels, measures)
    kind = rng.choice(("and", "and", "or", "not"))
    if kind == "not":
        return Not(random_condition(rng, bundle, cube, levels, measures, depth - 1))
    left = random_condition(rng, bundle, cube, levels, measures, depth - 1)
    right = random_condition(rng, bundle, cube, levels, measures, depth - 1)
    return And(left, right) if kind == "and" else Or(left, right)


# ---------------------------------------------------------------------------
# programs
# ---------------------------------------------------------------------------

def _rollup_statement(rng, dim, role: str, current: str) -> tuple[str, str] | None:
    targets = [lv for lv in dim.level_names if lv != current and dim.reachable(current, lv)]
    if not targets:
        return None
    target = rng.choice(targets)
    if len(all_paths(dim, current, target)) > 1:
        hier = [h.name for h in dim.hierarchies if len(all_paths(dim, current, target, h.name)) == 1]
        return f"{role}.{rng.choice(hier)}, {target}", target
    return f"{role}, {target}", target


def random_program(rng: random.Random, bundle: Bundle, max_ops: int = 3) -> str:
    """A program of 1..max_ops statements over the bundle's cube that typechecks."""
    cube = bundle.only_cube()
    base = bundle.cuboid_for(cube)
    lines: list[str] = []
    roles = list(cube.role_names)
    levels = dict(zip(roles, base.levels))
    measures = list(cube.measure_names)
    igo = False  # a slice or dice has been emitted
    src = cube.name
    for i in range(rng.randint(1, max_ops)):
        for _attempt in range(20):
            op = rng.choice(("ROLLUP", "ROLLUP", "DRILLDOWN", "SLICE", "DICE"))
            if op == "ROLLUP":
                role = rng.choice(roles)
                dim = cube.role(role).dimension
                got = _rollup_statement(rng, dim, role, levels[role])
                if got is None:
                    continue
                args, levels[role] = got
            elif op == "DRILLDOWN":
                if igo:
                    continue
                up = [r for r in roles if levels[r] != cube.role(r).dimension.bottom]
                if not up:
                    continue
                role = rng.choice(up)
                dim = cube.role(role).dimension
                below = [lv for lv in dim.level_names if lv != levels[role] and dim.reachable(lv, levels[role])]
                target = rng.choice(below)
                args, levels[role] = f"{role}, {target}", target
            elif op == "SLICE":
                if len(roles) > 1 and (len(measures) == 1 or rng.random() < 0.6):
                    target = rng.choice(roles)
                    roles.remove(target)
                    del levels[target]
                elif len(measures) > 1:
                    target = rng.choice(measures)
                    measures.remove(target)
                else:
                    continue
                args, igo = target, True
            else:
                # bind against the roles still present, so rebuild a restricted schema view
                shape_cube = cube
                for r in cube.role_names:
                    if r not in roles:
                        shape_cube = shape_cube.without_role(r)
                cond = random_condition(rng, bundle, shape_cube, [levels[r] for r in shape_cube.role_names],
                                        measures)
                args, igo = render_condition(cond), True
            name = f"C{i + 1}"
            lines.append(f"{name} = {op}({src}, {args})")
            src = name
            break
    text = "\n".join(lines) + "\n"
    typecheck(parse_program(text), cube, base.levels)  # generator invariant
    return text


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

def catalog_for(bundle: Bundle) -> Qb4olapCatalog:
    return Qb4olapCatalog(model_to_graph(bundle, BASE))


def plan_for(bundle: Bundle, text: str):
    cube = bundle.only_cube()
    return typecheck(parse_program(text), cube, bundle.cuboid_for(cube).levels)


def oracle_result(bundle: Bundle, text: str):
    cube = bundle.only_cube()
    base = bundle.cuboid_for(cube)
    return evaluate_plan(plan_for(bundle, text), base, bundle.instances_for(cube))


def endpoint_result(bundle: Bundle, text: str, engine, run_id: str = "t", cat: Qb4olapCatalog | None = None):
    """Compile, run on ``engine`` and decode; returns the decoded cuboid."""
    from qbx.endpoint import run_compiled

    cat = cat or catalog_for(bundle)
    compiled = compile_plan(plan_for(bundle, text), cat, BASE, run_id)
    engine.upload_graph(cat.graph, compiled.model_graph)
    return run_compiled(compiled, engine).cuboid


def structurally_equal(a: Bundle, b: Bundle) -> bool:
    """Same dimensions, instances, cubes and cuboids, ignoring dict insertion order."""
    return (a.dimensions == b.dimensions and a.cubes == b.cubes
            and {k: (v.members, v.rollups) for k, v in a.instances.items()}
            == {k: (v.members, v.rollups) for k, v in b.instances.items()}
            and {k: (v.schema, v.levels, dict(v.cells)) for k, v in a.cuboids.items()}
            == {k: (v.schema, v.levels, dict(v.cells)) for k, v in b.cuboids.items()})


def is_valid(text: str, bundle: Bundle) -> bool:
    try:
        plan_for(bundle, text)
        return True
    except QbxError:
        return False
