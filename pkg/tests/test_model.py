import math
import random
from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_bundle, random_dimension
from qbx.algebra.parser import parse_condition
from qbx.errors import ModelError
from qbx.model import (
    ALL,
    CubeSchema,
    Cuboid,
    Measure,
    Order,
    adjacent,
    cuboid_order,
    dumps,
    enumerate_cuboids,
    lattice_info,
    levels_path,
    loads,
    validate_cube,
    validate_dimension,
    validate_instance,
)
from qbx.model.compare import diff_cuboids, same_cuboid, values_close
from qbx.model.jsonio import dimension_from_json, instance_from_json
from qbx.model.lattice import as_level_set
from qbx.model.oracle import aggregate, oracle_dice, oracle_rollup, oracle_slice
from qbx.model.validate import validate_cuboid

ALL_JSON = {"name": "All"}


def dim(levels, order, hierarchies=()):
    return dimension_from_json({"name": "D", "levels": [{"name": lv} if isinstance(lv, str) else lv for lv in levels],
                                "order": order, "hierarchies": list(hierarchies)})


def codes(rep):
    return {i.code for i in rep.issues}


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def test_fixtures_validate(fixture_bundle):
    for d in fixture_bundle.dimensions.values():
        assert validate_dimension(d).ok
    for inst in fixture_bundle.instances.values():
        assert validate_instance(inst).ok
    for cube in fixture_bundle.cubes.values():
        assert validate_cube(cube).ok
    for cb in fixture_bundle.cuboids.values():
        assert validate_cuboid(cb, fixture_bundle.instances_for(cb.schema)).ok


@pytest.mark.parametrize("levels, order, code", [
    (["Month", "Year"], [["Month", "Year"]], "E_NO_TOP"),
    (["A", "B", ALL_JSON], [["A", "B"], ["B", "A"], ["B", "All"]], "E_CYCLE"),
    (["A", "B", ALL_JSON], [["A", "All"], ["B", "All"]], "E_NO_BOTTOM"),
    (["A", "A", ALL_JSON], [["A", "All"]], "E_DUP_LEVEL"),
    (["A", ALL_JSON], [["A", "Nope"], ["A", "All"]], "E_BAD_ORDER"),
    (["A", {"name": "All", "attributes": ["x"]}], [["A", "All"]], "E_ALL_ATTRS"),
    ([{"name": "A", "attributes": [{"name": "a", "datatype": "date"}]}, ALL_JSON], [["A", "All"]], "E_BAD_DATATYPE"),
])
def test_dimension_violations(levels, order, code):
    assert code in codes(validate_dimension(dim(levels, order)))


def test_hierarchy_checks():
    d = dim(["A", "B", "C", ALL_JSON], [["A", "B"], ["B", "All"], ["A", "C"], ["C", "All"]],
            [{"name": "H1", "levels": ["A", "B", "All"]}])
    assert "E_ORPHAN_LEVEL" in codes(validate_dimension(d))
    d = dim(["A", "B", ALL_JSON], [["A", "B"], ["B", "All"]], [{"name": "H", "levels": ["B", "All"]}])
    assert "E_HIER_SHAPE" in codes(validate_dimension(d))


def test_default_hierarchy_is_implicit():
    d = dim(["A", "B", ALL_JSON], [["A", "B"], ["B", "All"]])
    assert d.needs_default_hierarchy()
    rep = validate_dimension(d)
    assert rep.ok and "N_DEFAULT_HIERARCHY" in codes(rep)
    assert [h.name for h in d.hierarchies_with_default()] == ["default"]


def test_instance_checks():
    d = dim([{"name": "A", "attributes": [{"name": "n", "datatype": "integer"}]}, "B", ALL_JSON],
            [["A", "B"], ["B", "All"]])
    inst = instance_from_json(d, {"members": {"A": {"a1": {"n": "x"}, "a2": {"n": 2}}, "B": {"b1": {}, "b2": {}}},
                                  "rollups": [{"child": "A", "parent": "B", "pairs": [["a1", "b1"], ["a1", "b2"]]}]})
    rep = validate_instance(inst)
    assert {"E_BAD_VALUE", "E_DANGLING_CHILD", "W_NONSTRICT"} <= codes(rep)
    assert not rep.ok
    assert [w.code for w in rep.warnings] == ["W_NONSTRICT"]
    no_rup = instance_from_json(d, {"members": {"A": {"a1": {"n": 1}}, "B": {"b1": {}}}})
    assert "E_MISSING_RUP" in codes(validate_instance(no_rup))


def test_cuboid_member_refs(running):
    cb = running.cuboid_for(running.only_cube())
    bad = Cuboid(cb.schema, cb.levels, {("X",) + next(iter(cb.cells))[1:]: (1,)})
    assert "E_BAD_MEMBER_REF" in codes(validate_cuboid(bad, running.instances_for(cb.schema)))


def test_cuboid_shape_checked(running):
    cb = running.cuboid_for(running.only_cube())
    with pytest.raises(ModelError) as e:
        Cuboid(cb.schema, cb.levels[:-1])
    assert e.value.code == "E_BAD_LEVELSET"


# ---------------------------------------------------------------------------
# lattice
# ---------------------------------------------------------------------------

def test_levels_path(running):
    geo = running.dimensions["Geo"]
    assert levels_path(geo, "Country", "Continent") == [("Country", "Continent")]
    with pytest.raises(ModelError) as e:
        levels_path(geo, "Country", ALL)
    assert e.value.code == "E_AMBIGUOUS_PATH"
    assert levels_path(geo, "Country", ALL, "Geography") == [("Country", "Continent"), ("Continent", ALL)]
    with pytest.raises(ModelError) as e:
        levels_path(geo, "Continent", "Country")
    assert e.value.code == "E_NO_PATH"


def test_adjacency_and_order(running):
    cube = running.only_cube()
    bottom = cube.bottom_levels()
    up = bottom[:2] + ("Year",) + bottom[3:]
    v1, v2 = as_level_set(cube, bottom), as_level_set(cube, up)
    assert adjacent(v1, v2)
    assert cuboid_order(v1, v2, cube) is Order.LE
    assert cuboid_order(v2, v1, cube) is Order.GE
    assert not adjacent(v1, v1)
    two_up = up[:4] + ("Continent",) + up[5:]
    assert cuboid_order(v1, as_level_set(cube, two_up), cube) is Order.NONE


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_enumeration_matches_product(seed):
    b = random_bundle(seed)
    cube = b.only_cube()
    found = enumerate_cuboids(cube)
    assert len(found) == len(set(found)) == lattice_info(cube).cuboid_count
    assert found[0] == cube.bottom_levels() and found[-1] == (ALL,) * len(cube.roles)


def test_lattice_counts(running, lattice216):
    assert lattice_info(lattice216.only_cube()).cuboid_count == 216
    cube = running.only_cube()
    assert lattice_info(cube).cuboid_count == len(enumerate_cuboids(cube)) == math.prod(
        len(r.dimension.levels) for r in cube.roles)


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------

def test_aggregates():
    assert aggregate("SUM", [1, 2, 3]) == 6
    assert aggregate("COUNT", [7, 7]) == 2
    assert aggregate("MIN", [3, 1]) == 1 and aggregate("MAX", [3, 1]) == 3
    avg = aggregate("AVG", [1, 2])
    assert isinstance(avg, Decimal) and avg == Decimal("1.5")
    with pytest.raises(ModelError):
        aggregate("MEDIAN", [1])


def test_rollup_to_cb2(running):
    cb1 = running.cuboid_for(running.only_cube())
    inst = running.instances_for(cb1.schema)
    cb2 = oracle_rollup(oracle_rollup(cb1, "Time", "Year", inst), "Citizenship", "Continent", inst)
    assert cb2.cells[("F", "Y18-34", "2013", "NASY_APP", "AF", "BE")] == (55,)
    assert len(cb2) == 4
    assert sum(v for (v,) in cb2.cells.values()) == sum(v for (v,) in cb1.cells.values())


def test_count_counts_step_input_cells(shop):
    # COUNT is not compositional: each roll-up counts the cells it receives
    cb = shop.cuboid_for(shop.only_cube())
    schema = CubeSchema(cb.schema.name, cb.schema.roles, (Measure("n", "COUNT", "integer"),))
    counted = Cuboid(schema, cb.levels, {k: (v[1],) for k, v in cb.cells.items()})
    inst = shop.instances_for(cb.schema)
    by_product = oracle_rollup(counted, "Product", ALL, inst)
    stores = {k[1] for k in cb.cells}
    assert by_product.cells == {("all", s): (sum(1 for k in cb.cells if k[1] == s),) for s in stores}
    top = oracle_rollup(by_product, "Store", ALL, inst)
    assert top.cells[("all", "all")] == (len(stores),)


def test_nonstrict_join_semantics():
    rng = random.Random(3)
    d, inst_json = random_dimension(rng, "D0", shape="chain", nonstrict=0.0)
    inst_json["members"]["L0"] = {"a": inst_json["members"]["L0"][next(iter(inst_json["members"]["L0"]))]}
    inst_json["members"]["L1"] = {"p": {}, "q": {}}
    d["levels"][1]["attributes"] = []
    inst_json["rollups"] = [{"child": "L0", "parent": "L1", "pairs": [["a", "p"], ["a", "q"]]}]
    obj = {"dimensions": [d], "instances": {"D0": inst_json},
           "cubes": [{"name": "C", "dimensions": [{"role": "R", "dimension": "D0"}],
                      "measures": [{"name": "m", "aggregate": "SUM"}]}],
           "cuboids": [{"cube": "C", "levels": {"R": "L0"}, "cells": [{"members": {"R": "a"}, "measures": {"m": 4}}]}]}
    from qbx.model.jsonio import bundle_from_json
    b = bundle_from_json(obj)
    cb = b.cuboid_for(b.only_cube())
    up = oracle_rollup(cb, "R", "L1", b.instances_for(cb.schema))
    assert up.cells == {("p",): (4,), ("q",): (4,)}


def test_dice_and_slice(running):
    cb1 = running.cuboid_for(running.only_cube())
    inst = running.instances_for(cb1.schema)
    cond = parse_condition('Destination.Country.countryName = "Belgium" AND #applications > 20')
    assert sorted(v for (v,) in oracle_dice(cb1, cond, inst).cells.values()) == [25, 30]
    sliced = oracle_slice(cb1, "Sex", inst)
    assert "Sex" not in sliced.schema.role_names
    assert sum(v for (v,) in sliced.cells.values()) == 75
    one = oracle_slice(oracle_slice(oracle_slice(oracle_slice(oracle_slice(
        cb1, "Sex", inst), "Age", inst), "Time", inst), "Application_type", inst), "Citizenship", inst)
    with pytest.raises(ModelError) as e:
        oracle_slice(one, "Destination", inst)
    assert e.value.code == "E_LAST_DIM"


# ---------------------------------------------------------------------------
# JSON and comparison
# ---------------------------------------------------------------------------

def test_json_round_trip_fixtures(fixture_bundle):
    text = dumps(fixture_bundle)
    again = loads(text)
    assert dumps(again) == text
    for name, cb in fixture_bundle.cuboids.items():
        assert same_cuboid(cb, again.cuboids[name])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_json_round_trip_random(seed):
    b = random_bundle(seed)
    again = loads(dumps(b))
    assert again.dimensions == b.dimensions
    assert same_cuboid(again.cuboids["base"], b.cuboids["base"])


def test_values_close():
    assert values_close(3, 3) and not values_close(3, 4)
    assert values_close(Decimal("1") / 3, Decimal("0.3333333333333"))
    assert not values_close(Decimal("1.0"), Decimal("1.001"))


def test_diff_reports_missing_cells(running):
    cb = running.cuboid_for(running.only_cube())
    first = next(iter(sorted(cb.cells)))
    smaller = Cuboid(cb.schema, cb.levels, {k: v for k, v in cb.cells.items() if k != first})
    diffs = diff_cuboids(cb, smaller)
    assert len(diffs) == 1 and diffs[0].coords == first and diffs[0].right is None
