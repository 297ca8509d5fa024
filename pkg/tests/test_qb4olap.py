from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from rdflib import RDF, RDFS, Literal, URIRef

from helpers import BASE, catalog_for, random_bundle, structurally_equal
from qbx.errors import MappingError
from qbx.model import ALL, levels_path
from qbx.qb4olap import (
    QB,
    QB4O,
    IriScheme,
    Qb4olapCatalog,
    export_turtle,
    graph_to_model,
    import_turtle,
    model_to_graph,
    parse_turtle,
    serialize_turtle,
)
from qbx.qb4olap.namespaces import AGG_IRIS

GOLDEN = Path(__file__).parent / "golden" / "running_example.ttl"


# ---------------------------------------------------------------------------
# round trip and stability
# ---------------------------------------------------------------------------

def test_round_trip_fixtures(fixture_bundle):
    again = import_turtle(export_turtle(fixture_bundle, BASE))
    assert structurally_equal(again, fixture_bundle)
    assert again.extras == []


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_round_trip_random(seed):
    b = random_bundle(seed)
    assert structurally_equal(import_turtle(export_turtle(b, BASE)), b)


def test_export_byte_stable(running):
    first = export_turtle(running, BASE)
    assert export_turtle(running, BASE) == first
    assert first == GOLDEN.read_text(encoding="utf-8")


def test_reexport_of_import_is_identical(fixture_bundle):
    text = export_turtle(fixture_bundle, BASE)
    assert export_turtle(import_turtle(text), BASE) == text


def test_extras_survive(shop):
    g = model_to_graph(shop, BASE)
    note = (URIRef(BASE + "/datasets#sales"), RDFS.comment, Literal("loaded nightly"))
    g.add(note)
    b = graph_to_model(g)
    assert b.extras == [note]
    assert note in parse_turtle(export_turtle(b, BASE))


def test_language_tagged_attribute_reads_as_string(running):
    g = model_to_graph(running, BASE)
    ids = IriScheme(BASE)
    # the Geo instance is read from the first role copy in IRI order
    attr = ids.attribute("Citizenship", "Country", "countryName")
    member = ids.member("Citizenship", "Country", "BE")
    g.set((member, attr, Literal("Belgique", lang="fr")))
    b = graph_to_model(g)
    assert b.instances["Geo"].attribute_value("Country", "BE", "countryName") == "Belgique"


def test_turtle_parse_error():
    with pytest.raises(MappingError) as e:
        parse_turtle("@prefix x: <http://x/> .\nx:a x:b")
    assert e.value.code == "E_TURTLE"


# ---------------------------------------------------------------------------
# profile violations
# ---------------------------------------------------------------------------

def _without(g, s=None, p=None, o=None):
    for t in list(g.triples((s, p, o))):
        g.remove(t)
    return g


def test_profile_missing_aggregate(shop):
    g = _without(model_to_graph(shop, BASE), p=QB4O.aggregateFunction)
    with pytest.raises(MappingError) as e:
        graph_to_model(g)
    assert e.value.code == "E_PROFILE"


def test_profile_observation_lacks_member(shop):
    g = model_to_graph(shop, BASE)
    level = IriScheme(BASE).level("Store", "Store")
    obs = next(g.subjects(RDF.type, QB.Observation))
    _without(g, s=obs, p=level)
    with pytest.raises(MappingError) as e:
        graph_to_model(g)
    assert e.value.code == "E_PROFILE"


def test_profile_bad_literal(shop):
    g = model_to_graph(shop, BASE)
    attr = IriScheme(BASE).attribute("Store", "City", "population")
    m = next(g.subjects(attr, None))
    g.set((m, attr, Literal("many")))
    with pytest.raises(MappingError) as e:
        graph_to_model(g)
    assert e.value.code == "E_PROFILE"


def test_invalid_model_refused(running):
    from qbx.model import Cuboid

    cb = running.cuboid_for(running.only_cube())
    running_bad = type(running)(running.dimensions, running.instances, running.cubes,
                                {"bad": Cuboid(cb.schema, cb.levels, {("X",) * 6: (1,)})})
    with pytest.raises(MappingError) as e:
        model_to_graph(running_bad, BASE)
    assert e.value.code == "E_INVALID_MODEL"


# ---------------------------------------------------------------------------
# emitted structure
# ---------------------------------------------------------------------------

def test_hierarchy_step_shape(running):
    g = model_to_graph(running, BASE)
    ids = IriScheme(BASE)
    (step,) = list(g.subjects(QB4O.childLevel, ids.level("Time", "Month")))
    preds = sorted(set(g.predicates(step)))
    assert preds == sorted({RDF.type, QB4O.childLevel, QB4O.parentLevel, QB4O.rollup, QB4O.pcCardinality,
                            QB4O.inHierarchy})
    assert g.value(step, QB4O.parentLevel) == ids.level("Time", "Year")
    assert g.value(step, QB4O.pcCardinality) == QB4O.OneToMany


def test_observations_complete(fixture_bundle):
    g = model_to_graph(fixture_bundle, BASE)
    cat = Qb4olapCatalog(g)
    for name, cb in fixture_bundle.cuboids.items():
        ds = cat.dataset_for(cb.schema.name, cb.levels)
        dsd = cat.structure(ds)
        preds = set(cat.levels(dsd)) | set(cat.measures(dsd))
        observations = list(g.subjects(QB.dataSet, ds))
        assert len(observations) == len(cb)
        for o in observations:
            assert (o, RDF.type, QB.Observation) in g
            for p in preds:
                assert len(list(g.objects(o, p))) == 1


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def test_catalog_names(running_catalog):
    cat = running_catalog
    ids = IriScheme(BASE)
    assert cat.dimension("Citizenship") == ids.dimension("Citizenship")
    assert cat.level("Citizenship", "Continent") == ids.level("Citizenship", "Continent")
    assert cat.level_name(ids.level("Destination", "Country")) == ("Destination", "Country")
    assert cat.member("Citizenship", "Country", "CD") == ids.member("Citizenship", "Country", "CD")
    assert cat.member("Citizenship", "Country", "XX") is None
    assert cat.attribute_datatype(cat.attribute("Time", "Month", "yearMonthNum")) == "integer"
    for bad in (lambda: cat.dimension("Planet"), lambda: cat.level("Time", "Decade"), lambda: cat.cube("Nope")):
        with pytest.raises(MappingError) as e:
            bad()
        assert e.value.code == "E_NOT_FOUND"


def test_catalog_auxiliary_functions(running, running_catalog):
    cat = running_catalog
    cube = running.only_cube()
    ds = cat.dataset_for(cube.name)
    dsd = cat.structure(ds)
    assert [cat.level_name(lv) for lv in cat.levels(dsd)] == list(zip(cube.role_names, cube.bottom_levels()))
    assert cat.get_level(dsd, cat.dimension("Time")) == cat.level("Time", "Month")
    (m,) = cat.measures(dsd)
    assert cat.agg_function(m, dsd) == AGG_IRIS["SUM"]
    rup = cat.get_rollup(cat.level("Citizenship", "Country"), cat.level("Citizenship", "Continent"))
    assert rup == IriScheme(BASE).rollup("Citizenship", "Country", "Continent")
    with pytest.raises(MappingError) as e:
        cat.get_rollup(cat.level("Citizenship", "Continent"), cat.level("Citizenship", "Country"))
    assert e.value.code == "E_NOT_FOUND"


def test_catalog_paths_agree_with_model(running, running_catalog):
    cat = running_catalog
    for role in running.only_cube().roles:
        dim = role.dimension
        for a in dim.level_names:
            for b in dim.level_names:
                try:
                    expected = levels_path(dim, a, b)
                except Exception as exc:  # noqa: BLE001
                    with pytest.raises(MappingError) as e:
                        cat.levels_path(cat.level(role.name, a), cat.level(role.name, b))
                    assert e.value.code == exc.code
                    continue
                got = cat.levels_path(cat.level(role.name, a), cat.level(role.name, b))
                assert [(cat.level_name(c)[1], cat.level_name(p)[1]) for c, p in got] == expected


def test_catalog_path_within_hierarchy(running_catalog):
    cat = running_catalog
    h = cat.hierarchy("Citizenship", "Government")
    path = cat.levels_path(cat.level("Citizenship", "Country"), cat.level("Citizenship", ALL), h)
    assert [cat.level_name(p)[1] for _, p in path] == ["GovernmentType", ALL]


def test_catalog_cube_schema_and_extension(running, running_catalog):
    cat = running_catalog
    dsd = cat.structure(cat.dataset_for("Asylum_application"))
    schema, levels = cat.cube_schema(dsd)
    assert schema.role_names == running.only_cube().role_names
    ext = cat.extended()
    assert ext.graph is not cat.graph and len(ext.graph) == len(cat.graph)
    new = URIRef(BASE + "/schemas/test/derived")
    ext.add_cuboid_structure(new, schema.without_role("Sex"), levels[1:], "derived")
    assert [ext.level_name(lv)[0] for lv in ext.levels(new)] == list(schema.role_names[1:])
    assert (new, None, None) not in cat.graph


def test_serialize_uses_given_prefixes(shop):
    text = serialize_turtle(catalog_for(shop).graph, {"ex": "http://example.org/qbx/schemas#"})
    assert "@prefix ex: <http://example.org/qbx/schemas#> ." in text
