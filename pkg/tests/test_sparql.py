import random
from decimal import Decimal

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from rdflib import URIRef
from rdflib.namespace import XSD
from rdflib.plugins.sparql import prepareQuery

from helpers import BASE, catalog_for, endpoint_result, plan_for, random_bundle, random_program
from qbx.algebra import parse_condition
from qbx.algebra.conditions import bind
from qbx.errors import CompileError
from qbx.qb4olap import QB4O, IriScheme
from qbx.sparql import (
    AbstractQuery,
    VarGen,
    check,
    compile_plan,
    gen_dice_query,
    gen_rollup_query,
    gen_slice_measure_query,
    gen_slice_query,
    mint_observation_iri,
    proc_condition,
    render,
)
from qbx.sparql.generate import OBS
from qbx.sparql.query import (
    CONSTRUCT,
    SELECT,
    Agg,
    BoolOp,
    Call,
    Cast,
    Cmp,
    Iri,
    Lit,
    NotExpr,
    Projection,
    Triple,
    Var,
    fold,
)

IDS = IriScheme(BASE)
OUT = URIRef(BASE + "/datasets/test/out")
OBS_BASE = BASE + "/instances/test/out#"

CB2 = "C1 = ROLLUP(Asylum_application, Time, Year)\nC2 = ROLLUP(C1, Citizenship, Continent)\n"


def source(cat, cube="Asylum_application"):
    ds = cat.dataset_for(cube)
    return ds, cat.structure(ds)


def aggregates(q: AbstractQuery) -> list[Agg]:
    return [r.expr for r in q.result_format if isinstance(r, Projection) and isinstance(r.expr, Agg)]


# ---------------------------------------------------------------------------
# roll-up
# ---------------------------------------------------------------------------

def test_golden_rollup_shape(running_catalog):
    cat = running_catalog
    ds, dsd = source(cat)
    q = gen_rollup_query(cat, dsd, ds, cat.dimension("Citizenship"), cat.level("Citizenship", "Continent"),
                         OUT, OBS_BASE)
    assert q.query_type == CONSTRUCT and len(q.sub_queries) == 1
    inner = q.sub_queries[0]
    assert inner.query_type == SELECT and not inner.sub_queries
    assert len(inner.group_by) == 7
    (agg,) = aggregates(inner)
    assert agg.func == "SUM" and agg.expr == Cast(Iri(str(XSD.integer)), agg.expr.expr)
    country, continent = cat.level("Citizenship", "Country"), cat.level("Citizenship", "Continent")
    rup = cat.get_rollup(country, continent)
    triples = [t for t in inner.gr_patterns if isinstance(t, Triple)]
    (lvl,) = [t for t in triples if t.s == OBS and t.p == Iri(str(country))]
    member = lvl.o
    assert Triple(member, Iri(str(QB4O.memberOf)), Iri(str(country))) in triples
    (step,) = [t for t in triples if t.p == Iri(str(rup))]
    assert step.s == member and isinstance(step.o, Var)
    assert step.o in inner.group_by


def test_rollup_rendering_is_deterministic(running_catalog):
    cat = running_catalog
    texts = {compile_plan(plan_for_running(cat), cat, BASE, "r").steps[1].text for _ in range(3)}
    assert len(texts) == 1


def plan_for_running(cat):
    return plan_for(cat.bundle, CB2)


def test_rollup_errors(running_catalog):
    cat = running_catalog
    ds, dsd = source(cat)
    citizenship = cat.dimension("Citizenship")
    with pytest.raises(CompileError) as e:
        gen_rollup_query(cat, dsd, ds, citizenship, cat.level("Citizenship", "All"), OUT, OBS_BASE)
    assert e.value.code == "E_AMBIGUOUS_PATH"
    with pytest.raises(CompileError) as e:
        gen_rollup_query(cat, dsd, ds, cat.dimension("Time"), cat.level("Citizenship", "Continent"), OUT, OBS_BASE)
    assert e.value.code == "E_NO_PATH"
    h = cat.hierarchy("Citizenship", "Geography")
    q = gen_rollup_query(cat, dsd, ds, citizenship, cat.level("Citizenship", "All"), OUT, OBS_BASE, hierarchy=h)
    assert len(q.sub_queries[0].group_by) == 7


def test_missing_rollup_predicate(running):
    cat = catalog_for(running)
    country, continent = cat.level("Citizenship", "Country"), cat.level("Citizenship", "Continent")
    cat.steps = [(c, p, None if (c, p) == (country, continent) else r, hs) for c, p, r, hs in cat.steps]
    ds, dsd = source(cat)
    with pytest.raises(CompileError) as e:
        gen_rollup_query(cat, dsd, ds, cat.dimension("Citizenship"), continent, OUT, OBS_BASE)
    assert e.value.code == "E_NO_ROLLUP_PRED"


def test_one_aggregate_per_measure(shop_catalog):
    cat = shop_catalog
    ds, dsd = source(cat, "Sales")
    q = gen_rollup_query(cat, dsd, ds, cat.dimension("Store"), cat.level("Store", "City"), OUT, OBS_BASE)
    aggs = aggregates(q.sub_queries[0])
    assert [a.func for a in aggs] == ["SUM", "MIN", "AVG", "MAX"]
    casts = [a.expr.datatype for a in aggs]
    assert casts == [Iri(str(XSD.decimal)), Iri(str(XSD.integer)), Iri(str(XSD.decimal)), Iri(str(XSD.integer))]


# ---------------------------------------------------------------------------
# slice
# ---------------------------------------------------------------------------

def test_slice_drops_role(running_catalog):
    cat = running_catalog
    ds, dsd = source(cat)
    q = gen_slice_query(cat, dsd, ds, cat.dimension("Sex"), OUT, OBS_BASE)
    inner = q.sub_queries[0]
    assert len(inner.group_by) == 6
    sex = {Iri(str(cat.level("Sex", lv))) for lv in ("Sex", "All")}
    assert not any(t.p in sex for t in q.result_format)


def test_slice_measure_template(shop_catalog):
    cat = shop_catalog
    ds, dsd = source(cat, "Sales")
    units = cat.measure("units")
    q = gen_slice_measure_query(cat, dsd, ds, units, OUT, OBS_BASE)
    assert all(t.p != Iri(str(units)) for t in q.result_format)
    assert not q.sub_queries[0].group_by
    assert len(q.result_format) == 2 + 2 + 3


def test_last_dim_and_measure(running):
    cat = catalog_for(running)
    compiled = compile_plan(plan_for(running, "C1 = SLICE(Asylum_application, Sex)\nC2 = SLICE(C1, Age)\n"
                                              "C3 = SLICE(C2, Time)\nC4 = SLICE(C3, Application_type)\n"
                                              "C5 = SLICE(C4, Citizenship)\n"), cat, BASE, "s")
    last = compiled.result
    ext = compiled.catalog
    (dim,) = ext.dimensions(last.output_structure)
    with pytest.raises(CompileError) as e:
        gen_slice_query(ext, last.output_structure, last.output_dataset, dim, OUT, OBS_BASE)
    assert e.value.code == "E_LAST_DIM"
    (m,) = ext.measures(last.output_structure)
    with pytest.raises(CompileError) as e:
        gen_slice_measure_query(ext, last.output_structure, last.output_dataset, m, OUT, OBS_BASE)
    assert e.value.code == "E_LAST_MEASURE"


# ---------------------------------------------------------------------------
# dice and conditions
# ---------------------------------------------------------------------------

def _proc(cat, text):
    ds, dsd = source(cat)
    schema, levels = cat.cube_schema(dsd)
    cond = bind(parse_condition(text), schema, levels)
    level_vars = {lv: Var(f"l{i}") for i, lv in enumerate(cat.levels(dsd))}
    measure_vars = {m: Var(f"m{i}") for i, m in enumerate(cat.measures(dsd))}
    return proc_condition(cond, level_vars, measure_vars, VarGen(), cat, dsd), level_vars


def test_member_equality_is_a_pattern(running_catalog):
    (bgps, expr), lv = _proc(running_catalog, 'Destination.Country = "BE"')
    member = Iri(str(IDS.member("Destination", "Country", "BE")))
    assert bgps == [Triple(OBS, Iri(str(running_catalog.level("Destination", "Country"))), member)]
    assert expr is None


def test_string_attribute_equality_is_a_pattern(running_catalog):
    (bgps, expr), lv = _proc(running_catalog, 'Destination.Country.countryName = "Belgium"')
    attr = Iri(str(running_catalog.attribute("Destination", "Country", "countryName")))
    assert len(bgps) == 1 and bgps[0].p == attr and bgps[0].o == Lit("Belgium")
    assert expr is None


def test_numeric_bounds_share_a_variable(running_catalog):
    (bgps, expr), lv = _proc(running_catalog, "201303 <= Time.Month.yearMonthNum <= 201307")
    assert len(bgps) == 1
    var = bgps[0].o
    assert expr == BoolOp("&&", (Cmp(">=", var, Lit(201303)), Cmp("<=", var, Lit(201307))))


def test_measure_comparison_is_cast(running_catalog):
    (bgps, expr), lv = _proc(running_catalog, "#applications > 80")
    assert bgps == []
    assert expr == Cmp(">", Cast(Iri(str(XSD.integer)), Var("m0")), Lit(80))


def test_negative_context_goes_to_filter(running_catalog):
    (bgps, expr), lv = _proc(running_catalog, 'NOT Destination.Country = "BE" OR Sex.Sex.sexName = "Male"')
    assert isinstance(expr, BoolOp) and expr.op == "||"
    assert isinstance(expr.operands[0], NotExpr)
    assert len(bgps) == 1  # the attribute value binding only


def test_unknown_member_folds_to_constant(running_catalog):
    (bgps, expr), _ = _proc(running_catalog, 'Destination.Country = "ZZ"')
    assert bgps == [] and expr == Lit(False)
    (bgps, expr), _ = _proc(running_catalog, 'Destination.Country != "ZZ"')
    assert expr == Lit(True)


def test_fold():
    x = Cmp("=", Var("a"), Lit(1))
    assert fold(BoolOp("&&", (Lit(True), x))) == x
    assert fold(BoolOp("||", (Lit(True), x))) == Lit(True)
    assert fold(NotExpr(BoolOp("&&", (x, Lit(False))))) == Lit(True)
    assert fold(BoolOp("||", (Lit(False), Lit(False)))) == Lit(False)


def test_constant_false_filter_renders_portably(running_catalog):
    cat = running_catalog
    ds, dsd = source(cat)
    schema, levels = cat.cube_schema(dsd)
    cond = bind(parse_condition('Destination.Country = "ZZ"'), schema, levels)
    text = render(gen_dice_query(cat, dsd, ds, cond, OUT, OBS_BASE))
    assert "FILTER (!(true))" in text


def test_dice_query_shape(running_catalog):
    cat = running_catalog
    ds, dsd = source(cat)
    schema, levels = cat.cube_schema(dsd)
    cond = bind(parse_condition('Destination.Country.countryName = "Belgium" AND #applications > 20 '
                                'AND 201303 <= Time.Month.yearMonthNum <= 201307'), schema, levels)
    q = gen_dice_query(cat, dsd, ds, cond, OUT, OBS_BASE)
    inner = q.sub_queries[0]
    assert not inner.group_by and inner.filter is not None
    text = render(q)
    assert '"Belgium" .' in text and "FILTER (" in text
    prepareQuery(text)


# ---------------------------------------------------------------------------
# query representation
# ---------------------------------------------------------------------------

def test_mint_single_variable():
    b = mint_observation_iri("http://x/#", [Var("a")])
    assert b.expr == Call("IRI", (Call("CONCAT", (Lit("http://x/#"), Call("MD5", (Call("STR", (Var("a"),)),)))),))
    with pytest.raises(CompileError):
        mint_observation_iri("http://x/#", [])


def test_vargen_fresh():
    vg = VarGen()
    names = [vg.new("time Month").name, vg.new("timeMonth").name, vg.new("1x").name, vg.new("").name]
    assert names == ["timeMonth", "timeMonth2", "v1x", "v"]
    assert len(set(names)) == len(names)


def test_check_rejects_malformed():
    q = AbstractQuery(CONSTRUCT, [Triple(Var("s"), Iri("http://p"), Var("o"))])
    with pytest.raises(CompileError) as e:
        check(q)
    assert e.value.code == "E_MALFORMED"
    inner = AbstractQuery(SELECT, [Var("s")], [Triple(Var("s"), Iri("http://p"), Var("o"))], group_by=[Var("o")])
    with pytest.raises(CompileError):
        check(inner)
    with pytest.raises(CompileError):
        check(AbstractQuery("ASK"))
    with pytest.raises(CompileError):
        render(AbstractQuery(CONSTRUCT, [Projection(Var("a"), Var("b"))]))


def test_render_literals():
    q = AbstractQuery(SELECT, [Var("s")], [Triple(Var("s"), Iri("http://p"), Lit('say "hi"\n'))],
                      filter=Cmp(">", Var("s"), Lit(Decimal("2"))))
    text = render(q)
    assert r'"say \"hi\"\n"' in text and "2.0" in text
    prepareQuery(text)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_compiled_queries_parse(seed):
    b = random_bundle(seed)
    text = random_program(random.Random(seed), b)
    compiled = compile_plan(plan_for(b, text), catalog_for(b), BASE, "p")
    for step in compiled.steps:
        prepareQuery(step.text)
        assert step.text == render(step.query, IDS.prefixes())


# ---------------------------------------------------------------------------
# compiler
# ---------------------------------------------------------------------------

def test_compiler_steps(running):
    cat = catalog_for(running)
    compiled = compile_plan(plan_for(running, CB2), cat, BASE, "r1")
    assert [s.label for s in compiled.steps] == ["ROLLUP Time Month->Year", "ROLLUP Citizenship Country->Continent"]
    assert [str(g) for g in compiled.temp_graphs] == [BASE + "/tmp/r1/1", BASE + "/tmp/r1/2"]
    first, second = compiled.steps
    assert first.query.from_graphs == [Iri(BASE + "/graphs/model")]
    assert second.query.from_graphs == [Iri(BASE + "/tmp/r1/1"), Iri(BASE + "/graphs/model")]
    assert second.input_dataset == first.output_dataset


def test_slice_fuses_into_one_query(running):
    compiled = compile_plan(plan_for(running, "C1 = SLICE(Asylum_application, Sex)\n"), catalog_for(running), BASE)
    (step,) = compiled.steps
    assert step.label == "SLICE Sex"


def test_empty_plan_copies(running):
    text = "C1 = ROLLUP(Asylum_application, Time, Year)\nC2 = DRILLDOWN(C1, Time, Month)\n"
    compiled = compile_plan(plan_for(running, text), catalog_for(running), BASE)
    assert [s.label for s in compiled.steps] == ["COPY"]


def test_cb2_result_graph_size(running, engine):
    cat = catalog_for(running)
    compiled = compile_plan(plan_for(running, CB2), cat, BASE, "g")
    engine.upload_graph(cat.graph, compiled.model_graph)
    from qbx.endpoint import run_compiled

    result = run_compiled(compiled, engine)
    # 4 observations x (type, dataSet, 6 levels, 1 measure)
    assert len(result.graph) == 36
    assert len(result.cuboid) == 4


def test_no_dataset_for_levels(running):
    from qbx.algebra import parse_program, typecheck

    cube = running.only_cube()
    plan = typecheck(parse_program("C1 = SLICE(Asylum_application, Sex)"), cube,
                     ("Sex", "Age", "Year", "ApplicationType", "Country", "Country"))
    with pytest.raises(CompileError) as e:
        compile_plan(plan, catalog_for(running), BASE)
    assert e.value.code == "E_NO_DATASET"


def test_compile_then_run_matches_oracle_on_shop(shop, engine):
    from helpers import oracle_result
    from qbx.model.compare import diff_cuboids

    text = 'C1 = DICE(Sales, Product.Product.listPrice >= 3.5 AND revenue < 20)\nC2 = SLICE(C1, avgPrice)\n'
    assert not diff_cuboids(endpoint_result(shop, text, engine), oracle_result(shop, text))
