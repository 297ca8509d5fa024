"""SPARQL generation for single operators over QB4OLAP cuboids.

Each generator returns an outer CONSTRUCT whose only WHERE member is an
inner SELECT.  The inner query reads the observations of ``dataset``, does
the work (aggregation or filtering) and binds ``?newObs`` to a minted IRI;
the outer query writes the new observations into ``new_dataset``.
"""

from __future__ import annotations

from rdflib import RDF, XSD, URIRef

from ..algebra.conditions import (
    AttributeRef,
    And,
    Comparison,
    Condition,
    MeasureRef,
    MemberRef,
    Not,
    Or,
    TrueCondition,
    bind,
)
from ..errors import CompileError, MappingError, ModelError
from ..model.schema import ALL
from ..qb4olap.catalog import Qb4olapCatalog
from ..qb4olap.namespaces import QB, QB4O
from .query import (
    CONSTRUCT,
    SELECT,
    AbstractQuery,
    Agg,
    Bind,
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
    VarGen,
    camel,
)

NEW_OBS = Var("newObs")
OBS = Var("obs")
_TYPE = Iri(str(RDF.type))


def _iri(u) -> Iri:
    return Iri(str(u))


def mint_observation_iri(base: str, members: list[Var], target: Var = NEW_OBS) -> Bind:
    """BIND(IRI(CONCAT(base, MD5(CONCAT(STR(v1), ...)))) AS ?newObs), variables in the given order."""
    if not members:
        raise CompileError("E_MALFORMED", "an observation IRI needs at least one member variable")
    strs = tuple(Call("STR", (v,)) for v in members)
    digest_input = strs[0] if len(strs) == 1 else Call("CONCAT", strs)
    return Bind(Call("IRI", (Call("CONCAT", (Lit(base), Call("MD5", (digest_input,)))),)), target)


def measure_cast(cat: Qb4olapCatalog, m: URIRef, dsd: URIRef) -> Iri:
    """Numeric cast applied to a measure variable: decimal for decimal or AVG measures."""
    agg = cat.aggregate_name(m, dsd)
    if cat.measure_datatype(m) == "decimal" or agg == "AVG":
        return _iri(XSD.decimal)
    return _iri(XSD.integer)


def _aggregate(cat: Qb4olapCatalog, m: URIRef, dsd: URIRef, var: Var) -> Agg:
    agg = cat.aggregate_name(m, dsd)
    if agg == "COUNT":
        return Agg("COUNT", var)
    return Agg(agg, Cast(measure_cast(cat, m, dsd), var))


def _skeleton(dataset: URIRef, new_dataset: URIRef) -> tuple[AbstractQuery, AbstractQuery]:
    q_out = AbstractQuery(CONSTRUCT)
    q_in = AbstractQuery(SELECT)
    q_out.result_format += [Triple(NEW_OBS, _TYPE, _iri(QB.Observation)),
                            Triple(NEW_OBS, _iri(QB.dataSet), _iri(new_dataset))]
    q_in.result_format.append(NEW_OBS)
    q_in.gr_patterns.append(Triple(OBS, _iri(QB.dataSet), _iri(dataset)))
    return q_out, q_in


def _level_hint(cat: Qb4olapCatalog, level: URIRef) -> str:
    return camel(*cat.level_name(level))


def gen_rollup_query(cat: Qb4olapCatalog, dsd: URIRef, dataset: URIRef, dim: URIRef, target: URIRef,
                     new_dataset: URIRef, obs_base: str, *, path: list | None = None,
                     hierarchy: URIRef | None = None, drop: bool = False,
                     vg: VarGen | None = None) -> AbstractQuery:
    """Roll the cuboid ``dsd`` up along ``dim`` to level ``target``.

    ``path`` is a list of (child, parent) level IRIs; by default it is the
    unique catalog path.  With ``drop`` the target variable is traversed but
    neither grouped nor written, which is how Slice removes a role.
    """
    vg = vg or VarGen()
    try:
        current = cat.get_level(dsd, dim)
        if path is None:
            path = cat.levels_path(current, target, hierarchy)
    except MappingError as exc:
        code = exc.code if exc.code in ("E_NO_PATH", "E_AMBIGUOUS_PATH") else "E_NO_PATH"
        raise CompileError(code, exc.message) from None
    if not path:
        raise CompileError("E_NO_PATH", "roll-up target equals the current level; nothing to aggregate")
    if path[0][0] != current or path[-1][1] != target:
        raise CompileError("E_NO_PATH", "roll-up path does not connect the current and target levels")
    q_out, q_in = _skeleton(dataset, new_dataset)
    out_vars: list[Var] = []
    for lv in cat.levels(dsd):
        if lv == current:
            base = vg.new(_level_hint(cat, lv))
            q_in.gr_patterns.append(Triple(OBS, _iri(lv), base))
            q_in.gr_patterns.append(Triple(base, _iri(QB4O.memberOf), _iri(lv)))
            cur = base
            for child, parent in path:
                try:
                    rup = cat.get_rollup(child, parent)
                except MappingError:
                    raise CompileError("E_NO_ROLLUP_PRED",
                                       f"no rollup predicate from <{child}> to <{parent}>") from None
                nxt = vg.new(_level_hint(cat, parent))
                q_in.gr_patterns.append(Triple(cur, _iri(rup), nxt))
                q_in.gr_patterns.append(Triple(nxt, _iri(QB4O.memberOf), _iri(parent)))
                cur = nxt
            if not drop:
                out_vars.append(cur)
                q_out.result_format.append(Triple(NEW_OBS, _iri(target), cur))
            continue
        v = vg.new(_level_hint(cat, lv))
        q_in.gr_patterns.append(Triple(OBS, _iri(lv), v))
        out_vars.append(v)
        q_out.result_format.append(Triple(NEW_OBS, _iri(lv), v))
    for m in cat.measures(dsd):
        name = cat.name(m)
        mv = vg.new(camel(name))
        ag = vg.new(camel(cat.aggregate_name(m, dsd).lower(), name))
        q_in.gr_patterns.append(Triple(OBS, _iri(m), mv))
        q_in.result_format.append(Projection(_aggregate(cat, m, dsd, mv), ag))
        q_out.result_format.append(Triple(NEW_OBS, _iri(m), ag))
    q_in.gr_patterns.append(mint_observation_iri(obs_base, out_vars))
    q_in.result_format[1:1] = out_vars
    q_in.group_by = [NEW_OBS] + out_vars
    q_out.sub_queries.append(q_in)
    return q_out


def gen_slice_query(cat: Qb4olapCatalog, dsd: URIRef, dataset: URIRef, dim: URIRef, new_dataset: URIRef,
                    obs_base: str, *, path: list | None = None, hierarchy: URIRef | None = None,
                    vg: VarGen | None = None) -> AbstractQuery:
    """Remove ``dim``: roll it up to All without keeping the All member."""
    if len(cat.levels(dsd)) <= 1:
        raise CompileError("E_LAST_DIM", "cannot slice away the only dimension")
    role = cat.role_of_dim[dim]
    current = cat.get_level(dsd, dim)
    top = cat.level(role, ALL)
    if current == top:
        return gen_copy_query(cat, dsd, dataset, new_dataset, obs_base, drop_level=current, vg=vg)
    return gen_rollup_query(cat, dsd, dataset, dim, top, new_dataset, obs_base, path=path,
                            hierarchy=hierarchy, drop=True, vg=vg)


def gen_slice_measure_query(cat: Qb4olapCatalog, dsd: URIRef, dataset: URIRef, measure: URIRef,
                            new_dataset: URIRef, obs_base: str, *, vg: VarGen | None = None) -> AbstractQuery:
    if len(cat.measures(dsd)) <= 1:
        raise CompileError("E_LAST_MEASURE", "cannot slice away the only measure")
    return gen_copy_query(cat, dsd, dataset, new_dataset, obs_base, drop_measure=measure, vg=vg)


def gen_dice_query(cat: Qb4olapCatalog, dsd: URIRef, dataset: URIRef, cond: Condition, new_dataset: URIRef,
                   obs_base: str, *, vg: VarGen | None = None) -> AbstractQuery:
    """Keep the observations of ``dsd`` satisfying ``cond``."""
    return gen_copy_query(cat, dsd, dataset, new_dataset, obs_base, cond=cond, vg=vg)


def gen_copy_query(cat: Qb4olapCatalog, dsd: URIRef, dataset: URIRef, new_dataset: URIRef, obs_base: str, *,
                   cond: Condition | None = None, drop_level: URIRef | None = None,
                   drop_measure: URIRef | None = None, vg: VarGen | None = None) -> AbstractQuery:
    """Observation-preserving query: copy, optionally filtered, minus one level or measure."""
    vg = vg or VarGen()
    q_out, q_in = _skeleton(dataset, new_dataset)
    level_vars: dict[URIRef, Var] = {}
    out_vars: list[Var] = []
    for lv in cat.levels(dsd):
        v = vg.new(_level_hint(cat, lv))
        level_vars[lv] = v
        q_in.gr_patterns.append(Triple(OBS, _iri(lv), v))
        if lv != drop_level:
            out_vars.append(v)
            q_in.result_format.append(v)
            q_out.result_format.append(Triple(NEW_OBS, _iri(lv), v))
    measure_vars: dict[URIRef, Var] = {}
    for m in cat.measures(dsd):
        if m == drop_measure:
            continue
        mv = vg.new(camel(cat.name(m)))
        measure_vars[m] = mv
        q_in.gr_patterns.append(Triple(OBS, _iri(m), mv))
        q_in.result_format.append(mv)
        q_out.result_format.append(Triple(NEW_OBS, _iri(m), mv))
    if cond is not None and not isinstance(cond, TrueCondition):
        schema, levels = cat.cube_schema(dsd)
        try:
            bound = bind(cond, schema, levels)
        except ModelError as exc:
            raise CompileError(exc.code, exc.message) from None
        bgps, expr = proc_condition(bound, level_vars, measure_vars, vg, cat, dsd)
        q_in.gr_patterns += bgps
        if expr is not None:
            q_in.add_filter(expr)
    q_in.gr_patterns.append(mint_observation_iri(obs_base, out_vars))
    q_out.sub_queries.append(q_in)
    return q_out


def proc_condition(tree: Condition, level_vars: dict, measure_vars: dict, vg: VarGen,
                   cat: Qb4olapCatalog, dsd: URIRef, positive: bool = True,
                   attr_vars: dict | None = None) -> tuple[list, object]:
    """Split a bound condition into graph patterns and a FILTER expression.

    In purely conjunctive positions, equality on a member id or on a string
    attribute becomes a graph pattern; everything else becomes a filter
    comparison.  Returns ``(bgps, expr)`` where ``expr`` may be None.
    Attribute variables are shared between leaves on the same attribute.
    """
    if attr_vars is None:
        attr_vars = {}
    rec = lambda t, pos: proc_condition(t, level_vars, measure_vars, vg, cat, dsd, pos, attr_vars)  # noqa: E731
    if isinstance(tree, TrueCondition):
        return [], (None if positive else Lit(True))
    if isinstance(tree, And):
        lb, le = rec(tree.left, positive)
        rb, re_ = rec(tree.right, positive)
        parts = tuple(e for e in (le, re_) if e is not None)
        return lb + rb, (None if not parts else parts[0] if len(parts) == 1 else BoolOp("&&", parts))
    if isinstance(tree, Or):
        lb, le = rec(tree.left, False)
        rb, re_ = rec(tree.right, False)
        return lb + rb, BoolOp("||", (le, re_))
    if isinstance(tree, Not):
        b, e = rec(tree.operand, False)
        return b, NotExpr(e)
    assert isinstance(tree, Comparison)
    ref = tree.ref
    if ref is None:
        raise CompileError("E_UNKNOWN_ATTR", f"condition on {'.'.join(tree.path)} is not bound")
    value = Lit(tree.value)
    if isinstance(ref, MeasureRef):
        m = cat.measure(ref.measure)
        if m not in measure_vars:
            raise CompileError("E_UNKNOWN_ATTR", f"measure {ref.measure!r} is not in the cuboid")
        return [], Cmp(tree.op, Cast(measure_cast(cat, m, dsd), measure_vars[m]), value)
    try:
        level = cat.level(ref.role, ref.level)
    except MappingError as exc:
        raise CompileError("E_UNKNOWN_ATTR", exc.message) from None
    if level not in level_vars:
        raise CompileError("E_UNKNOWN_ATTR", f"level {ref.role}.{ref.level} is not in the cuboid")
    lv = level_vars[level]
    if isinstance(ref, MemberRef):
        member = cat.member(ref.role, ref.level, str(tree.value))
        if member is None:
            # no such member: equality never holds, inequality always does
            const = Lit(tree.op == "!=")
            return [], (Lit(False) if positive and tree.op == "=" else const)
        if positive and tree.op == "=":
            return [Triple(OBS, _iri(level), _iri(member))], None
        return [], Cmp(tree.op, lv, _iri(member))
    assert isinstance(ref, AttributeRef)
    try:
        attr = cat.attribute(ref.role, ref.level, ref.attribute)
    except MappingError as exc:
        raise CompileError("E_UNKNOWN_ATTR", exc.message) from None
    if positive and tree.op == "=" and ref.datatype == "string":
        return [Triple(lv, _iri(attr), value)], None
    if (lv, attr) in attr_vars:
        return [], Cmp(tree.op, attr_vars[(lv, attr)], value)
    av = attr_vars[(lv, attr)] = vg.new(camel(ref.attribute))
    return [Triple(lv, _iri(attr), av)], Cmp(tree.op, av, value)
