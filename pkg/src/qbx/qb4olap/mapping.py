"""Mapping between the cube model and QB4OLAP graphs.

Each dimension role gets its own copy of the dimension (dimension property,
hierarchies, levels, attributes, rollup properties and members), so two roles
over one dimension (Citizenship and Destination over Geo) keep distinct level
properties in observations.  ``qbx:dimensionSchema`` records the shared
dimension name so the reader can fold the copies back together.

Extension terms beyond QB4OLAP:

* ``qbx:dimensionSchema``  dimension property -> shared dimension name
* ``qbx:position``         order of levels, attributes and hierarchies
* ``qbx:implicit``         marks the auto-inserted default hierarchy
* member attribute values are direct triples ``member attribute value``

Names are carried by ``skos:notation``; when absent the reader falls back to
the IRI local name.
"""

from __future__ import annotations

from decimal import Decimal

from rdflib import RDF, RDFS, BNode, Graph, Literal, URIRef

from ..errors import MappingError
from ..model.schema import (
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
from ..model.validate import validate_cube, validate_cuboid, validate_dimension, validate_instance
from .namespaces import AGG_IRIS, AGG_NAMES, QB, QB4O, QBX, SKOS, STANDARD_PREFIXES, XSD_NAMES, XSD_TYPES, \
    IriScheme, local_name
from .turtle import parse_turtle, serialize_turtle


def literal(value, datatype: str = "string") -> Literal:
    if datatype == "string":
        return Literal(str(value))
    if datatype == "integer":
        return Literal(int(value))
    return Literal(Decimal(str(value)) if not isinstance(value, Decimal) else value)


def to_value(lit, datatype: str):
    if not isinstance(lit, Literal):
        raise MappingError("E_PROFILE", f"expected a literal, found {lit}")
    if datatype == "string":
        return str(lit)
    try:
        if datatype == "integer":
            return int(str(lit))
        d = Decimal(str(lit))
        return d
    except (ValueError, ArithmeticError):
        raise MappingError("E_PROFILE", f"literal {lit!r} is not {datatype}") from None


def number(lit, datatype: str):
    """Measure literal to int or Decimal; decimals with integral values stay Decimal."""
    if not isinstance(lit, Literal):
        raise MappingError("E_PROFILE", f"measure value {lit} is not a literal")
    try:
        d = Decimal(str(lit))
    except ArithmeticError:
        raise MappingError("E_PROFILE", f"measure value {lit!r} is not numeric") from None
    if datatype == "integer":
        if d != d.to_integral_value():
            raise MappingError("E_PROFILE", f"measure value {lit!r} is not an integer")
        return int(d)
    return d


# writing


def _role_dimensions(bundle: Bundle) -> dict[str, DimensionSchema]:
    out: dict[str, DimensionSchema] = {}
    for cube in bundle.cubes.values():
        for r in cube.roles:
            if r.name in out and out[r.name] != r.dimension:
                raise MappingError("E_INVALID_MODEL", f"role {r.name!r} is bound to two different dimensions")
            out[r.name] = r.dimension
    used = {d.name for d in out.values()}
    for name, dim in bundle.dimensions.items():
        if name not in used:
            if name in out:
                raise MappingError("E_INVALID_MODEL", f"dimension {name!r} clashes with a role name")
            out[name] = dim
    return out


def _check(bundle: Bundle) -> None:
    problems = []
    for dim in bundle.dimensions.values():
        problems += validate_dimension(dim).errors
    for inst in bundle.instances.values():
        problems += validate_instance(inst).errors
    for cube in bundle.cubes.values():
        problems += validate_cube(cube).errors
    for cb in bundle.cuboids.values():
        problems += validate_cuboid(cb, bundle.instances_for(cb.schema)).errors
    if problems:
        raise MappingError("E_INVALID_MODEL", "; ".join(str(p) for p in problems[:5]))


def _emit_dimension(g: Graph, ids: IriScheme, role: str, dim: DimensionSchema,
                    inst: DimensionInstance | None) -> None:
    d = ids.dimension(role)
    g.add((d, RDF.type, QB.DimensionProperty))
    g.add((d, SKOS.notation, Literal(role)))
    g.add((d, QBX.dimensionSchema, Literal(dim.name)))
    for li, lv in enumerate(dim.levels):
        L = ids.level(role, lv.name)
        g.add((L, RDF.type, QB4O.LevelProperty))
        g.add((L, SKOS.notation, Literal(lv.name)))
        g.add((L, QBX.position, Literal(li)))
        for ai, a in enumerate(lv.attributes):
            A = ids.attribute(role, lv.name, a.name)
            g.add((L, QB4O.hasAttribute, A))
            g.add((A, RDF.type, QB4O.LevelAttribute))
            g.add((A, SKOS.notation, Literal(a.name)))
            g.add((A, RDFS.range, XSD_TYPES[a.datatype]))
            g.add((A, QBX.position, Literal(ai)))
    hierarchies = dim.hierarchies_with_default()
    for hi, h in enumerate(hierarchies):
        H = ids.hierarchy(role, h.name)
        g.add((d, QB4O.hasHierarchy, H))
        g.add((H, RDF.type, QB4O.Hierarchy))
        g.add((H, QB4O.inDimension, d))
        g.add((H, SKOS.notation, Literal(h.name)))
        g.add((H, QBX.position, Literal(hi)))
        if h not in dim.hierarchies:
            g.add((H, QBX.implicit, Literal(True)))
        for lv in sorted(h.levels):
            g.add((H, QB4O.hasLevel, ids.level(role, lv)))
    for c, p in sorted(dim.order):
        R = ids.rollup(role, c, p)
        g.add((R, RDF.type, QB4O.RollupProperty))
        step = BNode()
        g.add((step, RDF.type, QB4O.HierarchyStep))
        g.add((step, QB4O.childLevel, ids.level(role, c)))
        g.add((step, QB4O.parentLevel, ids.level(role, p)))
        g.add((step, QB4O.rollup, R))
        strict = inst is None or p == ALL or inst.is_strict(c, p)
        g.add((step, QB4O.pcCardinality, QB4O.OneToMany if strict else QB4O.ManyToMany))
        for h in hierarchies:
            if c in h.levels and p in h.levels:
                g.add((step, QB4O.inHierarchy, ids.hierarchy(role, h.name)))
    if inst is None:
        return
    for lv in dim.levels:
        L = ids.level(role, lv.name)
        for mid, values in sorted(inst.level_members(lv.name).items()):
            M = ids.member(role, lv.name, mid)
            g.add((M, QB4O.memberOf, L))
            for a, v in zip(lv.attributes, values):
                g.add((M, ids.attribute(role, lv.name, a.name), literal(v, a.datatype)))
    for c, p in sorted(dim.order):
        R = ids.rollup(role, c, p)
        for cm, pm in sorted(inst.rup(c, p)):
            g.add((ids.member(role, c, cm), R, ids.member(role, p, pm)))


def _emit_measures(g: Graph, ids: IriScheme, dsd: URIRef, cube: CubeSchema, start: int) -> None:
    for i, m in enumerate(cube.measures):
        M = ids.measure(m.name)
        g.add((M, RDF.type, QB.MeasureProperty))
        g.add((M, SKOS.notation, Literal(m.name)))
        g.add((M, RDFS.range, XSD_TYPES[m.datatype]))
        comp = BNode()
        g.add((dsd, QB.component, comp))
        g.add((comp, QB.measure, M))
        g.add((comp, QB4O.aggregateFunction, AGG_IRIS[m.aggregate]))
        g.add((comp, QB.order, Literal(start + i)))


def _emit_cube(g: Graph, ids: IriScheme, cube: CubeSchema) -> None:
    C = ids.cube(cube.name)
    g.add((C, RDF.type, QB.DataStructureDefinition))
    g.add((C, SKOS.notation, Literal(cube.name)))
    for i, r in enumerate(cube.roles):
        comp = BNode()
        g.add((C, QB.component, comp))
        g.add((comp, QB.dimension, ids.dimension(r.name)))
        g.add((comp, QB4O.cardinality, QB4O.ManyToOne))
        g.add((comp, QB.order, Literal(i + 1)))
    _emit_measures(g, ids, C, cube, len(cube.roles) + 1)


def emit_cuboid_structure(g: Graph, ids: IriScheme, dsd: URIRef, cube_iri: URIRef, cube: CubeSchema,
                          levels, name: str) -> None:
    """DSD triples for a cuboid at ``levels`` of ``cube``."""
    g.add((dsd, RDF.type, QB.DataStructureDefinition))
    g.add((dsd, QB4O.isCuboidOf, cube_iri))
    g.add((dsd, SKOS.notation, Literal(name)))
    for i, (r, lv) in enumerate(zip(cube.role_names, levels)):
        comp = BNode()
        g.add((dsd, QB.component, comp))
        g.add((comp, QB4O.level, ids.level(r, lv)))
        g.add((comp, QB.order, Literal(i + 1)))
    _emit_measures(g, ids, dsd, cube, len(cube.roles) + 1)


def _emit_cuboid(g: Graph, ids: IriScheme, name: str, cb: Cuboid) -> None:
    cube = cb.schema
    S = ids.cuboid(name)
    emit_cuboid_structure(g, ids, S, ids.cube(cube.name), cube, cb.levels, name)
    D = ids.dataset(name)
    g.add((D, RDF.type, QB.DataSet))
    g.add((D, QB.structure, S))
    g.add((D, SKOS.notation, Literal(name)))
    level_iris = [ids.level(r, lv) for r, lv in zip(cube.role_names, cb.levels)]
    measure_iris = [ids.measure(m) for m in cube.measure_names]
    for coords, values in cb.sorted_cells():
        O = ids.observation(name, coords)
        g.add((O, RDF.type, QB.Observation))
        g.add((O, QB.dataSet, D))
        for r, lv, L, mid in zip(cube.role_names, cb.levels, level_iris, coords):
            g.add((O, L, ids.member(r, lv, mid)))
        for m, M, v in zip(cube.measures, measure_iris, values):
            g.add((O, M, literal(v, m.datatype)))


def model_to_graph(bundle: Bundle, base_iri: str, validate: bool = True) -> Graph:
    if validate:
        _check(bundle)
    ids = IriScheme(base_iri)
    g = Graph(bind_namespaces="none")
    for p, n in {**STANDARD_PREFIXES, **ids.prefixes()}.items():
        g.bind(p, n)
    for role, dim in _role_dimensions(bundle).items():
        _emit_dimension(g, ids, role, dim, bundle.instances.get(dim.name))
    for cube in bundle.cubes.values():
        _emit_cube(g, ids, cube)
    for name, cb in bundle.cuboids.items():
        _emit_cuboid(g, ids, name, cb)
    for t in bundle.extras:
        g.add(t)
    return g


# reading


class _Reader:
    def __init__(self, g: Graph):
        self.g = g
        self.used: set = set()
        self.level_index: dict = {}  # level IRI -> (role, level name)
        self.member_ids: dict = {}  # member IRI -> id

    def objs(self, s, p) -> list:
        out = sorted(self.g.objects(s, p))
        for o in out:
            self.used.add((s, p, o))
        return out

    def obj(self, s, p):
        out = self.objs(s, p)
        return out[0] if out else None

    def subjs(self, p, o) -> list:
        out = sorted(self.g.subjects(p, o))
        for s in out:
            self.used.add((s, p, o))
        return out

    def typed(self, cls) -> list:
        return self.subjs(RDF.type, cls)

    def name(self, s) -> str:
        n = self.obj(s, SKOS.notation)
        return str(n) if n is not None else local_name(s)

    def position(self, s):
        p = self.obj(s, QBX.position)
        return int(p) if p is not None else None

    def profile(self, msg: str, subject=None) -> MappingError:
        where = f" at <{subject}>" if subject is not None else ""
        return MappingError("E_PROFILE", msg + where)

    # dimensions

    def dimension(self, d, steps: list):
        role = self.name(d)
        self.used.add((d, RDF.type, QB.DimensionProperty))
        ds = self.obj(d, QBX.dimensionSchema)
        dim_name = str(ds) if ds is not None else role
        hiers = set(self.objs(d, QB4O.hasHierarchy)) | set(self.subjs(QB4O.inDimension, d))
        h_levels: dict = {}
        for H in sorted(hiers):
            self.used.add((H, RDF.type, QB4O.Hierarchy))
            self.objs(H, QB4O.inDimension)
            h_levels[H] = set(self.objs(H, QB4O.hasLevel))
        level_iris = set().union(*h_levels.values()) if h_levels else set()
        my_steps = []
        for st in steps:
            child, parent = self.g.value(st, QB4O.childLevel), self.g.value(st, QB4O.parentLevel)
            in_h = set(self.g.objects(st, QB4O.inHierarchy))
            if in_h & hiers or child in level_iris or parent in level_iris:
                my_steps.append(st)
        order_iris = []
        for st in my_steps:
            child, parent = self.obj(st, QB4O.childLevel), self.obj(st, QB4O.parentLevel)
            if child is None or parent is None:
                raise self.profile("hierarchy step lacks childLevel or parentLevel", st)
            self.objs(st, QB4O.inHierarchy)
            self.objs(st, QB4O.pcCardinality)
            rup = self.obj(st, QB4O.rollup)
            if rup is not None:
                self.used.add((rup, RDF.type, QB4O.RollupProperty))
            order_iris.append((child, parent, rup))
            level_iris |= {child, parent}
        if not level_iris:
            raise self.profile("dimension has no levels", d)

        levels, names = {}, {}
        for L in sorted(level_iris):
            self.used.add((L, RDF.type, QB4O.LevelProperty))
            names[L] = self.name(L)
            attrs = []
            for A in self.objs(L, QB4O.hasAttribute):
                self.used.add((A, RDF.type, QB4O.LevelAttribute))
                rng = self.obj(A, RDFS.range)
                attrs.append((self.position(A), self.name(A), XSD_NAMES.get(rng, "string"), A))
            attrs.sort(key=lambda a: (a[0] is None, a[0] or 0, a[1]))
            levels[L] = (self.position(L), attrs)

        order = {(names[c], names[p]) for c, p, _ in order_iris}
        synth_all = ALL not in names.values()
        if synth_all:
            has_parent = {c for c, _ in order}
            order |= {(n, ALL) for n in names.values() if n not in has_parent}

        def depth(n: str) -> int:
            ps = [p for c, p in order if c == n]
            return 1 + max((depth(p) for p in ps), default=0) if ps else 0

        level_objs = []
        for L in sorted(levels, key=lambda L: (levels[L][0] is None, levels[L][0] or 0, -depth(names[L]),
                                               names[L])):
            attrs = tuple(Attribute(n, dt) for _, n, dt, _ in levels[L][1])
            level_objs.append(Level(names[L], attrs))
            self.level_index[L] = (role, names[L])
        if synth_all:
            level_objs.append(Level(ALL, (Attribute(ALL_ATTRIBUTE),)))

        hier_objs = []
        for H in sorted(h_levels):
            pos, hname = self.position(H), self.name(H)
            if self.obj(H, QBX.implicit) is not None:
                continue
            lvls = frozenset(names[L] for L in h_levels[H]) | ({ALL} if synth_all else frozenset())
            hier_objs.append((pos, hname, Hierarchy(hname, lvls)))
        hier_objs.sort(key=lambda h: (h[0] is None, h[0] or 0, h[1]))
        schema = DimensionSchema(dim_name, tuple(level_objs), frozenset(order), tuple(h for *_, h in hier_objs))
        return role, schema, levels, names, order_iris

    def instance(self, schema: DimensionSchema, levels: dict, names: dict, order_iris) -> DimensionInstance | None:
        members: dict = {}
        found = False
        ids_by_level: dict = {}
        for L, (_, attrs) in levels.items():
            lname = names[L]
            ms = set(self.subjs(QB4O.memberOf, L)) | set(self.subjs(QB4O.inLevel, L))
            found = found or bool(ms)
            level_members = {}
            for M in sorted(ms):
                mid = self.name(M)
                self.member_ids[M] = mid
                ids_by_level.setdefault(lname, {})[M] = mid
                values = []
                for _, aname, dt, A in attrs:
                    v = self.obj(M, A)
                    if v is None:
                        raise self.profile(f"member lacks a value for attribute {aname}", M)
                    values.append(to_value(v, dt))
                level_members[mid] = tuple(values)
            if lname != ALL:
                members[lname] = level_members
        if not found:
            return None
        rollups = {}
        for c, p, rup in order_iris:
            cname, pname = names[c], names[p]
            pairs = set()
            for M, cid in ids_by_level.get(cname, {}).items():
                if rup is None:
                    continue
                for P in self.objs(M, rup):
                    pairs.add((cid, self.member_ids.get(P, local_name(P))))
            if pname != ALL:
                rollups[(cname, pname)] = frozenset(pairs)
        return DimensionInstance(schema, members, rollups)

    # cubes and cuboids

    def components(self, dsd) -> list:
        comps = []
        for comp in self.objs(dsd, QB.component):
            order = self.obj(comp, QB.order)
            row = {k: self.obj(comp, p) for k, p in (("dimension", QB.dimension), ("measure", QB.measure),
                                                      ("level", QB4O.level), ("agg", QB4O.aggregateFunction),
                                                      ("card", QB4O.cardinality))}
            comps.append((int(order) if order is not None else None, row, comp))
        comps.sort(key=lambda c: (c[0] is None, c[0] or 0, str(c[1])))
        return [row for _, row, _ in comps]

    def measures(self, dsd, comps) -> list[Measure]:
        out = []
        for row in comps:
            if row["measure"] is None:
                continue
            M = row["measure"]
            self.used.add((M, RDF.type, QB.MeasureProperty))
            rng = self.obj(M, RDFS.range)
            dt = XSD_NAMES.get(rng, "integer")
            if row["agg"] not in AGG_NAMES:
                raise self.profile(f"measure {self.name(M)} has no known aggregate function", dsd)
            out.append(Measure(self.name(M), AGG_NAMES[row["agg"]], dt))
        return out


def graph_to_model(g: Graph) -> Bundle:
    rd = _Reader(g)
    b = Bundle()
    steps = rd.typed(QB4O.HierarchyStep)
    roles: dict[str, DimensionSchema] = {}
    dim_props: dict = {}
    for d in rd.typed(QB.DimensionProperty):
        role, schema, levels, names, order_iris = rd.dimension(d, steps)
        dim_props[d] = role
        roles[role] = schema
        if schema.name not in b.dimensions:
            b.dimensions[schema.name] = schema
            inst = rd.instance(schema, levels, names, order_iris)
            if inst is not None:
                b.instances[schema.name] = inst
        else:
            rd.instance(schema, levels, names, order_iris)  # consume the copy
    cubes_by_iri: dict = {}
    dsds = rd.typed(QB.DataStructureDefinition)
    for dsd in dsds:
        if g.value(dsd, QB4O.isCuboidOf) is not None:
            continue
        comps = rd.components(dsd)
        cube_roles = []
        for row in comps:
            if row["dimension"] is None:
                continue
            if row["dimension"] not in dim_props:
                raise rd.profile(f"DSD component uses undeclared dimension <{row['dimension']}>", dsd)
            rname = dim_props[row["dimension"]]
            cube_roles.append(Role(rname, b.dimensions[roles[rname].name]))
        cube = CubeSchema(rd.name(dsd), tuple(cube_roles), tuple(rd.measures(dsd, comps)))
        b.cubes[cube.name] = cube
        cubes_by_iri[dsd] = cube
    for dsd in dsds:
        cube_iri = rd.obj(dsd, QB4O.isCuboidOf)
        if cube_iri is None:
            continue
        if cube_iri not in cubes_by_iri:
            raise rd.profile("isCuboidOf points to no cube DSD", dsd)
        cube = cubes_by_iri[cube_iri]
        comps = rd.components(dsd)
        rd.measures(dsd, comps)
        by_role: dict = {}
        level_iris: dict = {}
        for row in comps:
            if row["level"] is None:
                continue
            if row["level"] not in rd.level_index:
                raise rd.profile(f"DSD references undeclared level <{row['level']}>", dsd)
            role, lname = rd.level_index[row["level"]]
            by_role[role] = lname
            level_iris[role] = row["level"]
        missing = [r for r in cube.role_names if r not in by_role]
        if missing:
            raise rd.profile(f"cuboid DSD has no level for roles {missing}", dsd)
        levels = tuple(by_role[r] for r in cube.role_names)
        for D in rd.subjs(QB.structure, dsd):
            rd.used.add((D, RDF.type, QB.DataSet))
            name = rd.name(D)
            rd.name(dsd)
            cells = {}
            for O in rd.subjs(QB.dataSet, D):
                rd.used.add((O, RDF.type, QB.Observation))
                coords = []
                for r in cube.role_names:
                    M = rd.obj(O, level_iris[r])
                    if M is None:
                        raise rd.profile(f"observation lacks a member for role {r}", O)
                    coords.append(rd.member_ids.get(M, local_name(M)))
                values = []
                for m in cube.measures:
                    lit = None
                    for row in comps:
                        if row["measure"] is not None and rd.name(row["measure"]) == m.name:
                            lit = rd.obj(O, row["measure"])
                    if lit is None:
                        raise rd.profile(f"observation lacks measure {m.name}", O)
                    values.append(number(lit, m.datatype))
                key = tuple(coords)
                if key in cells:
                    raise MappingError("E_DUP_CELL", f"two observations share coordinates {key}")
                cells[key] = tuple(values)
            b.cuboids[name] = Cuboid(cube, levels, cells, name)
    b.extras = sorted((t for t in g if t not in rd.used), key=lambda t: tuple(x.n3() for x in t))
    return b


def export_turtle(bundle: Bundle, base_iri: str) -> str:
    ids = IriScheme(base_iri)
    return serialize_turtle(model_to_graph(bundle, base_iri), ids.prefixes())


def import_turtle(text: str) -> Bundle:
    return graph_to_model(parse_turtle(text))
