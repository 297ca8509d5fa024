"""Read-only metadata accessors over a QB4OLAP graph.

The first six methods mirror the auxiliary functions the generation
algorithms rely on (``levels``, ``get_level``, ``measures``, ``agg_function``,
``get_rollup``, ``levels_path``); the rest resolve model names to IRIs.
"""

from __future__ import annotations

from functools import cached_property

from rdflib import RDF, RDFS, Graph, URIRef

from ..errors import MappingError
from ..model.schema import CubeSchema, Measure, Role
from .mapping import emit_cuboid_structure, graph_to_model
from .namespaces import AGG_NAMES, QB, QB4O, SKOS, XSD_NAMES, local_name


def _not_found(msg: str) -> MappingError:
    return MappingError("E_NOT_FOUND", msg)


class Qb4olapCatalog:
    def __init__(self, graph: Graph):
        self.graph = graph
        self._bundle = None
        self._index()

    def _index(self) -> None:
        g = self.graph
        self.role_of_dim: dict[URIRef, str] = {}
        self.dim_of_role: dict[str, URIRef] = {}
        self.level_owner: dict[URIRef, URIRef] = {}  # level -> dimension property
        self.level_by_name: dict[tuple[str, str], URIRef] = {}
        self.steps: list[tuple[URIRef, URIRef, URIRef | None, frozenset]] = []
        hier_dim: dict[URIRef, URIRef] = {}
        for d in sorted(g.subjects(RDF.type, QB.DimensionProperty)):
            role = self.name(d)
            self.role_of_dim[d] = role
            self.dim_of_role[role] = d
            for h in set(g.objects(d, QB4O.hasHierarchy)) | set(g.subjects(QB4O.inDimension, d)):
                hier_dim[h] = d
                for lv in g.objects(h, QB4O.hasLevel):
                    self.level_owner[lv] = d
        for st in sorted(g.subjects(RDF.type, QB4O.HierarchyStep)):
            c, p = g.value(st, QB4O.childLevel), g.value(st, QB4O.parentLevel)
            hs = frozenset(g.objects(st, QB4O.inHierarchy))
            self.steps.append((c, p, g.value(st, QB4O.rollup), hs))
            owner = next((hier_dim[h] for h in hs if h in hier_dim), None) or self.level_owner.get(c)
            if owner is not None:
                self.level_owner.setdefault(c, owner)
                self.level_owner.setdefault(p, owner)
        for lv, d in self.level_owner.items():
            self.level_by_name[(self.role_of_dim[d], self.name(lv))] = lv
        self.hier_dim = hier_dim

    # names

    def name(self, iri) -> str:
        n = self.graph.value(iri, SKOS.notation)
        return str(n) if n is not None else local_name(iri)

    def find(self, name: str, kind) -> URIRef:
        for s in sorted(self.graph.subjects(RDF.type, kind)):
            if self.name(s) == name:
                return s
        raise _not_found(f"no {local_name(kind)} named {name!r}")

    def dimension(self, role: str) -> URIRef:
        if role not in self.dim_of_role:
            raise _not_found(f"no dimension property for role {role!r}")
        return self.dim_of_role[role]

    def level(self, role: str, level: str) -> URIRef:
        key = (role, level)
        if key not in self.level_by_name:
            raise _not_found(f"role {role!r} has no level {level!r}")
        return self.level_by_name[key]

    def level_name(self, level: URIRef) -> tuple[str, str]:
        if level not in self.level_owner:
            raise _not_found(f"<{level}> is not a known level")
        return self.role_of_dim[self.level_owner[level]], self.name(level)

    def attribute(self, role: str, level: str, attr: str) -> URIRef:
        for a in self.graph.objects(self.level(role, level), QB4O.hasAttribute):
            if self.name(a) == attr:
                return a
        raise _not_found(f"level {role}.{level} has no attribute {attr!r}")

    def attribute_datatype(self, attr: URIRef) -> str:
        return XSD_NAMES.get(self.graph.value(attr, RDFS.range), "string")

    def hierarchy(self, role: str, name: str) -> URIRef:
        d = self.dimension(role)
        for h, owner in self.hier_dim.items():
            if owner == d and self.name(h) == name:
                return h
        raise _not_found(f"role {role!r} has no hierarchy {name!r}")

    def measure(self, name: str) -> URIRef:
        return self.find(name, QB.MeasureProperty)

    def measure_datatype(self, m: URIRef) -> str:
        return XSD_NAMES.get(self.graph.value(m, RDFS.range), "integer")

    def cube(self, name: str) -> URIRef:
        for dsd in sorted(self.graph.subjects(RDF.type, QB.DataStructureDefinition)):
            if self.graph.value(dsd, QB4O.isCuboidOf) is None and self.name(dsd) == name:
                return dsd
        raise _not_found(f"no cube named {name!r}")

    def structure(self, dataset: URIRef) -> URIRef:
        dsd = self.graph.value(dataset, QB.structure)
        if dsd is None:
            raise _not_found(f"dataset <{dataset}> has no qb:structure")
        return dsd

    def cube_of(self, dsd: URIRef) -> URIRef:
        return self.graph.value(dsd, QB4O.isCuboidOf) or dsd

    def dataset_for(self, cube: str, levels: tuple[str, ...] | None = None) -> URIRef:
        """A dataset holding a cuboid of ``cube``, at ``levels`` when given."""
        cube_iri = self.cube(cube)
        for ds in sorted(self.graph.subjects(RDF.type, QB.DataSet)):
            dsd = self.graph.value(ds, QB.structure)
            if dsd is None or self.cube_of(dsd) != cube_iri:
                continue
            if levels is None or tuple(self.level_name(lv)[1] for lv in self.levels(dsd)) == tuple(levels):
                return ds
        raise _not_found(f"no dataset for cube {cube!r} at levels {levels}")

    def member(self, role: str, level: str, member_id: str) -> URIRef | None:
        return self._members.get((self.level(role, level), member_id))

    def member_id(self, iri) -> str:
        n = self.graph.value(iri, SKOS.notation)
        return str(n) if n is not None else local_name(iri)

    @cached_property
    def _members(self) -> dict:
        out = {}
        for p in (QB4O.memberOf, QB4O.inLevel):
            for m, lv in self.graph.subject_objects(p):
                out[(lv, self.member_id(m))] = m
        return out

    # auxiliary functions used by the generators

    def _components(self, dsd: URIRef) -> list:
        comps = []
        for comp in self.graph.objects(dsd, QB.component):
            order = self.graph.value(comp, QB.order)
            comps.append((int(order) if order is not None else 1 << 30, comp))
        return [c for _, c in sorted(comps, key=lambda x: (x[0], str(self.graph.value(x[1], QB4O.level) or
                                                                     self.graph.value(x[1], QB.measure) or
                                                                     self.graph.value(x[1], QB.dimension))))]

    def levels(self, dsd: URIRef) -> list[URIRef]:
        """Levels of a cuboid DSD, in component order."""
        return [lv for c in self._components(dsd) for lv in self.graph.objects(c, QB4O.level)]

    def dimensions(self, dsd: URIRef) -> list[URIRef]:
        """Dimension properties of ``dsd``; cuboid DSDs list levels only, so fall back to their owners."""
        dims = [d for c in self._components(dsd) for d in self.graph.objects(c, QB.dimension)]
        return dims or [self.level_owner[lv] for lv in self.levels(dsd) if lv in self.level_owner]

    def get_level(self, dsd: URIRef, dim: URIRef) -> URIRef:
        for lv in self.levels(dsd):
            if self.level_owner.get(lv) == dim:
                return lv
        raise _not_found(f"DSD <{dsd}> has no level of dimension <{dim}>")

    def measures(self, dsd: URIRef) -> list[URIRef]:
        return [m for c in self._components(dsd) for m in self.graph.objects(c, QB.measure)]

    def agg_function(self, m: URIRef, dsd: URIRef) -> URIRef:
        for c in self._components(dsd):
            if self.graph.value(c, QB.measure) == m:
                f = self.graph.value(c, QB4O.aggregateFunction)
                if f is not None:
                    return f
        raise _not_found(f"measure <{m}> has no aggregate function in <{dsd}>")

    def aggregate_name(self, m: URIRef, dsd: URIRef) -> str:
        return AGG_NAMES[self.agg_function(m, dsd)]

    def get_rollup(self, child: URIRef, parent: URIRef) -> URIRef:
        for c, p, r, _ in self.steps:
            if c == child and p == parent and r is not None:
                return r
        raise _not_found(f"no rollup property from <{child}> to <{parent}>")

    def levels_path(self, start: URIRef, end: URIRef, hierarchy: URIRef | None = None) -> list[tuple]:
        """Unique chain of (child, parent) level IRIs from ``start`` up to ``end``."""
        if start == end:
            return []
        edges = [(c, p) for c, p, _, hs in self.steps if hierarchy is None or hierarchy in hs]
        paths: list[list[tuple]] = []

        def walk(cur, acc):
            if cur == end:
                paths.append(list(acc))
                return
            for c, p in edges:
                if c == cur:
                    acc.append((c, p))
                    walk(p, acc)
                    acc.pop()

        walk(start, [])
        if not paths:
            raise MappingError("E_NO_PATH", f"no path from <{start}> to <{end}>")
        if len(paths) > 1:
            raise MappingError("E_AMBIGUOUS_PATH", f"{len(paths)} paths from <{start}> to <{end}>")
        return paths[0]

    # model views

    @property
    def bundle(self):
        if self._bundle is None:
            self._bundle = graph_to_model(self.graph)
        return self._bundle

    def cube_schema(self, dsd: URIRef) -> tuple[CubeSchema, tuple[str, ...]]:
        """Cube schema restricted to the roles and measures of ``dsd``, plus its levels."""
        full = self.bundle.cubes[self.name(self.cube_of(dsd))]
        pairs = [self.level_name(lv) for lv in self.levels(dsd)]
        roles = tuple(Role(r, full.role(r).dimension) for r, _ in pairs)
        measures = []
        for m in self.measures(dsd):
            mname = self.name(m)
            measures.append(Measure(mname, self.aggregate_name(m, dsd), full.measure(mname).datatype))
        return CubeSchema(full.name, roles, tuple(measures)), tuple(lv for _, lv in pairs)

    def extended(self) -> "Qb4olapCatalog":
        """A catalog over a copy of the graph, for adding derived structures."""
        g = Graph(bind_namespaces="none")
        for p, n in self.graph.namespaces():
            g.bind(p, n)
        g += self.graph
        out = Qb4olapCatalog(g)
        out._bundle = self.bundle
        return out

    def add_cuboid_structure(self, dsd: URIRef, cube: CubeSchema, levels, name: str) -> URIRef:
        """Describe a derived cuboid (possibly with fewer roles or measures) in this catalog's graph."""
        g = self.graph
        tmp = Graph()
        emit_cuboid_structure(tmp, _CatalogIris(self), dsd, self.cube(cube.name), cube, levels, name)
        g += tmp
        return dsd


class _CatalogIris:
    """Adapter giving ``emit_cuboid_structure`` the IRIs already present in a catalog."""

    def __init__(self, cat: Qb4olapCatalog):
        self.cat = cat

    def level(self, role: str, level: str) -> URIRef:
        return self.cat.level(role, level)

    def measure(self, name: str) -> URIRef:
        return self.cat.measure(name)
