"""Structural validation of schemas, instances and cuboids."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal

from .schema import (
    AGGREGATES,
    ALL,
    ALL_ATTRIBUTE,
    ATTRIBUTE_TYPES,
    MEASURE_TYPES,
    CubeSchema,
    Cuboid,
    DimensionInstance,
    DimensionSchema,
)

ERROR, WARNING, NOTICE = "error", "warning", "notice"


@dataclass(frozen=True)
class Issue:
    code: str
    message: str
    severity: str = ERROR

    def __str__(self):
        return f"[{self.severity}] {self.code}: {self.message}"


@dataclass
class ValidationReport:
    issues: list[Issue] = field(default_factory=list)

    def add(self, code: str, message: str, severity: str = ERROR) -> None:
        self.issues.append(Issue(code, message, severity))

    def extend(self, other: "ValidationReport") -> None:
        self.issues.extend(other.issues)

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == ERROR]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == WARNING]

    @property
    def notices(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == NOTICE]

    @property
    def ok(self) -> bool:
        return not self.errors

    def codes(self) -> set[str]:
        return {i.code for i in self.errors}

    def render(self) -> str:
        if not self.issues:
            return "OK"
        return "\n".join(str(i) for i in self.issues)


def _has_cycle(levels: set[str], order) -> bool:
    graph = {lv: [p for c, p in order if c == lv] for lv in levels}
    state: dict[str, int] = {}

    def visit(n: str) -> bool:
        state[n] = 1
        for m in graph.get(n, ()):
            if state.get(m) == 1:
                return True
            if m not in state and visit(m):
                return True
        state[n] = 2
        return False

    return any(n not in state and visit(n) for n in sorted(levels))


def _connected(levels: set[str], order) -> bool:
    if not levels:
        return False
    adj = {lv: set() for lv in levels}
    for c, p in order:
        if c in levels and p in levels:
            adj[c].add(p)
            adj[p].add(c)
    start = next(iter(sorted(levels)))
    seen, stack = set(), [start]
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        stack.extend(adj[n] - seen)
    return seen == levels


def validate_dimension(dim: DimensionSchema) -> ValidationReport:
    rep = ValidationReport()
    names = [lv.name for lv in dim.levels]
    level_set = set(names)
    if len(level_set) != len(names):
        rep.add("E_DUP_LEVEL", f"{dim.name}: duplicate level names")
    for lv in dim.levels:
        attr_names = [a.name for a in lv.attributes]
        if len(set(attr_names)) != len(attr_names):
            rep.add("E_DUP_ATTR", f"{dim.name}.{lv.name}: duplicate attribute names")
        for a in lv.attributes:
            if a.datatype not in ATTRIBUTE_TYPES:
                rep.add("E_BAD_DATATYPE", f"{dim.name}.{lv.name}.{a.name}: unknown datatype {a.datatype!r}")
        if lv.name == ALL and attr_names != [ALL_ATTRIBUTE]:
            rep.add("E_ALL_ATTRS", f"{dim.name}: level All must have exactly the attribute 'all'")

    for c, p in sorted(dim.order):
        if c not in level_set or p not in level_set:
            rep.add("E_BAD_ORDER", f"{dim.name}: order pair {c} -> {p} references an unknown level")
        elif c == p:
            rep.add("E_CYCLE", f"{dim.name}: self pair {c} -> {c}")
    if _has_cycle(level_set, {(c, p) for c, p in dim.order if c != p}):
        rep.add("E_CYCLE", f"{dim.name}: level order contains a cycle")

    parents = {p for _, p in dim.order}
    children = {c for c, _ in dim.order}
    bottoms = [n for n in names if n not in parents]
    tops = [n for n in names if n not in children]
    if len(bottoms) != 1:
        rep.add("E_NO_BOTTOM", f"{dim.name}: expected one bottom level, found {sorted(bottoms)}")
    if ALL not in level_set or tops != [ALL]:
        rep.add("E_NO_TOP", f"{dim.name}: expected the unique top level All, found {sorted(tops)}")
    elif len(bottoms) == 1 and rep.ok:
        for n in names:
            if not dim.reachable(bottoms[0], n) or not dim.reachable(n, ALL):
                rep.add("E_NOT_LATTICE", f"{dim.name}: level {n} is not between bottom and All")

    covered: set[str] = set()
    for h in dim.hierarchies:
        if not set(h.levels) <= level_set:
            rep.add("E_HIER_LEVEL", f"{dim.name}.{h.name}: hierarchy lists unknown levels")
            continue
        covered |= set(h.levels)
        if rep.ok and len(bottoms) == 1:
            if bottoms[0] not in h.levels or ALL not in h.levels or not _connected(set(h.levels), dim.order):
                rep.add("E_HIER_SHAPE", f"{dim.name}.{h.name}: hierarchy must connect the bottom level to All")
    if dim.hierarchies:
        for n in names:
            if n not in covered:
                rep.add("E_ORPHAN_LEVEL", f"{dim.name}: level {n} belongs to no hierarchy")
    if dim.needs_default_hierarchy():
        rep.add("N_DEFAULT_HIERARCHY", f"{dim.name}: default hierarchy with all levels inserted", NOTICE)
    return rep


def validate_cube(cube: CubeSchema) -> ValidationReport:
    rep = ValidationReport()
    roles = [r.name for r in cube.roles]
    if len(set(roles)) != len(roles):
        rep.add("E_DUP_ROLE", f"{cube.name}: duplicate dimension role names")
    if not roles:
        rep.add("E_NO_DIMENSION", f"{cube.name}: cube has no dimensions")
    names = [m.name for m in cube.measures]
    if len(set(names)) != len(names):
        rep.add("E_DUP_MEASURE", f"{cube.name}: duplicate measure names")
    for m in cube.measures:
        if m.aggregate not in AGGREGATES:
            rep.add("E_NO_AGG", f"{cube.name}.{m.name}: missing or unknown aggregate function {m.aggregate!r}")
        if m.datatype not in MEASURE_TYPES:
            rep.add("E_BAD_DATATYPE", f"{cube.name}.{m.name}: measures must be integer or decimal")
    seen = set()
    for r in cube.roles:
        if r.dimension.name in seen:
            continue
        seen.add(r.dimension.name)
        rep.extend(validate_dimension(r.dimension))
    return rep


def validate_schema(obj: DimensionSchema | CubeSchema) -> ValidationReport:
    if isinstance(obj, CubeSchema):
        return validate_cube(obj)
    return validate_dimension(obj)


def _conforms(value, datatype: str) -> bool:
    if datatype == "string":
        return isinstance(value, str)
    if datatype == "integer":
        return isinstance(value, int) and not isinstance(value, bool)
    return isinstance(value, (int, Decimal)) and not isinstance(value, bool)


def validate_instance(inst: DimensionInstance) -> ValidationReport:
    rep = ValidationReport()
    dim = inst.schema
    for level, members in inst.members.items():
        if not dim.has_level(level) or level == ALL:
            rep.add("E_BAD_LEVEL", f"{dim.name}: members listed for unknown level {level!r}")
            continue
        lv = dim.level(level)
        for mid, values in members.items():
            if len(values) != len(lv.attributes):
                rep.add("E_BAD_VALUE", f"{dim.name}.{level}.{mid}: expected {len(lv.attributes)} attribute values")
                continue
            for a, v in zip(lv.attributes, values):
                if not _conforms(v, a.datatype):
                    rep.add("E_BAD_VALUE", f"{dim.name}.{level}.{mid}: {a.name}={v!r} is not {a.datatype}")

    for (c, p), pairs in sorted(inst.rollups.items()):
        if (c, p) not in dim.order:
            rep.add("E_BAD_RUP", f"{dim.name}: rollup {c} -> {p} is not in the level order")
            continue
        for cm, pm in sorted(pairs):
            if not inst.has_member(c, cm) or not inst.has_member(p, pm):
                rep.add("E_BAD_MEMBER_REF", f"{dim.name}: rollup pair ({cm}, {pm}) references a missing member")

    for c, p in sorted(dim.order):
        if p == ALL:
            continue
        if (c, p) not in inst.rollups:
            rep.add("E_MISSING_RUP", f"{dim.name}: no rollup relation for {c} -> {p}")
            continue
        mapped = inst.parent_map(c, p)
        for cm in sorted(inst.level_members(c)):
            if cm not in mapped:
                rep.add("E_DANGLING_CHILD", f"{dim.name}: member {cm} of {c} has no parent in {p}")
        if any(len(ps) > 1 for ps in mapped.values()):
            rep.add("W_NONSTRICT", f"{dim.name}: {c} -> {p} is non-strict; measures may be counted more than once",
                    WARNING)
    return rep


def validate_cuboid(cb: Cuboid, instances) -> ValidationReport:
    """Check a cuboid against the per-role instances (``{role: DimensionInstance}``)."""
    rep = ValidationReport()
    for role, level in zip(cb.schema.roles, cb.levels):
        if not role.dimension.has_level(level):
            rep.add("E_BAD_LEVEL", f"role {role.name}: level {level!r} not in dimension {role.dimension.name}")
    if not rep.ok:
        return rep
    for coords, values in cb.sorted_cells():
        for role, level, mid in zip(cb.schema.roles, cb.levels, coords):
            if not instances[role.name].has_member(level, mid):
                rep.add("E_BAD_MEMBER_REF", f"cell {coords}: {mid!r} is not a member of {role.name}.{level}")
        for m, v in zip(cb.schema.measures, values):
            if not _conforms(v, m.datatype):
                rep.add("E_BAD_VALUE", f"cell {coords}: measure {m.name}={v!r} is not {m.datatype}")
    return rep
