"""Dimension, cube and cuboid value types.

All types are frozen dataclasses.  Member identity is an opaque string id;
attribute values are payload only.  The top level of every dimension is named
``All`` and holds the single implicit member ``all``; instances never need to
list it or the rollup pairs leading into it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from typing import Iterable, Iterator, Mapping, Union

from ..errors import ModelError

ALL = "All"
ALL_MEMBER = "all"
ALL_ATTRIBUTE = "all"
DEFAULT_HIERARCHY = "default"

AGGREGATES = ("SUM", "COUNT", "AVG", "MIN", "MAX")
ATTRIBUTE_TYPES = ("string", "integer", "decimal")
MEASURE_TYPES = ("integer", "decimal")

Number = Union[int, Decimal]
Value = Union[str, int, Decimal]


@dataclass(frozen=True)
class Attribute:
    name: str
    datatype: str = "string"


@dataclass(frozen=True)
class Level:
    name: str
    attributes: tuple[Attribute, ...] = ()

    def attribute(self, name: str) -> Attribute | None:
        for a in self.attributes:
            if a.name == name:
                return a
        return None

    def attribute_index(self, name: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == name:
                return i
        raise ModelError("E_UNKNOWN_ATTR", f"level {self.name!r} has no attribute {name!r}")


def all_level() -> Level:
    return Level(ALL, (Attribute(ALL_ATTRIBUTE, "string"),))


@dataclass(frozen=True)
class Hierarchy:
    name: str
    levels: frozenset[str]


@dataclass(frozen=True)
class DimensionSchema:
    name: str
    levels: tuple[Level, ...]
    order: frozenset[tuple[str, str]]  # (child, parent)
    hierarchies: tuple[Hierarchy, ...] = ()

    def level(self, name: str) -> Level:
        for lv in self.levels:
            if lv.name == name:
                return lv
        raise ModelError("E_UNKNOWN_LEVEL", f"dimension {self.name!r} has no level {name!r}")

    def has_level(self, name: str) -> bool:
        return any(lv.name == name for lv in self.levels)

    @property
    def level_names(self) -> tuple[str, ...]:
        return tuple(lv.name for lv in self.levels)

    @property
    def bottom(self) -> str:
        parents = {p for _, p in self.order}
        candidates = [lv.name for lv in self.levels if lv.name not in parents]
        if len(candidates) != 1:
            raise ModelError("E_NO_BOTTOM", f"dimension {self.name!r} has no unique bottom level")
        return candidates[0]

    def parents(self, level: str) -> list[str]:
        return sorted(p for c, p in self.order if c == level)

    def children(self, level: str) -> list[str]:
        return sorted(c for c, p in self.order if p == level)

    def reachable(self, start: str, end: str) -> bool:
        """True iff ``start ->* end`` in the level order (reflexive)."""
        seen, stack = set(), [start]
        while stack:
            cur = stack.pop()
            if cur == end:
                return True
            if cur in seen:
                continue
            seen.add(cur)
            stack.extend(self.parents(cur))
        return False

    def hierarchy(self, name: str) -> Hierarchy:
        for h in self.hierarchies_with_default():
            if h.name == name:
                return h
        raise ModelError("E_UNKNOWN_HIERARCHY", f"dimension {self.name!r} has no hierarchy {name!r}")

    def needs_default_hierarchy(self) -> bool:
        every = set(self.level_names)
        return not any(set(h.levels) == every for h in self.hierarchies)

    def hierarchies_with_default(self) -> tuple[Hierarchy, ...]:
        if self.needs_default_hierarchy():
            return self.hierarchies + (Hierarchy(DEFAULT_HIERARCHY, frozenset(self.level_names)),)
        return self.hierarchies


@dataclass(frozen=True)
class DimensionInstance:
    """Members per level and the child/parent rollup relations.

    ``members[level][member_id]`` is the tuple of attribute values.  Relations
    into ``All`` are implicit and never stored.
    """

    schema: DimensionSchema
    members: Mapping[str, Mapping[str, tuple[Value, ...]]]
    rollups: Mapping[tuple[str, str], frozenset[tuple[str, str]]]

    def level_members(self, level: str) -> Mapping[str, tuple[Value, ...]]:
        if level == ALL:
            return {ALL_MEMBER: (ALL_MEMBER,)}
        return self.members.get(level, {})

    def has_member(self, level: str, member: str) -> bool:
        return member in self.level_members(level)

    def attribute_value(self, level: str, member: str, attribute: str) -> Value:
        lv = self.schema.level(level)
        return self.level_members(level)[member][lv.attribute_index(attribute)]

    def rup(self, child: str, parent: str) -> frozenset[tuple[str, str]]:
        if (child, parent) not in self.schema.order:
            raise ModelError("E_NOT_PARENT", f"{parent!r} is not a parent of {child!r}")
        if parent == ALL:
            return frozenset((m, ALL_MEMBER) for m in self.level_members(child))
        if (child, parent) not in self.rollups:
            raise ModelError("E_MISSING_RUP", f"no rollup relation {child!r} -> {parent!r}")
        return self.rollups[(child, parent)]

    def parent_map(self, child: str, parent: str) -> dict[str, list[str]]:
        out: dict[str, list[str]] = {}
        for c, p in sorted(self.rup(child, parent)):
            out.setdefault(c, []).append(p)
        return out

    def is_strict(self, child: str, parent: str) -> bool:
        return all(len(ps) == 1 for ps in self.parent_map(child, parent).values())


@dataclass(frozen=True)
class Role:
    name: str
    dimension: DimensionSchema


@dataclass(frozen=True)
class Measure:
    name: str
    aggregate: str = "SUM"
    datatype: str = "integer"


@dataclass(frozen=True)
class CubeSchema:
    name: str
    roles: tuple[Role, ...]
    measures: tuple[Measure, ...]

    @property
    def role_names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.roles)

    @property
    def measure_names(self) -> tuple[str, ...]:
        return tuple(m.name for m in self.measures)

    def role(self, name: str) -> Role:
        for r in self.roles:
            if r.name == name:
                return r
        raise ModelError("E_UNKNOWN_ROLE", f"cube {self.name!r} has no dimension role {name!r}")

    def role_index(self, name: str) -> int:
        for i, r in enumerate(self.roles):
            if r.name == name:
                return i
        raise ModelError("E_UNKNOWN_ROLE", f"cube {self.name!r} has no dimension role {name!r}")

    def measure(self, name: str) -> Measure:
        for m in self.measures:
            if m.name == name:
                return m
        raise ModelError("E_UNKNOWN_MEASURE", f"cube {self.name!r} has no measure {name!r}")

    def measure_index(self, name: str) -> int:
        return self.measure_names.index(self.measure(name).name)

    def without_role(self, name: str) -> "CubeSchema":
        return CubeSchema(self.name, tuple(r for r in self.roles if r.name != name), self.measures)

    def without_measure(self, name: str) -> "CubeSchema":
        return CubeSchema(self.name, self.roles, tuple(m for m in self.measures if m.name != name))

    def bottom_levels(self) -> tuple[str, ...]:
        return tuple(r.dimension.bottom for r in self.roles)


Coordinates = tuple[str, ...]
MeasureValues = tuple[Number, ...]


@dataclass(frozen=True)
class Cuboid:
    """A partial function from member-id tuples to measure-value tuples.

    ``levels`` and every coordinate tuple are aligned with ``schema.roles``;
    measure tuples are aligned with ``schema.measures``.
    """

    schema: CubeSchema
    levels: tuple[str, ...]
    cells: Mapping[Coordinates, MeasureValues] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if len(self.levels) != len(self.schema.roles):
            raise ModelError("E_BAD_LEVELSET", "level set must hold exactly one level per role")
        width = len(self.schema.measures)
        for coords, values in self.cells.items():
            if len(coords) != len(self.levels) or len(values) != width:
                raise ModelError("E_BAD_CELL", f"cell {coords!r} does not match the cuboid shape")

    def level_of(self, role: str) -> str:
        return self.levels[self.schema.role_index(role)]

    def level_set(self) -> frozenset[tuple[str, str]]:
        return frozenset(zip(self.schema.role_names, self.levels))

    def sorted_cells(self) -> list[tuple[Coordinates, MeasureValues]]:
        return sorted(self.cells.items())

    def __iter__(self) -> Iterator[tuple[Coordinates, MeasureValues]]:
        return iter(self.sorted_cells())

    def __len__(self) -> int:
        return len(self.cells)


def level_set(cube: CubeSchema, levels: Iterable[str]) -> frozenset[tuple[str, str]]:
    """Pair a per-role level tuple with role names, the form compared by adjacency."""
    return frozenset(zip(cube.role_names, levels))


@dataclass
class Bundle:
    """Everything read from one model file or one QB4OLAP graph."""

    dimensions: dict[str, DimensionSchema] = field(default_factory=dict)
    instances: dict[str, DimensionInstance] = field(default_factory=dict)
    cubes: dict[str, CubeSchema] = field(default_factory=dict)
    cuboids: dict[str, Cuboid] = field(default_factory=dict)
    extras: list = field(default_factory=list)

    def instances_for(self, cube: CubeSchema) -> dict[str, DimensionInstance]:
        """Map each role of ``cube`` to its dimension instance."""
        out = {}
        for r in cube.roles:
            if r.dimension.name not in self.instances:
                raise ModelError("E_MISSING_INSTANCE", f"no instance for dimension {r.dimension.name!r}")
            out[r.name] = self.instances[r.dimension.name]
        return out

    def only_cube(self) -> CubeSchema:
        if len(self.cubes) != 1:
            raise ModelError("E_AMBIGUOUS_CUBE", f"expected exactly one cube, found {len(self.cubes)}")
        return next(iter(self.cubes.values()))

    def cuboid_for(self, cube: CubeSchema) -> Cuboid:
        for c in self.cuboids.values():
            if c.schema.name == cube.name:
                return c
        raise ModelError("E_NO_CUBOID", f"no cuboid stored for cube {cube.name!r}")
