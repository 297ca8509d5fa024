"""Typechecking of algebra programs into linear operator plans.

``typecheck`` first resolves the statement chain leading to the program
result into a raw plan (which may contain ``DrillDown`` and ``SliceDim``
nodes), then applies ``rewrite_drilldown`` and ``rewrite_slice_dim``.  The
resulting ``TypedPlan`` holds only ``RollUp``, ``Project``, ``SliceMeasure``
and ``Dice`` nodes, each annotated with resolved levels and paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

from ..errors import AlgebraError, ModelError
from ..model.lattice import levels_path, preferred_path
from ..model.schema import ALL, CubeSchema
from .ast import DICE, DRILLDOWN, ROLLUP, Program, Statement
from .conditions import And, Comparison, Condition, Not, Or, bind, match_measure, match_name

Path = tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class RollUp:
    role: str
    source_level: str
    target_level: str
    path: Path
    hierarchy: str | None = None


@dataclass(frozen=True)
class DrillDown:
    role: str
    source_level: str
    target_level: str
    hierarchy: str | None = None


@dataclass(frozen=True)
class SliceDim:
    role: str
    hierarchy: str | None = None


@dataclass(frozen=True)
class Project:
    role: str


@dataclass(frozen=True)
class SliceMeasure:
    measure: str


@dataclass(frozen=True)
class Dice:
    condition: Condition


Node = Union[RollUp, DrillDown, SliceDim, Project, SliceMeasure, Dice]
IPO = (RollUp, DrillDown)


@dataclass(frozen=True)
class Shape:
    """Schema and per-role levels flowing between plan steps."""

    schema: CubeSchema
    levels: tuple[str, ...]

    def level_of(self, role: str) -> str:
        return self.levels[self.schema.role_index(role)]


def apply_shape(shape: Shape, node: Node) -> Shape:
    s, lv = shape.schema, shape.levels
    if isinstance(node, (RollUp, DrillDown)):
        i = s.role_index(node.role)
        return Shape(s, lv[:i] + (node.target_level,) + lv[i + 1:])
    if isinstance(node, SliceDim):
        i = s.role_index(node.role)
        return Shape(s.without_role(node.role), lv[:i] + lv[i + 1:])
    if isinstance(node, Project):
        i = s.role_index(node.role)
        return Shape(s.without_role(node.role), lv[:i] + lv[i + 1:])
    if isinstance(node, SliceMeasure):
        return Shape(s.without_measure(node.measure), lv)
    return shape


@dataclass(frozen=True)
class TypedPlan:
    source: str  # name of the cube the program reads
    input: Shape
    steps: tuple[Node, ...] = ()
    bottom: tuple[str, ...] = field(default=())

    def shapes(self) -> list[Shape]:
        """Shape before each step, plus the final output shape."""
        out = [self.input]
        for node in self.steps:
            out.append(apply_shape(out[-1], node))
        return out

    @property
    def output(self) -> Shape:
        return self.shapes()[-1]


def _err(code: str, msg: str, st: Statement | None) -> AlgebraError:
    pos = st.pos if st is not None and st.pos else (None, None)
    return AlgebraError(code, msg, pos[0], pos[1])


def _role(shape: Shape, name: str, st: Statement) -> str:
    hit = match_name(name, shape.schema.role_names)
    if hit is None:
        raise _err("E_UNKNOWN_ROLE", f"no dimension role {name!r} in the current cuboid", st)
    return hit


def _level(shape: Shape, role: str, name: str, st: Statement) -> str:
    dim = shape.schema.role(role).dimension
    hit = match_name(name, dim.level_names)
    if hit is None:
        raise _err("E_UNKNOWN_LEVEL", f"dimension {dim.name} (role {role}) has no level {name!r}", st)
    return hit


def _hierarchy(shape: Shape, role: str, name: str | None, st: Statement) -> str | None:
    if name is None:
        return None
    dim = shape.schema.role(role).dimension
    hit = match_name(name, [h.name for h in dim.hierarchies_with_default()])
    if hit is None:
        raise _err("E_UNKNOWN_HIERARCHY", f"dimension {dim.name} has no hierarchy {name!r}", st)
    return hit


def _chain(prog: Program, cube: CubeSchema) -> list[Statement]:
    """Statements from the cube reference to the program result, in order."""
    if not prog.statements:
        return []
    names: dict[str, Statement] = {}
    for st in prog.statements:
        if st.source != cube.name and st.source not in names:
            if match_name(st.source, [cube.name]) is None:
                raise _err("E_UNKNOWN_BINDING",
                           f"{st.source!r} is neither the cube {cube.name!r} nor an earlier binding", st)
        if st.name in names or st.name == cube.name:
            raise _err("E_DUP_BINDING", f"binding {st.name!r} is defined twice", st)
        names[st.name] = st
    chain = [prog.result]
    while chain[-1].source in names:
        chain.append(names[chain[-1].source])
    return chain[::-1]


def _raw_node(shape: Shape, st: Statement) -> Node:
    if st.op in (ROLLUP, DRILLDOWN):
        role = _role(shape, st.role, st)
        target = _level(shape, role, st.level, st)
        hier = _hierarchy(shape, role, st.hierarchy, st)
        dim = shape.schema.role(role).dimension
        current = shape.level_of(role)
        if st.op == ROLLUP:
            if not dim.reachable(current, target):
                raise _err("E_NOT_REACHABLE", f"{role}: cannot roll up from {current} to {target}", st)
            try:
                path = levels_path(dim, current, target, hier)
            except ModelError as exc:
                raise _err(exc.code, exc.message, st) from None
            return RollUp(role, current, target, tuple(path), hier)
        if not dim.reachable(target, current):
            raise _err("E_NOT_REACHABLE", f"{role}: cannot drill down from {current} to {target}", st)
        if hier is not None and target not in dim.hierarchy(hier).levels:
            raise _err("E_NO_PATH", f"{role}: level {target} is not in hierarchy {hier}", st)
        return DrillDown(role, current, target, hier)
    if st.op == DICE:
        return Dice(_bind(st.condition, shape, st))
    # SLICE: roles first, then measures
    role = match_name(st.target, shape.schema.role_names)
    if role is not None:
        if len(shape.schema.roles) <= 1:
            raise _err("E_LAST_DIM", "cannot slice away the only dimension", st)
        return SliceDim(role)
    measure = match_measure(st.target, shape.schema.measure_names)
    if measure is not None:
        if len(shape.schema.measures) <= 1:
            raise _err("E_LAST_MEASURE", "cannot slice away the only measure", st)
        return SliceMeasure(measure)
    raise _err("E_UNKNOWN_ROLE", f"{st.target!r} is neither a dimension role nor a measure", st)


def _bind(cond: Condition, shape: Shape, st: Statement) -> Condition:
    """Bind a condition, reporting errors at the offending comparison."""
    if isinstance(cond, Comparison):
        try:
            return bind(cond, shape.schema, shape.levels)
        except ModelError as exc:
            pos = cond.pos or st.pos or (None, None)
            raise AlgebraError(exc.code, exc.message, pos[0], pos[1]) from None
    if isinstance(cond, (And, Or)):
        return type(cond)(_bind(cond.left, shape, st), _bind(cond.right, shape, st))
    if isinstance(cond, Not):
        return Not(_bind(cond.operand, shape, st))
    return cond


def raw_plan(prog: Program, cube: CubeSchema, source_levels: Sequence[str] | None = None) -> TypedPlan:
    """Resolve names and check preconditions without applying rewrites."""
    bottom = cube.bottom_levels()
    levels = tuple(source_levels) if source_levels is not None else bottom
    shape = Shape(cube, levels)
    start = shape
    nodes: list[Node] = []
    for st in _chain(prog, cube):
        node = _raw_node(shape, st)
        if isinstance(node, DrillDown):
            if any(not isinstance(n, IPO) for n in nodes):
                raise _err("E_DRILL_AFTER_IGO",
                           "drill-down must precede any slice or dice in the chain", st)
            if levels != bottom:
                raise _err("E_NOT_BOTTOM", "drill-down needs a program that reads the bottom cuboid", st)
        nodes.append(node)
        shape = apply_shape(shape, node)
    return TypedPlan(cube.name, start, tuple(nodes), bottom)


def rewrite_drilldown(plan: TypedPlan) -> TypedPlan:
    """Replace each drill-down and the roll-ups before it with roll-ups from the bottom cuboid.

    The replacement holds one ``RollUp`` per role whose level differs from
    the bottom, along the chain of levels the original steps followed.
    """
    steps = list(plan.steps)
    last = max((i for i, n in enumerate(steps) if isinstance(n, DrillDown)), default=None)
    if last is None:
        return plan
    prefix, rest = steps[:last + 1], steps[last + 1:]
    schema = plan.input.schema
    # per-role composed path from the bottom level, tracked through the prefix
    routes: dict[str, list[tuple[str, str]]] = {r: [] for r in schema.role_names}
    hints: dict[str, str | None] = {r: None for r in schema.role_names}
    for node in prefix:
        route = routes[node.role]
        if isinstance(node, RollUp):
            route.extend(node.path)
            hints[node.role] = node.hierarchy or hints[node.role]
            continue
        dim = schema.role(node.role).dimension
        visited = [plan.bottom[schema.role_index(node.role)]] + [p for _, p in route]
        if node.target_level in visited:
            del route[visited.index(node.target_level):]
        else:
            hint = node.hierarchy or hints[node.role]
            if node.hierarchy is None and hint and node.target_level not in dim.hierarchy(hint).levels:
                hint = None  # an inherited hierarchy that does not reach the target is no hint
            routes[node.role] = list(preferred_path(dim, dim.bottom, node.target_level, hint))
            hints[node.role] = hint
            continue
        hints[node.role] = node.hierarchy or hints[node.role]
    out: list[Node] = []
    for r, base in zip(schema.role_names, plan.bottom):
        route = routes[r]
        if route:
            out.append(RollUp(r, base, route[-1][1], tuple(route), hints[r]))
    return TypedPlan(plan.source, Shape(schema, plan.bottom), tuple(out + rest), plan.bottom)


def rewrite_slice_dim(plan: TypedPlan) -> TypedPlan:
    """Turn each ``SliceDim(role)`` into a roll-up to ``All`` plus ``Project(role)``."""
    out: list[Node] = []
    shape = plan.input
    for node in plan.steps:
        if isinstance(node, SliceDim):
            dim = shape.schema.role(node.role).dimension
            current = shape.level_of(node.role)
            path = tuple(preferred_path(dim, current, ALL, node.hierarchy))
            new = [RollUp(node.role, current, ALL, path, node.hierarchy), Project(node.role)]
        else:
            new = [node]
        for n in new:
            out.append(n)
            shape = apply_shape(shape, n)
    return TypedPlan(plan.source, plan.input, tuple(out), plan.bottom)


def typecheck(prog: Program, cube: CubeSchema, source_levels: Sequence[str] | None = None) -> TypedPlan:
    return rewrite_slice_dim(rewrite_drilldown(raw_plan(prog, cube, source_levels)))


def resolve_cube(prog: Program, cubes: dict[str, CubeSchema]) -> CubeSchema:
    """Find the cube the program's first statement reads from."""
    if not prog.statements:
        raise AlgebraError("E_EMPTY_PROGRAM", "program has no statements")
    st = prog.statements[0]
    hit = match_name(st.source, list(cubes))
    if hit is None:
        raise _err("E_UNKNOWN_CUBE", f"unknown cube {st.source!r}", st)
    return cubes[hit]
