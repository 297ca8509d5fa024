"""Cuboid lattice: adjacency, order, level paths and lattice size."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from ..errors import ModelError
from .schema import ALL, CubeSchema, DimensionSchema

LevelSet = frozenset  # of (role, level) pairs


class Order(str, Enum):
    LE = "LE"
    GE = "GE"
    NONE = "NONE"


def as_level_set(cube: CubeSchema, levels: Sequence[str] | Mapping[str, str]) -> LevelSet:
    if isinstance(levels, Mapping):
        return frozenset(levels.items())
    return frozenset(zip(cube.role_names, levels))


def _roles(v: LevelSet) -> frozenset[str]:
    return frozenset(r for r, _ in v)


def adjacent(v1: LevelSet, v2: LevelSet) -> bool:
    if _roles(v1) != _roles(v2):
        raise ModelError("E_SCHEMA_MISMATCH", "level sets belong to different cube schemas")
    return len(v1 - v2) == 1 and len(v2 - v1) == 1


def cuboid_order(v1: LevelSet, v2: LevelSet, cube: CubeSchema) -> Order:
    if not adjacent(v1, v2):
        return Order.NONE
    (role, a), = v1 - v2
    (_, b), = v2 - v1
    dim = cube.role(role).dimension
    if (a, b) in dim.order:
        return Order.LE
    if (b, a) in dim.order:
        return Order.GE
    return Order.NONE


def all_paths(dim: DimensionSchema, start: str, end: str, hierarchy: str | None = None) -> list[list[tuple[str, str]]]:
    """Every chain of order pairs leading from ``start`` up to ``end``."""
    allowed = set(dim.hierarchy(hierarchy).levels) if hierarchy else set(dim.level_names)
    for lv in (start, end):
        dim.level(lv)
    if start not in allowed or end not in allowed:
        return []
    out: list[list[tuple[str, str]]] = []

    def walk(cur: str, acc: list[tuple[str, str]]):
        if cur == end:
            out.append(list(acc))
            return
        for p in dim.parents(cur):
            if p in allowed:
                acc.append((cur, p))
                walk(p, acc)
                acc.pop()

    walk(start, [])
    return out


def levels_path(dim: DimensionSchema, start: str, end: str, hierarchy: str | None = None) -> list[tuple[str, str]]:
    """The unique chain of (child, parent) steps from ``start`` to ``end``.

    Raises ``E_NO_PATH`` when ``end`` is unreachable and ``E_AMBIGUOUS_PATH``
    when several chains exist; a hierarchy name restricts the search to that
    hierarchy's levels.
    """
    if start == end:
        dim.level(start)
        return []
    paths = all_paths(dim, start, end, hierarchy)
    if not paths:
        raise ModelError("E_NO_PATH", f"{dim.name}: no path from {start} to {end}")
    if len(paths) > 1:
        raise ModelError("E_AMBIGUOUS_PATH",
                         f"{dim.name}: {len(paths)} paths from {start} to {end}; qualify with a hierarchy")
    return paths[0]


def preferred_path(dim: DimensionSchema, start: str, end: str, hierarchy: str | None = None) -> list[tuple[str, str]]:
    """Like ``levels_path`` but resolves ambiguity by the first declared hierarchy that has a path."""
    try:
        return levels_path(dim, start, end, hierarchy)
    except ModelError as exc:
        if exc.code != "E_AMBIGUOUS_PATH" or hierarchy:
            raise
    for h in dim.hierarchies_with_default():
        paths = all_paths(dim, start, end, h.name)
        if len(paths) == 1:
            return paths[0]
    return sorted(all_paths(dim, start, end))[0]


@dataclass(frozen=True)
class CubeLatticeInfo:
    cuboid_count: int
    bottom: tuple[str, ...]
    top: tuple[str, ...]


def enumerate_cuboids(cube: CubeSchema) -> list[tuple[str, ...]]:
    """All level tuples reachable from the bottom cuboid by adjacent roll-ups, in BFS order."""
    start = cube.bottom_levels()
    seen = {start}
    queue = deque([start])
    out = []
    while queue:
        cur = queue.popleft()
        out.append(cur)
        for i, r in enumerate(cube.roles):
            for parent in r.dimension.parents(cur[i]):
                nxt = cur[:i] + (parent,) + cur[i + 1:]
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return out


def lattice_info(cube: CubeSchema) -> CubeLatticeInfo:
    count = math.prod(len(r.dimension.levels) for r in cube.roles)
    return CubeLatticeInfo(count, cube.bottom_levels(), tuple(ALL for _ in cube.roles))
