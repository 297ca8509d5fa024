"""Boolean condition trees used by Dice, with name resolution and evaluation."""

from __future__ import annotations

import operator
from dataclasses import dataclass, field, replace
from decimal import Decimal
from typing import Callable, Sequence, Union

from ..errors import ModelError
from ..model.schema import CubeSchema, Value

OPS = ("=", "!=", "<", "<=", ">", ">=")
FLIP = {"=": "=", "!=": "!=", "<": ">", "<=": ">=", ">": "<", ">=": "<="}
_PY_OPS: dict[str, Callable] = {
    "=": operator.eq, "!=": operator.ne, "<": operator.lt,
    "<=": operator.le, ">": operator.gt, ">=": operator.ge,
}


@dataclass(frozen=True)
class AttributeRef:
    role: str
    level: str
    attribute: str
    datatype: str


@dataclass(frozen=True)
class MemberRef:
    role: str
    level: str
    datatype: str = "member"


@dataclass(frozen=True)
class MeasureRef:
    measure: str
    datatype: str


Ref = Union[AttributeRef, MemberRef, MeasureRef]


@dataclass(frozen=True)
class Comparison:
    path: tuple[str, ...]
    op: str
    value: Value
    ref: Ref | None = field(default=None, compare=False)
    pos: tuple[int, int] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class And:
    left: "Condition"
    right: "Condition"


@dataclass(frozen=True)
class Or:
    left: "Condition"
    right: "Condition"


@dataclass(frozen=True)
class Not:
    operand: "Condition"


@dataclass(frozen=True)
class TrueCondition:
    pass


Condition = Union[Comparison, And, Or, Not, TrueCondition]


def leaves(cond: Condition) -> list[Comparison]:
    if isinstance(cond, Comparison):
        return [cond]
    if isinstance(cond, (And, Or)):
        return leaves(cond.left) + leaves(cond.right)
    if isinstance(cond, Not):
        return leaves(cond.operand)
    return []


def match_name(wanted: str, names: Sequence[str]) -> str | None:
    """Exact match first, then a unique case-insensitive match."""
    if wanted in names:
        return wanted
    folded = [n for n in names if n.casefold() == wanted.casefold()]
    return folded[0] if len(folded) == 1 else None


def match_measure(wanted: str, names: Sequence[str]) -> str | None:
    for candidate in (wanted, "#" + wanted, wanted.lstrip("#")):
        hit = match_name(candidate, names)
        if hit is not None:
            return hit
    return None


def _literal_type(value: Value) -> str:
    return "string" if isinstance(value, str) else "number"


def _check_types(ref: Ref, value: Value, op: str, path: str) -> None:
    lit = _literal_type(value)
    if isinstance(ref, MemberRef):
        if lit != "string" or op not in ("=", "!="):
            raise ModelError("E_TYPE_MISMATCH", f"{path}: members only compare with = or != to a string id")
        return
    want = "string" if ref.datatype == "string" else "number"
    if want != lit:
        raise ModelError("E_TYPE_MISMATCH", f"{path} is {ref.datatype} but is compared with {value!r}")


def resolve_ref(cube: CubeSchema, levels: Sequence[str], path: Sequence[str]) -> Ref:
    """Bind a dotted path to a level attribute, a level member, or a measure.

    Only levels currently in ``levels`` (aligned with ``cube.roles``) can be
    referenced.
    """
    text = ".".join(path)
    if len(path) == 1:
        name = match_measure(path[0], cube.measure_names)
        if name is None:
            raise ModelError("E_UNKNOWN_ATTR", f"{text!r} names no measure")
        return MeasureRef(name, cube.measure(name).datatype)
    if len(path) not in (2, 3):
        raise ModelError("E_UNKNOWN_ATTR", f"{text!r} is not role.level[.attribute] or a measure")
    role = match_name(path[0], cube.role_names)
    if role is None:
        raise ModelError("E_UNKNOWN_ATTR", f"{text!r}: unknown dimension role {path[0]!r}")
    current = levels[cube.role_index(role)]
    if match_name(path[1], [current]) is None:
        raise ModelError("E_UNKNOWN_ATTR", f"{text!r}: role {role} is at level {current}, not {path[1]}")
    if len(path) == 2:
        return MemberRef(role, current)
    lv = cube.role(role).dimension.level(current)
    attr = match_name(path[2], [a.name for a in lv.attributes])
    if attr is None:
        raise ModelError("E_UNKNOWN_ATTR", f"{text!r}: level {current} has no attribute {path[2]!r}")
    return AttributeRef(role, current, attr, lv.attribute(attr).datatype)


def bind(cond: Condition, cube: CubeSchema, levels: Sequence[str]) -> Condition:
    """Resolve and typecheck every leaf; returns a tree whose leaves carry refs."""
    if isinstance(cond, Comparison):
        ref = resolve_ref(cube, levels, cond.path)
        _check_types(ref, cond.value, cond.op, ".".join(cond.path))
        return replace(cond, ref=ref)
    if isinstance(cond, And):
        return And(bind(cond.left, cube, levels), bind(cond.right, cube, levels))
    if isinstance(cond, Or):
        return Or(bind(cond.left, cube, levels), bind(cond.right, cube, levels))
    if isinstance(cond, Not):
        return Not(bind(cond.operand, cube, levels))
    return cond


def compare(left: Value, op: str, right: Value) -> bool:
    if isinstance(left, float) or isinstance(right, float):
        left, right = Decimal(str(left)), Decimal(str(right))
    return _PY_OPS[op](left, right)


def evaluate(cond: Condition, lookup: Callable[[Ref], Value]) -> bool:
    """Evaluate ``cond`` where ``lookup`` maps a bound ref to the cell's value."""
    if isinstance(cond, TrueCondition):
        return True
    if isinstance(cond, Comparison):
        if cond.ref is None:
            raise ModelError("E_UNBOUND", "condition must be bound before evaluation")
        return compare(lookup(cond.ref), cond.op, cond.value)
    if isinstance(cond, And):
        return evaluate(cond.left, lookup) and evaluate(cond.right, lookup)
    if isinstance(cond, Or):
        return evaluate(cond.left, lookup) or evaluate(cond.right, lookup)
    return not evaluate(cond.operand, lookup)
