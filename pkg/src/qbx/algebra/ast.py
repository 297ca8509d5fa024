"""Algebra program syntax tree and its pretty-printer."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal

from .conditions import And, Comparison, Condition, Not, Or, TrueCondition

ROLLUP, DRILLDOWN, SLICE, DICE = "ROLLUP", "DRILLDOWN", "SLICE", "DICE"
OPERATORS = (ROLLUP, DRILLDOWN, SLICE, DICE)


@dataclass(frozen=True)
class Statement:
    """One binding ``name = OP(source, ...)``.

    ROLLUP/DRILLDOWN use ``role``, ``hierarchy`` and ``level``; SLICE uses
    ``target`` (a role or a measure); DICE uses ``condition``.
    """

    name: str
    op: str
    source: str
    role: str | None = None
    hierarchy: str | None = None
    level: str | None = None
    target: str | None = None
    condition: Condition | None = None
    pos: tuple[int, int] | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Program:
    statements: tuple[Statement, ...]

    @property
    def result(self) -> Statement:
        return self.statements[-1]

    def binding(self, name: str) -> Statement | None:
        for st in self.statements:
            if st.name == name:
                return st
        return None


_PREC = {Or: 1, And: 2, Not: 3}


def render_value(v) -> str:
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    if isinstance(v, Decimal):
        return format(v, "f")
    return str(v)


def render_condition(cond: Condition, parent: int = 0) -> str:
    if isinstance(cond, TrueCondition):
        return "TRUE"
    if isinstance(cond, Comparison):
        return f"{'.'.join(cond.path)} {cond.op} {render_value(cond.value)}"
    if isinstance(cond, Not):
        text = "NOT " + render_condition(cond.operand, 3)
    else:
        prec = _PREC[type(cond)]
        word = " AND " if isinstance(cond, And) else " OR "
        # right operand gets prec + 1 so left-associative trees round-trip exactly
        text = render_condition(cond.left, prec) + word + render_condition(cond.right, prec + 1)
    mine = _PREC[type(cond)]
    return f"({text})" if mine < parent else text


def render_statement(st: Statement) -> str:
    if st.op in (ROLLUP, DRILLDOWN):
        role = f"{st.role}.{st.hierarchy}" if st.hierarchy else st.role
        args = f"{role}, {st.level}"
    elif st.op == SLICE:
        args = st.target
    else:
        args = render_condition(st.condition)
    return f"{st.name} = {st.op}({st.source}, {args})"


def render_program(prog: Program) -> str:
    return "".join(render_statement(st) + "\n" for st in prog.statements)
