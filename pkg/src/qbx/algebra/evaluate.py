"""Oracle evaluation of typed plans and of programs read statement by statement."""

from __future__ import annotations

from ..errors import AlgebraError
from ..model import oracle
from ..model.schema import Cuboid
from .ast import DICE, DRILLDOWN, ROLLUP, Program
from .plan import Dice, Project, RollUp, SliceMeasure, TypedPlan, _chain, raw_plan


def evaluate_plan(plan: TypedPlan, cuboid: Cuboid, instances) -> Cuboid:
    """Run ``plan`` on ``cuboid`` with the brute-force operators.

    ``cuboid`` must sit at ``plan.input.levels``; ``instances`` maps role
    names to dimension instances.
    """
    if cuboid.levels != plan.input.levels:
        raise AlgebraError("E_SOURCE_LEVELS",
                           f"plan expects input levels {plan.input.levels}, cuboid has {cuboid.levels}")
    out = cuboid
    for node in plan.steps:
        if isinstance(node, RollUp):
            out = oracle.rollup_along(out, node.role, list(node.path), instances)
        elif isinstance(node, Project):
            out = oracle.project(out, node.role)
        elif isinstance(node, SliceMeasure):
            out = oracle.drop_measure(out, node.measure)
        elif isinstance(node, Dice):
            out = oracle.oracle_dice(out, node.condition, instances)
        else:
            raise AlgebraError("E_UNREWRITTEN", f"plan still holds {type(node).__name__}; typecheck it first")
    return out


def evaluate_direct(prog: Program, cuboid: Cuboid, instances) -> Cuboid:
    """Evaluate a program with the operator definitions, without plan rewrites.

    Drill-downs recompute from ``cuboid``, which must be the bottom cuboid.
    Used to check that the rewrites preserve meaning.
    """
    raw = raw_plan(prog, cuboid.schema, cuboid.levels)
    out = cuboid
    for st, node in zip(_chain(prog, cuboid.schema), raw.steps):
        if st.op == ROLLUP:
            out = oracle.oracle_rollup(out, node.role, node.target_level, instances, node.hierarchy)
        elif st.op == DRILLDOWN:
            out = oracle.oracle_drilldown(out, node.role, node.target_level, cuboid, instances, node.hierarchy)
        elif st.op == DICE:
            out = oracle.oracle_dice(out, node.condition, instances)
        else:
            target = node.role if hasattr(node, "role") else node.measure
            out = oracle.oracle_slice(out, target, instances)
    return out

