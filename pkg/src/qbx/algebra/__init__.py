"""Textual OLAP algebra: parsing, typechecking, rewrites and oracle evaluation."""

from .ast import Program, Statement, render_condition, render_program
from .conditions import And, Comparison, Condition, Not, Or, TrueCondition
from .evaluate import evaluate_direct, evaluate_plan
from .parser import parse_condition, parse_program
from .plan import (
    Dice,
    DrillDown,
    Project,
    RollUp,
    Shape,
    SliceDim,
    SliceMeasure,
    TypedPlan,
    raw_plan,
    resolve_cube,
    rewrite_drilldown,
    rewrite_slice_dim,
    typecheck,
)

__all__ = [
    "And", "Comparison", "Condition", "Dice", "DrillDown", "Not", "Or", "Program", "Project", "RollUp",
    "Shape", "SliceDim", "SliceMeasure", "Statement", "TrueCondition", "TypedPlan", "evaluate_direct",
    "evaluate_plan", "parse_condition", "parse_program", "raw_plan", "render_condition", "render_program",
    "resolve_cube", "rewrite_drilldown", "rewrite_slice_dim", "typecheck",
]
