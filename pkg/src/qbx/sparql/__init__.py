from .compiler import CompiledPlan, CompiledStep, compile_plan
from .generate import (
    gen_copy_query,
    gen_dice_query,
    gen_rollup_query,
    gen_slice_measure_query,
    gen_slice_query,
    measure_cast,
    mint_observation_iri,
    proc_condition,
)
from .query import AbstractQuery, VarGen, check, render

__all__ = [
    "AbstractQuery", "CompiledPlan", "CompiledStep", "VarGen", "check", "compile_plan", "gen_copy_query",
    "gen_dice_query", "gen_rollup_query", "gen_slice_measure_query", "gen_slice_query", "measure_cast",
    "mint_observation_iri", "proc_condition", "render",
]
