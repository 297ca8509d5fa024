"""Executing compiled plans step by step against an engine."""

from __future__ import annotations

from dataclasses import dataclass

from rdflib import Graph

from ..errors import EndpointError
from ..model.schema import Cuboid
from ..sparql.compiler import CompiledPlan
from .decode import results_to_cuboid


@dataclass
class RunResult:
    graph: Graph
    cuboid: Cuboid


def run_compiled(compiled: CompiledPlan, engine, keep: bool = False) -> RunResult:
    """Run each step, storing its result in the step's temporary graph.

    ``engine`` is a ``LocalEngine`` or ``SparqlClient``.  Temporary graphs
    are deleted afterwards unless ``keep`` is set.
    """
    result = None
    written = []
    try:
        for step in compiled.steps:
            try:
                result = engine.execute_construct(step.text)
                if step is not compiled.result or keep:
                    engine.upload_graph(result, step.temp_graph)
                    written.append(step.temp_graph)
            except EndpointError as exc:
                raise EndpointError(exc.code, f"step {step.index} ({step.label}): {exc.message}",
                                    status=exc.status) from None
    finally:
        if not keep:
            for g in written:
                try:
                    engine.delete_graph(g)
                except EndpointError:
                    pass  # best effort; the original error matters more
    final = compiled.result
    return RunResult(result, results_to_cuboid(result, final.output_structure, compiled.catalog,
                                               final.output_dataset))
