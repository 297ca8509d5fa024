"""Compilation of typed plans into sequences of CONSTRUCT queries.

Step ``i`` reads the observations written by step ``i - 1`` (for the first
step, the stored cuboid) and its CONSTRUCT result is meant to be stored in
the named graph ``{base}/tmp/{run}/{i}``.  Every step also reads the model
graph, which holds members, attributes and rollup triples.  The compiler
describes each intermediate cuboid in an extended copy of the catalog so
the next step, and the final decoding, can look up its structure.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from rdflib import RDF, Literal, URIRef

from ..algebra.plan import Project, RollUp, Shape, TypedPlan, apply_shape
from ..errors import CompileError, MappingError
from ..model.schema import ALL
from ..qb4olap.catalog import Qb4olapCatalog
from ..qb4olap.namespaces import QB, SKOS, IriScheme, slug
from .generate import gen_copy_query, gen_dice_query, gen_rollup_query, gen_slice_measure_query, gen_slice_query
from .query import AbstractQuery, Iri, VarGen, render


@dataclass
class CompiledStep:
    index: int  # 1-based
    label: str
    query: AbstractQuery
    text: str
    input_dataset: URIRef
    output_dataset: URIRef
    output_structure: URIRef
    temp_graph: URIRef
    shape: Shape


@dataclass
class CompiledPlan:
    run_id: str
    model_graph: URIRef
    catalog: Qb4olapCatalog  # extended with the intermediate structures
    source_dataset: URIRef
    steps: list[CompiledStep] = field(default_factory=list)

    @property
    def result(self) -> CompiledStep:
        return self.steps[-1]

    @property
    def temp_graphs(self) -> list[URIRef]:
        return [s.temp_graph for s in self.steps]


def _fuse(steps) -> list[tuple]:
    """Group plan nodes into query-sized units; RollUp to All + Project becomes one Slice."""
    out, i = [], 0
    while i < len(steps):
        node = steps[i]
        nxt = steps[i + 1] if i + 1 < len(steps) else None
        if (isinstance(node, RollUp) and node.target_level == ALL and isinstance(nxt, Project)
                and nxt.role == node.role):
            out.append(("slice", node))
            i += 2
            continue
        out.append((type(node).__name__.lower(), node))
        i += 1
    return out


def _label(kind: str, node) -> str:
    if kind == "rollup":
        return f"ROLLUP {node.role} {node.source_level}->{node.target_level}"
    if kind == "slice":
        return f"SLICE {node.role}"
    if kind == "project":
        return f"SLICE {node.role} (at All)"
    if kind == "slicemeasure":
        return f"SLICE {node.measure}"
    if kind == "dice":
        return "DICE"
    return "COPY"


def compile_plan(plan: TypedPlan, catalog: Qb4olapCatalog, base_iri: str, run_id: str = "run",
                 model_graph: str | URIRef | None = None, source_dataset: URIRef | None = None) -> CompiledPlan:
    """Compile ``plan`` into one query per step (at least one).

    ``model_graph`` is the named graph holding the exported model on the
    endpoint; it defaults to ``{base}/graphs/model``.
    """
    ids = IriScheme(base_iri)
    model = URIRef(model_graph) if model_graph is not None else URIRef(ids.base + "/graphs/model")
    cat = catalog.extended()
    try:
        source = source_dataset or cat.dataset_for(plan.source, plan.input.levels)
    except MappingError as exc:
        raise CompileError("E_NO_DATASET", exc.message) from None
    dsd = cat.structure(source)
    compiled = CompiledPlan(run_id, model, cat, source)
    units = _fuse(plan.steps) or [("copy", None)]
    shape = plan.input
    dataset, prev_graph = source, None
    for i, (kind, node) in enumerate(units, start=1):
        out_ds = ids.step_dataset(run_id, i)
        obs_base = ids.step_observations(run_id, i)
        vg = VarGen()
        try:
            if kind == "rollup":
                if node.path:
                    dim = cat.dimension(node.role)
                    path = [(cat.level(node.role, c), cat.level(node.role, p)) for c, p in node.path]
                    q = gen_rollup_query(cat, dsd, dataset, dim, path[-1][1], out_ds, obs_base, path=path, vg=vg)
                else:
                    q = gen_copy_query(cat, dsd, dataset, out_ds, obs_base, vg=vg)
            elif kind == "slice":
                dim = cat.dimension(node.role)
                path = [(cat.level(node.role, c), cat.level(node.role, p)) for c, p in node.path] or None
                q = gen_slice_query(cat, dsd, dataset, dim, out_ds, obs_base, path=path, vg=vg)
            elif kind == "project":
                q = gen_copy_query(cat, dsd, dataset, out_ds, obs_base,
                                   drop_level=cat.level(node.role, ALL), vg=vg)
            elif kind == "slicemeasure":
                q = gen_slice_measure_query(cat, dsd, dataset, cat.measure(node.measure), out_ds, obs_base, vg=vg)
            elif kind == "dice":
                q = gen_dice_query(cat, dsd, dataset, node.condition, out_ds, obs_base, vg=vg)
            elif kind == "copy":
                q = gen_copy_query(cat, dsd, dataset, out_ds, obs_base, vg=vg)
            else:
                raise CompileError("E_UNREWRITTEN", f"plan node {kind} must be rewritten before compiling")
        except MappingError as exc:
            raise CompileError(exc.code, f"step {i}: {exc.message}") from None
        if kind == "slice":
            shape = apply_shape(apply_shape(shape, node), Project(node.role))
        elif node is not None:
            shape = apply_shape(shape, node)
        q.from_graphs = ([Iri(str(prev_graph))] if prev_graph is not None else []) + [Iri(str(model))]
        out_dsd = URIRef(f"{ids.base}/schemas/{slug(run_id)}/step{i}")
        cat.add_cuboid_structure(out_dsd, shape.schema, shape.levels, f"{run_id}/step{i}")
        cat.graph.add((out_ds, RDF.type, QB.DataSet))
        cat.graph.add((out_ds, QB.structure, out_dsd))
        cat.graph.add((out_ds, SKOS.notation, Literal(f"{run_id}/step{i}")))
        temp = ids.temp_graph(run_id, i)
        text = render(q, ids.prefixes())
        compiled.steps.append(CompiledStep(i, _label(kind, node), q, text, dataset, out_ds, out_dsd, temp, shape))
        dataset, dsd, prev_graph = out_ds, out_dsd, temp
    return compiled
