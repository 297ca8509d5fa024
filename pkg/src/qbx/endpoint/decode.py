"""Decoding CONSTRUCT result graphs back into cuboids."""

from __future__ import annotations

from rdflib import RDF, Graph, URIRef

from ..errors import MappingError
from ..model.schema import Cuboid
from ..qb4olap.catalog import Qb4olapCatalog
from ..qb4olap.mapping import number
from ..qb4olap.namespaces import QB


def measure_decode_type(cat: Qb4olapCatalog, m: URIRef, dsd: URIRef) -> str:
    """AVG results are decimal even over integer measures."""
    if cat.aggregate_name(m, dsd) == "AVG":
        return "decimal"
    return cat.measure_datatype(m)


def results_to_cuboid(g: Graph, dsd: URIRef, cat: Qb4olapCatalog, dataset: URIRef | None = None) -> Cuboid:
    """One cell per observation in ``g`` (restricted to ``dataset`` when given)."""
    schema, levels = cat.cube_schema(dsd)
    level_iris = cat.levels(dsd)
    measures = [(m, measure_decode_type(cat, m, dsd)) for m in cat.measures(dsd)]
    if dataset is not None:
        observations = sorted(g.subjects(QB.dataSet, dataset))
    else:
        observations = sorted(set(g.subjects(RDF.type, QB.Observation)) | set(g.subjects(QB.dataSet, None)))
    cells = {}
    for obs in observations:
        coords = []
        for lv in level_iris:
            vals = list(g.objects(obs, lv))
            if len(vals) != 1:
                what = "lacks" if not vals else "has several values for"
                raise MappingError("E_MISSING_COMPONENT", f"observation <{obs}> {what} level <{lv}>")
            coords.append(cat.member_id(vals[0]))
        values = []
        for m, dtype in measures:
            vals = list(g.objects(obs, m))
            if len(vals) != 1:
                what = "lacks" if not vals else "has several values for"
                raise MappingError("E_MISSING_COMPONENT", f"observation <{obs}> {what} measure <{m}>")
            values.append(number(vals[0], dtype))
        key = tuple(coords)
        if key in cells:
            raise MappingError("E_DUP_CELL", f"two observations share coordinates {key}")
        cells[key] = tuple(values)
    return Cuboid(schema, levels, cells)
