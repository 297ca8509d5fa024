"""Vocabulary namespaces and the IRI minting scheme."""

from __future__ import annotations

import hashlib
import re
from urllib.parse import quote, unquote

from rdflib import RDF, RDFS, XSD, Namespace, URIRef

QB = Namespace("http://purl.org/linked-data/cube#")
QB4O = Namespace("http://purl.org/qb4olap/cubes#")
SKOS = Namespace("http://www.w3.org/2004/02/skos/core#")
SDMX_DIMENSION = Namespace("http://purl.org/linked-data/sdmx/2009/dimension#")
SDMX_MEASURE = Namespace("http://purl.org/linked-data/sdmx/2009/measure#")
# extension terms for things QB4OLAP has no property for
QBX = Namespace("https://w3id.org/qbx#")

STANDARD_PREFIXES = {
    "qb": str(QB),
    "qb4o": str(QB4O),
    "qbx": str(QBX),
    "rdf": str(RDF),
    "rdfs": str(RDFS),
    "sdmx-dimension": str(SDMX_DIMENSION),
    "sdmx-measure": str(SDMX_MEASURE),
    "skos": str(SKOS),
    "xsd": str(XSD),
}

AGG_IRIS = {name: QB4O[name.lower()] for name in ("SUM", "COUNT", "AVG", "MIN", "MAX")}
AGG_NAMES = {iri: name for name, iri in AGG_IRIS.items()}
XSD_TYPES = {"string": XSD.string, "integer": XSD.integer, "decimal": XSD.decimal}
XSD_NAMES = {iri: name for name, iri in XSD_TYPES.items()}


def slug(name: str) -> str:
    """Percent-encode a model name for use inside an IRI."""
    return quote(name, safe="-_.~")


def local_name(iri: str) -> str:
    """Fragment, or last path segment, of an IRI, percent-decoded."""
    s = str(iri)
    tail = s.rsplit("#", 1)[1] if "#" in s else re.split(r"[/:]", s.rstrip("/"))[-1]
    return unquote(tail)


class IriScheme:
    """Deterministic IRIs for every model element under one base IRI."""

    def __init__(self, base: str):
        self.base = base.rstrip("/#")
        self.schema = Namespace(self.base + "/schemas#")
        self.datasets = Namespace(self.base + "/datasets#")
        self.instances = Namespace(self.base + "/instances#")

    def prefixes(self) -> dict[str, str]:
        return {"schema": str(self.schema), "data": str(self.datasets), "obs": str(self.instances)}

    def dimension(self, role: str) -> URIRef:
        return self.schema["dim_" + slug(role)]

    def level(self, role: str, level: str) -> URIRef:
        return self.schema[f"level_{slug(role)}_{slug(level)}"]

    def attribute(self, role: str, level: str, attr: str) -> URIRef:
        return self.schema[f"attr_{slug(role)}_{slug(level)}_{slug(attr)}"]

    def hierarchy(self, role: str, hierarchy: str) -> URIRef:
        return self.schema[f"hier_{slug(role)}_{slug(hierarchy)}"]

    def rollup(self, role: str, child: str, parent: str) -> URIRef:
        return self.schema[f"rup_{slug(role)}_{slug(child)}_{slug(parent)}"]

    def measure(self, name: str) -> URIRef:
        return self.schema["measure_" + slug(name)]

    def cube(self, name: str) -> URIRef:
        return self.schema["cube_" + slug(name)]

    def cuboid(self, name: str) -> URIRef:
        return self.schema["cuboid_" + slug(name)]

    def dataset(self, name: str) -> URIRef:
        return self.datasets[slug(name)]

    def member_namespace(self, role: str, level: str) -> str:
        return f"{self.base}/dims/{slug(role)}/{slug(level)}#"

    def member(self, role: str, level: str, member_id: str) -> URIRef:
        return URIRef(self.member_namespace(role, level) + slug(member_id))

    def observation(self, dataset: str, coords: tuple[str, ...]) -> URIRef:
        digest = hashlib.md5("\x1f".join((dataset,) + tuple(coords)).encode("utf-8")).hexdigest()
        return self.instances["o" + digest]

    def step_dataset(self, run_id: str, step: int) -> URIRef:
        return URIRef(f"{self.base}/datasets/{slug(run_id)}/step{step}")

    def step_observations(self, run_id: str, step: int) -> str:
        return f"{self.base}/instances/{slug(run_id)}/step{step}#"

    def temp_graph(self, run_id: str, step: int) -> URIRef:
        return URIRef(f"{self.base}/tmp/{slug(run_id)}/{step}")
