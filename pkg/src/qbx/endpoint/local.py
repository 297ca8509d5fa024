"""In-process SPARQL 1.1 engine backed by an rdflib Dataset.

It offers the same operations as the HTTP client, so the runner and the
tests can execute compiled plans without a server.
"""

from __future__ import annotations

import threading

import rdflib.plugins.sparql as rdflib_sparql
from rdflib import Dataset, Graph, URIRef

from ..errors import EndpointError

# FROM <g> must select a named graph of the dataset instead of fetching g over HTTP
rdflib_sparql.SPARQL_LOAD_GRAPHS = False


class LocalEngine:
    def __init__(self):
        self.dataset = Dataset()
        self._lock = threading.RLock()

    def _query(self, text: str):
        try:
            return self.dataset.query(text)
        except Exception as exc:  # pyparsing and evaluation errors have no common base
            raise EndpointError("E_HTTP", f"query failed: {exc}", status=400) from None

    def execute_construct(self, text: str) -> Graph:
        with self._lock:
            res = self._query(text)
            if res.type not in ("CONSTRUCT", "DESCRIBE"):
                raise EndpointError("E_PARSE", f"expected a graph result, got {res.type}")
            out = Graph(bind_namespaces="none")
            out += res.graph
            return out

    def execute_select(self, text: str) -> list[dict]:
        with self._lock:
            res = self._query(text)
            if res.type != "SELECT":
                raise EndpointError("E_PARSE", f"expected a SELECT result, got {res.type}")
            names = [str(v) for v in res.vars]
            return [{n: row[i] for i, n in enumerate(names) if row[i] is not None} for row in res]

    def upload_graph(self, g: Graph, graph_iri) -> None:
        with self._lock:
            target = self.dataset.graph(URIRef(str(graph_iri)))
            target.remove((None, None, None))
            target += g

    def get_graph(self, graph_iri) -> Graph:
        with self._lock:
            out = Graph(bind_namespaces="none")
            out += self.dataset.graph(URIRef(str(graph_iri)))
            return out

    def delete_graph(self, graph_iri) -> None:
        with self._lock:
            self.dataset.remove_graph(URIRef(str(graph_iri)))

    def graph_iris(self) -> list[str]:
        with self._lock:
            return sorted(str(c.identifier) for c in self.dataset.graphs() if len(c))
