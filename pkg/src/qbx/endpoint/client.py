"""SPARQL 1.1 Protocol and Graph Store Protocol client."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import urlparse

import requests
import urllib3.exceptions
from rdflib import BNode, Graph, Literal, URIRef
from requests.adapters import HTTPAdapter
from urllib3.util.retry import Retry

from ..errors import EndpointError, MappingError
from ..qb4olap.turtle import parse_turtle
from .decode import results_to_cuboid

# queries are read-only and PUT/DELETE replace state, so every request we make is safe to repeat
_RETRY = Retry(total=3, connect=3, read=3, status=3, backoff_factor=0.1,
               status_forcelist=(502, 503, 504), allowed_methods=frozenset({"GET", "PUT", "DELETE", "POST"}),
               raise_on_status=False)


def _well_formed(url: str) -> bool:
    u = urlparse(url)
    return u.scheme in ("http", "https") and bool(u.netloc)


@dataclass(frozen=True)
class EndpointConfig:
    query_url: str
    update_url: str | None = None
    graph_store_url: str | None = None
    timeout: float = 30.0
    default_graphs: tuple[str, ...] = field(default=())

    def __post_init__(self):
        for url in (self.query_url, self.update_url, self.graph_store_url):
            if url is not None and not _well_formed(url):
                raise EndpointError("E_CONFIG", f"not an http(s) URL: {url!r}")
        if self.timeout <= 0:
            raise EndpointError("E_CONFIG", "timeout must be positive")

    @classmethod
    def from_json(cls, obj: dict) -> "EndpointConfig":
        return cls(obj["queryUrl"], obj.get("updateUrl"), obj.get("graphStoreUrl"),
                   float(obj.get("timeout", 30.0)), tuple(obj.get("defaultGraphs", ())))

    @classmethod
    def parse(cls, source: str) -> "EndpointConfig":
        """A query URL (Graph Store URL derived as ``{server}/store``) or a JSON config file."""
        if not _well_formed(source):
            try:
                return cls.from_json(json.loads(Path(source).read_text(encoding="utf-8")))
            except OSError as exc:
                raise EndpointError("E_CONFIG", f"cannot read endpoint config {source}: {exc}") from None
            except (KeyError, ValueError) as exc:
                raise EndpointError("E_CONFIG", f"bad endpoint config {source}: {exc}") from None
        u = urlparse(source)
        return cls(source, graph_store_url=f"{u.scheme}://{u.netloc}/store")


class SparqlClient:
    """HTTP client; shareable across threads (requests' pool is synchronised)."""

    def __init__(self, cfg: EndpointConfig, retries: Retry = _RETRY):
        self.cfg = cfg
        self.session = requests.Session()
        adapter = HTTPAdapter(max_retries=retries)
        self.session.mount("http://", adapter)
        self.session.mount("https://", adapter)

    def _send(self, method: str, url: str, **kw) -> requests.Response:
        try:
            resp = self.session.request(method, url, timeout=self.cfg.timeout, **kw)
        except requests.Timeout:
            raise EndpointError("E_TIMEOUT", f"{method} {url} timed out after {self.cfg.timeout}s") from None
        except requests.RequestException as exc:
            # once retries run out a read timeout surfaces as a ConnectionError wrapping MaxRetryError
            if isinstance(getattr(exc.args[0] if exc.args else None, "reason", None), urllib3.exceptions.TimeoutError):
                raise EndpointError("E_TIMEOUT", f"{method} {url} timed out after {self.cfg.timeout}s") from None
            raise EndpointError("E_HTTP", f"{method} {url} failed: {exc}") from None
        if resp.status_code >= 400:
            raise EndpointError("E_HTTP", f"{method} {url} returned {resp.status_code}: {resp.text[:500]}",
                                status=resp.status_code)
        return resp

    def _query(self, text: str, accept: str) -> requests.Response:
        params = [("default-graph-uri", g) for g in self.cfg.default_graphs]
        return self._send("POST", self.cfg.query_url, params=params, data=text.encode("utf-8"),
                          headers={"Content-Type": "application/sparql-query; charset=utf-8", "Accept": accept})

    def execute_construct(self, text: str) -> Graph:
        resp = self._query(text, "text/turtle")
        try:
            return parse_turtle(resp.content.decode("utf-8"))
        except (MappingError, UnicodeDecodeError) as exc:
            raise EndpointError("E_PARSE", f"endpoint returned malformed Turtle: {exc}") from None

    def execute_select(self, text: str) -> list[dict]:
        resp = self._query(text, "application/sparql-results+json")
        try:
            return _parse_json_results(resp.json())
        except ValueError as exc:
            raise EndpointError("E_PARSE", f"endpoint returned malformed JSON results: {exc}") from None

    def _store_url(self) -> str:
        if not self.cfg.graph_store_url:
            raise EndpointError("E_NO_GSP", "no Graph Store URL configured")
        return self.cfg.graph_store_url

    def upload_graph(self, g: Graph, graph_iri) -> None:
        # N-Triples is a subset of Turtle and much cheaper to write
        body = g.serialize(format="nt", encoding="utf-8")
        self._send("PUT", self._store_url(), params={"graph": str(graph_iri)}, data=body,
                   headers={"Content-Type": "text/turtle; charset=utf-8"})

    def get_graph(self, graph_iri) -> Graph:
        resp = self._send("GET", self._store_url(), params={"graph": str(graph_iri)},
                          headers={"Accept": "text/turtle"})
        try:
            return parse_turtle(resp.content.decode("utf-8"))
        except (MappingError, UnicodeDecodeError) as exc:
            raise EndpointError("E_PARSE", f"endpoint returned malformed Turtle: {exc}") from None

    def delete_graph(self, graph_iri) -> None:
        self._send("DELETE", self._store_url(), params={"graph": str(graph_iri)})


def _parse_json_results(obj: dict) -> list[dict]:
    def term(b: dict):
        kind = b["type"]
        if kind == "uri":
            return URIRef(b["value"])
        if kind == "bnode":
            return BNode(b["value"])
        dt = b.get("datatype")
        return Literal(b["value"], lang=b.get("xml:lang"), datatype=URIRef(dt) if dt else None)

    try:
        return [{k: term(v) for k, v in row.items()} for row in obj["results"]["bindings"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(str(exc)) from None


def execute_construct(cfg: EndpointConfig, text: str) -> Graph:
    return SparqlClient(cfg).execute_construct(text)


def execute_select(cfg: EndpointConfig, text: str) -> list[dict]:
    return SparqlClient(cfg).execute_select(text)


def upload_graph(cfg: EndpointConfig, g: Graph, graph_iri) -> None:
    SparqlClient(cfg).upload_graph(g, graph_iri)


__all__ = ["EndpointConfig", "SparqlClient", "execute_construct", "execute_select", "results_to_cuboid",
           "upload_graph"]
