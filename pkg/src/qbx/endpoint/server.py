"""A small SPARQL 1.1 Protocol + Graph Store Protocol server over ``LocalEngine``.

Routes: ``/sparql`` (GET ``?query=`` or POST ``application/sparql-query`` or
form-encoded) and ``/store?graph=IRI`` (GET, PUT, DELETE).  Meant for tests
and local runs, not for production use.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from ..errors import QbxError
from ..qb4olap.turtle import parse_turtle
from .local import LocalEngine


def _json_results(res) -> bytes:
    if res.type == "ASK":
        return json.dumps({"head": {}, "boolean": bool(res.askAnswer)}).encode("utf-8")
    return res.serialize(format="json")


class _Handler(BaseHTTPRequestHandler):
    engine: LocalEngine  # set on the subclass built by make_server
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # keep test output quiet
        pass

    def _reply(self, status: int, body: bytes = b"", ctype: str = "text/plain; charset=utf-8") -> None:
        self.send_response(status)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _body(self) -> bytes:
        n = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(n) if n else b""

    def _params(self) -> tuple[str, dict]:
        u = urlparse(self.path)
        return u.path, parse_qs(u.query)

    def _run_query(self, text: str) -> None:
        try:
            with self.engine._lock:
                res = self.engine.dataset.query(text)
                if res.type in ("CONSTRUCT", "DESCRIBE"):
                    body = res.graph.serialize(format="turtle", encoding="utf-8")
                    ctype = "text/turtle; charset=utf-8"
                else:
                    body = _json_results(res)
                    ctype = "application/sparql-results+json"
        except Exception as exc:  # rdflib parse and evaluation errors
            self._reply(400, f"query failed: {exc}".encode("utf-8"))
            return
        self._reply(200, body, ctype)

    def do_GET(self):
        path, params = self._params()
        if path == "/sparql" and "query" in params:
            return self._run_query(params["query"][0])
        if path == "/store" and "graph" in params:
            g = self.engine.get_graph(params["graph"][0])
            return self._reply(200 if len(g) else 404, g.serialize(format="turtle", encoding="utf-8"),
                               "text/turtle; charset=utf-8")
        self._reply(404, b"not found")

    def do_POST(self):
        path, params = self._params()
        if path != "/sparql":
            return self._reply(404, b"not found")
        body = self._body().decode("utf-8")
        ctype = (self.headers.get("Content-Type") or "").split(";")[0].strip()
        if ctype == "application/sparql-query":
            return self._run_query(body)
        if ctype == "application/x-www-form-urlencoded":
            form = parse_qs(body)
            if "query" in form:
                return self._run_query(form["query"][0])
        self._reply(415, b"expected application/sparql-query")

    def do_PUT(self):
        path, params = self._params()
        if path != "/store" or "graph" not in params:
            return self._reply(404, b"not found")
        try:
            g = parse_turtle(self._body().decode("utf-8"))
        except (QbxError, UnicodeDecodeError) as exc:
            return self._reply(400, str(exc).encode("utf-8"))
        self.engine.upload_graph(g, params["graph"][0])
        self._reply(204)

    def do_DELETE(self):
        path, params = self._params()
        if path != "/store" or "graph" not in params:
            return self._reply(404, b"not found")
        self.engine.delete_graph(params["graph"][0])
        self._reply(204)


def make_server(host: str = "127.0.0.1", port: int = 0, engine: LocalEngine | None = None) -> ThreadingHTTPServer:
    handler = type("Handler", (_Handler,), {"engine": engine or LocalEngine()})
    server = ThreadingHTTPServer((host, port), handler)
    server.daemon_threads = True
    return server


class ServerThread:
    """Run a server in a background thread; usable as a context manager."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0, engine: LocalEngine | None = None):
        self.server = make_server(host, port, engine)
        self.engine: LocalEngine = self.server.RequestHandlerClass.engine
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    @property
    def url(self) -> str:
        host, port = self.server.server_address[:2]
        return f"http://{host}:{port}/sparql"

    def __enter__(self) -> "ServerThread":
        self.thread.start()
        return self

    def __exit__(self, *exc) -> None:
        self.server.shutdown()
        self.server.server_close()
