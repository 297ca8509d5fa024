"""Running compiled queries: HTTP client, in-process engine, test server and decoding."""

from .client import EndpointConfig, SparqlClient, execute_construct, execute_select, upload_graph
from .decode import results_to_cuboid
from .local import LocalEngine
from .runner import RunResult, run_compiled
from .server import ServerThread, make_server

__all__ = [
    "EndpointConfig", "LocalEngine", "RunResult", "ServerThread", "SparqlClient", "execute_construct",
    "execute_select", "make_server", "results_to_cuboid", "run_compiled", "upload_graph",
]
