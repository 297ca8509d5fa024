"""QB4OLAP mapping, Turtle I/O and metadata catalog."""

from .catalog import Qb4olapCatalog
from .mapping import export_turtle, graph_to_model, import_turtle, model_to_graph
from .namespaces import QB, QB4O, QBX, SKOS, IriScheme
from .turtle import parse_turtle, serialize_turtle

__all__ = [
    "QB", "QB4O", "QBX", "SKOS", "IriScheme", "Qb4olapCatalog", "export_turtle", "graph_to_model", "import_turtle",
    "model_to_graph", "parse_turtle", "serialize_turtle",
]
