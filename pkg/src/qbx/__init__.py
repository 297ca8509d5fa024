"""Data cubes over QB4OLAP: cube model, OLAP algebra, and SPARQL compilation."""

__version__ = "0.1.0"
