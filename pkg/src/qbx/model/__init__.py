"""Formal cube model: schemas, instances, cuboids, validation, lattice and oracle."""

from .jsonio import dumps, load, loads
from .lattice import CubeLatticeInfo, Order, adjacent, cuboid_order, enumerate_cuboids, lattice_info, levels_path
from .schema import (
    ALL,
    ALL_MEMBER,
    Attribute,
    Bundle,
    CubeSchema,
    Cuboid,
    DimensionInstance,
    DimensionSchema,
    Hierarchy,
    Level,
    Measure,
    Role,
)
from .validate import ValidationReport, validate_cube, validate_dimension, validate_instance, validate_schema

__all__ = [
    "ALL", "ALL_MEMBER", "Attribute", "Bundle", "CubeLatticeInfo", "CubeSchema", "Cuboid",
    "DimensionInstance", "DimensionSchema", "Hierarchy", "Level", "Measure", "Order", "Role",
    "ValidationReport", "adjacent", "cuboid_order", "dumps", "enumerate_cuboids", "lattice_info", "levels_path", "load", "loads",
    "validate_cube", "validate_dimension", "validate_instance", "validate_schema",
]
