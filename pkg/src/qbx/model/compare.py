"""Cell-by-cell cuboid comparison with a relative tolerance for decimals."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from .schema import Cuboid


@dataclass(frozen=True)
class CellDiff:
    coords: tuple
    left: tuple | None
    right: tuple | None

    def __str__(self) -> str:
        return f"{self.coords}: {self.left} vs {self.right}"


def values_close(a, b, rel_tol: Decimal | float = Decimal("1e-9")) -> bool:
    if isinstance(a, int) and isinstance(b, int):
        return a == b
    a, b = Decimal(str(a)), Decimal(str(b))
    if a == b:
        return True
    return abs(a - b) <= Decimal(str(rel_tol)) * max(abs(a), abs(b))


def diff_cuboids(left: Cuboid, right: Cuboid, rel_tol=Decimal("1e-9")) -> list[CellDiff]:
    """Differing cells in coordinate order; integers compare exactly."""
    out = []
    for key in sorted(set(left.cells) | set(right.cells)):
        a, b = left.cells.get(key), right.cells.get(key)
        if a is None or b is None or len(a) != len(b) or not all(values_close(x, y, rel_tol) for x, y in zip(a, b)):
            out.append(CellDiff(key, a, b))
    return out


def same_cuboid(left: Cuboid, right: Cuboid, rel_tol=Decimal("1e-9")) -> bool:
    return (left.levels == right.levels and left.schema.role_names == right.schema.role_names
            and left.schema.measure_names == right.schema.measure_names
            and not diff_cuboids(left, right, rel_tol))
