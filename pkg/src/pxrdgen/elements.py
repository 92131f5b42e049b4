"""Element property table bundled as a versioned CSV asset.

Columns: symbol, atomic_number, electronegativity (Pauling, 0 where
undefined), atomic_radius (empirical, Å), ionic_radius (common oxidation
state, Å, 0 where undefined). Exactly the 89 supported elements.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources


@dataclass(frozen=True)
class ElementData:
    symbol: str
    atomic_number: int
    electronegativity: float
    atomic_radius: float
    ionic_radius: float


@lru_cache(maxsize=1)
def element_table() -> dict[str, ElementData]:
    """Load the bundled element table, keyed by symbol."""
    table = {}
    with resources.files("pxrdgen.data").joinpath("elements.csv").open() as f:
        for row in csv.DictReader(f):
            e = ElementData(
                symbol=row["symbol"],
                atomic_number=int(row["atomic_number"]),
                electronegativity=float(row["electronegativity"]),
                atomic_radius=float(row["atomic_radius"]),
                ionic_radius=float(row["ionic_radius"]),
            )
            table[e.symbol] = e
    if len(table) != 89:
        raise RuntimeError(f"element table corrupt: {len(table)} entries")
    return table


@lru_cache(maxsize=1)
def supported_symbols() -> frozenset[str]:
    return frozenset(element_table())


def atomic_number(symbol: str) -> int:
    return element_table()[symbol].atomic_number


@lru_cache(maxsize=1)
def cromer_mann_table() -> dict[str, tuple[float, ...]]:
    """4-Gaussian form-factor coefficients (a1..a4, b1..b4, c) per element."""
    table = {}
    with resources.files("pxrdgen.data").joinpath("cromer_mann.csv").open() as f:
        for row in csv.DictReader(f):
            table[row["symbol"]] = tuple(
                float(row[k]) for k in ("a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4", "c")
            )
    return table
