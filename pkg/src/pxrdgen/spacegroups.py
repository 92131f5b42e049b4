"""The 230 space groups as a bundled symbol/number table.

Short Hermann-Mauguin symbols in the underscore convention (P2_1/c,
I4_1/amd, ...). No symmetry detection or operator generation lives here;
the table only supports symbol <-> number lookups.
"""

from __future__ import annotations

import csv
from functools import lru_cache
from importlib import resources

from .exceptions import UnknownSpaceGroup


@lru_cache(maxsize=1)
def symbol_to_number() -> dict[str, int]:
    table = {}
    with resources.files("pxrdgen.data").joinpath("spacegroups.csv").open() as f:
        for row in csv.DictReader(f):
            table[row["symbol"]] = int(row["number"])
    if len(table) != 230:
        raise RuntimeError(f"space-group table corrupt: {len(table)} entries")
    return table


@lru_cache(maxsize=1)
def number_to_symbol() -> dict[int, str]:
    return {n: s for s, n in symbol_to_number().items()}


def lookup_number(symbol: str) -> int:
    try:
        return symbol_to_number()[symbol]
    except KeyError:
        raise UnknownSpaceGroup(f"unknown space-group symbol {symbol!r}") from None


def lookup_symbol(number: int) -> str:
    try:
        return number_to_symbol()[number]
    except KeyError:
        raise UnknownSpaceGroup(f"space-group number {number} outside 1..230") from None
