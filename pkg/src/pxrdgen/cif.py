"""Crystal structure model plus a parser/writer for a closed CIF subset.

The supported grammar covers exactly the 31 tags of the fixed vocabulary:
one ``data_`` block, scalar tags, and the atom-type / symmetry-equiv /
atom-site loops. ``write_cif`` emits a frozen canonical layout so that
equal structures serialize to identical bytes and every emitted document
is expressible in the token vocabulary.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from math import gcd
from functools import reduce

import numpy as np

from .elements import element_table, supported_symbols
from .exceptions import (
    BadNumber,
    CifError,
    InvalidStructure,
    MissingTag,
    PartialOccupancy,
    UnknownElement,
    UnknownSpaceGroup,
    UnsupportedElement,
)
from .spacegroups import lookup_number, lookup_symbol

FLOAT_DECIMALS = 4

_NUMBER_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
# site symbols may carry oxidation decorations such as Fe2+, O2-, Na+
_SYMBOL_RE = re.compile(r"^([A-Z][a-z]?)(\d*[+-]?)$")


def _parse_float(text: str, context: str) -> float:
    if not _NUMBER_RE.match(text):
        raise BadNumber(f"cannot parse {text!r} as a number ({context})")
    return float(text)


def _parse_int(text: str, context: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise BadNumber(f"cannot parse {text!r} as an integer ({context})") from None


@dataclass(frozen=True)
class Lattice:
    """Unit-cell parameters: lengths in Å, angles in degrees."""

    a: float
    b: float
    c: float
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("a", "b", "c"):
            if not (getattr(self, name) > 0 and math.isfinite(getattr(self, name))):
                raise InvalidStructure(f"cell length {name} must be positive, got {getattr(self, name)}")
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not (0.0 < v < 180.0):
                raise InvalidStructure(f"cell angle {name} must lie in (0, 180), got {v}")
        if not (self.volume > 0 and math.isfinite(self.volume)):
            raise InvalidStructure("cell parameters give non-positive volume")

    @property
    def volume(self) -> float:
        ca, cb, cg = (math.cos(math.radians(x)) for x in (self.alpha, self.beta, self.gamma))
        arg = 1.0 - ca * ca - cb * cb - cg * cg + 2.0 * ca * cb * cg
        if arg <= 0:
            raise InvalidStructure("degenerate cell: angles admit no 3D volume")
        return self.a * self.b * self.c * math.sqrt(arg)

    @property
    def matrix(self) -> np.ndarray:
        """Row-vector basis: a along x, b in the xy plane."""
        ca, cb, cg = (math.cos(math.radians(x)) for x in (self.alpha, self.beta, self.gamma))
        sg = math.sin(math.radians(self.gamma))
        cx = self.c * cb
        cy = self.c * (ca - cb * cg) / sg
        cz2 = self.c * self.c - cx * cx - cy * cy
        if cz2 <= 0:
            raise InvalidStructure("degenerate cell: basis not three-dimensional")
        return np.array(
            [
                [self.a, 0.0, 0.0],
                [self.b * cg, self.b * sg, 0.0],
                [cx, cy, math.sqrt(cz2)],
            ]
        )

    @property
    def metric_tensor(self) -> np.ndarray:
        m = self.matrix
        return m @ m.T

    @property
    def reciprocal_matrix(self) -> np.ndarray:
        """Rows are the reciprocal basis vectors (includes the 2π factor)."""
        return 2.0 * math.pi * np.linalg.inv(self.matrix).T

    def parameters(self) -> tuple[float, float, float, float, float, float]:
        return (self.a, self.b, self.c, self.alpha, self.beta, self.gamma)


@dataclass(frozen=True)
class Site:
    """One atomic site: element symbol, fractional coordinates, occupancy."""

    element: str
    frac_x: float
    frac_y: float
    frac_z: float
    occupancy: float = 1.0
    multiplicity: int = 1

    def __post_init__(self):
        if self.element not in supported_symbols():
            raise UnknownElement(f"unsupported element {self.element!r}")
        if self.occupancy != 1.0:
            raise PartialOccupancy(f"site occupancy must be 1.0, got {self.occupancy}")
        if self.multiplicity < 1:
            raise InvalidStructure(f"multiplicity must be positive, got {self.multiplicity}")

    @property
    def frac(self) -> tuple[float, float, float]:
        return (self.frac_x, self.frac_y, self.frac_z)


@dataclass(frozen=True)
class CrystalStructure:
    """Lattice plus an ordered list of sites and symmetry metadata.

    The site list is taken to be the full unit-cell contents; multiplicity
    is bookkeeping for formula accounting, not an instruction to expand
    sites through symmetry operators (operator generation is out of scope).
    """

    lattice: Lattice
    sites: tuple[Site, ...]
    spacegroup_symbol: str
    spacegroup_number: int
    formula_units_z: int = 1

    def __post_init__(self):
        if lookup_number(self.spacegroup_symbol) != self.spacegroup_number:
            raise UnknownSpaceGroup(
                f"symbol {self.spacegroup_symbol!r} is space group "
                f"{lookup_number(self.spacegroup_symbol)}, not {self.spacegroup_number}"
            )
        if self.formula_units_z < 1:
            raise InvalidStructure(f"formula_units_z must be positive, got {self.formula_units_z}")
        if not isinstance(self.sites, tuple):
            object.__setattr__(self, "sites", tuple(self.sites))

    @property
    def composition(self) -> dict[str, int]:
        """Element -> count over the cell, multiplicity-weighted, Z-ascending."""
        counts: dict[str, int] = {}
        for s in self.sites:
            counts[s.element] = counts.get(s.element, 0) + s.multiplicity
        table = element_table()
        return dict(sorted(counts.items(), key=lambda kv: table[kv[0]].atomic_number))

    @property
    def num_sites(self) -> int:
        return len(self.sites)


def composition_string(composition: dict[str, int], sep: str = "", always_count: bool = True) -> str:
    """Render a composition Z-ascending, e.g. {'O': 4, 'Ti': 2} -> 'O4Ti2'."""
    table = element_table()
    parts = []
    for el, n in sorted(composition.items(), key=lambda kv: table[kv[0]].atomic_number):
        parts.append(f"{el}{n}" if (always_count or n > 1) else el)
    return sep.join(parts)


def reduced_composition(composition: dict[str, int]) -> dict[str, int]:
    g = reduce(gcd, composition.values())
    return {el: n // g for el, n in composition.items()}


def parse_composition_string(text: str) -> dict[str, int]:
    """Parse 'O4 Ti2' or 'O4Ti2' style formulas (count 1 may be omitted)."""
    comp: dict[str, int] = {}
    for m in re.finditer(r"([A-Z][a-z]?)(\d*)", text.replace(" ", "")):
        el, n = m.group(1), m.group(2)
        if el not in supported_symbols():
            raise UnknownElement(f"unsupported element {el!r} in formula {text!r}")
        comp[el] = comp.get(el, 0) + (int(n) if n else 1)
    if not comp:
        raise BadNumber(f"cannot parse formula {text!r}")
    return comp


def crystal_system(lattice: Lattice, tol: float = 1e-3) -> str:
    """Geometric crystal system of the cell shape (metric, not symmetry)."""
    a, b, c, al, be, ga = lattice.parameters()
    eq = lambda u, v: abs(u - v) <= tol * max(abs(u), abs(v), 1.0)
    right = [eq(x, 90.0) for x in (al, be, ga)]
    if all(right):
        if eq(a, b) and eq(b, c):
            return "cubic"
        if eq(a, b) or eq(b, c) or eq(a, c):
            return "tetragonal"
        return "orthorhombic"
    if eq(a, b) and eq(al, 90.0) and eq(be, 90.0) and eq(ga, 120.0):
        return "hexagonal"
    if eq(a, b) and eq(b, c) and eq(al, be) and eq(be, ga):
        return "rhombohedral"
    if sum(right) == 2:
        return "monoclinic"
    return "triclinic"


# ---------------------------------------------------------------------------
# Parsing

KNOWN_TAGS = frozenset(
    {
        "data_", "loop_",
        "_symmetry_space_group_name_H-M", "_symmetry_Int_Tables_number",
        "_cell_length_a", "_cell_length_b", "_cell_length_c",
        "_cell_angle_alpha", "_cell_angle_beta", "_cell_angle_gamma",
        "_cell_volume",
        "_atom_site_fract_x", "_atom_site_fract_y", "_atom_site_fract_z",
        "_atom_site_occupancy",
        "_symmetry_equiv_pos_as_xyz",
        "_chemical_formula_structural", "_cell_formula_units_Z",
        "_chemical_name_systematic", "_chemical_formula_sum",
        "_atom_site_symmetry_multiplicity", "_atom_site_attached_hydrogens",
        "_atom_site_label", "_atom_site_type_symbol",
        "_atom_site_B_iso_or_equiv",
        "_symmetry_equiv_pos_site_id",
        "_atom_type_symbol", "_atom_type_electronegativity",
        "_atom_type_radius", "_atom_type_ionic_radius",
        "_atom_type_oxidation_number",
    }
)


def _split_fields(line: str) -> list[str]:
    """Whitespace-split a CIF data line, honouring single-quoted fields."""
    fields = []
    i, n = 0, len(line)
    while i < n:
        if line[i].isspace():
            i += 1
        elif line[i] == "'":
            j = line.find("'", i + 1)
            if j == -1:
                raise CifError(f"unterminated quote in line {line!r}")
            fields.append(line[i + 1 : j])
            i = j + 1
        else:
            j = i
            while j < n and not line[j].isspace():
                j += 1
            fields.append(line[i:j])
            i = j
    return fields


def strip_oxidation(symbol: str) -> str:
    """Drop oxidation-state decorations: 'Fe2+' -> 'Fe', 'O2-' -> 'O'."""
    m = _SYMBOL_RE.match(symbol)
    if not m:
        raise UnknownElement(f"cannot read element symbol from {symbol!r}")
    return m.group(1)


def parse_cif(text: str) -> CrystalStructure:
    """Parse a single-block CIF document into a CrystalStructure.

    Only the 31 supported tags are accepted; anything else is rejected.
    Derived scalars present in the file (volume, formulas, per-element
    properties) are validated as numbers where numeric but recomputed
    rather than trusted. Symmetry operator strings are read and discarded.
    """
    scalars: dict[str, str] = {}
    loops: list[tuple[list[str], list[list[str]]]] = []
    data_blocks = 0

    lines = text.split("\n")
    i = 0
    while i < len(lines):
        line = lines[i].strip()
        i += 1
        if not line or line.startswith("#"):
            continue
        if line.startswith("data_"):
            data_blocks += 1
            continue
        if line == "loop_":
            columns: list[str] = []
            while i < len(lines) and lines[i].strip().startswith("_"):
                tag = lines[i].strip()
                if tag not in KNOWN_TAGS:
                    raise CifError(f"unknown CIF tag {tag!r}")
                columns.append(tag)
                i += 1
            if not columns:
                raise CifError("loop_ with no column tags")
            rows: list[list[str]] = []
            while i < len(lines):
                row_line = lines[i].strip()
                if not row_line or row_line.startswith(("_", "loop_", "data_", "#")):
                    break
                fields = _split_fields(row_line)
                if len(fields) != len(columns):
                    raise CifError(
                        f"loop row has {len(fields)} fields for {len(columns)} columns: {row_line!r}"
                    )
                rows.append(fields)
                i += 1
            loops.append((columns, rows))
            continue
        if line.startswith("_"):
            fields = _split_fields(line)
            tag = fields[0]
            if tag not in KNOWN_TAGS:
                raise CifError(f"unknown CIF tag {tag!r}")
            if len(fields) < 2:
                raise MissingTag(f"tag {tag} has no value")
            scalars[tag] = line[len(tag):].strip().strip("'")
            continue
        raise CifError(f"unparseable line {line!r}")

    if data_blocks != 1:
        raise CifError(f"expected exactly one data_ block, found {data_blocks}")

    def need(tag: str) -> str:
        if tag not in scalars:
            raise MissingTag(f"required tag {tag} is absent")
        return scalars[tag]

    lattice = Lattice(
        a=_parse_float(need("_cell_length_a"), "_cell_length_a"),
        b=_parse_float(need("_cell_length_b"), "_cell_length_b"),
        c=_parse_float(need("_cell_length_c"), "_cell_length_c"),
        alpha=_parse_float(need("_cell_angle_alpha"), "_cell_angle_alpha"),
        beta=_parse_float(need("_cell_angle_beta"), "_cell_angle_beta"),
        gamma=_parse_float(need("_cell_angle_gamma"), "_cell_angle_gamma"),
    )
    if "_cell_volume" in scalars:
        _parse_float(scalars["_cell_volume"], "_cell_volume")  # must be numeric; recomputed

    symbol = scalars.get("_symmetry_space_group_name_H-M")
    number = scalars.get("_symmetry_Int_Tables_number")
    if symbol is None and number is None:
        raise MissingTag("no space-group symbol or number present")
    if number is not None:
        sg_number = _parse_int(number, "_symmetry_Int_Tables_number")
        if not 1 <= sg_number <= 230:
            raise UnknownSpaceGroup(f"space-group number {sg_number} outside 1..230")
    if symbol is not None:
        sg_symbol = symbol.replace(" ", "")
        sg_from_symbol = lookup_number(sg_symbol)
        if number is None:
            sg_number = sg_from_symbol
        elif sg_from_symbol != sg_number:
            raise UnknownSpaceGroup(
                f"symbol {sg_symbol!r} (group {sg_from_symbol}) conflicts with declared number {sg_number}"
            )
    else:
        sg_symbol = lookup_symbol(sg_number)

    site_loop = None
    for columns, rows in loops:
        if "_atom_site_fract_x" in columns:
            site_loop = (columns, rows)
    if site_loop is None:
        raise MissingTag("no atom-site loop present")
    columns, rows = site_loop
    for required in ("_atom_site_type_symbol", "_atom_site_fract_x", "_atom_site_fract_y", "_atom_site_fract_z"):
        if required not in columns:
            raise MissingTag(f"atom-site loop lacks {required}")
    if not rows:
        raise MissingTag("atom-site loop has no rows")

    col = {tag: idx for idx, tag in enumerate(columns)}
    sites = []
    for row in rows:
        element = strip_oxidation(row[col["_atom_site_type_symbol"]])
        if element not in supported_symbols():
            raise UnknownElement(f"unsupported element {element!r}")
        occupancy = 1.0
        if "_atom_site_occupancy" in col:
            occupancy = _parse_float(row[col["_atom_site_occupancy"]], "_atom_site_occupancy")
        multiplicity = 1
        if "_atom_site_symmetry_multiplicity" in col:
            multiplicity = _parse_int(row[col["_atom_site_symmetry_multiplicity"]], "multiplicity")
        sites.append(
            Site(
                element=element,
                frac_x=_parse_float(row[col["_atom_site_fract_x"]], "_atom_site_fract_x"),
                frac_y=_parse_float(row[col["_atom_site_fract_y"]], "_atom_site_fract_y"),
                frac_z=_parse_float(row[col["_atom_site_fract_z"]], "_atom_site_fract_z"),
                occupancy=occupancy,
                multiplicity=multiplicity,
            )
        )

    z = 1
    if "_cell_formula_units_Z" in scalars:
        z = _parse_int(scalars["_cell_formula_units_Z"], "_cell_formula_units_Z")
    else:
        counts = {}
        for s in sites:
            counts[s.element] = counts.get(s.element, 0) + s.multiplicity
        z = reduce(gcd, counts.values())

    return CrystalStructure(
        lattice=lattice,
        sites=tuple(sites),
        spacegroup_symbol=sg_symbol,
        spacegroup_number=sg_number,
        formula_units_z=z,
    )


# ---------------------------------------------------------------------------
# Standardization

def _round4(x: float) -> float:
    return round(x, FLOAT_DECIMALS)


def _wrap_frac(x: float) -> float:
    w = x % 1.0
    w = _round4(w)
    return 0.0 if w >= 1.0 else w


def standardize(s: CrystalStructure) -> CrystalStructure:
    """Bring a structure to canonical form.

    Fractional coordinates are wrapped into [0, 1) and all floats rounded
    to 4 decimal places; sites are sorted by (atomic number, coordinates);
    the formula-unit count is recomputed from the composition gcd. The
    result is a fixed point of this function.
    """
    table = element_table()
    for site in s.sites:
        if site.element not in table:
            raise UnsupportedElement(f"unsupported element {site.element!r}")
        if site.occupancy != 1.0:
            raise PartialOccupancy(f"occupancy {site.occupancy} != 1.0")

    lattice = Lattice(*(_round4(v) for v in s.lattice.parameters()))
    sites = [
        replace(
            site,
            frac_x=_wrap_frac(site.frac_x),
            frac_y=_wrap_frac(site.frac_y),
            frac_z=_wrap_frac(site.frac_z),
        )
        for site in s.sites
    ]
    sites.sort(key=lambda t: (table[t.element].atomic_number, t.frac_x, t.frac_y, t.frac_z))

    counts: dict[str, int] = {}
    for site in sites:
        counts[site.element] = counts.get(site.element, 0) + site.multiplicity
    z = reduce(gcd, counts.values())

    return CrystalStructure(
        lattice=lattice,
        sites=tuple(sites),
        spacegroup_symbol=s.spacegroup_symbol,
        spacegroup_number=s.spacegroup_number,
        formula_units_z=z,
    )


# ---------------------------------------------------------------------------
# Writing

def _fmt(x: float) -> str:
    return f"{x:.{FLOAT_DECIMALS}f}"


def write_cif(s: CrystalStructure) -> str:
    """Serialize a standardized structure to canonical CIF text.

    Tag order is frozen; floats carry exactly 4 decimal places; output is
    ASCII with LF line endings and ends with a blank line, which doubles
    as the end-of-document marker in the token stream. Per-element
    properties from the bundled table are attached in the atom-type loop.
    """
    table = element_table()
    comp = s.composition
    reduced = reduced_composition(comp)
    full_header = composition_string(comp)
    full_spaced = composition_string(comp, sep=" ")
    reduced_str = composition_string(reduced, always_count=False)

    out = [f"data_{full_header}"]
    out.append("loop_")
    out += [
        "_atom_type_symbol",
        "_atom_type_electronegativity",
        "_atom_type_radius",
        "_atom_type_ionic_radius",
        "_atom_type_oxidation_number",
    ]
    for el in comp:
        e = table[el]
        out.append(
            f"{el} {_fmt(e.electronegativity)} {_fmt(e.atomic_radius)} "
            f"{_fmt(e.ionic_radius)} {_fmt(0.0)}"
        )
    out.append(f"_chemical_name_systematic {reduced_str}")
    out.append(f"_chemical_formula_structural {reduced_str}")
    out.append(f"_chemical_formula_sum '{full_spaced}'")
    out.append(f"_cell_formula_units_Z {s.formula_units_z}")
    out.append(f"_symmetry_space_group_name_H-M {s.spacegroup_symbol}")
    out.append(f"_symmetry_Int_Tables_number {s.spacegroup_number}")
    out.append(f"_cell_length_a {_fmt(s.lattice.a)}")
    out.append(f"_cell_length_b {_fmt(s.lattice.b)}")
    out.append(f"_cell_length_c {_fmt(s.lattice.c)}")
    out.append(f"_cell_angle_alpha {_fmt(s.lattice.alpha)}")
    out.append(f"_cell_angle_beta {_fmt(s.lattice.beta)}")
    out.append(f"_cell_angle_gamma {_fmt(s.lattice.gamma)}")
    out.append(f"_cell_volume {_fmt(s.lattice.volume)}")
    out.append("loop_")
    out.append("_symmetry_equiv_pos_site_id")
    out.append("_symmetry_equiv_pos_as_xyz")
    out.append("1 'x, y, z'")
    out.append("loop_")
    out += [
        "_atom_site_type_symbol",
        "_atom_site_label",
        "_atom_site_symmetry_multiplicity",
        "_atom_site_attached_hydrogens",
        "_atom_site_B_iso_or_equiv",
        "_atom_site_fract_x",
        "_atom_site_fract_y",
        "_atom_site_fract_z",
        "_atom_site_occupancy",
    ]
    for idx, site in enumerate(s.sites):
        out.append(
            f"{site.element} {site.element}{idx} {site.multiplicity} 0 {_fmt(0.0)} "
            f"{_fmt(site.frac_x)} {_fmt(site.frac_y)} {_fmt(site.frac_z)} {_fmt(site.occupancy)}"
        )
    out.append("")
    return "\n".join(out) + "\n"
