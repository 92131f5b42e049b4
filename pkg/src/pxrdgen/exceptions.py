"""Exception types shared across the package."""


class PxrdgenError(Exception):
    """Base class for all package errors."""


# --- CIF parsing / structure construction ---

class CifError(PxrdgenError):
    """Base class for CIF parsing and writing errors."""


class MissingTag(CifError):
    """A required CIF tag is absent."""


class BadNumber(CifError):
    """A numeric CIF field could not be parsed as a decimal number."""


class UnknownElement(CifError):
    """An element symbol outside the supported 89-element set."""


class UnknownSpaceGroup(CifError):
    """A space-group symbol or number outside the 230-entry table, or an
    inconsistent symbol/number pair."""


class InvalidStructure(CifError):
    """A structure invariant is violated (non-positive lengths, degenerate
    cell, composition mismatch, ...)."""


class PartialOccupancy(CifError):
    """A site occupancy differs from 1.0."""


class UnsupportedElement(CifError):
    """An element that cannot be standardized (alias kept distinct from
    UnknownElement for the standardization step)."""


# --- tokenizer ---

class UnknownToken(PxrdgenError):
    """Text cannot be tokenized; carries the byte offset of the failure."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class IdOutOfRange(PxrdgenError):
    """A token id outside the vocabulary range."""


# --- PXRD simulation ---

class EmptyStructure(PxrdgenError):
    """Structure has no sites to diffract from."""


class NoReflectionsInRange(PxrdgenError):
    """No (hkl) reflection falls inside the accessible Q range."""


# --- packing ---

class EmptyCorpus(PxrdgenError):
    """An operation requires at least one corpus entry."""


# --- model / training ---

class DimensionMismatch(PxrdgenError):
    """An input vector has the wrong dimensionality."""


class ShapeMismatch(PxrdgenError):
    """Tensor shapes are inconsistent with the model configuration."""


class NonFiniteLoss(PxrdgenError):
    """Training loss became NaN or infinite."""


class ContextOverflow(PxrdgenError):
    """A prompt does not fit into the model context."""


# --- evaluation ---

class GridMismatch(PxrdgenError):
    """Two profiles do not share the same Q grid."""


class ZeroReference(PxrdgenError):
    """The reference profile has zero total intensity."""


class DegenerateCovariance(PxrdgenError):
    """Too few samples for the requested PCA rank."""


# --- CLI / config ---

class ConfigError(PxrdgenError):
    """Bad run configuration (unknown key, missing key, unparseable value)."""
