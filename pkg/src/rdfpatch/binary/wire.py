"""Wire constants, stream options and IRI splitting."""
from __future__ import annotations

from dataclasses import dataclass

MAGIC = b"JPT1"
VERSION = 1

ROW_OPTIONS = 1
ROW_NAME_ENTRY = 2
ROW_PREFIX_ENTRY = 3
ROW_DATATYPE_ENTRY = 4
ROW_TX_BEGIN = 5
ROW_TX_COMMIT = 6
ROW_TX_ABORT = 7
ROW_ADD = 8
ROW_DELETE = 9
ROW_PREFIX_ADD = 10
ROW_PREFIX_DELETE = 11
ROW_HEADER = 12

KIND_REPEAT = 0
KIND_IRI = 1
KIND_BNODE = 2
KIND_SIMPLE = 3
KIND_LANG = 4
KIND_TYPED = 5
KIND_QUOTED = 6
KIND_DEFAULT_GRAPH = 7

FLAG_QUADS = 1
FLAG_RDF_STAR = 2
FLAG_GENERALIZED = 4
ALL_FLAGS = FLAG_QUADS | FLAG_RDF_STAR | FLAG_GENERALIZED

MAX_ENTRY_BYTES = 1 << 20
MAX_INLINE_BYTES = 1 << 28
MIN_NAME_CAPACITY = 8
# Keeps a hostile options row from making the decoder allocate huge tables.
MAX_TABLE_CAPACITY = 1 << 20


@dataclass(frozen=True)
class StreamOptions:
    name_table_capacity: int = 4000
    prefix_table_capacity: int = 1024
    datatype_table_capacity: int = 32
    frame_row_limit: int = 512
    allows_quads: bool = True
    allows_rdf_star: bool = True
    allows_generalized: bool = True

    def __post_init__(self) -> None:
        if not MIN_NAME_CAPACITY <= self.name_table_capacity <= MAX_TABLE_CAPACITY:
            raise ValueError(f"name table capacity must be in "
                             f"[{MIN_NAME_CAPACITY}, {MAX_TABLE_CAPACITY}], got {self.name_table_capacity}")
        for label, cap in (("prefix", self.prefix_table_capacity),
                           ("datatype", self.datatype_table_capacity)):
            if not 0 <= cap <= MAX_TABLE_CAPACITY:
                raise ValueError(f"{label} table capacity out of range: {cap}")
        if not 1 <= self.frame_row_limit <= MAX_TABLE_CAPACITY:
            raise ValueError(f"frame row limit out of range: {self.frame_row_limit}")

    @property
    def flags(self) -> int:
        return ((FLAG_QUADS if self.allows_quads else 0)
                | (FLAG_RDF_STAR if self.allows_rdf_star else 0)
                | (FLAG_GENERALIZED if self.allows_generalized else 0))

    @classmethod
    def from_flags(cls, name: int, prefix: int, datatype: int, frame: int, flags: int) -> "StreamOptions":
        if flags & ~ALL_FLAGS:
            raise ValueError(f"unknown feature flag bits {flags:#x}")
        return cls(name, prefix, datatype, frame,
                   bool(flags & FLAG_QUADS), bool(flags & FLAG_RDF_STAR),
                   bool(flags & FLAG_GENERALIZED))


def split_iri(iri: str) -> tuple[str, str]:
    """Split an IRI into (prefix, name) after its last '/' or '#'.

    Only delimiters at or after the scheme separator count, so ``urn:x``
    stays whole.
    """
    colon = iri.find(":")
    cut = max(iri.rfind("/"), iri.rfind("#"))
    if cut < 0 or cut < colon:
        return "", iri
    return iri[:cut + 1], iri[cut + 1:]
