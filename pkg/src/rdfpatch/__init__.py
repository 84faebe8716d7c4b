"""RDF Patch streams: text format, compact binary format, diffing and benchmarks."""
from .binary import (
    DecodeError,
    EncodeError,
    PatchDecoder,
    PatchEncoder,
    StatsReport,
    StreamOptions,
    decode_patch,
    decode_patch_stream,
    encode_patch,
    encode_patch_stream,
    split_iri,
    stream_stats,
)
from .diff import DiffOptions, PatchConflictError, apply, diff, rolling_diff
from .model import (
    DEFAULT_GRAPH,
    TX_ABORT,
    TX_BEGIN,
    TX_COMMIT,
    Add,
    BlankNode,
    Dataset,
    DefaultGraph,
    Delete,
    Header,
    Iri,
    LiteralDt,
    LiteralLang,
    LiteralSimple,
    PrefixAdd,
    PrefixDelete,
    QuotedTriple,
    Statement,
    TermError,
    TxAbort,
    TxBegin,
    TxCommit,
    Violation,
    check_statement,
    term_equals,
    validate_patch_transactions,
)
from .text import (
    PatchSyntaxError,
    UnsupportedStatementError,
    parse_nquads,
    parse_patch_text,
    write_nquads,
    write_patch_text,
    write_sparql_update,
)

__version__ = "0.1.0"
