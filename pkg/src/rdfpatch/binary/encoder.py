"""Streaming encoder for binary patch streams."""
from __future__ import annotations

from typing import BinaryIO, Iterable, Optional

from ..model import (
    Add,
    BlankNode,
    DefaultGraph,
    Delete,
    Header,
    Iri,
    LiteralDt,
    LiteralLang,
    LiteralSimple,
    PatchOp,
    PrefixAdd,
    PrefixDelete,
    QuotedTriple,
    Statement,
    Term,
    TermError,
    TxAbort,
    TxBegin,
    TxCommit,
    check_statement,
)
from .errors import EncodeError, FeatureError, OversizedEntryError, TableOverflowError
from .lookup import LookupEncoder, LookupEntry
from .varint import varint_encode, write_varint
from .wire import (
    KIND_BNODE,
    KIND_DEFAULT_GRAPH,
    KIND_IRI,
    KIND_LANG,
    KIND_QUOTED,
    KIND_REPEAT,
    KIND_SIMPLE,
    KIND_TYPED,
    MAGIC,
    MAX_ENTRY_BYTES,
    MAX_INLINE_BYTES,
    ROW_ADD,
    ROW_DATATYPE_ENTRY,
    ROW_DELETE,
    ROW_HEADER,
    ROW_NAME_ENTRY,
    ROW_OPTIONS,
    ROW_PREFIX_ADD,
    ROW_PREFIX_DELETE,
    ROW_PREFIX_ENTRY,
    ROW_TX_ABORT,
    ROW_TX_BEGIN,
    ROW_TX_COMMIT,
    VERSION,
    StreamOptions,
    split_iri,
)

_SPLIT_CACHE_LIMIT = 1 << 16


def _write_string(buf: bytearray, s: str) -> None:
    b = s.encode("utf-8")
    n = len(b)
    if n > MAX_INLINE_BYTES:
        raise EncodeError(f"string of {n} bytes exceeds the inline limit")
    if n < 0x80:
        buf.append(n)
    else:
        buf += varint_encode(n)
    buf += b


class PatchEncoder:
    """Encodes patch operations into frames written to ``sink``.

    Lookup tables and term registers live for the whole stream, so later
    patches reuse IRIs seen in earlier ones.  Call :meth:`close` to flush
    the final frame; an encoder with no operations still produces a valid
    stream (magic plus the options row).
    """

    def __init__(self, sink: BinaryIO, options: Optional[StreamOptions] = None) -> None:
        self.sink = sink
        self.options = opts = options or StreamOptions()
        self._limit = opts.frame_row_limit
        self._names = LookupEncoder(opts.name_table_capacity)
        self._prefixes = LookupEncoder(opts.prefix_table_capacity) if opts.prefix_table_capacity else None
        self._datatypes = LookupEncoder(opts.datatype_table_capacity) if opts.datatype_table_capacity else None
        self._regs: list[Optional[Term]] = [None, None, None, None]
        self._split_cache: dict[str, tuple[str, str]] = {}
        self._frame = bytearray()
        self._frame_rows = 0
        self._started = False
        self._closed = False
        self.bytes_written = 0
        self.frames = 0
        self.rows = 0
        self.ops = 0
        self.entry_rows = 0

        head = bytearray()
        write_varint(head, ROW_OPTIONS)
        for v in (VERSION, opts.name_table_capacity, opts.prefix_table_capacity,
                  opts.datatype_table_capacity, opts.frame_row_limit, opts.flags):
            write_varint(head, v)
        self._append_row(head)

    @property
    def evictions(self) -> int:
        return sum(t.evictions for t in (self._names, self._prefixes, self._datatypes) if t)

    # -- framing ------------------------------------------------------------

    def _append_row(self, data) -> None:
        if self._frame_rows >= self._limit:
            self._flush_frame()
        self._frame += data
        self._frame_rows += 1
        self.rows += 1

    def _flush_frame(self) -> None:
        frame = self._frame
        out = bytearray()
        if not self._started:
            out += MAGIC
            self._started = True
        write_varint(out, len(frame))
        out += frame
        self.sink.write(out)
        self.bytes_written += len(out)
        self.frames += 1
        self._frame = bytearray()
        self._frame_rows = 0

    def _emit(self, entries: list[tuple[int, LookupEntry]], row: Optional[bytearray]) -> None:
        needed = len(entries) + (row is not None)
        if self._frame_rows and self._frame_rows + needed > self._limit:
            self._flush_frame()
        for tag, (id_field, value) in entries:
            b = value.encode("utf-8")
            if len(b) > MAX_ENTRY_BYTES:
                raise OversizedEntryError(f"lookup entry of {len(b)} bytes exceeds {MAX_ENTRY_BYTES}")
            data = bytearray((tag,))
            write_varint(data, id_field)
            write_varint(data, len(b))
            data += b
            self._append_row(data)
            self.entry_rows += 1
        if row is not None:
            self._append_row(row)
            self.ops += 1

    def flush(self) -> None:
        """Emit the current partial frame, if any."""
        if self._frame_rows or not self._started:
            self._flush_frame()

    def close(self) -> int:
        if not self._closed:
            self.flush()
            self._closed = True
        return self.bytes_written

    def __enter__(self) -> "PatchEncoder":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # -- terms --------------------------------------------------------------

    def _iri(self, buf: bytearray, iri: str, entries: list) -> None:
        split = self._split_cache.get(iri)
        if split is None:
            if len(self._split_cache) >= _SPLIT_CACHE_LIMIT:
                self._split_cache.clear()
            split = self._split_cache[iri] = split_iri(iri)
        prefix, name = split
        pid = 0
        if prefix:
            prefixes = self._prefixes
            if prefixes is None:
                name = iri
            else:
                try:
                    pid, entry = prefixes.get_or_assign(prefix)
                except TableOverflowError:
                    # the row already pins every prefix slot; inline the whole IRI
                    name = iri
                else:
                    if entry is not None:
                        entries.append((ROW_PREFIX_ENTRY, entry))
        nid, entry = self._names.get_or_assign(name)
        if entry is not None:
            entries.append((ROW_NAME_ENTRY, entry))
        buf.append(KIND_IRI)
        if pid < 0x80:
            buf.append(pid)
        else:
            buf += varint_encode(pid)
        if nid < 0x80:
            buf.append(nid)
        else:
            buf += varint_encode(nid)

    def _term(self, buf: bytearray, t: Term, entries: list, graph_pos: bool = False) -> None:
        cls = t.__class__
        if cls is Iri:
            self._iri(buf, t.value, entries)
        elif cls is LiteralSimple:
            buf.append(KIND_SIMPLE)
            _write_string(buf, t.lexical)
        elif cls is LiteralDt:
            if self._datatypes is None:
                raise EncodeError("datatyped literal in a stream with no datatype table")
            did, entry = self._datatypes.get_or_assign(t.datatype)
            if entry is not None:
                entries.append((ROW_DATATYPE_ENTRY, entry))
            buf.append(KIND_TYPED)
            _write_string(buf, t.lexical)
            write_varint(buf, did)
        elif cls is BlankNode:
            buf.append(KIND_BNODE)
            _write_string(buf, t.label)
        elif cls is LiteralLang:
            buf.append(KIND_LANG)
            _write_string(buf, t.lexical)
            _write_string(buf, t.lang)
        elif cls is DefaultGraph:
            if not graph_pos:
                raise EncodeError("default graph marker outside the graph position")
            buf.append(KIND_DEFAULT_GRAPH)
        elif cls is QuotedTriple:
            if not self.options.allows_rdf_star:
                raise FeatureError("quoted triple in a stream without RDF-star")
            buf.append(KIND_QUOTED)
            self._term(buf, t.subject, entries)
            self._term(buf, t.predicate, entries)
            self._term(buf, t.object, entries)
        else:
            raise EncodeError(f"not a term: {t!r}")

    def encode_term(self, t: Term, position: str = "O") -> tuple[bytes, list[bytes]]:
        """Term field bytes for ``t`` in statement position S, P, O or G.

        Returns the field and the encoded lookup entry rows it depends on.
        The entries are returned, not emitted: table state advances, so this
        is for inspection on an encoder whose output is not kept.
        """
        i = "SPOG".index(position)
        reg = self._regs[i]
        if t == reg:
            return bytes((KIND_REPEAT,)), []
        for table in (self._names, self._prefixes, self._datatypes):
            if table is not None:
                table.begin_row()
        entries: list[tuple[int, LookupEntry]] = []
        buf = bytearray()
        self._term(buf, t, entries, i == 3)
        rows = []
        for tag, (id_field, value) in entries:
            b = value.encode("utf-8")
            row = bytearray((tag,))
            write_varint(row, id_field)
            write_varint(row, len(b))
            rows.append(bytes(row + b))
        return bytes(buf), rows

    def _check(self, st: Statement) -> None:
        opts = self.options
        if not opts.allows_quads and st.graph.__class__ is not DefaultGraph:
            raise FeatureError("quad in a triples-only stream")
        if not opts.allows_generalized:
            try:
                check_statement(st, strict=True)
            except TermError as exc:
                raise FeatureError(f"generalized statement in a strict stream: {exc}") from None

    def _statement_row(self, tag: int, st: Statement, entries: list) -> bytearray:
        self._check(st)
        buf = bytearray((tag,))
        regs = self._regs
        terms = (st.subject, st.predicate, st.object, st.graph)
        for i in range(4):
            t = terms[i]
            r = regs[i]
            if t is r or t == r:
                buf.append(KIND_REPEAT)
            else:
                self._term(buf, t, entries, i == 3)
        regs[:] = terms
        return buf

    # -- operations ---------------------------------------------------------

    def write(self, op: PatchOp) -> None:
        if self._closed:
            raise EncodeError("write to a closed encoder")
        for table in (self._names, self._prefixes, self._datatypes):
            if table is not None:
                table.begin_row()
        entries: list[tuple[int, LookupEntry]] = []
        try:
            row = self._op_row(op, entries)
        except Exception:
            # table slots were already handed out; the decoder must still hear about them
            self._emit(entries, None)
            raise
        self._emit(entries, row)

    def _op_row(self, op: PatchOp, entries: list) -> bytearray:
        cls = op.__class__
        if cls is Add:
            return self._statement_row(ROW_ADD, op.statement, entries)
        if cls is Delete:
            return self._statement_row(ROW_DELETE, op.statement, entries)
        if cls is TxBegin:
            return bytearray((ROW_TX_BEGIN,))
        if cls is TxCommit:
            return bytearray((ROW_TX_COMMIT,))
        if cls is TxAbort:
            return bytearray((ROW_TX_ABORT,))
        if cls is Header:
            buf = bytearray((ROW_HEADER,))
            _write_string(buf, op.key)
            self._term(buf, op.value, entries)
            return buf
        if cls is PrefixAdd:
            if op.graph is not None:
                raise EncodeError("prefix rows cannot carry a graph")
            buf = bytearray((ROW_PREFIX_ADD,))
            _write_string(buf, op.label)
            self._iri(buf, op.iri, entries)
            return buf
        if cls is PrefixDelete:
            if op.graph is not None or op.iri:
                raise EncodeError("prefix delete rows carry only the label")
            buf = bytearray((ROW_PREFIX_DELETE,))
            _write_string(buf, op.label)
            return buf
        raise EncodeError(f"not a patch operation: {op!r}")

    def write_all(self, ops: Iterable[PatchOp]) -> None:
        for op in ops:
            self.write(op)


def encode_patch_stream(ops: Iterable[PatchOp], options: Optional[StreamOptions], sink: BinaryIO) -> int:
    """Encode ``ops`` as one complete stream; returns bytes written."""
    enc = PatchEncoder(sink, options)
    enc.write_all(ops)
    return enc.close()


class _Collect:
    def __init__(self) -> None:
        self.parts: list[bytes] = []

    def write(self, b) -> None:
        self.parts.append(bytes(b))


def encode_patch(ops: Iterable[PatchOp], options: Optional[StreamOptions] = None) -> bytes:
    sink = _Collect()
    encode_patch_stream(ops, options, sink)
    return b"".join(sink.parts)
