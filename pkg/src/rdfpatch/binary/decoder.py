"""Streaming decoder for binary patch streams.

The decoder holds only the stream options, the three lookup tables, the
four term registers and (while decoding) a single frame.  Frames can be fed
one at a time, across separate calls, or as arbitrary byte chunks.
"""
from __future__ import annotations

from typing import BinaryIO, Callable, Iterator, Optional, Union

from ..model import (
    DEFAULT_GRAPH,
    TX_ABORT,
    TX_BEGIN,
    TX_COMMIT,
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
    check_statement,
)
from .errors import (
    BadMagicError,
    BadStringError,
    DecodeError,
    EmptyRegisterError,
    FrameLimitError,
    OptionsError,
    StreamFeatureError,
    TruncatedError,
    UnknownRowError,
    UnknownTermKindError,
    VarintError,
)
from .lookup import LookupDecoder
from .varint import read_varint
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
)

Source = Union[bytes, bytearray, memoryview, BinaryIO]
Handler = Callable[[PatchOp], object]

_TX_ROWS = {ROW_TX_BEGIN: TX_BEGIN, ROW_TX_COMMIT: TX_COMMIT, ROW_TX_ABORT: TX_ABORT}


def _locate(exc: DecodeError, frame: int, row: Optional[int]) -> DecodeError:
    if exc.frame is None:
        exc.frame = frame
        exc.row = row
        where = [f"frame {frame}"]
        if row is not None:
            where.append(f"row {row}")
        if exc.offset is not None:
            where.append(f"byte offset {exc.offset}")
        exc.args = (f"{exc.message} ({', '.join(where)})",)
    return exc


class PatchDecoder:
    """Decodes frames of one stream, carrying table and register state."""

    def __init__(self) -> None:
        self.options: Optional[StreamOptions] = None
        self.names: Optional[LookupDecoder] = None
        self.prefixes: Optional[LookupDecoder] = None
        self.datatypes: Optional[LookupDecoder] = None
        self._regs: list[Optional[Term]] = [None, None, None, None]
        self._iri_cache: dict[tuple[int, int], Iri] = {}
        self._iri_cache_limit = 0
        self._checks = False
        self.frames = 0
        self.rows = 0
        self.ops = 0
        self.bytes_consumed = 0
        # incremental feed() state
        self._buf = bytearray()
        self._magic_seen = False
        self._fed = 0

    # -- whole frames -------------------------------------------------------

    def decode_frame(self, body, handler: Optional[Handler] = None, *, offset: int = 0) -> list[PatchOp]:
        """Decode one frame body (without its length prefix).

        Ops go to ``handler`` if given, else they are returned as a list.
        ``offset`` is the absolute position of the body, used in errors.
        """
        out: list[PatchOp] = []
        emit = handler if handler is not None else out.append
        frame_index = self.frames
        row_index = 0
        row_start = 0
        n = len(body)
        pos = 0
        try:
            if self.options is None:
                if n == 0 or body[0] != ROW_OPTIONS:
                    raise OptionsError("stream does not start with an options row")
                pos = self._options_row(body, 1)
                row_index = 1
            limit = self.options.frame_row_limit
            names = self.names
            regs = self._regs
            term = self._term
            while pos < n:
                row_start = pos
                if row_index >= limit:
                    raise FrameLimitError(f"frame holds more than {limit} rows")
                tag = body[pos]
                pos += 1
                if tag == ROW_ADD or tag == ROW_DELETE:
                    k = body[pos]
                    if k == KIND_REPEAT:
                        s = regs[0]
                        if s is None:
                            raise EmptyRegisterError("repeat marker for subject with empty register")
                        pos += 1
                    else:
                        s, pos = term(body, pos, k)
                    k = body[pos]
                    if k == KIND_REPEAT:
                        p = regs[1]
                        if p is None:
                            raise EmptyRegisterError("repeat marker for predicate with empty register")
                        pos += 1
                    else:
                        p, pos = term(body, pos, k)
                    k = body[pos]
                    if k == KIND_REPEAT:
                        o = regs[2]
                        if o is None:
                            raise EmptyRegisterError("repeat marker for object with empty register")
                        pos += 1
                    else:
                        o, pos = term(body, pos, k)
                    k = body[pos]
                    if k == KIND_REPEAT:
                        g = regs[3]
                        if g is None:
                            raise EmptyRegisterError("repeat marker for graph with empty register")
                        pos += 1
                    elif k == KIND_DEFAULT_GRAPH:
                        g = DEFAULT_GRAPH
                        pos += 1
                    else:
                        g, pos = term(body, pos, k)
                    if s.__class__ is DefaultGraph or p.__class__ is DefaultGraph or o.__class__ is DefaultGraph:
                        raise DecodeError("default graph marker outside the graph position")
                    st = Statement(s, p, o, g)
                    if self._checks:
                        self._check(st)
                    regs[0] = s
                    regs[1] = p
                    regs[2] = o
                    regs[3] = g
                    emit(Add(st) if tag == ROW_ADD else Delete(st))
                    self.ops += 1
                elif tag == ROW_NAME_ENTRY:
                    pos = self._entry(body, pos, names)
                elif tag == ROW_PREFIX_ENTRY:
                    pos = self._entry(body, pos, self.prefixes)
                elif tag == ROW_DATATYPE_ENTRY:
                    pos = self._entry(body, pos, self.datatypes)
                elif tag in _TX_ROWS:
                    emit(_TX_ROWS[tag])
                    self.ops += 1
                elif tag == ROW_HEADER:
                    key, pos = self._string(body, pos)
                    if pos >= n:
                        raise TruncatedError("header row truncated")
                    value, pos = term(body, pos, body[pos])
                    try:
                        op = Header(key, value)
                    except ValueError as exc:
                        raise DecodeError(str(exc)) from None
                    emit(op)
                    self.ops += 1
                elif tag == ROW_PREFIX_ADD:
                    label, pos = self._string(body, pos)
                    if pos >= n or body[pos] != KIND_IRI:
                        raise DecodeError("prefix add row must carry an IRI field")
                    iri, pos = self._iri(body, pos + 1)
                    emit(PrefixAdd(label, iri.value))
                    self.ops += 1
                elif tag == ROW_PREFIX_DELETE:
                    label, pos = self._string(body, pos)
                    emit(PrefixDelete(label))
                    self.ops += 1
                elif tag == ROW_OPTIONS:
                    raise OptionsError("duplicate options row")
                else:
                    if tag >= 0x80:
                        tag, _ = read_varint(body, pos - 1)
                    raise UnknownRowError(f"unknown row tag {tag}")
                row_index += 1
        except IndexError:
            exc = TruncatedError("row runs past the end of its frame", offset=offset + row_start)
            raise _locate(exc, frame_index, row_index) from None
        except DecodeError as exc:
            if exc.frame is None:
                # helper offsets are relative to the frame body
                exc.offset = offset + (row_start if exc.offset is None else exc.offset)
            raise _locate(exc, frame_index, row_index)
        self.frames += 1
        self.rows += row_index
        self.bytes_consumed += n
        return out

    # -- rows and fields ----------------------------------------------------

    def _options_row(self, body, pos: int) -> int:
        vals = []
        for _ in range(6):
            v, pos = read_varint(body, pos)
            vals.append(v)
        version, name, prefix, dt, frame, flags = vals
        if version != VERSION:
            raise OptionsError(f"unsupported stream version {version}")
        try:
            opts = StreamOptions.from_flags(name, prefix, dt, frame, flags)
        except ValueError as exc:
            raise OptionsError(f"invalid options: {exc}") from None
        self.options = opts
        self.names = LookupDecoder(opts.name_table_capacity)
        self.prefixes = LookupDecoder(opts.prefix_table_capacity)
        self.datatypes = LookupDecoder(opts.datatype_table_capacity)
        self._iri_cache_limit = 4 * opts.name_table_capacity
        self._checks = not (opts.allows_quads and opts.allows_rdf_star and opts.allows_generalized)
        return pos

    def _string(self, body, pos: int, limit: int = MAX_INLINE_BYTES) -> tuple[str, int]:
        ln = body[pos]
        if ln < 0x80:
            pos += 1
        else:
            ln, pos = read_varint(body, pos)
            if ln > limit:
                raise BadStringError(f"string length {ln} exceeds limit {limit}")
        end = pos + ln
        if end > len(body):
            raise TruncatedError("string runs past the end of its frame")
        try:
            return body[pos:end].decode("utf-8"), end
        except UnicodeDecodeError:
            raise BadStringError("string is not valid UTF-8") from None

    def _entry(self, body, pos: int, table: LookupDecoder) -> int:
        id_field = body[pos]
        if id_field < 0x80:
            pos += 1
        else:
            id_field, pos = read_varint(body, pos)
        value, pos = self._string(body, pos, MAX_ENTRY_BYTES)
        if len(value) > MAX_ENTRY_BYTES:
            raise BadStringError("lookup entry too long")
        had = table.evictions
        table.apply(id_field, value)
        if table.evictions != had and table is not self.datatypes:
            self._iri_cache.clear()
        return pos

    def _iri(self, body, pos: int) -> tuple[Iri, int]:
        pid = body[pos]
        if pid < 0x80:
            pos += 1
        else:
            pid, pos = read_varint(body, pos)
        nid = body[pos]
        if nid < 0x80:
            pos += 1
        else:
            nid, pos = read_varint(body, pos)
        key = (pid, nid)
        iri = self._iri_cache.get(key)
        if iri is None:
            name = self.names.get(nid)
            iri = Iri(self.prefixes.get(pid) + name if pid else name)
            cache = self._iri_cache
            if len(cache) >= self._iri_cache_limit:
                cache.clear()
            cache[key] = iri
        return iri, pos

    def _term(self, body, pos: int, kind: int) -> tuple[Term, int]:
        """Decode a term field whose kind byte sits at ``pos``."""
        pos += 1
        if kind == KIND_IRI:
            return self._iri(body, pos)
        if kind == KIND_TYPED:
            lex, pos = self._string(body, pos)
            did = body[pos]
            if did < 0x80:
                pos += 1
            else:
                did, pos = read_varint(body, pos)
            return LiteralDt(lex, self.datatypes.get(did)), pos
        if kind == KIND_SIMPLE:
            lex, pos = self._string(body, pos)
            return LiteralSimple(lex), pos
        if kind == KIND_BNODE:
            label, pos = self._string(body, pos)
            return BlankNode(label), pos
        if kind == KIND_LANG:
            lex, pos = self._string(body, pos)
            lang, pos = self._string(body, pos)
            return LiteralLang(lex, lang), pos
        if kind == KIND_QUOTED:
            s, pos = self._term(body, pos, body[pos])
            p, pos = self._term(body, pos, body[pos])
            o, pos = self._term(body, pos, body[pos])
            if s.__class__ is DefaultGraph or p.__class__ is DefaultGraph or o.__class__ is DefaultGraph:
                raise DecodeError("default graph marker inside a quoted triple")
            return QuotedTriple(s, p, o), pos
        if kind == KIND_DEFAULT_GRAPH:
            return DEFAULT_GRAPH, pos
        if kind == KIND_REPEAT:
            raise DecodeError("repeat marker outside a statement position")
        raise UnknownTermKindError(f"unknown term kind {kind}")

    def _check(self, st: Statement) -> None:
        opts = self.options
        if not opts.allows_quads and st.graph.__class__ is not DefaultGraph:
            raise StreamFeatureError("quad in a triples-only stream")
        if not opts.allows_rdf_star:
            stack = [st.subject, st.predicate, st.object, st.graph]
            if any(t.__class__ is QuotedTriple for t in stack):
                raise StreamFeatureError("quoted triple in a stream without RDF-star")
        if not opts.allows_generalized:
            try:
                check_statement(st, strict=True)
            except TermError as exc:
                raise StreamFeatureError(f"generalized statement in a strict stream: {exc}") from None

    # -- incremental input --------------------------------------------------

    def feed(self, chunk: bytes, handler: Optional[Handler] = None) -> list[PatchOp]:
        """Accept an arbitrary slice of the stream; decode every completed frame.

        At most one incomplete frame is buffered between calls.
        """
        out: list[PatchOp] = []
        emit = handler if handler is not None else out.append
        buf = self._buf
        buf += chunk
        if not self._magic_seen:
            if len(buf) < len(MAGIC):
                if MAGIC[:len(buf)] != bytes(buf):
                    raise BadMagicError("not a binary patch stream", offset=0)
                return out
            if bytes(buf[:len(MAGIC)]) != MAGIC:
                raise BadMagicError("not a binary patch stream", offset=0)
            del buf[:len(MAGIC)]
            self._magic_seen = True
            self._fed = len(MAGIC)
        while buf:
            try:
                length, start = read_varint(buf, 0)
            except TruncatedError:
                break
            except VarintError as exc:
                exc.offset = self._fed
                raise _locate(exc, self.frames, None)
            end = start + length
            if end > len(buf):
                break
            body = bytes(buf[start:end])
            del buf[:end]
            self.decode_frame(body, emit, offset=self._fed + start)
            self._fed += end
        return out

    def finish(self) -> None:
        """Check the stream ended cleanly."""
        if not self._magic_seen and self.options is None:
            raise BadMagicError("not a binary patch stream", offset=0)
        if self._buf:
            raise TruncatedError("stream ends inside a frame", offset=self._fed)
        if self.options is None:
            raise OptionsError("stream has no options row")

    def retained_state(self) -> dict[str, int]:
        """Sizes of everything the decoder keeps between frames."""
        tables = [t for t in (self.names, self.prefixes, self.datatypes) if t is not None]
        return {
            "table_slots": sum(len(t.values) for t in tables),
            "table_bytes": sum(t.retained_bytes() for t in tables),
            "iri_cache": len(self._iri_cache),
            "buffered_bytes": len(self._buf),
        }


def iter_frames(source: Source) -> Iterator[tuple[int, bytes]]:
    """Yield ``(body_offset, body)`` for each frame after checking the magic."""
    if isinstance(source, (bytes, bytearray, memoryview)):
        data = bytes(source)
        if data[:4] != MAGIC:
            raise BadMagicError("not a binary patch stream", offset=0)
        pos = 4
        n = len(data)
        while pos < n:
            length, start = read_varint(data, pos)
            end = start + length
            if end > n:
                raise TruncatedError(f"frame of {length} bytes truncated after {n - start}", offset=pos)
            yield start, data[start:end]
            pos = end
        return
    head = source.read(4)
    if head != MAGIC:
        raise BadMagicError("not a binary patch stream", offset=0)
    pos = 4
    read = source.read
    while True:
        first = read(1)
        if not first:
            return
        raw = bytearray(first)
        while raw[-1] & 0x80 and len(raw) < 6:
            b = read(1)
            if not b:
                break
            raw += b
        try:
            length, hdr = read_varint(raw, 0)
        except DecodeError as exc:
            exc.offset = pos
            raise
        body = read(length)
        if len(body) < length:
            raise TruncatedError(f"frame of {length} bytes truncated after {len(body)}", offset=pos)
        yield pos + hdr, body
        pos += hdr + length


def decode_patch_stream(source: Source, handler: Optional[Handler] = None,
                        decoder: Optional[PatchDecoder] = None) -> int:
    """Replay every op in ``source`` to ``handler``; returns the op count."""
    dec = decoder or PatchDecoder()
    sink = handler if handler is not None else (lambda op: None)
    for offset, body in iter_frames(source):
        dec.decode_frame(body, sink, offset=offset)
    dec._magic_seen = True  # iter_frames checked it
    dec.finish()
    return dec.ops


def iter_patch_stream(source: Source, decoder: Optional[PatchDecoder] = None) -> Iterator[PatchOp]:
    """Lazily decode ``source``, one frame in memory at a time."""
    dec = decoder or PatchDecoder()
    for offset, body in iter_frames(source):
        yield from dec.decode_frame(body, offset=offset)
    dec._magic_seen = True  # iter_frames checked it
    dec.finish()


def decode_patch(data: bytes) -> list[PatchOp]:
    out: list[PatchOp] = []
    decode_patch_stream(data, out.append)
    return out
