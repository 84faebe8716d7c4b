"""RDF Patch text format, N-Quads and SPARQL Update output.

Patch rows::

    H key <term> .
    TX .   TC .   TA .
    A s p o [g] .
    D s p o [g] .
    PA "label" <namespace> .
    PD "label" .

Terms use the N-Quads grammar plus ``<< s p o >>`` for quoted triples.  Any
term kind is accepted in any position on input.  The writer is canonical:
single spaces, ``" ."`` terminator, ``"\\n"`` line endings, no comments, and
only ``\\``, ``"``, LF and CR escaped in literals.
"""
from __future__ import annotations

import io
import re
from typing import Iterable, Iterator, Optional, TextIO, Union

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
    PatchOp,
    PrefixAdd,
    PrefixDelete,
    QuotedTriple,
    Statement,
    Term,
    TxAbort,
    TxBegin,
    TxCommit,
)

TextSource = Union[str, TextIO, Iterable[str]]


class PatchSyntaxError(ValueError):
    """Malformed text input.

    ``recoverable`` is True for errors confined to one row; lenient parsing
    skips such rows and keeps going.
    """

    def __init__(self, message: str, line: int, column: int, token: str = "", recoverable: bool = True):
        self.message = message
        self.line = line
        self.column = column
        self.token = token
        self.recoverable = recoverable
        where = f"line {line}, column {column}"
        if token:
            where += f" near {token!r}"
        super().__init__(f"{where}: {message}")


# -- lexical layer ----------------------------------------------------------

_IRI_CHAR = r'[^<>"{}|^`\\\x00-\x20]'
_UCHAR = r"\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8}"
_IRI_BODY = rf"(?:{_IRI_CHAR}|{_UCHAR})*"
_STRING_BODY = r'[^"\\\n\r]*(?:\\.[^"\\\n\r]*)*'
_LANG = r"[a-zA-Z]+(?:-[a-zA-Z0-9]+)*"
_BNODE_LABEL = r"\w(?:[\w.\-]*[\w\-])?"

_TOKEN_RE = re.compile(
    rf"""[ \t]*(?:
      <(?P<iri>{_IRI_BODY})>
    | "(?P<str>{_STRING_BODY})"(?:@(?P<lang>{_LANG})|\^\^<(?P<dt>{_IRI_BODY})>)?
    | _:(?P<bnode>{_BNODE_LABEL})
    | (?P<qopen><<)
    | (?P<qclose>>>)
    | (?P<dot>\.)
    | (?P<comment>\#.*)
    | (?P<end>$)
    )""",
    re.VERBOSE,
)
_OPCODE_RE = re.compile(r"[ \t]*([A-Z]+)(?=[ \t]|$)")
_KEY_RE = re.compile(r"[ \t]+([^\s<>\"]+)")
_KEY_FULL_RE = re.compile(r"[^\s<>\"]+")
_BNODE_LABEL_RE = re.compile(_BNODE_LABEL)
_LANG_RE = re.compile(_LANG)
_IRI_ESCAPE_NEEDED = re.compile(r'[<>"{}|^`\\\x00-\x20]')
_LIT_ESCAPE_NEEDED = re.compile(r'[\\"\n\r]')
_ECHAR = re.compile(r"\\(?:([tbnrf\"'\\])|u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8}))")
_UCHAR_RE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8}))")
_ECHAR_MAP = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _code_point(hex_digits: str) -> str:
    cp = int(hex_digits, 16)
    if cp > 0x10FFFF or 0xD800 <= cp <= 0xDFFF:
        raise ValueError(f"invalid code point U+{hex_digits}")
    return chr(cp)


def _unescape_string(body: str) -> str:
    if "\\" not in body:
        return body

    def repl(m: re.Match) -> str:
        if m.group(1):
            return _ECHAR_MAP[m.group(1)]
        return _code_point(m.group(2) or m.group(3))

    out = _ECHAR.sub(repl, body)
    if "\\" in _ECHAR.sub("", body):
        raise ValueError("bad escape sequence in literal")
    return out


def _unescape_iri(body: str) -> str:
    if "\\" not in body:
        return body
    return _UCHAR_RE.sub(lambda m: _code_point(m.group(1) or m.group(2)), body)


def _escape_iri(value: str) -> str:
    if _IRI_ESCAPE_NEEDED.search(value) is None:
        return value
    return _IRI_ESCAPE_NEEDED.sub(lambda m: "\\u%04X" % ord(m.group()), value)


def _escape_string(value: str) -> str:
    if _LIT_ESCAPE_NEEDED.search(value) is None:
        return value
    return value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\r", "\\r")


def term_to_text(t: Term) -> str:
    """Canonical text form of a term.  The default graph renders as ``""``."""
    cls = t.__class__
    if cls is Iri:
        return "<" + _escape_iri(t.value) + ">"
    if cls is LiteralSimple:
        return '"' + _escape_string(t.lexical) + '"'
    if cls is BlankNode:
        if _BNODE_LABEL_RE.fullmatch(t.label) is None:
            raise ValueError(f"blank node label {t.label!r} has no text form")
        return "_:" + t.label
    if cls is LiteralDt:
        return '"' + _escape_string(t.lexical) + '"^^<' + _escape_iri(t.datatype) + ">"
    if cls is LiteralLang:
        if _LANG_RE.fullmatch(t.lang) is None:
            raise ValueError(f"invalid language tag {t.lang!r}")
        return '"' + _escape_string(t.lexical) + '"@' + t.lang
    if cls is QuotedTriple:
        return "<< " + _spo_text(t.subject, t.predicate, t.object) + " >>"
    if cls is DefaultGraph:
        return ""
    raise TypeError(f"not a term: {t!r}")


def _spo_text(s: Term, p: Term, o: Term) -> str:
    for x in (s, p, o):
        if x.__class__ is DefaultGraph:
            raise ValueError("default graph marker outside graph position")
    return term_to_text(s) + " " + term_to_text(p) + " " + term_to_text(o)


def statement_to_text(st: Statement) -> str:
    """``s p o`` or ``s p o g`` (no terminator)."""
    body = _spo_text(st.subject, st.predicate, st.object)
    if st.graph.__class__ is DefaultGraph:
        return body
    return body + " " + term_to_text(st.graph)


def statement_sort_key(st: Statement) -> tuple[str, str, str, str]:
    return (term_to_text(st.subject), term_to_text(st.predicate),
            term_to_text(st.object), term_to_text(st.graph))


class _LineParser:
    """Term-level parsing of one line.  Positions are 0-based offsets."""

    __slots__ = ("line", "pos", "lineno")

    def __init__(self, line: str, lineno: int) -> None:
        self.line = line
        self.pos = 0
        self.lineno = lineno

    def error(self, message: str, at: Optional[int] = None) -> PatchSyntaxError:
        at = self.pos if at is None else at
        tail = self.line[at:].strip()
        token = tail.split()[0] if tail else ""
        return PatchSyntaxError(message, self.lineno, at + 1, token)

    def next_token(self) -> re.Match:
        m = _TOKEN_RE.match(self.line, self.pos)
        if m is None:
            raise self.error("unrecognised token", self._skip_ws())
        self.pos = m.end()
        return m

    def _skip_ws(self) -> int:
        p = self.pos
        line = self.line
        while p < len(line) and line[p] in " \t":
            p += 1
        return p

    def term_from(self, m: re.Match) -> Optional[Term]:
        """Term for a token match, or None for a non-term token."""
        kind = m.lastgroup
        try:
            if kind == "iri":
                return Iri(_unescape_iri(m.group("iri")))
            if kind == "bnode":
                return BlankNode(m.group("bnode"))
            if kind in ("str", "lang", "dt"):
                lexical = _unescape_string(m.group("str"))
                if m.group("lang") is not None:
                    return LiteralLang(lexical, m.group("lang"))
                if m.group("dt") is not None:
                    return LiteralDt(lexical, _unescape_iri(m.group("dt")))
                return LiteralSimple(lexical)
        except ValueError as exc:
            raise self.error(str(exc), m.start() + len(m.group()) - len(m.group().lstrip(" \t"))) from None
        if kind == "qopen":
            s = self.term()
            p = self.term()
            o = self.term()
            close = self.next_token()
            if close.lastgroup != "qclose":
                raise self.error("expected '>>' to close quoted triple", self._token_start(close))
            return QuotedTriple(s, p, o)
        return None

    def term(self) -> Term:
        m = self.next_token()
        t = self.term_from(m)
        if t is None:
            raise self.error("expected a term", self._token_start(m))
        return t

    def _token_start(self, m: re.Match) -> int:
        g = m.lastgroup
        return m.start(g) if g else m.start()

    def terms_until_dot(self) -> list[Term]:
        out = []
        while True:
            m = self.next_token()
            if m.lastgroup == "dot":
                self.expect_eol()
                return out
            t = self.term_from(m)
            if t is None:
                if m.lastgroup in ("end", "comment"):
                    raise self.error("missing '.' at end of row", self._token_start(m))
                raise self.error("unexpected token", self._token_start(m))
            out.append(t)

    def expect_dot(self) -> None:
        m = self.next_token()
        if m.lastgroup != "dot":
            raise self.error("expected '.'", self._token_start(m))
        self.expect_eol()

    def expect_eol(self) -> None:
        m = self.next_token()
        if m.lastgroup not in ("end", "comment"):
            raise self.error("trailing content after '.'", self._token_start(m))


def _iter_lines(source: TextSource) -> Iterator[str]:
    if isinstance(source, str):
        source = io.StringIO(source, newline="\n")
    for line in source:
        if line.endswith("\n"):
            line = line[:-1]
        if line.endswith("\r"):
            line = line[:-1]
        yield line


def _statement(terms: list[Term], lp: _LineParser) -> Statement:
    if len(terms) == 3:
        s, p, o = terms
        g: Term = DEFAULT_GRAPH
    elif len(terms) == 4:
        s, p, o, g = terms
    else:
        raise lp.error(f"expected 3 or 4 terms, found {len(terms)}", 0)
    return Statement(s, p, o, g)


def _parse_row(line: str, lineno: int) -> Optional[PatchOp]:
    m = _OPCODE_RE.match(line)
    if m is None:
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            return None
        lp = _LineParser(line, lineno)
        raise lp.error("expected an opcode", len(line) - len(line.lstrip()))
    code = m.group(1)
    lp = _LineParser(line, lineno)
    lp.pos = m.end()
    if code == "A" or code == "D":
        st = _statement(lp.terms_until_dot(), lp)
        return Add(st) if code == "A" else Delete(st)
    if code == "TX":
        lp.expect_dot()
        return TX_BEGIN
    if code == "TC":
        lp.expect_dot()
        return TX_COMMIT
    if code == "TA":
        lp.expect_dot()
        return TX_ABORT
    if code == "H":
        k = _KEY_RE.match(line, lp.pos)
        if k is None:
            raise lp.error("expected header key")
        lp.pos = k.end()
        value = lp.term()
        lp.expect_dot()
        return Header(k.group(1), value)
    if code == "PA" or code == "PD":
        at = lp._skip_ws()
        label = lp.term()
        if label.__class__ is not LiteralSimple:
            raise lp.error("prefix label must be a plain string", at)
        if code == "PD":
            lp.expect_dot()
            return PrefixDelete(label.lexical)
        at = lp._skip_ws()
        ns = lp.term()
        if ns.__class__ is not Iri:
            raise lp.error("prefix namespace must be an IRI", at)
        lp.expect_dot()
        return PrefixAdd(label.lexical, ns.value)
    raise lp.error(f"unknown opcode {code!r}", m.start(1))


def iter_patch_text(source: TextSource, *, lenient: bool = False,
                    errors: Optional[list[PatchSyntaxError]] = None) -> Iterator[PatchOp]:
    """Parse RDF Patch text lazily, one row at a time.

    In lenient mode malformed rows are skipped and their errors appended to
    ``errors`` (when given) instead of being raised.
    """
    lineno = 0
    try:
        for line in _iter_lines(source):
            lineno += 1
            try:
                op = _parse_row(line, lineno)
            except PatchSyntaxError as exc:
                if not lenient:
                    raise
                if errors is not None:
                    errors.append(exc)
                continue
            if op is not None:
                yield op
    except UnicodeDecodeError as exc:
        raise PatchSyntaxError(f"input is not UTF-8: {exc.reason}", lineno + 1, 1,
                               recoverable=False) from None


def parse_patch_text(source: TextSource, *, lenient: bool = False,
                     errors: Optional[list[PatchSyntaxError]] = None) -> list[PatchOp]:
    return list(iter_patch_text(source, lenient=lenient, errors=errors))


# -- writing ----------------------------------------------------------------

def op_to_text(op: PatchOp) -> str:
    """One canonical row including the trailing newline."""
    cls = op.__class__
    if cls is Add:
        return "A " + statement_to_text(op.statement) + " .\n"
    if cls is Delete:
        return "D " + statement_to_text(op.statement) + " .\n"
    if cls is TxBegin:
        return "TX .\n"
    if cls is TxCommit:
        return "TC .\n"
    if cls is TxAbort:
        return "TA .\n"
    if cls is Header:
        if op.value.__class__ is DefaultGraph:
            raise ValueError("header value cannot be the default graph marker")
        if _KEY_FULL_RE.fullmatch(op.key) is None:
            raise ValueError(f"header key {op.key!r} has no text form")
        return "H " + op.key + " " + term_to_text(op.value) + " .\n"
    if cls is PrefixAdd:
        if op.graph is not None:
            raise ValueError("prefix rows with a graph have no text form")
        return 'PA "' + _escape_string(op.label) + '" <' + _escape_iri(op.iri) + "> .\n"
    if cls is PrefixDelete:
        if op.graph is not None or op.iri:
            raise ValueError("PD rows carry only the prefix label")
        return 'PD "' + _escape_string(op.label) + '" .\n'
    raise TypeError(f"not a patch operation: {op!r}")


class TextPatchWriter:
    """Streams canonical patch rows to a text sink."""

    def __init__(self, out: TextIO) -> None:
        self.out = out
        self.rows = 0

    def write(self, op: PatchOp) -> None:
        self.out.write(op_to_text(op))
        self.rows += 1

    def close(self) -> None:
        pass


def write_patch_text(patch: Iterable[PatchOp], out: Optional[TextIO] = None) -> Optional[str]:
    """Serialize ``patch``; returns the text when no ``out`` stream is given."""
    if out is not None:
        w = TextPatchWriter(out)
        for op in patch:
            w.write(op)
        return None
    return "".join(map(op_to_text, patch))


# -- N-Quads ----------------------------------------------------------------

def iter_nquads(source: TextSource) -> Iterator[Statement]:
    lineno = 0
    for line in _iter_lines(source):
        lineno += 1
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        lp = _LineParser(line, lineno)
        yield _statement(lp.terms_until_dot(), lp)


def parse_nquads(source: TextSource) -> Dataset:
    return Dataset(iter_nquads(source))


def write_nquads(statements: Iterable[Statement], out: Optional[TextIO] = None,
                 *, canonical: bool = True) -> Optional[str]:
    """Write statements as N-Quads, sorted canonically unless told otherwise."""
    if canonical:
        statements = sorted(statements, key=statement_sort_key)
    lines = (statement_to_text(st) + " .\n" for st in statements)
    if out is None:
        return "".join(lines)
    for line in lines:
        out.write(line)
    return None


# -- SPARQL Update ----------------------------------------------------------

class UnsupportedStatementError(ValueError):
    def __init__(self, index: int, reason: str) -> None:
        self.index = index
        self.reason = reason
        super().__init__(f"op {index}: {reason}")


def _sparql_check(st: Statement, index: int, deleting: bool) -> None:
    def check(t: Term, pos: str, top: bool) -> None:
        cls = t.__class__
        if cls is QuotedTriple:
            check(t.subject, "subject", False)
            check(t.predicate, "predicate", False)
            check(t.object, "object", False)
            if pos == "predicate":
                raise UnsupportedStatementError(index, "quoted triple as predicate")
            return
        if pos == "subject" and cls not in (Iri, BlankNode):
            raise UnsupportedStatementError(index, f"{cls.__name__} as subject")
        if pos == "predicate" and cls is not Iri:
            raise UnsupportedStatementError(index, f"{cls.__name__} as predicate")
        if deleting and cls is BlankNode:
            raise UnsupportedStatementError(index, "blank node in DELETE DATA")

    check(st.subject, "subject", True)
    check(st.predicate, "predicate", True)
    check(st.object, "object", True)
    if st.graph.__class__ not in (Iri, DefaultGraph):
        raise UnsupportedStatementError(index, f"{type(st.graph).__name__} as graph name")


class SparqlUpdateWriter:
    """Streams a patch as SPARQL Update (INSERT DATA / DELETE DATA).

    Runs of adds (deletes) become one block; transaction markers end the
    current run; headers and prefix rows become comments.  Blocks are
    separated by `` ;``.
    """

    def __init__(self, out: TextIO) -> None:
        self.out = out
        self.rows = 0
        self._kind: Optional[str] = None
        self._parts: list[str] = []
        self._graph: Optional[Term] = None
        self._blocks = 0
        self._pending_comments: list[str] = []

    def write(self, op: PatchOp) -> None:
        index = self.rows
        self.rows += 1
        cls = op.__class__
        if cls is Add or cls is Delete:
            kind = "INSERT" if cls is Add else "DELETE"
            st = op.statement
            _sparql_check(st, index, cls is Delete)
            if kind != self._kind:
                self._flush()
                self._kind = kind
            if st.graph != self._graph:
                if self._graph is not None:
                    self._parts.append("}")
                self._graph = None
                if st.graph.__class__ is not DefaultGraph:
                    self._parts.append("GRAPH " + term_to_text(st.graph) + " {")
                    self._graph = st.graph
            self._parts.append(_spo_text(st.subject, st.predicate, st.object) + " .")
            return
        self._flush()
        if cls is Header:
            self._comment("H " + op.key + " " + term_to_text(op.value))
        elif cls is PrefixAdd or cls is PrefixDelete:
            self._comment(op_to_text(op).rstrip("\n").rstrip(" ."))
        elif cls is TxAbort:
            self._comment("TA")

    def _comment(self, text: str) -> None:
        self._pending_comments.append("# " + text.replace("\n", " ") + "\n")

    def _flush(self) -> None:
        if self._kind is None:
            return
        if self._graph is not None:
            self._parts.append("}")
        head = " ;\n" if self._blocks else ""
        self.out.write(head + "".join(self._pending_comments)
                       + f"{self._kind} DATA {{ " + " ".join(self._parts) + " }")
        self._pending_comments = []
        self._blocks += 1
        self._kind = None
        self._graph = None
        self._parts = []

    def close(self) -> None:
        self._flush()
        if self._blocks:
            self.out.write("\n")
        if self._pending_comments:
            self.out.write("".join(self._pending_comments))
            self._pending_comments = []


def write_sparql_update(patch: Iterable[PatchOp], out: Optional[TextIO] = None) -> Optional[str]:
    buf = io.StringIO() if out is None else out
    w = SparqlUpdateWriter(buf)
    for op in patch:
        w.write(op)
    w.close()
    return buf.getvalue() if out is None else None
