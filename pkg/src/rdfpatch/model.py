"""RDF terms, statements, patch operations and datasets.

Everything here is an immutable value except :class:`Dataset`, which is a
single-writer mutable set of statements.  The model is generalized RDF with
RDF-star: any term kind may appear in any statement position, except that
:data:`DEFAULT_GRAPH` is only meaningful in the graph position.

Blank nodes are identified by their label alone.  Two blank nodes with the
same label are the same node, everywhere, with no scoping or renaming.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence, Union


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __repr__(self) -> str:
        return f"Iri({self.value!r})"


@dataclass(frozen=True, slots=True)
class BlankNode:
    label: str

    def __repr__(self) -> str:
        return f"BlankNode({self.label!r})"


@dataclass(frozen=True, slots=True)
class LiteralSimple:
    lexical: str

    def __repr__(self) -> str:
        return f"LiteralSimple({self.lexical!r})"


@dataclass(frozen=True, slots=True, eq=False)
class LiteralLang:
    """Language-tagged literal.

    The tag is kept exactly as written but compared case-insensitively.
    """

    lexical: str
    lang: str

    def __eq__(self, other: object) -> bool:
        if other.__class__ is not LiteralLang:
            return NotImplemented
        return self.lexical == other.lexical and self.lang.lower() == other.lang.lower()

    def __hash__(self) -> int:
        return hash((LiteralLang, self.lexical, self.lang.lower()))


@dataclass(frozen=True, slots=True)
class LiteralDt:
    lexical: str
    datatype: str


@dataclass(frozen=True, slots=True)
class QuotedTriple:
    subject: "Term"
    predicate: "Term"
    object: "Term"


@dataclass(frozen=True, slots=True)
class DefaultGraph:
    def __repr__(self) -> str:
        return "DEFAULT_GRAPH"


DEFAULT_GRAPH = DefaultGraph()

Term = Union[Iri, BlankNode, LiteralSimple, LiteralLang, LiteralDt, QuotedTriple, DefaultGraph]
LITERAL_TYPES = (LiteralSimple, LiteralLang, LiteralDt)


def term_equals(a: Term, b: Term) -> bool:
    """Structural, lexical equality (no value-space or isomorphism checks)."""
    return a == b


@dataclass(frozen=True, slots=True)
class Statement:
    subject: Term
    predicate: Term
    object: Term
    graph: Term = DEFAULT_GRAPH

    @property
    def is_triple(self) -> bool:
        return self.graph.__class__ is DefaultGraph


class TermError(ValueError):
    """A term sits in a position where it is not allowed."""


def _check_triple_terms(s: Term, p: Term, o: Term, strict: bool) -> None:
    for pos, t in (("subject", s), ("predicate", p), ("object", o)):
        if t.__class__ is DefaultGraph:
            raise TermError(f"default graph marker in {pos} position")
        if t.__class__ is QuotedTriple:
            _check_triple_terms(t.subject, t.predicate, t.object, strict)
    if strict:
        if s.__class__ not in (Iri, BlankNode, QuotedTriple):
            raise TermError(f"{type(s).__name__} is not a valid RDF subject")
        if p.__class__ is not Iri:
            raise TermError(f"{type(p).__name__} is not a valid RDF predicate")


def check_statement(st: Statement, *, strict: bool = False) -> None:
    """Raise :class:`TermError` if ``st`` is malformed.

    The default graph marker is never allowed outside the graph position.
    With ``strict=True`` the statement must also be plain (non-generalized)
    RDF: subject an IRI, blank node or quoted triple, predicate an IRI,
    graph an IRI, blank node or the default graph.
    """
    _check_triple_terms(st.subject, st.predicate, st.object, strict)
    if strict and st.graph.__class__ not in (Iri, BlankNode, DefaultGraph):
        raise TermError(f"{type(st.graph).__name__} is not a valid graph name")


def is_generalized(st: Statement) -> bool:
    try:
        check_statement(st, strict=True)
    except TermError:
        return True
    return False


# -- patch operations -------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Header:
    key: str
    value: Term

    def __post_init__(self) -> None:
        if not self.key or any(c.isspace() for c in self.key):
            raise ValueError(f"invalid header key {self.key!r}")


@dataclass(frozen=True, slots=True)
class TxBegin:
    def __repr__(self) -> str:
        return "TxBegin()"


@dataclass(frozen=True, slots=True)
class TxCommit:
    def __repr__(self) -> str:
        return "TxCommit()"


@dataclass(frozen=True, slots=True)
class TxAbort:
    def __repr__(self) -> str:
        return "TxAbort()"


TX_BEGIN = TxBegin()
TX_COMMIT = TxCommit()
TX_ABORT = TxAbort()


@dataclass(frozen=True, slots=True)
class Add:
    statement: Statement


@dataclass(frozen=True, slots=True)
class Delete:
    statement: Statement


@dataclass(frozen=True, slots=True)
class PrefixAdd:
    label: str
    iri: str
    graph: Optional[Term] = None


@dataclass(frozen=True, slots=True)
class PrefixDelete:
    label: str
    iri: str = ""
    graph: Optional[Term] = None


PatchOp = Union[Header, TxBegin, TxCommit, TxAbort, Add, Delete, PrefixAdd, PrefixDelete]
Patch = Sequence[PatchOp]


@dataclass(frozen=True, slots=True)
class Violation:
    index: int
    reason: str


def validate_patch_transactions(patch: Iterable[PatchOp], *, strict: bool = False) -> list[Violation]:
    """Check transaction structure; violations are returned, never raised.

    Reason codes: ``nested-begin``, ``commit-without-begin``,
    ``abort-without-begin``, ``unclosed``, and with ``strict=True``
    ``outside-transaction`` for statement and prefix ops outside any
    transaction.  Headers may appear anywhere.
    """
    out: list[Violation] = []
    open_at: Optional[int] = None
    for i, op in enumerate(patch):
        cls = op.__class__
        if cls is TxBegin:
            if open_at is not None:
                out.append(Violation(i, "nested-begin"))
            else:
                open_at = i
        elif cls is TxCommit or cls is TxAbort:
            if open_at is None:
                reason = "commit-without-begin" if cls is TxCommit else "abort-without-begin"
                out.append(Violation(i, reason))
            open_at = None
        elif strict and cls is not Header and open_at is None:
            out.append(Violation(i, "outside-transaction"))
    if open_at is not None:
        out.append(Violation(open_at, "unclosed"))
    return out


class Dataset:
    """A duplicate-free set of statements.

    Compares equal to another Dataset with the same members.  Mutation is
    single-writer; use :meth:`copy` to get an independent value.
    """

    __slots__ = ("_statements",)

    def __init__(self, statements: Iterable[Statement] = ()) -> None:
        self._statements: set[Statement] = set(statements)

    def add(self, st: Statement) -> bool:
        """Insert ``st``; returns False if it was already present."""
        if st in self._statements:
            return False
        self._statements.add(st)
        return True

    def discard(self, st: Statement) -> bool:
        """Remove ``st``; returns False if it was absent."""
        if st in self._statements:
            self._statements.remove(st)
            return True
        return False

    def copy(self) -> "Dataset":
        d = Dataset()
        d._statements = set(self._statements)
        return d

    def __contains__(self, st: object) -> bool:
        return st in self._statements

    def __len__(self) -> int:
        return len(self._statements)

    def __iter__(self) -> Iterator[Statement]:
        return iter(self._statements)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return self._statements == other._statements

    __hash__ = None  # type: ignore[assignment]

    def __sub__(self, other: "Dataset") -> set[Statement]:
        return self._statements - other._statements

    def __repr__(self) -> str:
        return f"Dataset(<{len(self)} statements>)"
