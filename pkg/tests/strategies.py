"""Hypothesis strategies for terms, statements and patches."""
from hypothesis import strategies as st

from rdfpatch import (
    DEFAULT_GRAPH,
    TX_ABORT,
    TX_BEGIN,
    TX_COMMIT,
    Add,
    BlankNode,
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
)

text = st.text(st.characters(blacklist_categories=("Cs",)), max_size=12)
iris = st.builds(Iri, st.sampled_from(["http://ex.org/", "http://ex.org/a#", "urn:", ""]).flatmap(
    lambda base: text.map(lambda s: base + s)))
bnodes = st.builds(BlankNode, st.from_regex(r"[A-Za-z0-9_é]([A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?", fullmatch=True))
langs = st.from_regex(r"[a-zA-Z]{1,8}(-[a-zA-Z0-9]{1,8}){0,2}", fullmatch=True)
literals = st.one_of(
    st.builds(LiteralSimple, text),
    st.builds(LiteralLang, text, langs),
    st.builds(LiteralDt, text, st.sampled_from(["http://www.w3.org/2001/XMLSchema#integer", "urn:dt"])),
)
atoms = st.one_of(iris, bnodes, literals)
terms = st.recursive(atoms, lambda inner: st.builds(QuotedTriple, inner, inner, inner), max_leaves=6)
graphs = st.one_of(st.just(DEFAULT_GRAPH), iris, bnodes)
statements = st.builds(Statement, terms, terms, terms, graphs)

ops = st.one_of(
    st.builds(Add, statements),
    st.builds(Delete, statements),
    st.sampled_from([TX_BEGIN, TX_COMMIT, TX_ABORT]),
    st.builds(Header, st.from_regex(r"[A-Za-z][A-Za-z0-9.\-]{0,6}", fullmatch=True), terms),
    st.builds(PrefixAdd, st.from_regex(r"[a-z]{0,4}", fullmatch=True), iris.map(lambda i: i.value)),
    st.builds(PrefixDelete, st.from_regex(r"[a-z]{0,4}", fullmatch=True)),
)
patches = st.lists(ops, max_size=20)
