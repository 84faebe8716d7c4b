from hypothesis import given

from rdfpatch import (
    DEFAULT_GRAPH,
    TX_BEGIN,
    TX_COMMIT,
    Add,
    BlankNode,
    Dataset,
    Delete,
    Header,
    Iri,
    LiteralDt,
    LiteralLang,
    LiteralSimple,
    QuotedTriple,
    Statement,
    TermError,
    check_statement,
    diff,
    term_equals,
    validate_patch_transactions,
)
import pytest

from strategies import statements, terms

TEMP = Iri("http://example.org/hasTemperature")
XSD_INT = "http://www.w3.org/2001/XMLSchema#integer"


def test_term_equals_examples():
    assert term_equals(TEMP, TEMP)
    assert term_equals(BlankNode("sensor001"), BlankNode("sensor001"))
    assert not term_equals(LiteralSimple("23"), LiteralDt("23", XSD_INT))
    assert not term_equals(Iri("urn:a"), BlankNode("urn:a"))


def test_lang_tags_compare_case_insensitively_but_keep_spelling():
    a, b = LiteralLang("chat", "en-GB"), LiteralLang("chat", "EN-gb")
    assert a == b and hash(a) == hash(b)
    assert a.lang == "en-GB"
    assert LiteralLang("chat", "en") != LiteralLang("chat", "fr")


def test_literal_equality_is_lexical():
    assert LiteralDt("23", XSD_INT) != LiteralDt("023", XSD_INT)


def test_no_unicode_normalization():
    assert LiteralSimple("é") != LiteralSimple("é")


@given(terms, terms)
def test_equal_terms_hash_equal(a, b):
    assert term_equals(a, a)
    assert term_equals(a, b) == term_equals(b, a)
    if term_equals(a, b):
        assert hash(a) == hash(b)


@given(terms)
def test_quoted_triple_equality_is_structural(t):
    q1 = QuotedTriple(t, TEMP, t)
    q2 = QuotedTriple(t, Iri(TEMP.value), t)
    assert q1 == q2 and hash(q1) == hash(q2)


@given(statements)
def test_dataset_insert_is_idempotent(st):
    d = Dataset()
    assert d.add(st)
    assert not d.add(st)
    assert len(d) == 1 and st in d


def test_default_graph_only_in_graph_position():
    with pytest.raises(TermError):
        check_statement(Statement(DEFAULT_GRAPH, TEMP, LiteralSimple("x")))
    check_statement(Statement(BlankNode("s"), TEMP, LiteralSimple("x")))


def test_strict_rdf_rejects_generalized_terms():
    generalized = Statement(LiteralSimple("s"), BlankNode("p"), TEMP)
    check_statement(generalized)
    with pytest.raises(TermError):
        check_statement(generalized, strict=True)


def test_header_key_must_be_a_token():
    with pytest.raises(ValueError):
        Header("", TEMP)
    with pytest.raises(ValueError):
        Header("a b", TEMP)


def _reasons(patch, **kw):
    return [(v.index, v.reason) for v in validate_patch_transactions(patch, **kw)]


def test_validate_transactions_examples():
    add = Add(Statement(BlankNode("s"), TEMP, LiteralSimple("23")))
    assert _reasons([TX_BEGIN, add, TX_COMMIT]) == []
    assert _reasons([]) == []
    # begin at 1 nests inside the one opened at 0, which is never closed
    assert _reasons([TX_BEGIN, TX_BEGIN]) == [(1, "nested-begin"), (0, "unclosed")]


def test_validate_transactions_strict_flags_bare_ops():
    add = Add(Statement(BlankNode("s"), TEMP, LiteralSimple("23")))
    assert _reasons([add]) == []
    assert _reasons([add], strict=True) == [(0, "outside-transaction")]
    assert _reasons([TX_COMMIT]) == [(0, "commit-without-begin")]


@given(statements, statements)
def test_diff_output_is_well_formed(a, b):
    patch = diff(Dataset([a]), Dataset([b]))
    assert validate_patch_transactions(patch, strict=True) == []
    assert all(isinstance(op, (Add, Delete)) for op in patch[1:-1])
