"""
Tests for the SPARQL basic graph pattern parser.
"""

import os

import pytest

from modules.query.sparql_parser import (
    PatternTerm, QueryParseError, parse_query, parse_query_file, pattern_to_triple_pattern
)
from modules.rdf.dictionary import Dictionary, encode_stream

from tests.conftest import LUBM_QUERIES, MAG

UB = "http://www.lehigh.edu/~zhp2/2004/0401/univ-bench.owl#"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

LUBM_PATTERN_COUNTS = [2, 6, 2, 5, 2, 1, 4, 5, 6, 2, 2, 4, 2, 1]


def lubm_path(number: int) -> str:
    return os.path.join(LUBM_QUERIES, f"q{number:02d}.rq")


@pytest.mark.parametrize("number, expected", list(zip(range(1, 15), LUBM_PATTERN_COUNTS)))
def test_benchmark_listings_parse_in_tolerant_mode(number, expected):
    query = parse_query_file(lubm_path(number))
    assert len(query.patterns) == expected
    assert query.prefixes['ub'] == UB


def test_broken_namespace_iri_is_rejected_in_strict_mode():
    with pytest.raises(QueryParseError) as info:
        parse_query_file(lubm_path(1), tolerant=False)
    assert (info.value.line, info.value.column) == (2, 12)


def test_bare_iri_before_closing_brace():
    query = parse_query_file(lubm_path(1))
    assert query.patterns[1].o == PatternTerm.iri("http://www.Department0.University0.edu/GraduateCourse0")
    assert query.patterns[0].p == PatternTerm.iri(RDF_TYPE)
    assert query.patterns[0].o == PatternTerm.iri(UB + "GraduateStudent")


def test_commas_between_terms():
    query = parse_query_file(lubm_path(7))
    assert query.patterns[3] == (
        PatternTerm.iri("http://www.Department0.University0.edu/AssociateProfessor0"),
        PatternTerm.iri(UB + "teacherOf"),
        PatternTerm.var("Y"),
    )
    assert query.select_vars == ["X", "Y"]


def test_comma_separated_projection():
    query = parse_query_file(lubm_path(4))
    assert query.select_vars == ["X", "Y1", "Y2", "Y3"]
    assert query.projection == ["X", "Y1", "Y2", "Y3"]


def test_empty_prefix(magazine_queries):
    query = magazine_queries['q1']
    assert query.patterns[0].s == PatternTerm.iri(MAG + "B1")
    assert query.patterns[0].p == PatternTerm.iri(MAG + "Title")
    assert query.select_vars == ["O"]


def test_literal_object(magazine_queries):
    query = magazine_queries['q3']
    assert query.patterns[0].o == PatternTerm.literal("University of Malta")
    assert query.variables == ["U", "A", "B"]
    assert query.projection == ["B", "A"]


def test_select_star_projects_every_variable():
    query = parse_query("SELECT * WHERE { ?s <http://x/p> ?o . ?o <http://x/q> ?z }")
    assert query.select_all
    assert query.projection == ["s", "o", "z"]


def test_where_keyword_is_optional():
    query = parse_query("SELECT ?x { ?x <http://x/p> 42 }")
    assert query.patterns[0].o == PatternTerm.literal("42")


def test_string_escapes():
    query = parse_query('SELECT ?x WHERE { ?x <http://x/p> "a \\"b\\"" }')
    assert query.patterns[0].o == PatternTerm.literal('a "b"')


def test_distinct_depends_on_mode():
    text = "SELECT DISTINCT ?x WHERE { ?x <http://x/p> ?y }"
    assert parse_query(text).distinct
    with pytest.raises(QueryParseError):
        parse_query(text, tolerant=False)


def test_comments_are_ignored():
    query = parse_query("# find things\nSELECT ?x WHERE {\n  ?x <http://x/p> ?y # note\n}")
    assert len(query.patterns) == 1


@pytest.mark.parametrize("text, fragment", [
    ("SELECT ?x WHERE { }", "empty WHERE block"),
    ("SELECT ?x WHERE { ?x <http://x/p> ?y", "unterminated"),
    ("SELECT ?x WHERE { ?x foo:bar ?y }", "undeclared prefix 'foo:'"),
    ('SELECT ?x WHERE { "lit" <http://x/p> ?x }', "object position"),
    ("SELECT ?z WHERE { ?x <http://x/p> ?y }", "?z does not occur"),
    ("?x WHERE { ?x <http://x/p> ?y }", "expected SELECT"),
    ("SELECT WHERE { ?x <http://x/p> ?y }", "after SELECT"),
    ("SELECT ?x WHERE { ?x <http://x/p> }", "incomplete triple pattern"),
    ("SELECT ?x WHERE { ?x <http://x/p> ?y } LIMIT", "after the WHERE block"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(QueryParseError) as info:
        parse_query(text)
    assert fragment in str(info.value)


def test_error_position():
    with pytest.raises(QueryParseError) as info:
        parse_query("SELECT ?x WHERE {\n  ?x foo:bar ?y }")
    assert (info.value.line, info.value.column) == (2, 6)


def test_missing_query_file():
    with pytest.raises(FileNotFoundError):
        parse_query_file("/nonexistent/q.rq")


def test_translation_to_encoded_pattern(magazine_triples, magazine_queries):
    dictionary = Dictionary()
    encode_stream(dictionary, magazine_triples)
    pattern = magazine_queries['q2'].patterns[0]
    encoded = pattern_to_triple_pattern(pattern, dictionary)
    assert encoded.s == dictionary.lookup(pattern.s.to_term())
    assert encoded.o is None
    assert not encoded.empty


def test_unknown_constant_translates_to_empty_pattern(magazine_triples):
    dictionary = Dictionary()
    encode_stream(dictionary, magazine_triples)
    query = parse_query(f"SELECT ?x WHERE {{ ?x <{MAG}Publisher> ?y }}")
    assert pattern_to_triple_pattern(query.patterns[0], dictionary).empty
    assert len(dictionary) == 29
