"""
Tests for the N-Triples reader and writer.
"""

import io
import os
import random

import pytest

from modules.rdf.ntriples import (
    NTriplesSyntaxError, ParseDiagnostic, dumps, parse_line, parse_stream, read_ntriples,
    serialize, write_ntriples
)
from modules.rdf.terms import Triple, blank, iri, literal

from tests.conftest import MAG, MAGAZINE_NT, ROOT, mag


def test_magazine_fixture_parses(magazine_triples):
    assert len(magazine_triples) == 25
    assert magazine_triples[0] == Triple(
        mag("B1"), iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#Type"), mag("Article"))
    assert magazine_triples[-1] == Triple(mag("cy"), mag("Name"), literal("Cyprus"))


def test_comments_and_blank_lines_are_skipped():
    text = "# header\n\n<http://x/a> <http://x/p> <http://x/b> . # trailing\n   \n"
    result = parse_stream(io.StringIO(text))
    assert result.triples == [Triple(iri("http://x/a"), iri("http://x/p"), iri("http://x/b"))]
    assert result.diagnostics == []


def test_blank_nodes_and_escapes():
    line = '_:b1 <http://x/p> "tab\\there \\"quoted\\" \\u00e9" .'
    triple = parse_line(line)
    assert triple == Triple(blank("b1"), iri("http://x/p"), literal('tab\there "quoted" é'))


def test_datatype_and_language_are_dropped():
    typed = parse_line('<http://x/a> <http://x/p> "5"^^<http://www.w3.org/2001/XMLSchema#int> .')
    tagged = parse_line('<http://x/a> <http://x/p> "five"@en-GB .')
    assert typed.o == literal("5")
    assert tagged.o == literal("five")


def test_strict_mode_raises_at_first_bad_line():
    text = "<http://x/a> <http://x/p> <http://x/b> .\n<http://x/a> <http://x/p> .\n"
    with pytest.raises(NTriplesSyntaxError) as info:
        parse_stream(io.StringIO(text), strict=True)
    assert info.value.diagnostic.line_number == 2


def test_lenient_mode_collects_diagnostics():
    text = ('<http://x/a> <http://x/p> <http://x/b> .\n'
            '<http://x/a> "lit" <http://x/b> .\n'
            '<http://x/c> <http://x/p> "ok" .\n')
    result = parse_stream(io.StringIO(text), strict=False)
    assert len(result.triples) == 2
    assert result.diagnostics == [ParseDiagnostic(2, 13, "predicate must be an <iri>")]


def test_missing_dot_is_reported():
    diagnostic = parse_line('<http://x/a> <http://x/p> <http://x/b>', 4)
    assert isinstance(diagnostic, ParseDiagnostic)
    assert diagnostic.line_number == 4
    assert "'.'" in diagnostic.message


def test_literal_subject_is_rejected():
    assert isinstance(parse_line('"a" <http://x/p> <http://x/b> .'), ParseDiagnostic)


def test_invalid_utf8_in_lenient_mode():
    data = b'<http://x/a> <http://x/p> "\xff" .\n<http://x/a> <http://x/p> "ok" .\n'
    result = parse_stream(io.BytesIO(data), strict=False)
    assert len(result.triples) == 1
    assert result.diagnostics[0].message == "invalid UTF-8"


def test_serialize_escapes_literals():
    triple = Triple(iri("http://x/a"), iri("http://x/p"), literal('line\nbreak "q" \\'))
    assert serialize(triple) == '<http://x/a> <http://x/p> "line\\nbreak \\"q\\" \\\\" .'
    assert parse_line(serialize(triple)) == triple


def test_write_then_read_keeps_order(tmp_path, magazine_triples):
    path = str(tmp_path / "out" / "copy.nt")
    assert write_ntriples(magazine_triples, path) == 25
    assert read_ntriples(path).triples == magazine_triples


def test_dumps_matches_fixture_file(magazine_triples):
    with open(MAGAZINE_NT, 'r', encoding='utf-8') as f:
        assert dumps(magazine_triples) == f.read()


def test_read_missing_file():
    with pytest.raises(FileNotFoundError):
        read_ntriples("/nonexistent/data.nt")


TEXT_CHARS = (
    [chr(c) for c in range(0x20)] + ['\x7f', ' ', '"', '\\', '<', '>', '{', '}', '|', '^', '`', '#', '.']
    + list("azAZ09/:?&=%-_~") + ['é', '中', '\U0001F600', '\U00010348']
)
LABEL_START = list("abzAZ09_") + ['é', '中']
LABEL_MIDDLE = LABEL_START + ['-', '.']
LABEL_END = LABEL_START + ['-']


def random_text(rng, low, high):
    return ''.join(rng.choice(TEXT_CHARS) for _ in range(rng.randint(low, high)))


def random_label(rng):
    label = rng.choice(LABEL_START)
    if rng.random() < 0.7:
        label += ''.join(rng.choice(LABEL_MIDDLE) for _ in range(rng.randint(0, 6)))
        label += rng.choice(LABEL_END)
    return label


def random_term(rng, kinds):
    kind = rng.choice(kinds)
    if kind == 'iri':
        return iri(rng.choice(["http://example.org/", "urn:", ""]) + random_text(rng, 1, 12))
    if kind == 'blank':
        return blank(random_label(rng))
    return literal(random_text(rng, 0, 16))


@pytest.mark.parametrize("seed", range(2))
def test_serialize_then_parse_is_identity(seed):
    rng = random.Random(seed)
    for _ in range(10_000):
        triple = Triple(random_term(rng, ('iri', 'blank')), random_term(rng, ('iri',)),
                        random_term(rng, ('iri', 'blank', 'literal')))
        line = serialize(triple)
        assert '\n' not in line and '\r' not in line
        assert parse_line(line) == triple, line


@pytest.mark.parametrize("label", ["a.b", "x-", "9", "n.1.-z"])
def test_dotted_blank_labels_round_trip(label):
    triple = Triple(blank(label), iri("http://example.org/p"), blank(label))
    assert parse_line(serialize(triple)) == triple


def test_fixture_base_iri_is_documented(magazine_triples):
    terms = {term for t in magazine_triples for term in (t.s, t.p, t.o) if term.is_iri}
    outside = {term.lexical for term in terms if not term.lexical.startswith(MAG)}
    assert outside == {"http://www.w3.org/1999/02/22-rdf-syntax-ns#Type"}
    with open(os.path.join(ROOT, 'docs', 'QUERIES.md'), encoding='utf-8') as f:
        assert f"base IRI `{MAG}`" in f.read()
