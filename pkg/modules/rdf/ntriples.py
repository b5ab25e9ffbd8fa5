"""
N-Triples reader and writer for RMTT-Workbench.
Parses line-oriented N-Triples into Triple objects and serializes them back.
"""

import io
import os
import re
import logging
from dataclasses import dataclass
from typing import BinaryIO, Iterable, Iterator, List, NamedTuple, Optional, TextIO, Union

from modules.rdf.terms import BLANK_LABEL_RE, Term, TermKind, Triple

logger = logging.getLogger(__name__)

_IRI_RE = re.compile(r'<((?:[^<>"{}|^`\\\x00-\x20]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*)>')
_BLANK_RE = re.compile(f"_:({BLANK_LABEL_RE.pattern})")
_STRING_RE = re.compile(r'"((?:[^"\\\n\r]|\\[tbnrf"\'\\]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*)"')
_LANGTAG_RE = re.compile(r'@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*')
_UNESCAPE_RE = re.compile(r'\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|[tbnrf"\'\\])')

_SIMPLE_UNESCAPES = {
    't': '\t',
    'b': '\b',
    'n': '\n',
    'r': '\r',
    'f': '\f',
    '"': '"',
    "'": "'",
    '\\': '\\',
}


@dataclass(frozen=True)
class ParseDiagnostic:
    """Position and reason for a line that could not be parsed."""
    line_number: int
    byte_offset: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line_number}, byte {self.byte_offset}: {self.message}"


class NTriplesSyntaxError(ValueError):
    """Raised in strict mode at the first malformed line."""

    def __init__(self, diagnostic: ParseDiagnostic):
        super().__init__(str(diagnostic))
        self.diagnostic = diagnostic


class ParseResult(NamedTuple):
    """Triples in file order plus diagnostics for skipped lines."""
    triples: List[Triple]
    diagnostics: List[ParseDiagnostic]


def unescape_string(value: str) -> str:
    def replace(match):
        code = match.group(1)
        if code[0] in 'uU':
            return chr(int(code[1:], 16))
        return _SIMPLE_UNESCAPES[code]
    return _UNESCAPE_RE.sub(replace, value)


class _LineScanner:
    """Cursor over a single N-Triples line."""

    def __init__(self, line: str, line_number: int):
        self.line = line
        self.line_number = line_number
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.line) and self.line[self.pos] in ' \t':
            self.pos += 1

    def at_end(self) -> bool:
        return self.pos >= len(self.line)

    def peek(self) -> str:
        return self.line[self.pos] if self.pos < len(self.line) else ''

    def error(self, message: str) -> ParseDiagnostic:
        offset = len(self.line[:self.pos].encode('utf-8'))
        return ParseDiagnostic(self.line_number, offset, message)

    def read_iri(self) -> Optional[Term]:
        match = _IRI_RE.match(self.line, self.pos)
        if not match:
            return None
        value = unescape_string(match.group(1))
        if not value:
            return None
        self.pos = match.end()
        return Term(TermKind.IRI, value)

    def read_blank(self) -> Optional[Term]:
        match = _BLANK_RE.match(self.line, self.pos)
        if not match:
            return None
        self.pos = match.end()
        return Term(TermKind.BLANK_NODE, match.group(1))

    def read_literal(self) -> Optional[Term]:
        match = _STRING_RE.match(self.line, self.pos)
        if not match:
            return None
        self.pos = match.end()
        value = unescape_string(match.group(1))

        # Datatype and language annotations are accepted and dropped
        if self.line.startswith('^^', self.pos):
            self.pos += 2
            if self.read_iri() is None:
                return None
            logger.debug(f"Line {self.line_number}: dropped literal datatype")
        elif self.peek() == '@':
            tag = _LANGTAG_RE.match(self.line, self.pos)
            if not tag:
                return None
            self.pos = tag.end()
            logger.debug(f"Line {self.line_number}: dropped literal language tag")
        return Term(TermKind.LITERAL, value)


def parse_line(line: str, line_number: int = 1) -> Union[Triple, None, ParseDiagnostic]:
    """
    Parse one physical N-Triples line.

    Args:
        line: Line content without the trailing newline
        line_number: 1-based line number used in diagnostics

    Returns:
        Triple for a statement, None for a blank or comment line,
        ParseDiagnostic for a malformed line
    """
    scanner = _LineScanner(line.rstrip('\r\n'), line_number)
    scanner.skip_ws()
    if scanner.at_end() or scanner.peek() == '#':
        return None

    # Subject
    if scanner.peek() == '<':
        subject = scanner.read_iri()
    elif scanner.peek() == '_':
        subject = scanner.read_blank()
    else:
        return scanner.error("missing subject (expected <iri> or _:label)")
    if subject is None:
        return scanner.error("malformed subject")
    scanner.skip_ws()

    # Predicate
    if scanner.at_end():
        return scanner.error("missing predicate")
    if scanner.peek() != '<':
        return scanner.error("predicate must be an <iri>")
    predicate = scanner.read_iri()
    if predicate is None:
        return scanner.error("malformed predicate")
    scanner.skip_ws()

    # Object
    if scanner.at_end() or scanner.peek() in '.#':
        return scanner.error("missing object")
    start = scanner.peek()
    if start == '<':
        obj = scanner.read_iri()
    elif start == '_':
        obj = scanner.read_blank()
    elif start == '"':
        obj = scanner.read_literal()
    else:
        return scanner.error("object must be an <iri>, _:label or \"literal\"")
    if obj is None:
        return scanner.error("malformed object")
    scanner.skip_ws()

    # Terminal dot, then only whitespace or a comment
    if scanner.peek() != '.':
        return scanner.error("expected '.' at end of statement")
    scanner.pos += 1
    scanner.skip_ws()
    if not scanner.at_end() and scanner.peek() != '#':
        return scanner.error("unexpected content after '.'")

    return Triple(subject, predicate, obj)


def iter_triples(stream: Union[BinaryIO, TextIO, Iterable], strict: bool = True,
                 diagnostics: Optional[List[ParseDiagnostic]] = None) -> Iterator[Triple]:
    """
    Stream triples from an N-Triples source in file order.

    Args:
        stream: Binary or text stream (or any iterable of lines)
        strict: Raise at the first malformed line instead of skipping it
        diagnostics: List that receives diagnostics for skipped lines

    Yields:
        Triple: Parsed triples

    Raises:
        NTriplesSyntaxError: In strict mode, for the first malformed line
    """
    for line_number, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            try:
                line = raw.decode('utf-8')
            except UnicodeDecodeError as e:
                result = ParseDiagnostic(line_number, e.start, "invalid UTF-8")
                line = None
        else:
            line = raw
        if line is not None:
            result = parse_line(line.rstrip('\r\n'), line_number)

        if result is None:
            continue
        if isinstance(result, ParseDiagnostic):
            if strict:
                raise NTriplesSyntaxError(result)
            logger.warning(f"Skipping malformed N-Triples line: {result}")
            if diagnostics is not None:
                diagnostics.append(result)
            continue
        yield result


def parse_stream(stream: Union[BinaryIO, TextIO, Iterable], strict: bool = True) -> ParseResult:
    """
    Parse an entire N-Triples stream.

    Args:
        stream: Binary or text stream
        strict: Raise at the first malformed line instead of collecting it

    Returns:
        ParseResult: Triples in file order and diagnostics for skipped lines
    """
    diagnostics: List[ParseDiagnostic] = []
    triples = list(iter_triples(stream, strict=strict, diagnostics=diagnostics))
    return ParseResult(triples, diagnostics)


def serialize(triple: Triple) -> str:
    """
    Serialize a triple as one N-Triples line (without newline).

    Args:
        triple: Triple to serialize

    Returns:
        str: N-Triples statement
    """
    return f"{triple.s.n3()} {triple.p.n3()} {triple.o.n3()} ."


def read_ntriples(path: str, strict: bool = True) -> ParseResult:
    """
    Parse an N-Triples file.

    Args:
        path: Path to a .nt file
        strict: Raise at the first malformed line instead of collecting it

    Returns:
        ParseResult: Triples and diagnostics
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"File not found: {path}")
    with open(path, 'rb') as f:
        result = parse_stream(f, strict=strict)
    logger.info(f"Parsed {len(result.triples)} triples from {path}"
                f"{f' ({len(result.diagnostics)} lines skipped)' if result.diagnostics else ''}")
    return result


def write_ntriples(triples: Iterable[Triple], path_or_stream: Union[str, TextIO]) -> int:
    """
    Write triples one statement per line in the given order.

    Args:
        triples: Triples to write
        path_or_stream: Output path or text stream

    Returns:
        int: Number of statements written
    """
    if isinstance(path_or_stream, (str, os.PathLike)):
        directory = os.path.dirname(os.path.abspath(path_or_stream))
        os.makedirs(directory, exist_ok=True)
        with open(path_or_stream, 'w', encoding='utf-8', newline='\n') as f:
            return write_ntriples(triples, f)

    count = 0
    for triple in triples:
        path_or_stream.write(serialize(triple))
        path_or_stream.write('\n')
        count += 1
    return count


def dumps(triples: Iterable[Triple]) -> str:
    """Serialize triples to an N-Triples document string."""
    buffer = io.StringIO()
    write_ntriples(triples, buffer)
    return buffer.getvalue()
