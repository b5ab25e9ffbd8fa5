"""
SPARQL basic graph pattern parser for RMTT-Workbench.

Handles PREFIX declarations, SELECT with a variable list or *, and one WHERE
block of triple patterns. Tolerant mode (the default) also accepts the
deviations found in hand-copied benchmark listings: bare http:// IRIs,
commas between pattern terms, whitespace broken into <...> IRIs and
SELECT DISTINCT.
"""

import os
import re
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Mapping, NamedTuple, Optional

from modules.index.perm_index import TriplePattern
from modules.rdf.dictionary import Dictionary
from modules.rdf.terms import Term, TermId, TermKind

logger = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r'''
    (?P<WS>\s+)
  | (?P<COMMENT>\#[^\n]*)
  | (?P<IRIREF><[^<>"{}|^`\\]*>)
  | (?P<BARE>https?://[^\s{}<>",]+)
  | (?P<PNAME>(?:[A-Za-z](?:[\w\-.]*[\w\-])?)?:(?:[\w\-]+(?:\.[\w\-]+)*)?)
  | (?P<VAR>[?$][A-Za-z_][A-Za-z0-9_]*)
  | (?P<STRING>"(?:[^"\\\n]|\\.)*")
  | (?P<NUMBER>[+-]?\d+(?:\.\d+)?)
  | (?P<KEYWORD>[A-Za-z]+)
  | (?P<PUNCT>[{}.,*])
''', re.VERBOSE)

_STRING_ESCAPES = {'t': '\t', 'n': '\n', 'r': '\r', 'b': '\b', 'f': '\f', '"': '"', "'": "'", '\\': '\\'}


class QueryParseError(ValueError):
    """Raised for a query that cannot be parsed, positioned at line and column (1-based)."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class PatternTermKind(Enum):
    VAR = "Var"
    IRI = "Iri"
    LITERAL = "Literal"


@dataclass(frozen=True)
class PatternTerm:
    """One position of a query pattern: a variable name or a constant's lexical form."""
    kind: PatternTermKind
    value: str

    @classmethod
    def var(cls, name: str) -> 'PatternTerm':
        return cls(PatternTermKind.VAR, name)

    @classmethod
    def iri(cls, value: str) -> 'PatternTerm':
        return cls(PatternTermKind.IRI, value)

    @classmethod
    def literal(cls, value: str) -> 'PatternTerm':
        return cls(PatternTermKind.LITERAL, value)

    @property
    def is_var(self) -> bool:
        return self.kind == PatternTermKind.VAR

    def to_term(self) -> Term:
        """Dictionary term of a constant."""
        if self.kind == PatternTermKind.IRI:
            return Term(TermKind.IRI, self.value)
        if self.kind == PatternTermKind.LITERAL:
            return Term(TermKind.LITERAL, self.value)
        raise ValueError(f"Variable ?{self.value} has no dictionary term")

    def __str__(self) -> str:
        if self.is_var:
            return f"?{self.value}"
        return self.to_term().n3()


class QueryPattern(NamedTuple):
    """A triple pattern of the WHERE block."""
    s: PatternTerm
    p: PatternTerm
    o: PatternTerm

    @property
    def variables(self) -> List[str]:
        """Variable names in s, p, o order, without repeats."""
        return list(dict.fromkeys(t.value for t in self if t.is_var))

    def __str__(self) -> str:
        return f"{self.s} {self.p} {self.o}"


@dataclass
class BgpQuery:
    """A parsed basic graph pattern query."""
    prefixes: Dict[str, str]
    select_vars: List[str]
    patterns: List[QueryPattern]
    select_all: bool = False
    distinct: bool = False
    text: str = field(default='', repr=False)

    @property
    def variables(self) -> List[str]:
        """Every variable in first-occurrence order."""
        names: Dict[str, None] = {}
        for pattern in self.patterns:
            for name in pattern.variables:
                names.setdefault(name)
        return list(names)

    @property
    def projection(self) -> List[str]:
        """Variables of the result rows."""
        return self.variables if self.select_all else list(self.select_vars)


class _Token(NamedTuple):
    kind: str
    text: str
    pos: int


class _Parser:
    """Recursive descent over the token stream of one query."""

    def __init__(self, text: str, tolerant: bool):
        self.text = text
        self.tolerant = tolerant
        self.tokens = list(self._tokenize())
        self.index = 0
        self.prefixes: Dict[str, str] = {}

    # Positions and errors

    def position(self, pos: int):
        line = self.text.count('\n', 0, pos) + 1
        column = pos - (self.text.rfind('\n', 0, pos) + 1) + 1
        return line, column

    def error(self, message: str, pos: Optional[int] = None) -> QueryParseError:
        if pos is None:
            pos = self.peek().pos if self.peek() else len(self.text)
        line, column = self.position(pos)
        return QueryParseError(message, line, column)

    def tolerate(self, message: str, pos: int):
        """Accept a deviation in tolerant mode, reject it otherwise."""
        if not self.tolerant:
            raise self.error(message, pos)
        line, column = self.position(pos)
        logger.warning(f"Tolerated query deviation at line {line}, column {column}: {message}")

    # Tokens

    def _tokenize(self) -> Iterator[_Token]:
        pos = 0
        while pos < len(self.text):
            match = _TOKEN_RE.match(self.text, pos)
            if not match:
                raise self.error(f"unexpected character {self.text[pos]!r}", pos)
            kind = match.lastgroup
            end = match.end()
            if kind == 'BARE':
                # A trailing dot terminates the statement, not the IRI
                value = match.group().rstrip('.')
                end = pos + len(value)
            if kind not in ('WS', 'COMMENT'):
                yield _Token(kind, self.text[pos:end], pos)
            pos = end

    def peek(self) -> Optional[_Token]:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def advance(self) -> _Token:
        token = self.peek()
        if token is None:
            raise self.error("unexpected end of query", len(self.text))
        self.index += 1
        return token

    def at_keyword(self, word: str) -> bool:
        token = self.peek()
        return token is not None and token.kind == 'KEYWORD' and token.text.upper() == word

    def at_punct(self, char: str) -> bool:
        token = self.peek()
        return token is not None and token.kind == 'PUNCT' and token.text == char

    def expect_punct(self, char: str, message: str) -> _Token:
        if not self.at_punct(char):
            raise self.error(message)
        return self.advance()

    # Grammar

    def parse(self) -> BgpQuery:
        while self.at_keyword('PREFIX'):
            self.parse_prefix()

        if not self.at_keyword('SELECT'):
            raise self.error("expected SELECT")
        select = self.advance()

        distinct = False
        if self.at_keyword('DISTINCT'):
            self.tolerate("SELECT DISTINCT is outside the supported subset", self.peek().pos)
            self.advance()
            distinct = True

        select_all = False
        select_vars: List[_Token] = []
        if self.at_punct('*'):
            self.advance()
            select_all = True
        else:
            while True:
                token = self.peek()
                if token is not None and token.kind == 'VAR':
                    select_vars.append(self.advance())
                elif token is not None and token.kind == 'PUNCT' and token.text == ',' and select_vars:
                    self.advance()
                else:
                    break
            if not select_vars:
                raise self.error("expected '*' or a variable after SELECT")

        if self.at_keyword('WHERE'):
            self.advance()
        opening = self.expect_punct('{', "expected '{' to open the WHERE block")
        patterns = self.parse_block(opening)

        if self.peek() is not None:
            raise self.error("unexpected content after the WHERE block")

        used = {name for pattern in patterns for name in pattern.variables}
        names = []
        for token in select_vars:
            name = token.text[1:]
            if name not in used:
                raise self.error(f"selected variable ?{name} does not occur in the WHERE block", token.pos)
            if name not in names:
                names.append(name)

        logger.debug(f"Parsed query: {len(patterns)} patterns, select "
                     f"{'*' if select_all else ' '.join('?' + n for n in names)}")
        return BgpQuery(dict(self.prefixes), names, patterns, select_all=select_all,
                        distinct=distinct, text=self.text)

    def parse_prefix(self):
        self.advance()
        token = self.advance()
        if token.kind != 'PNAME' or not token.text.endswith(':'):
            raise self.error("expected a prefix name such as 'ub:' after PREFIX", token.pos)
        iri = self.advance()
        if iri.kind != 'IRIREF':
            raise self.error("expected <iri> in PREFIX declaration", iri.pos)
        self.prefixes[token.text[:-1]] = self.read_iriref(iri)

    def parse_block(self, opening: _Token) -> List[QueryPattern]:
        patterns: List[QueryPattern] = []
        while True:
            if self.peek() is None:
                line, column = self.position(opening.pos)
                raise self.error(f"unterminated '{{' block opened at line {line}, column {column}",
                                 len(self.text))
            if self.at_punct('}'):
                closing = self.advance()
                break
            terms = []
            for _ in range(3):
                self.skip_commas()
                terms.append(self.parse_term(len(terms)))
            patterns.append(QueryPattern(*terms))
            self.skip_commas()
            if self.at_punct('.'):
                self.advance()
            elif not self.at_punct('}') and self.peek() is not None:
                raise self.error("expected '.' or '}' after a triple pattern")

        if not patterns:
            raise self.error("empty WHERE block", closing.pos)
        return patterns

    def skip_commas(self):
        while self.at_punct(','):
            self.tolerate("comma between pattern terms", self.peek().pos)
            self.advance()

    def parse_term(self, position: int) -> PatternTerm:
        token = self.peek()
        if token is None:
            raise self.error("unexpected end of query inside a triple pattern", len(self.text))
        if token.kind == 'PUNCT' and token.text in '.}':
            raise self.error("incomplete triple pattern")
        self.advance()

        if token.kind == 'VAR':
            return PatternTerm.var(token.text[1:])
        if token.kind == 'IRIREF':
            return PatternTerm.iri(self.read_iriref(token))
        if token.kind == 'BARE':
            self.tolerate(f"IRI without angle brackets: {token.text}", token.pos)
            return PatternTerm.iri(token.text)
        if token.kind == 'PNAME':
            prefix, _, local = token.text.partition(':')
            if prefix not in self.prefixes:
                raise self.error(f"undeclared prefix '{prefix}:'", token.pos)
            return PatternTerm.iri(self.prefixes[prefix] + local)
        if token.kind in ('STRING', 'NUMBER'):
            if position != 2:
                raise self.error("literal is only allowed in object position", token.pos)
            value = token.text
            if token.kind == 'STRING':
                value = re.sub(r'\\(.)', lambda m: _STRING_ESCAPES.get(m.group(1), m.group(1)), value[1:-1])
            return PatternTerm.literal(value)
        raise self.error(f"unexpected {token.text!r} in triple pattern", token.pos)

    def read_iriref(self, token: _Token) -> str:
        value = token.text[1:-1]
        if re.search(r'\s', value):
            self.tolerate("whitespace inside <iri>", token.pos)
            value = re.sub(r'\s+', '', value)
        if not value:
            raise self.error("empty <iri>", token.pos)
        return value


def parse_query(text: str, tolerant: bool = True) -> BgpQuery:
    """
    Parse a SPARQL basic graph pattern query.

    Args:
        text: Query text
        tolerant: Accept listing deviations (bare IRIs, stray commas, broken IRIs, DISTINCT)

    Returns:
        BgpQuery: Parsed query

    Raises:
        QueryParseError: With line and column of the first problem
    """
    return _Parser(text, tolerant).parse()


def parse_query_file(path: str, tolerant: bool = True) -> BgpQuery:
    """Parse a UTF-8 .rq file."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"Query file not found: {path}")
    with open(path, 'r', encoding='utf-8') as f:
        return parse_query(f.read(), tolerant=tolerant)


def pattern_to_triple_pattern(pattern: QueryPattern, dictionary: Dictionary,
                              bindings: Optional[Mapping[str, TermId]] = None) -> TriplePattern:
    """
    Translate a query pattern into an encoded TriplePattern.

    Args:
        pattern: Query pattern
        dictionary: Store dictionary
        bindings: Variables already bound to term ids

    Returns:
        TriplePattern: Encoded pattern, or the match-nothing pattern when a
        constant is unknown to the dictionary
    """
    bindings = bindings or {}
    values = []
    for term in pattern:
        if term.is_var:
            values.append(bindings.get(term.value))
            continue
        term_id = dictionary.lookup(term.to_term())
        if term_id is None:
            return TriplePattern.nothing()
        values.append(term_id)
    return TriplePattern(*values)
