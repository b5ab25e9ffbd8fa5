"""
RDF term model for RMTT-Workbench.
Defines lexical terms, triples and their integer-encoded form.
"""

import re
import logging
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

logger = logging.getLogger(__name__)

# Dense dictionary id of a term
TermId = int


class TermKind(Enum):
    """Kinds of RDF terms."""
    IRI = "IRI"
    LITERAL = "Literal"
    BLANK_NODE = "BlankNode"


# Blank node labels that N-Triples can read back
BLANK_LABEL_RE = re.compile(r'[\w](?:[\w\-.]*[\w\-])?')

# Characters that must be escaped inside N-Triples strings and IRIs
_STRING_ESCAPES = {
    '\\': '\\\\',
    '"': '\\"',
    '\n': '\\n',
    '\r': '\\r',
    '\t': '\\t',
    '\b': '\\b',
    '\f': '\\f',
}


def escape_string(value: str) -> str:
    """
    Escape a literal value for N-Triples output.

    Control characters without a short escape are written as \\uXXXX.

    Args:
        value: Raw literal value

    Returns:
        str: Escaped value (without surrounding quotes)
    """
    out = []
    for ch in value:
        if ch in _STRING_ESCAPES:
            out.append(_STRING_ESCAPES[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return ''.join(out)


def escape_iri(value: str) -> str:
    """
    Escape characters that cannot appear raw between angle brackets.

    Args:
        value: IRI string

    Returns:
        str: Escaped IRI
    """
    out = []
    for ch in value:
        if ch in '<>"{}|^`\\' or ord(ch) <= 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return ''.join(out)


@dataclass(frozen=True)
class Term:
    """A lexical RDF term. Literals carry no datatype or language tag."""
    kind: TermKind
    lexical: str

    def __post_init__(self):
        if not isinstance(self.kind, TermKind):
            raise ValueError(f"Invalid term kind: {self.kind!r}")
        if self.kind is not TermKind.LITERAL and not self.lexical:
            raise ValueError(f"{self.kind.value} term must have a non-empty lexical form")
        if self.kind is TermKind.BLANK_NODE and not BLANK_LABEL_RE.fullmatch(self.lexical):
            raise ValueError(f"Invalid blank node label: {self.lexical!r}")

    def __lt__(self, other):
        if not isinstance(other, Term):
            return NotImplemented
        return (self.kind.value, self.lexical) < (other.kind.value, other.lexical)

    @property
    def is_iri(self) -> bool:
        return self.kind is TermKind.IRI

    @property
    def is_literal(self) -> bool:
        return self.kind is TermKind.LITERAL

    @property
    def is_blank(self) -> bool:
        return self.kind is TermKind.BLANK_NODE

    def n3(self) -> str:
        """
        Render the term in N-Triples syntax.

        Returns:
            str: `<iri>`, `"literal"` or `_:label`
        """
        if self.kind is TermKind.IRI:
            return f"<{escape_iri(self.lexical)}>"
        if self.kind is TermKind.BLANK_NODE:
            return f"_:{self.lexical}"
        return f'"{escape_string(self.lexical)}"'

    def __str__(self) -> str:
        return self.n3()


def iri(value: str) -> Term:
    """Build an IRI term."""
    return Term(TermKind.IRI, value)


def literal(value) -> Term:
    """Build a plain literal term; non-string values are stored by their str() form."""
    return Term(TermKind.LITERAL, str(value))


def blank(label: str) -> Term:
    """Build a blank node term."""
    return Term(TermKind.BLANK_NODE, label)


@dataclass(frozen=True)
class Triple:
    """An RDF statement."""
    s: Term
    p: Term
    o: Term

    def __post_init__(self):
        if self.p.kind is not TermKind.IRI:
            raise ValueError(f"Predicate must be an IRI, got {self.p.kind.value}")
        if self.s.kind is TermKind.LITERAL:
            raise ValueError("Subject must be an IRI or blank node, got Literal")

    def __iter__(self):
        return iter((self.s, self.p, self.o))

    def __getitem__(self, position: int) -> Term:
        return (self.s, self.p, self.o)[position]


class EncodedTriple(NamedTuple):
    """A triple of dictionary ids. Tuples compare lexicographically in (s, p, o) order."""
    s: TermId
    p: TermId
    o: TermId
