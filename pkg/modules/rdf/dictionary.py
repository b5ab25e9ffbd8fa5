"""
Dictionary encoding for RMTT-Workbench.
Maps lexical terms to dense integer ids and back.
"""

import logging
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from modules.rdf.terms import EncodedTriple, Term, TermId, Triple

logger = logging.getLogger(__name__)


class UnknownTermIdError(LookupError):
    """Raised when decoding an id the dictionary never assigned."""

    def __init__(self, term_id: int, size: int):
        super().__init__(f"Unknown term id {term_id} (dictionary size {size})")
        self.term_id = term_id
        self.size = size


class Dictionary:
    """
    Bidirectional term dictionary.

    Ids are assigned contiguously from 0 in first-seen order. Building is
    single-writer; once ingestion finishes the dictionary is only read.
    """

    def __init__(self):
        """Initialize an empty dictionary."""
        self.term_to_id: Dict[Term, TermId] = {}
        self.id_to_term: List[Term] = []

    def encode(self, term: Term) -> TermId:
        """
        Get the id for a term, assigning the next dense id if it is new.

        Args:
            term: Term to encode

        Returns:
            int: Term id
        """
        term_id = self.term_to_id.get(term)
        if term_id is None:
            term_id = len(self.id_to_term)
            self.term_to_id[term] = term_id
            self.id_to_term.append(term)
        return term_id

    def decode(self, term_id: TermId) -> Term:
        """
        Get the term originally encoded to an id.

        Args:
            term_id: Term id

        Returns:
            Term: Decoded term

        Raises:
            UnknownTermIdError: If the id was never assigned
        """
        if not isinstance(term_id, int) or term_id < 0 or term_id >= len(self.id_to_term):
            raise UnknownTermIdError(term_id, len(self.id_to_term))
        return self.id_to_term[term_id]

    def lookup(self, term: Term) -> Optional[TermId]:
        """
        Get the id of a known term without assigning one.

        Args:
            term: Term to look up

        Returns:
            int: Term id or None if the term is unknown
        """
        return self.term_to_id.get(term)

    def encode_triple(self, triple: Triple) -> EncodedTriple:
        """Encode the three terms of a triple in s, p, o order."""
        return EncodedTriple(self.encode(triple.s), self.encode(triple.p), self.encode(triple.o))

    def decode_triple(self, encoded: EncodedTriple) -> Triple:
        """Decode an encoded triple back to lexical terms."""
        return Triple(self.decode(encoded.s), self.decode(encoded.p), self.decode(encoded.o))

    def items(self) -> Iterator[Tuple[TermId, Term]]:
        """Iterate (id, term) pairs in ascending id order."""
        return enumerate(self.id_to_term)

    @classmethod
    def from_terms(cls, terms: Iterable[Term]) -> 'Dictionary':
        """
        Rebuild a dictionary from terms listed in id order.

        Args:
            terms: Terms, the i-th of which receives id i

        Returns:
            Dictionary: Rebuilt dictionary

        Raises:
            ValueError: If a term appears twice
        """
        dictionary = cls()
        for term in terms:
            if term in dictionary.term_to_id:
                raise ValueError(f"Duplicate dictionary entry: {term.n3()}")
            dictionary.encode(term)
        return dictionary

    def __len__(self) -> int:
        return len(self.id_to_term)

    def __contains__(self, term: Term) -> bool:
        return term in self.term_to_id

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dictionary):
            return NotImplemented
        return self.id_to_term == other.id_to_term


def encode_stream(dictionary: Dictionary, triples: Iterable[Triple]) -> List[EncodedTriple]:
    """
    Encode a triple stream in order, growing the dictionary as terms appear.

    Args:
        dictionary: Dictionary to populate
        triples: Triples in stream order

    Returns:
        list: Encoded triples in the same order (duplicates kept)
    """
    encoded = [dictionary.encode_triple(t) for t in triples]
    logger.debug(f"Encoded {len(encoded)} triples, dictionary size {len(dictionary)}")
    return encoded
