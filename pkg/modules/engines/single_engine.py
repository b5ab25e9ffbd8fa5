"""
Single triples-table engine for RMTT-Workbench.
All triples in one table carrying all six permutation indexes.
"""

import logging
from typing import Dict, Iterable, Iterator, List, Optional

from modules.engines.base_engine import StorageEngine
from modules.index.perm_index import (
    OrderedTripleIndex, PermOrder, TriplePattern, best_order, build_all
)
from modules.rdf.dictionary import Dictionary
from modules.rdf.terms import EncodedTriple, Triple

logger = logging.getLogger(__name__)

TABLE_ID = "T"


class SingleStore(StorageEngine):
    """One big triples table with exhaustive permutation indexes."""

    kind = "single"

    def __init__(self, dictionary: Dictionary, indexes: Dict[PermOrder, OrderedTripleIndex]):
        super().__init__(dictionary)
        self.indexes = indexes

    @classmethod
    def build(cls, triples: Iterable[Triple], dictionary: Optional[Dictionary] = None) -> 'SingleStore':
        """
        Build the store from a triple stream.

        Args:
            triples: Triples in stream order
            dictionary: Dictionary to populate (a new one by default)

        Returns:
            SingleStore: The store
        """
        dictionary = dictionary if dictionary is not None else Dictionary()
        encoded = [dictionary.encode_triple(t) for t in triples]
        return cls.from_encoded(encoded, dictionary)

    @classmethod
    def from_encoded(cls, encoded: Iterable[EncodedTriple], dictionary: Dictionary) -> 'SingleStore':
        """Build the six indexes over already-encoded triples."""
        store = cls(dictionary, build_all(encoded))
        logger.info(f"Built single-table store: {store.triple_count} triples, "
                    f"{len(dictionary)} terms")
        return store

    def table_ids(self) -> List[str]:
        return [TABLE_ID]

    def probe_tables(self, pattern: TriplePattern) -> List[str]:
        return [TABLE_ID]

    def _check_table(self, table_id: str):
        if table_id != TABLE_ID:
            raise KeyError(f"Unknown table: {table_id}")

    def scan_order(self, table_id: str, pattern: TriplePattern) -> PermOrder:
        return best_order(pattern)

    def scan_table(self, table_id: str, pattern: TriplePattern) -> Iterator[EncodedTriple]:
        self._check_table(table_id)
        return self.indexes[best_order(pattern)].range_scan(pattern)

    def estimate_table(self, table_id: str, pattern: TriplePattern) -> int:
        self._check_table(table_id)
        return self.indexes[best_order(pattern)].estimate(pattern)

    def iter_table(self, table_id: str) -> Iterator[EncodedTriple]:
        self._check_table(table_id)
        return iter(self.indexes[PermOrder.SPO])

    @property
    def triple_count(self) -> int:
        return len(self.indexes[PermOrder.SPO])
