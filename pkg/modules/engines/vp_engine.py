"""
Vertically partitioned engine for RMTT-Workbench.
One subject-sorted (subject, object) table per distinct predicate.
"""

import logging
from bisect import bisect_left, bisect_right
from collections import defaultdict
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from modules.engines.base_engine import StorageEngine
from modules.index.perm_index import TriplePattern
from modules.rdf.dictionary import Dictionary
from modules.rdf.terms import EncodedTriple, TermId, Triple

logger = logging.getLogger(__name__)

TABLE_PREFIX = "vp:"


def table_id_for(predicate: TermId) -> str:
    """Table identifier of a predicate's table."""
    return f"{TABLE_PREFIX}{predicate}"


def predicate_of(table_id: str) -> TermId:
    """Predicate id encoded in a table identifier."""
    if not table_id.startswith(TABLE_PREFIX):
        raise KeyError(f"Unknown table: {table_id}")
    return int(table_id[len(TABLE_PREFIX):])


class VpStore(StorageEngine):
    """Vertically partitioned store."""

    kind = "vp"

    def __init__(self, dictionary: Dictionary, tables: Dict[TermId, List[Tuple[TermId, TermId]]]):
        super().__init__(dictionary)
        self.tables = tables
        self._predicates = sorted(tables)

    @classmethod
    def build(cls, triples: Iterable[Triple], dictionary: Optional[Dictionary] = None) -> 'VpStore':
        """
        Build the store from a triple stream.

        Args:
            triples: Triples in stream order
            dictionary: Dictionary to populate (a new one by default)

        Returns:
            VpStore: The store
        """
        dictionary = dictionary if dictionary is not None else Dictionary()
        encoded = [dictionary.encode_triple(t) for t in triples]
        return cls.from_encoded(encoded, dictionary)

    @classmethod
    def from_encoded(cls, encoded: Iterable[EncodedTriple], dictionary: Dictionary) -> 'VpStore':
        """Group encoded triples by predicate and sort each group by (subject, object)."""
        groups = defaultdict(set)
        for s, p, o in encoded:
            groups[p].add((s, o))
        tables = {p: sorted(rows) for p, rows in groups.items()}
        store = cls(dictionary, tables)
        logger.info(f"Built vertically partitioned store: {store.triple_count} triples "
                    f"in {store.predicate_count} predicate tables")
        return store

    @property
    def predicate_count(self) -> int:
        return len(self.tables)

    def table_ids(self) -> List[str]:
        return [table_id_for(p) for p in self._predicates]

    def probe_tables(self, pattern: TriplePattern) -> List[str]:
        if pattern.p is not None:
            return [table_id_for(pattern.p)] if pattern.p in self.tables else []
        # Unbound predicate: every table is probed
        return self.table_ids()

    def _rows(self, table_id: str) -> List[Tuple[TermId, TermId]]:
        predicate = predicate_of(table_id)
        if predicate not in self.tables:
            raise KeyError(f"Unknown table: {table_id}")
        return self.tables[predicate]

    def _range(self, rows: List[Tuple[TermId, TermId]], pattern: TriplePattern) -> Tuple[int, int]:
        if pattern.s is None:
            return 0, len(rows)
        if pattern.o is None:
            lo = bisect_left(rows, (pattern.s,))
            hi = bisect_right(rows, (pattern.s, float('inf')), lo)
        else:
            lo = bisect_left(rows, (pattern.s, pattern.o))
            hi = bisect_right(rows, (pattern.s, pattern.o), lo)
        return lo, hi

    def scan_table(self, table_id: str, pattern: TriplePattern) -> Iterator[EncodedTriple]:
        predicate = predicate_of(table_id)
        rows = self._rows(table_id)
        if pattern.empty or (pattern.p is not None and pattern.p != predicate):
            return
        lo, hi = self._range(rows, pattern)
        for i in range(lo, hi):
            s, o = rows[i]
            # Object-only patterns fall back to a filtered scan: tables are subject-sorted
            if pattern.o is not None and o != pattern.o:
                continue
            yield EncodedTriple(s, predicate, o)

    def estimate_table(self, table_id: str, pattern: TriplePattern) -> int:
        predicate = predicate_of(table_id)
        rows = self._rows(table_id)
        if pattern.empty or (pattern.p is not None and pattern.p != predicate):
            return 0
        lo, hi = self._range(rows, pattern)
        if pattern.o is not None and pattern.s is None:
            return sum(1 for i in range(lo, hi) if rows[i][1] == pattern.o)
        return hi - lo

    def iter_table(self, table_id: str) -> Iterator[EncodedTriple]:
        predicate = predicate_of(table_id)
        return (EncodedTriple(s, predicate, o) for s, o in self._rows(table_id))

    def table_size(self, table_id: str) -> int:
        return len(self._rows(table_id))
