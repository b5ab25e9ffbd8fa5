"""
Base storage engine for RMTT-Workbench.
Defines the interface that every triple-store layout must implement.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from modules.index.perm_index import PermOrder, TriplePattern
from modules.rdf.dictionary import Dictionary
from modules.rdf.terms import EncodedTriple

logger = logging.getLogger(__name__)


@dataclass
class AccessTrace:
    """Physical tables probed while matching, in probe order, with rows yielded per table."""
    probed: List[str] = field(default_factory=list)
    rows_per_table: Dict[str, int] = field(default_factory=dict)

    def record_probe(self, table_id: str):
        self.probed.append(table_id)
        self.rows_per_table.setdefault(table_id, 0)

    def record_row(self, table_id: str):
        self.rows_per_table[table_id] = self.rows_per_table.get(table_id, 0) + 1

    @property
    def tables(self) -> List[str]:
        """Distinct probed tables in first-probe order."""
        return list(dict.fromkeys(self.probed))


class StorageEngine(ABC):
    """Base abstract class for triple-store layouts."""

    # Engine kind name used by the factory and the store manifest
    kind = "base"

    def __init__(self, dictionary: Dictionary):
        """
        Initialize the engine.

        Args:
            dictionary: Term dictionary shared by all tables of this store
        """
        self.dictionary = dictionary

    @abstractmethod
    def table_ids(self) -> List[str]:
        """
        List the physical tables of this store.

        Returns:
            list: Table identifiers in a stable order
        """
        pass

    @abstractmethod
    def probe_tables(self, pattern: TriplePattern) -> List[str]:
        """
        List the tables a scan of the pattern has to probe.

        Args:
            pattern: Encoded pattern

        Returns:
            list: Table identifiers in probe order
        """
        pass

    @abstractmethod
    def scan_table(self, table_id: str, pattern: TriplePattern) -> Iterator[EncodedTriple]:
        """
        Yield the rows of one table matching a pattern.

        Args:
            table_id: Physical table
            pattern: Encoded pattern

        Yields:
            EncodedTriple: Matching rows
        """
        pass

    @abstractmethod
    def estimate_table(self, table_id: str, pattern: TriplePattern) -> int:
        """
        Count the rows of one table matching a pattern.

        Args:
            table_id: Physical table
            pattern: Encoded pattern

        Returns:
            int: Exact match count
        """
        pass

    @abstractmethod
    def iter_table(self, table_id: str) -> Iterator[EncodedTriple]:
        """
        Yield every row of one table in ascending (s, p, o) order.

        Args:
            table_id: Physical table

        Yields:
            EncodedTriple: Rows
        """
        pass

    def scan_order(self, table_id: str, pattern: TriplePattern) -> Optional[PermOrder]:
        """Index order used to scan a table for the pattern, None if the table is not permutation-indexed."""
        return None

    @property
    def triple_count(self) -> int:
        """Number of distinct triples in the store."""
        return sum(self.table_size(t) for t in self.table_ids())

    def table_size(self, table_id: str) -> int:
        """Number of rows in one table."""
        return self.estimate_table(table_id, TriplePattern())

    def match(self, pattern: TriplePattern, restrict: Optional[Iterable[str]] = None,
              trace: Optional[AccessTrace] = None) -> Iterator[Tuple[EncodedTriple, str]]:
        """
        Yield the triples matching a pattern with the table that supplied each.

        Args:
            pattern: Encoded pattern
            restrict: Only probe these tables
            trace: AccessTrace that records probes and yielded rows

        Yields:
            tuple: (EncodedTriple, table id)
        """
        if pattern.empty:
            return
        allowed = set(restrict) if restrict is not None else None
        for table_id in self.probe_tables(pattern):
            if allowed is not None and table_id not in allowed:
                continue
            if trace is not None:
                trace.record_probe(table_id)
            for triple in self.scan_table(table_id, pattern):
                if trace is not None:
                    trace.record_row(table_id)
                yield triple, table_id

    def match_triples(self, pattern: TriplePattern, restrict: Optional[Iterable[str]] = None) -> List[EncodedTriple]:
        """Matching triples without provenance."""
        return [t for t, _ in self.match(pattern, restrict=restrict)]

    def estimate(self, pattern: TriplePattern, restrict: Optional[Iterable[str]] = None) -> int:
        """
        Exact number of triples matching a pattern over the probed tables.

        Args:
            pattern: Encoded pattern
            restrict: Only count these tables

        Returns:
            int: Match count
        """
        if pattern.empty:
            return 0
        allowed = set(restrict) if restrict is not None else None
        return sum(self.estimate_table(t, pattern) for t in self.probe_tables(pattern)
                   if allowed is None or t in allowed)

    def tables_for(self, pattern: TriplePattern) -> List[str]:
        """Tables holding at least one match for the pattern."""
        if pattern.empty:
            return []
        return [t for t in self.probe_tables(pattern) if self.estimate_table(t, pattern) > 0]

    def triples(self) -> List[EncodedTriple]:
        """All stored triples, table by table."""
        rows: List[EncodedTriple] = []
        for table_id in self.table_ids():
            rows.extend(self.iter_table(table_id))
        return rows

    def distinct_counts(self) -> Tuple[int, int, int]:
        """Number of distinct subjects, predicates and objects."""
        subjects, predicates, objects = set(), set(), set()
        for triple in self.triples():
            subjects.add(triple.s)
            predicates.add(triple.p)
            objects.add(triple.o)
        return len(subjects), len(predicates), len(objects)

    def stats(self) -> Dict[str, object]:
        """
        Summary statistics for `stats` and the store manifest.

        Returns:
            dict: Flat key/value statistics
        """
        subject_count, predicate_count, object_count = self.distinct_counts()
        return {
            'engine': self.kind,
            'triple_count': self.triple_count,
            'subject_count': subject_count,
            'predicate_count': predicate_count,
            'object_count': object_count,
            'dictionary_size': len(self.dictionary),
            'table_count': len(self.table_ids()),
        }
