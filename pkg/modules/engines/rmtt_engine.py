"""
Twin-table engine for RMTT-Workbench.

Splits the triple stream over two tables so that, within one table, a term
appearing as a subject is not also an object. A cursor walks between the two
tables: a triple that conflicts with the current table moves the cursor to the
other one. Each twin carries its own six permutation indexes.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Set

from modules.engines.base_engine import StorageEngine
from modules.index.perm_index import (
    OrderedTripleIndex, PermOrder, TriplePattern, best_order, build_all
)
from modules.rdf.dictionary import Dictionary
from modules.rdf.terms import EncodedTriple, TermId, Triple

logger = logging.getLogger(__name__)

TWIN_COUNT = 2
TWIN_PREFIX = "twin"


def twin_table_id(twin: int) -> str:
    """Table identifier of a twin."""
    return f"{TWIN_PREFIX}{twin}"


def twin_of(table_id: str) -> int:
    """Twin number encoded in a table identifier."""
    if table_id not in (twin_table_id(0), twin_table_id(1)):
        raise KeyError(f"Unknown table: {table_id}")
    return int(table_id[len(TWIN_PREFIX):])


@dataclass
class BuildStats:
    """Counters collected while partitioning."""
    switch_count: int = 0
    fallback_count: int = 0
    reflexive_count: int = 0
    triples_per_twin: List[int] = field(default_factory=lambda: [0, 0])

    def as_dict(self) -> Dict[str, int]:
        return {
            'switch_count': self.switch_count,
            'fallback_count': self.fallback_count,
            'reflexive_count': self.reflexive_count,
            'twin0_triples': self.triples_per_twin[0],
            'twin1_triples': self.triples_per_twin[1],
        }


@dataclass(frozen=True)
class PlacementReport:
    """Where one triple went. `row` is its 1-based position in the deduplicated stream."""
    row: int
    twin: int
    switched: bool
    fallback: bool


class TwinTables(StorageEngine):
    """
    Two disjoint triple tables filled by the recursive twin insertion rule.

    Build is sequential (the cursor carries over from one triple to the next).
    Once built the store is read-only.
    """

    kind = "rmtt"

    def __init__(self, dictionary: Dictionary):
        super().__init__(dictionary)
        self.sub_set: List[Set[TermId]] = [set(), set()]
        self.obj_set: List[Set[TermId]] = [set(), set()]
        self.overlap: List[Set[TermId]] = [set(), set()]
        self.current = 0
        self.build_stats = BuildStats()
        self.placements: List[PlacementReport] = []
        self._rows: List[List[EncodedTriple]] = [[], []]
        self._seen: Set[EncodedTriple] = set()
        self._indexes: List[Optional[Dict[PermOrder, OrderedTripleIndex]]] = [None, None]

    # Partitioning

    def conflict(self, twin: int, triple: EncodedTriple) -> bool:
        """
        Check whether a triple breaks the subject/object separation of a twin.

        Args:
            twin: 0 or 1
            triple: Encoded triple

        Returns:
            bool: True if its subject is already an object there, or its object already a subject
        """
        return triple.s in self.obj_set[twin] or triple.o in self.sub_set[twin]

    def partition_insert(self, triple: EncodedTriple) -> PlacementReport:
        """
        Place one triple into a twin.

        On a conflict the cursor switches to the other twin once. If the triple
        conflicts there too it is inserted anyway and counted as a fallback.

        Args:
            triple: Encoded triple not yet present in either twin

        Returns:
            PlacementReport: Twin chosen and whether it took a switch or a fallback
        """
        triple = EncodedTriple(*triple)
        twin = self.current
        switched = False
        if self.conflict(twin, triple):
            twin = 1 - twin
            self.current = twin
            switched = True
            self.build_stats.switch_count += 1

        fallback = self.conflict(twin, triple)
        if fallback:
            self.build_stats.fallback_count += 1
            logger.debug(f"Triple {tuple(triple)} conflicts in both twins, kept in twin{twin}")

        s, _, o = triple
        if s in self.obj_set[twin]:
            self.overlap[twin].add(s)
        if o in self.sub_set[twin]:
            self.overlap[twin].add(o)
        if s == o:
            self.overlap[twin].add(s)
            self.build_stats.reflexive_count += 1
        self.sub_set[twin].add(s)
        self.obj_set[twin].add(o)

        self._rows[twin].append(triple)
        self._seen.add(triple)
        self._indexes[twin] = None
        self.build_stats.triples_per_twin[twin] += 1

        report = PlacementReport(len(self.placements) + 1, twin, switched, fallback)
        self.placements.append(report)
        return report

    def insert_stream(self, encoded: Iterable[EncodedTriple]) -> int:
        """
        Partition a stream of encoded triples, dropping duplicates.

        Duplicates never move the cursor.

        Returns:
            int: Number of triples placed
        """
        placed = 0
        for triple in encoded:
            triple = EncodedTriple(*triple)
            if triple in self._seen:
                continue
            self.partition_insert(triple)
            placed += 1
        return placed

    # Construction

    @classmethod
    def build(cls, triples: Iterable[Triple], dictionary: Optional[Dictionary] = None) -> 'TwinTables':
        """
        Build twin tables from a triple stream.

        Args:
            triples: Triples in stream order
            dictionary: Dictionary to populate (a new one by default)

        Returns:
            TwinTables: The partitioned, indexed store
        """
        dictionary = dictionary if dictionary is not None else Dictionary()
        return cls.from_encoded((dictionary.encode_triple(t) for t in triples), dictionary)

    @classmethod
    def from_encoded(cls, encoded: Iterable[EncodedTriple], dictionary: Dictionary) -> 'TwinTables':
        """Partition already-encoded triples in stream order and index both twins."""
        tables = cls(dictionary)
        tables.insert_stream(encoded)
        tables.finalize()
        stats = tables.build_stats
        logger.info(f"Built twin tables: {stats.triples_per_twin[0]} + {stats.triples_per_twin[1]} triples, "
                    f"{stats.switch_count} switches, {stats.fallback_count} fallbacks")
        if stats.fallback_count:
            logger.info(f"{stats.fallback_count} triples conflicted in both twins; "
                           f"overlap sets hold {len(tables.overlap[0])} + {len(tables.overlap[1])} terms")
        return tables

    @classmethod
    def from_rows(cls, dictionary: Dictionary, rows: List[List[EncodedTriple]],
                  stats: Optional[BuildStats] = None) -> 'TwinTables':
        """
        Rebuild twin tables from saved per-twin rows without re-partitioning.

        Membership and overlap sets are recomputed from the rows; counters come
        from `stats` when given.
        """
        tables = cls(dictionary)
        for twin in range(TWIN_COUNT):
            for triple in rows[twin]:
                triple = EncodedTriple(*triple)
                tables._rows[twin].append(triple)
                tables._seen.add(triple)
                tables.sub_set[twin].add(triple.s)
                tables.obj_set[twin].add(triple.o)
            tables.overlap[twin] = tables.sub_set[twin] & tables.obj_set[twin]
        tables.build_stats = stats if stats is not None else BuildStats(
            reflexive_count=sum(1 for r in rows for t in r if t[0] == t[2]))
        tables.build_stats.triples_per_twin = [len(rows[0]), len(rows[1])]
        tables.finalize()
        return tables

    def finalize(self):
        """Build the permutation indexes of both twins."""
        for twin in range(TWIN_COUNT):
            self._index(twin)

    def _index(self, twin: int) -> Dict[PermOrder, OrderedTripleIndex]:
        if self._indexes[twin] is None:
            self._indexes[twin] = build_all(self._rows[twin])
        return self._indexes[twin]

    # StorageEngine

    def table_ids(self) -> List[str]:
        return [twin_table_id(0), twin_table_id(1)]

    def probe_tables(self, pattern: TriplePattern) -> List[str]:
        return self.table_ids()

    def scan_order(self, table_id: str, pattern: TriplePattern) -> PermOrder:
        return best_order(pattern)

    def scan_table(self, table_id: str, pattern: TriplePattern) -> Iterator[EncodedTriple]:
        index = self._index(twin_of(table_id))
        return index[best_order(pattern)].range_scan(pattern)

    def estimate_table(self, table_id: str, pattern: TriplePattern) -> int:
        index = self._index(twin_of(table_id))
        return index[best_order(pattern)].estimate(pattern)

    def iter_table(self, table_id: str) -> Iterator[EncodedTriple]:
        return iter(self._index(twin_of(table_id))[PermOrder.SPO])

    def table_size(self, table_id: str) -> int:
        return len(self._rows[twin_of(table_id)])

    def twin_rows(self, twin: int) -> List[EncodedTriple]:
        """Rows of a twin in insertion order."""
        return list(self._rows[twin])

    # Joins

    def so_join_targets(self, source_twin: int, key: TermId) -> Set[int]:
        """
        Twins that can hold `key` as a subject, given it was matched as an object in `source_twin`.

        The same reasoning covers the reverse direction (matched as a subject,
        probed as an object) since overlap is symmetric in subject and object.

        Args:
            source_twin: Twin the key was matched in
            key: Join term

        Returns:
            set: Twin numbers to probe
        """
        targets = {1 - source_twin}
        if key in self.overlap[source_twin]:
            targets.add(source_twin)
        return targets

    def so_join_tables(self, source_table: str, key: TermId) -> Set[str]:
        """so_join_targets() over table identifiers."""
        return {twin_table_id(t) for t in self.so_join_targets(twin_of(source_table), key)}

    # Diagnostics

    def containment_ratio(self, twin: int) -> float:
        """
        Share of this twin's subjects that are objects of the other twin.

        Returns:
            float: |sub_set[i] & obj_set[1-i]| / |sub_set[i]|, 0.0 for an empty twin
        """
        subjects = self.sub_set[twin]
        if not subjects:
            return 0.0
        return len(subjects & self.obj_set[1 - twin]) / len(subjects)

    def verify(self):
        """
        Recompute the partition, membership and overlap invariants.

        Raises:
            AssertionError: On the first violated invariant
        """
        rows = [set(self._rows[0]), set(self._rows[1])]
        assert not (rows[0] & rows[1]), "a triple was placed in both twins"
        assert rows[0] | rows[1] == self._seen, "twins do not cover the input"
        for twin in range(TWIN_COUNT):
            assert len(rows[twin]) == len(self._rows[twin]), f"twin{twin} holds duplicate rows"
            assert self.sub_set[twin] == {t.s for t in rows[twin]}, f"twin{twin} subject set is stale"
            assert self.obj_set[twin] == {t.o for t in rows[twin]}, f"twin{twin} object set is stale"
            assert self.overlap[twin] == self.sub_set[twin] & self.obj_set[twin], \
                f"twin{twin} overlap set is stale"
            assert self.build_stats.triples_per_twin[twin] == len(rows[twin]), f"twin{twin} count is stale"
        if self.build_stats.fallback_count == 0 and self.build_stats.reflexive_count == 0:
            assert not self.overlap[0] and not self.overlap[1], "overlap without fallback"

    @property
    def triple_count(self) -> int:
        return len(self._rows[0]) + len(self._rows[1])

    def stats(self) -> Dict[str, object]:
        stats = super().stats()
        stats.update(self.build_stats.as_dict())
        stats['overlap0'] = len(self.overlap[0])
        stats['overlap1'] = len(self.overlap[1])
        stats['containment0'] = round(self.containment_ratio(0), 4)
        stats['containment1'] = round(self.containment_ratio(1), 4)
        return stats
