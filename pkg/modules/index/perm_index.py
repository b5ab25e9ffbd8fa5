"""
Permutation indexes for RMTT-Workbench.
A triple collection sorted under one of the six component orders, scanned by
binary-searched prefix ranges.
"""

import logging
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from modules.rdf.terms import EncodedTriple, TermId

logger = logging.getLogger(__name__)

# Component positions inside an EncodedTriple
POSITIONS = ('s', 'p', 'o')


class PermOrder(Enum):
    """The six component orders. Declaration order is the tie-break order."""
    SPO = "SPO"
    SOP = "SOP"
    PSO = "PSO"
    POS = "POS"
    OSP = "OSP"
    OPS = "OPS"

    @property
    def positions(self) -> Tuple[int, int, int]:
        """Indexes into (s, p, o) in this order's sort priority."""
        return tuple(POSITIONS.index(c) for c in self.value.lower())

    def key(self, triple: Sequence[int]) -> Tuple[int, int, int]:
        """Permute a triple into this order's sort key."""
        a, b, c = self.positions
        return (triple[a], triple[b], triple[c])

    def unkey(self, key: Sequence[int]) -> EncodedTriple:
        """Undo key() and return the triple in (s, p, o) order."""
        parts = [0, 0, 0]
        for slot, position in enumerate(self.positions):
            parts[position] = key[slot]
        return EncodedTriple(*parts)


ALL_ORDERS: Tuple[PermOrder, ...] = tuple(PermOrder)


class IncompatibleOrderError(ValueError):
    """Raised when a pattern's bound positions are not a prefix of the index order."""


@dataclass(frozen=True)
class TriplePattern:
    """
    A pattern over encoded triples. None marks an unbound position.

    `empty` marks a pattern that can match nothing, e.g. because one of its
    constants is absent from the dictionary.
    """
    s: Optional[TermId] = None
    p: Optional[TermId] = None
    o: Optional[TermId] = None
    empty: bool = False

    @classmethod
    def nothing(cls) -> 'TriplePattern':
        return cls(empty=True)

    def as_tuple(self) -> Tuple[Optional[TermId], Optional[TermId], Optional[TermId]]:
        return (self.s, self.p, self.o)

    @property
    def bound_positions(self) -> Tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.as_tuple()) if v is not None)

    def matches(self, triple: Sequence[int]) -> bool:
        """Check a triple against the pattern by direct comparison."""
        if self.empty:
            return False
        return all(v is None or v == triple[i] for i, v in enumerate(self.as_tuple()))

    def __str__(self) -> str:
        if self.empty:
            return "(nothing)"
        return "(" + ", ".join('?' if v is None else str(v) for v in self.as_tuple()) + ")"


def bound_prefix_length(order: PermOrder, pattern: TriplePattern) -> int:
    """
    Length of the bound prefix of a pattern under an order.

    Returns -1 when the bound positions are not a prefix of the order.
    """
    bound = set(pattern.bound_positions)
    prefix = order.positions[:len(bound)]
    if set(prefix) != bound:
        return -1
    return len(bound)


def compatible_orders(pattern: TriplePattern) -> List[PermOrder]:
    """All orders whose prefix covers exactly the pattern's bound positions."""
    return [order for order in ALL_ORDERS if bound_prefix_length(order, pattern) >= 0]


def best_order(pattern: TriplePattern, available: Iterable[PermOrder] = ALL_ORDERS) -> PermOrder:
    """
    Select the compatible order with the longest bound prefix.

    Ties go to the earliest order in SPO, SOP, PSO, POS, OSP, OPS.

    Raises:
        IncompatibleOrderError: If no available order is compatible
    """
    best = None
    best_len = -1
    for order in ALL_ORDERS:
        if order not in available:
            continue
        length = bound_prefix_length(order, pattern)
        if length > best_len:
            best, best_len = order, length
    if best is None:
        raise IncompatibleOrderError(f"No compatible index order for pattern {pattern}")
    return best


class OrderedTripleIndex:
    """
    Sorted, deduplicated triples under one PermOrder.

    Rows are stored as permuted key tuples so a bound prefix maps onto a
    contiguous range located with bisect. Immutable after build.
    """

    def __init__(self, order: PermOrder, keys: List[Tuple[int, int, int]]):
        self.order = order
        self._keys = keys

    @classmethod
    def build(cls, triples: Iterable[Sequence[int]], order: PermOrder) -> 'OrderedTripleIndex':
        """
        Build a sorted, deduplicated index.

        Args:
            triples: Encoded triples in any order
            order: Component order

        Returns:
            OrderedTripleIndex: The index
        """
        keys = sorted({order.key(t) for t in triples})
        return cls(order, keys)

    def __len__(self) -> int:
        return len(self._keys)

    def __iter__(self) -> Iterator[EncodedTriple]:
        unkey = self.order.unkey
        return (unkey(k) for k in self._keys)

    def _bounds(self, pattern: TriplePattern) -> Tuple[int, int]:
        if pattern.empty:
            return 0, 0
        length = bound_prefix_length(self.order, pattern)
        if length < 0:
            raise IncompatibleOrderError(
                f"Pattern {pattern} is not a prefix of index order {self.order.value}")
        if length == 0:
            return 0, len(self._keys)

        values = pattern.as_tuple()
        prefix = tuple(values[pos] for pos in self.order.positions[:length])
        lo = bisect_left(self._keys, prefix)
        # Any key extending the prefix sorts below prefix + (inf,)
        hi = bisect_right(self._keys, prefix + (float('inf'),) * (3 - length), lo)
        return lo, hi

    def range_scan(self, pattern: TriplePattern) -> Iterator[EncodedTriple]:
        """
        Yield the triples matching a pattern in index order.

        Args:
            pattern: Pattern whose bound positions form a prefix of this order

        Yields:
            EncodedTriple: Matching triples

        Raises:
            IncompatibleOrderError: If the bound positions are not a prefix
        """
        lo, hi = self._bounds(pattern)
        unkey = self.order.unkey
        for i in range(lo, hi):
            yield unkey(self._keys[i])

    def estimate(self, pattern: TriplePattern) -> int:
        """
        Exact number of triples matching a pattern, from the range bounds.

        Raises:
            IncompatibleOrderError: If the bound positions are not a prefix
        """
        lo, hi = self._bounds(pattern)
        return hi - lo


def build_all(triples: Iterable[Sequence[int]]) -> dict:
    """
    Build one index per PermOrder over the same triple set.

    Args:
        triples: Encoded triples

    Returns:
        dict: PermOrder -> OrderedTripleIndex
    """
    unique = list({tuple(t) for t in triples})
    return {order: OrderedTripleIndex.build(unique, order) for order in ALL_ORDERS}
