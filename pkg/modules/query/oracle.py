"""
Brute-force BGP evaluation for RMTT-Workbench.

Evaluates a query straight over a list of lexical triples, patterns in textual
order, with no dictionary, index or planner involved. Used to cross-check the
engines.
"""

import logging
from collections import defaultdict
from typing import Dict, Iterable, List, Optional, Tuple

from modules.query.sparql_parser import BgpQuery, QueryPattern
from modules.rdf.terms import Term, Triple

logger = logging.getLogger(__name__)


class _PatternLookup:
    """Triples matching one pattern's constants, keyed by the positions already bound when it runs."""

    def __init__(self, pattern: QueryPattern, bound_before: set):
        self.pattern = pattern
        self.constants = [(i, t.to_term()) for i, t in enumerate(pattern) if not t.is_var]
        self.key_slots = [i for i, t in enumerate(pattern) if t.is_var and t.value in bound_before]
        self._table: Optional[Dict[Tuple[Term, ...], List[Triple]]] = None

    def build(self, triples: List[Triple]):
        self._table = defaultdict(list)
        for triple in triples:
            if all(triple[i] == term for i, term in self.constants):
                self._table[tuple(triple[i] for i in self.key_slots)].append(triple)

    def candidates(self, triples: List[Triple], binding: Dict[str, Term]) -> List[Triple]:
        if self._table is None:
            self.build(triples)
        key = tuple(binding[self.pattern[i].value] for i in self.key_slots)
        return self._table.get(key, [])


def evaluate_oracle(query: BgpQuery, triples: Iterable[Triple],
                    distinct: Optional[bool] = None) -> List[Tuple[Term, ...]]:
    """
    Evaluate a query by index nested loops over raw triples.

    Args:
        query: Parsed query
        triples: Triples (duplicates are ignored)
        distinct: Override the query's DISTINCT flag

    Returns:
        list: Projected result rows of terms
    """
    data = list(dict.fromkeys(triples))
    lookups = []
    bound: set = set()
    for pattern in query.patterns:
        lookups.append(_PatternLookup(pattern, set(bound)))
        bound |= set(pattern.variables)

    results: List[Dict[str, Term]] = []

    def descend(depth: int, binding: Dict[str, Term]):
        if depth == len(lookups):
            results.append(binding)
            return
        lookup = lookups[depth]
        for triple in lookup.candidates(data, binding):
            extended = dict(binding)
            consistent = True
            for slot, term in enumerate(lookup.pattern):
                if not term.is_var:
                    continue
                known = extended.get(term.value)
                if known is not None and known != triple[slot]:
                    consistent = False
                    break
                extended[term.value] = triple[slot]
            if consistent:
                descend(depth + 1, extended)

    descend(0, {})
    rows = [tuple(b[v] for v in query.projection) for b in results]
    if query.distinct if distinct is None else distinct:
        rows = list(dict.fromkeys(rows))
    logger.debug(f"Oracle evaluated {len(query.patterns)} patterns over {len(data)} triples: {len(rows)} rows")
    return rows
