"""
Left-deep join planner for RMTT-Workbench.

Orders the patterns of a BGP greedily by exact cardinality estimate and
annotates every join step with the physical tables on both sides, which is
how self-joins are counted.
"""

import logging
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from modules.engines.base_engine import StorageEngine
from modules.engines.rmtt_engine import TwinTables, twin_of, twin_table_id
from modules.index.perm_index import PermOrder, TriplePattern
from modules.query.sparql_parser import BgpQuery, QueryPattern, pattern_to_triple_pattern

logger = logging.getLogger(__name__)

MODE_SINGLE = "single"
MODE_VP = "vp"
MODE_RMTT_SOUND = "rmtt-sound"
MODE_RMTT_PRUNED = "rmtt-pruned"
PLAN_MODES = (MODE_SINGLE, MODE_VP, MODE_RMTT_SOUND, MODE_RMTT_PRUNED)

POSITION_NAMES = ('s', 'p', 'o')


def resolve_mode(store: StorageEngine, mode: Optional[str] = None) -> str:
    """
    Plan mode for a store.

    Args:
        store: Built store
        mode: 'sound' / 'pruned' (or the full 'rmtt-...' names) for twin tables;
              ignored for the other engines

    Returns:
        str: One of PLAN_MODES

    Raises:
        ValueError: If the mode does not apply to the store
    """
    if store.kind != TwinTables.kind:
        return store.kind
    if mode in (None, 'pruned', MODE_RMTT_PRUNED):
        return MODE_RMTT_PRUNED
    if mode in ('sound', MODE_RMTT_SOUND):
        return MODE_RMTT_SOUND
    raise ValueError(f"Unknown plan mode '{mode}' for twin tables (expected 'sound' or 'pruned')")


def positions_of(pattern: QueryPattern, name: str) -> FrozenSet[str]:
    """Positions ('s', 'p', 'o') at which a variable occurs in a pattern."""
    return frozenset(POSITION_NAMES[i] for i, term in enumerate(pattern)
                     if term.is_var and term.value == name)


def is_subject_object_pair(source: FrozenSet[str], target: FrozenSet[str]) -> bool:
    """True when a key seen at one of subject/object is probed at the other."""
    return ('s' in source and 'o' in target) or ('o' in source and 's' in target)


@dataclass(frozen=True)
class JoinVar:
    """A join variable with its position pair and the step that last bound it."""
    name: str
    left_positions: FrozenSet[str]
    right_positions: FrozenSet[str]
    source_step: int

    @property
    def pair(self) -> str:
        """Position pair such as 'o-s'; predicates collapse to 'p-x'."""
        if 'p' in self.left_positions or 'p' in self.right_positions:
            return 'p-x'
        left = 's' if 's' in self.left_positions else 'o'
        right = 's' if 's' in self.right_positions else 'o'
        return f"{left}-{right}"

    @property
    def subject_object(self) -> bool:
        return is_subject_object_pair(self.left_positions, self.right_positions)


@dataclass
class PlanStep:
    """
    One step of a left-deep plan.

    Step 0 scans its pattern. Every later step joins the accumulated rows
    with its pattern on `join_vars` (none for a cartesian step).
    """
    index: int
    pattern: QueryPattern
    pattern_index: int
    encoded: TriplePattern
    estimate: int
    order: Optional[PermOrder] = None
    join_vars: List[JoinVar] = field(default_factory=list)
    provenance_left: FrozenSet[str] = frozenset()
    provenance_right: FrozenSet[str] = frozenset()
    branches: Dict[Tuple[str, ...], FrozenSet[str]] = field(default_factory=dict)
    self_join_flag: bool = False

    @property
    def is_scan(self) -> bool:
        return self.index == 0

    @property
    def is_cartesian(self) -> bool:
        return self.index > 0 and not self.join_vars

    @property
    def pruned_vars(self) -> List[JoinVar]:
        """Subject/object join variables whose probe targets depend on the outer row."""
        return [v for v in self.join_vars if v.subject_object]


@dataclass
class Plan:
    """An ordered left-deep plan for one query over one store."""
    engine: str
    query: BgpQuery
    steps: List[PlanStep]
    empty: bool = False

    @property
    def plan_self_joins(self) -> int:
        return sum(1 for step in self.steps if step.self_join_flag)

    @property
    def join_count(self) -> int:
        return max(len(self.steps) - 1, 0)

    @property
    def cartesian_count(self) -> int:
        return sum(1 for step in self.steps if step.is_cartesian)

    @property
    def pruned(self) -> bool:
        return self.engine == MODE_RMTT_PRUNED


def provenance_tables(store: StorageEngine, mode: str, pattern: TriplePattern) -> FrozenSet[str]:
    """
    Physical tables a pattern's rows can come from.

    Single and VP stores report the tables they would probe; twin tables
    report only the twins holding a match.
    """
    if pattern.empty:
        return frozenset()
    if mode in (MODE_RMTT_SOUND, MODE_RMTT_PRUNED):
        return frozenset(store.tables_for(pattern))
    return frozenset(store.probe_tables(pattern))


def _greedy_order(patterns: List[QueryPattern], estimates: List[int]) -> List[int]:
    remaining = list(range(len(patterns)))
    first = min(remaining, key=lambda i: (estimates[i], i))
    order = [first]
    remaining.remove(first)
    bound: Set[str] = set(patterns[first].variables)
    while remaining:
        connected = [i for i in remaining if bound & set(patterns[i].variables)]
        # Cartesian patterns wait until nothing connected is left
        pool = connected or remaining
        nxt = min(pool, key=lambda i: (estimates[i], i))
        order.append(nxt)
        remaining.remove(nxt)
        bound |= set(patterns[nxt].variables)
    return order


def _source_keys(store: TwinTables, step: PlanStep, var: JoinVar, table_id: str) -> Set[int]:
    """Terms the variable takes in the rows that the source step's pattern yields in one twin."""
    slots = [i for i, term in enumerate(step.pattern) if term.is_var and term.value == var.name]
    return {triple[slots[0]] for triple in store.match_triples(step.encoded, restrict=[table_id])}


def _branches(store: TwinTables, steps: List[PlanStep], var_prov: Dict[str, FrozenSet[str]],
              join_vars: List[JoinVar], right: FrozenSet[str]) -> Dict[Tuple[str, ...], FrozenSet[str]]:
    """
    Per combination of source twins of the subject/object join variables,
    the twins that can supply matches.
    """
    pruned = [v for v in join_vars if v.subject_object]
    choices = [sorted(var_prov[v.name]) for v in pruned]
    branches: Dict[Tuple[str, ...], FrozenSet[str]] = {}
    for combo in product(*choices):
        targets = set(right)
        for var, source_table in zip(pruned, combo):
            twin = twin_of(source_table)
            allowed = {twin_table_id(1 - twin)}
            keys = _source_keys(store, steps[var.source_step], var, source_table)
            if keys & store.overlap[twin]:
                allowed.add(source_table)
            targets &= allowed
        branches[combo] = frozenset(targets)
    return branches


def plan(query: BgpQuery, store: StorageEngine, mode: Optional[str] = None) -> Plan:
    """
    Build a greedy left-deep plan.

    The first step scans the pattern with the smallest estimate; each later
    step adds the connected pattern with the smallest estimate. Patterns
    sharing no variable with the steps so far come last. Ties keep textual
    order.

    Args:
        query: Parsed query
        store: Built store
        mode: Twin-table plan mode ('sound' or 'pruned', default 'pruned')

    Returns:
        Plan: Annotated plan
    """
    mode = resolve_mode(store, mode)
    encoded = [pattern_to_triple_pattern(p, store.dictionary) for p in query.patterns]

    if any(p.empty for p in encoded):
        missing = [str(query.patterns[i]) for i, p in enumerate(encoded) if p.empty]
        logger.info(f"Query constants missing from the dictionary, result is empty: {'; '.join(missing)}")
        steps = [PlanStep(i, p, i, encoded[i], 0) for i, p in enumerate(query.patterns)]
        return Plan(mode, query, steps, empty=True)

    estimates = [store.estimate(p) for p in encoded]
    order = _greedy_order(query.patterns, estimates)

    steps: List[PlanStep] = []
    # Tables and positions of the step that last bound or matched each variable
    var_prov: Dict[str, FrozenSet[str]] = {}
    var_positions: Dict[str, FrozenSet[str]] = {}
    var_step: Dict[str, int] = {}

    for index, pattern_index in enumerate(order):
        pattern = query.patterns[pattern_index]
        triple_pattern = encoded[pattern_index]
        right = provenance_tables(store, mode, triple_pattern)
        scan_tables = sorted(right) or store.probe_tables(triple_pattern)
        scan_order = store.scan_order(scan_tables[0], triple_pattern) if scan_tables else None
        step = PlanStep(index, pattern, pattern_index, triple_pattern, estimates[pattern_index], order=scan_order)

        if index > 0:
            step.join_vars = [
                JoinVar(name, var_positions[name], positions_of(pattern, name), var_step[name])
                for name in pattern.variables if name in var_prov
            ]
            left = frozenset().union(*(var_prov[v.name] for v in step.join_vars))
            step.provenance_left = left

            if mode == MODE_RMTT_PRUNED and step.pruned_vars:
                step.branches = _branches(store, steps, var_prov, step.join_vars, right)
                plain_left = frozenset().union(*(var_prov[v.name] for v in step.join_vars
                                                 if not v.subject_object))
                step.provenance_right = frozenset().union(*step.branches.values())
                step.self_join_flag = any(
                    bool(targets & (frozenset(combo) | plain_left))
                    for combo, targets in step.branches.items()
                )
            else:
                step.provenance_right = right
                step.self_join_flag = bool(left & right)
        else:
            step.provenance_right = right

        for name in pattern.variables:
            var_prov[name] = step.provenance_right
            var_positions[name] = positions_of(pattern, name)
            var_step[name] = index

        logger.debug(f"Plan step {index}: pattern {pattern_index} est={step.estimate} "
                     f"left={sorted(step.provenance_left)} right={sorted(step.provenance_right)} "
                     f"self-join={step.self_join_flag}")
        steps.append(step)

    result = Plan(mode, query, steps)
    logger.debug(f"Planned {len(steps)} steps on {mode}: {result.plan_self_joins} self-joins")
    return result
