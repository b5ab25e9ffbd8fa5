"""
Plan executor for RMTT-Workbench.

Runs a left-deep plan as a sequence of hash joins over binding rows. Each row
remembers which physical table supplied every variable's latest binding, so
probes that land back in the same table can be counted.
"""

import json
import logging
import time
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from modules.engines.base_engine import AccessTrace, StorageEngine
from modules.query.planner import MODE_RMTT_PRUNED, Plan, PlanStep
from modules.rdf.terms import EncodedTriple, Term, TermId

logger = logging.getLogger(__name__)


@dataclass
class BindingRow:
    """Variable bindings plus the table that supplied each variable's latest binding."""
    values: Dict[str, TermId] = field(default_factory=dict)
    provenance: Dict[str, str] = field(default_factory=dict)

    def __getitem__(self, name: str) -> TermId:
        return self.values[name]

    def extend(self, step: PlanStep, triple: EncodedTriple, table_id: str) -> Optional['BindingRow']:
        """
        Bind the variables of a step's pattern to a matched triple.

        Returns:
            BindingRow: New row, or None if the triple disagrees with an existing
            binding (including a variable repeated inside the pattern)
        """
        values = dict(self.values)
        provenance = dict(self.provenance)
        fresh: Dict[str, TermId] = {}
        for slot, term in enumerate(step.pattern):
            if not term.is_var:
                continue
            value = triple[slot]
            known = fresh.get(term.value, values.get(term.value))
            if known is not None and known != value:
                return None
            fresh[term.value] = value
        for name, value in fresh.items():
            values[name] = value
            provenance[name] = table_id
        return BindingRow(values, provenance)


@dataclass
class ExecStats:
    """Counters of one execution."""
    rows_out: int = 0
    plan_self_joins: int = 0
    runtime_same_table_probes: int = 0
    wall_time: float = 0.0
    step_rows: List[int] = field(default_factory=list)
    trace: AccessTrace = field(default_factory=AccessTrace)


def _join_targets(store: StorageEngine, plan: Plan, step: PlanStep, row: BindingRow) -> FrozenSet[str]:
    """Tables an outer row has to be probed against."""
    targets = set(step.provenance_right)
    if plan.engine == MODE_RMTT_PRUNED:
        for var in step.pruned_vars:
            targets &= store.so_join_tables(row.provenance[var.name], row[var.name])
    return frozenset(targets)


def _scan(store: StorageEngine, step: PlanStep, trace: AccessTrace) -> List[Tuple[EncodedTriple, str]]:
    return list(store.match(step.encoded, restrict=step.provenance_right, trace=trace))


def _hash_join(store: StorageEngine, plan: Plan, step: PlanStep, left: List[BindingRow],
               stats: ExecStats) -> List[BindingRow]:
    names = [v.name for v in step.join_vars]
    slots = {}
    for slot, term in enumerate(step.pattern):
        if term.is_var and term.value in names:
            slots.setdefault(term.value, slot)

    right = _scan(store, step, stats.trace)
    targets_per_row = [_join_targets(store, plan, step, row) for row in left]

    for row, targets in zip(left, targets_per_row):
        row_tables = {row.provenance[name] for name in names}
        stats.runtime_same_table_probes += len(targets & row_tables)

    out: List[BindingRow] = []
    if len(left) <= len(right):
        # Build on the outer rows, probe with the pattern's matches
        built: Dict[Tuple[TermId, ...], List[int]] = defaultdict(list)
        for i, row in enumerate(left):
            built[tuple(row[n] for n in names)].append(i)
        for triple, table_id in right:
            for i in built.get(tuple(triple[slots[n]] for n in names), ()):
                if table_id in targets_per_row[i]:
                    extended = left[i].extend(step, triple, table_id)
                    if extended is not None:
                        out.append(extended)
    else:
        built_right: Dict[Tuple[TermId, ...], List[Tuple[EncodedTriple, str]]] = defaultdict(list)
        for triple, table_id in right:
            built_right[tuple(triple[slots[n]] for n in names)].append((triple, table_id))
        for row, targets in zip(left, targets_per_row):
            for triple, table_id in built_right.get(tuple(row[n] for n in names), ()):
                if table_id in targets:
                    extended = row.extend(step, triple, table_id)
                    if extended is not None:
                        out.append(extended)
    return out


def _cartesian(store: StorageEngine, step: PlanStep, left: List[BindingRow], stats: ExecStats) -> List[BindingRow]:
    right = _scan(store, step, stats.trace)
    out = []
    for row in left:
        for triple, table_id in right:
            extended = row.extend(step, triple, table_id)
            if extended is not None:
                out.append(extended)
    return out


def execute(plan: Plan, store: StorageEngine) -> Tuple[List[BindingRow], ExecStats]:
    """
    Execute a plan.

    Args:
        plan: Plan built for this store
        store: Built store

    Returns:
        tuple: (binding rows, ExecStats)
    """
    stats = ExecStats(plan_self_joins=plan.plan_self_joins)
    start = time.perf_counter()

    rows: List[BindingRow] = []
    if not plan.empty:
        for step in plan.steps:
            if step.is_scan:
                empty = BindingRow()
                rows = [r for r in (empty.extend(step, t, table) for t, table in _scan(store, step, stats.trace))
                        if r is not None]
            elif step.is_cartesian:
                rows = _cartesian(store, step, rows, stats)
            else:
                rows = _hash_join(store, plan, step, rows, stats)
            stats.step_rows.append(len(rows))
            if not rows:
                logger.debug(f"Step {step.index} produced no rows, stopping")
                break

    stats.rows_out = len(rows)
    stats.wall_time = time.perf_counter() - start
    logger.debug(f"Executed {plan.engine} plan: {stats.rows_out} rows, "
                 f"{stats.runtime_same_table_probes} same-table probes, {stats.wall_time:.4f}s")
    return rows, stats


def project(rows: Iterable[BindingRow], variables: Sequence[str], distinct: bool = False) -> List[Tuple[TermId, ...]]:
    """
    Project binding rows onto a variable list.

    Args:
        rows: Binding rows
        variables: Projection
        distinct: Drop repeated tuples, keeping the first occurrence

    Returns:
        list: Tuples of term ids
    """
    projected = [tuple(row[v] for v in variables) for row in rows]
    if distinct:
        projected = list(dict.fromkeys(projected))
    return projected


def decode_rows(store: StorageEngine, rows: Iterable[Tuple[TermId, ...]]) -> List[Tuple[Term, ...]]:
    """Decode projected id tuples into terms."""
    decode = store.dictionary.decode
    return [tuple(decode(v) for v in row) for row in rows]


def run_query(plan: Plan, store: StorageEngine, distinct: Optional[bool] = None) -> Tuple[List[Tuple[Term, ...]], ExecStats]:
    """
    Execute, project and decode in one call.

    Args:
        plan: Plan
        store: Store
        distinct: Override the query's DISTINCT flag

    Returns:
        tuple: (decoded result rows, ExecStats)
    """
    rows, stats = execute(plan, store)
    query = plan.query
    distinct = query.distinct if distinct is None else distinct
    return decode_rows(store, project(rows, query.projection, distinct)), stats


def as_bag(rows: Iterable[Sequence]) -> Counter:
    """Result rows as a multiset."""
    return Counter(tuple(r) for r in rows)


def format_rows(variables: Sequence[str], rows: Iterable[Sequence[Term]], as_json: bool = False) -> str:
    """
    Render decoded result rows.

    Args:
        variables: Column names
        rows: Decoded rows
        as_json: JSON array of objects instead of tab-separated N-Triples terms

    Returns:
        str: Rendered rows
    """
    rows = list(rows)
    if as_json:
        payload = [{name: {'type': term.kind.value, 'value': term.lexical}
                    for name, term in zip(variables, row)} for row in rows]
        return json.dumps(payload, indent=2, ensure_ascii=False)
    lines = ['\t'.join(f"?{v}" for v in variables)]
    lines.extend('\t'.join(term.n3() for term in row) for row in rows)
    return '\n'.join(lines)
