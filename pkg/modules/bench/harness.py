"""
Benchmark harness for RMTT-Workbench.

Builds every engine once over a dataset, runs each query R times per engine
and records the median wall time next to the self-join counters.
"""

import os
import glob
import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from modules.engines.base_engine import StorageEngine
from modules.engines.engine_factory import build_engine
from modules.query.executor import execute
from modules.query.oracle import evaluate_oracle
from modules.query.planner import MODE_RMTT_PRUNED, MODE_RMTT_SOUND, PLAN_MODES, plan
from modules.query.sparql_parser import BgpQuery, parse_query_file
from modules.rdf.dictionary import Dictionary
from modules.rdf.ntriples import read_ntriples
from modules.rdf.terms import Triple

logger = logging.getLogger(__name__)

DEFAULT_ENGINES = list(PLAN_MODES)

# Dataset shape recorded in the report header
DATASET_KEYS = ('triple_count', 'subject_count', 'predicate_count', 'object_count')

# Plan mode -> engine kind that serves it
_ENGINE_KIND = {MODE_RMTT_SOUND: 'rmtt', MODE_RMTT_PRUNED: 'rmtt'}


@dataclass
class BenchRow:
    """Measurements for one (query, engine) pair."""
    query_id: str
    engine: str
    result_count: int = 0
    wall_ms_median: float = 0.0
    plan_self_joins: int = 0
    runtime_same_table_probes: int = 0
    pattern_count: int = 0
    oracle_count: Optional[int] = None
    error: Optional[str] = None


@dataclass
class BenchReport:
    """Rows in (query, engine) order plus run metadata."""
    rows: List[BenchRow] = field(default_factory=list)
    metadata: Dict[str, object] = field(default_factory=dict)

    @property
    def engines(self) -> List[str]:
        return list(dict.fromkeys(r.engine for r in self.rows))

    @property
    def query_ids(self) -> List[str]:
        return list(dict.fromkeys(r.query_id for r in self.rows))

    def row(self, query_id: str, engine: str) -> Optional[BenchRow]:
        for r in self.rows:
            if r.query_id == query_id and r.engine == engine:
                return r
        return None

    def total_self_joins(self, engine: str) -> int:
        return sum(r.plan_self_joins for r in self.rows if r.engine == engine and r.error is None)

    def reduction(self, engine: str, baseline: str = 'single') -> Optional[float]:
        """Percentage of the baseline's self-joins that an engine avoids."""
        base = self.total_self_joins(baseline)
        if base == 0 or baseline not in self.engines:
            return None
        return 100.0 * (base - self.total_self_joins(engine)) / base

    def as_dicts(self) -> List[Dict[str, object]]:
        return [asdict(r) for r in self.rows]


def engine_kind(mode: str) -> str:
    """Store kind that a plan mode runs on."""
    if mode not in PLAN_MODES:
        raise ValueError(f"Unknown bench engine '{mode}' (expected one of: {', '.join(PLAN_MODES)})")
    return _ENGINE_KIND.get(mode, mode)


def load_queries(queries_dir: str, tolerant: bool = True) -> Dict[str, BgpQuery]:
    """
    Parse every .rq file of a directory, keyed by file stem in sorted order.

    Raises:
        FileNotFoundError: If the directory does not exist
        QueryParseError: If a query does not parse
    """
    if not os.path.isdir(queries_dir):
        raise FileNotFoundError(f"Query directory not found: {queries_dir}")
    queries = {}
    for path in sorted(glob.glob(os.path.join(queries_dir, '*.rq'))):
        query_id = os.path.splitext(os.path.basename(path))[0]
        queries[query_id] = parse_query_file(path, tolerant=tolerant)
    logger.info(f"Loaded {len(queries)} queries from {queries_dir}")
    return queries


def build_stores(triples: Sequence[Triple], engines: Sequence[str]) -> Dict[str, StorageEngine]:
    """Build one store per engine kind needed by the plan modes, each with its own dictionary."""
    stores: Dict[str, StorageEngine] = {}
    for mode in engines:
        kind = engine_kind(mode)
        if kind not in stores:
            stores[kind] = build_engine(kind, triples, Dictionary())
    return stores


def _measure(query_id: str, query: BgpQuery, mode: str, store: StorageEngine, repetitions: int) -> BenchRow:
    row = BenchRow(query_id, mode, pattern_count=len(query.patterns))
    times = []
    for _ in range(max(repetitions, 1)):
        started = time.perf_counter()
        query_plan = plan(query, store, mode)
        rows, stats = execute(query_plan, store)
        times.append(time.perf_counter() - started)
    row.result_count = stats.rows_out
    row.plan_self_joins = stats.plan_self_joins
    row.runtime_same_table_probes = stats.runtime_same_table_probes
    row.wall_ms_median = round(float(np.median(times)) * 1000.0, 3)
    return row


def run_queries(triples: Sequence[Triple], queries: Dict[str, BgpQuery],
                engines: Sequence[str] = DEFAULT_ENGINES, repetitions: int = 3,
                check: bool = False, progress: bool = True) -> BenchReport:
    """
    Run a query set over in-memory triples.

    Args:
        triples: Dataset
        queries: Queries keyed by id
        engines: Plan modes to compare
        repetitions: Runs per (query, engine); the median wall time is kept
        check: Also count results with the brute-force evaluator
        progress: Show a progress bar

    Returns:
        BenchReport: One row per (query, engine)
    """
    stores = build_stores(triples, engines)
    metadata = {key: 0 for key in DATASET_KEYS}
    if stores:
        stats = next(iter(stores.values())).stats()
        metadata.update({key: stats[key] for key in DATASET_KEYS})
    metadata['repetitions'] = repetitions
    report = BenchReport(metadata=metadata)

    oracle_counts: Dict[str, int] = {}
    if check:
        for query_id, query in queries.items():
            oracle_counts[query_id] = len(evaluate_oracle(query, triples))

    pairs = [(query_id, mode) for query_id in queries for mode in engines]
    for query_id, mode in tqdm(pairs, desc="Benchmark", unit="run", disable=not progress):
        query = queries[query_id]
        try:
            row = _measure(query_id, query, mode, stores[engine_kind(mode)], repetitions)
        except Exception as e:
            logger.warning(f"Query {query_id} failed on {mode}: {e}")
            row = BenchRow(query_id, mode, pattern_count=len(query.patterns), error=str(e))
        row.oracle_count = oracle_counts.get(query_id)
        if row.oracle_count is not None and row.error is None and row.oracle_count != row.result_count:
            logger.warning(f"Query {query_id} on {mode}: {row.result_count} rows, oracle found {row.oracle_count}")
        logger.info(f"{query_id} {mode}: {row.result_count} rows, {row.wall_ms_median} ms, "
                    f"{row.plan_self_joins} self-joins")
        report.rows.append(row)
    return report


def run_suite(dataset: str, queries_dir: str, engines: Sequence[str] = DEFAULT_ENGINES,
              repetitions: int = 3, check: bool = False, progress: bool = True,
              tolerant: bool = True) -> BenchReport:
    """
    Run a query directory against an N-Triples dataset on every engine.

    Wall times cover planning and execution, not store builds.

    Args:
        dataset: Path to a .nt file
        queries_dir: Directory of .rq files
        engines: Plan modes to compare
        repetitions: Runs per (query, engine)
        check: Record brute-force result counts
        progress: Show a progress bar
        tolerant: Parse queries in tolerant mode

    Returns:
        BenchReport: The report
    """
    for mode in engines:
        engine_kind(mode)
    queries = load_queries(queries_dir, tolerant=tolerant)
    triples = read_ntriples(dataset).triples
    report = run_queries(triples, queries, engines, repetitions, check=check, progress=progress)
    report.metadata['dataset'] = dataset
    report.metadata['queries'] = queries_dir
    return report
