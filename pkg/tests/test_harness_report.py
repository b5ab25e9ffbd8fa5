"""
Tests for the benchmark harness and report writers.
"""

import csv
import time

import pytest

from modules.bench.harness import (
    BenchReport, BenchRow, DEFAULT_ENGINES, engine_kind, load_queries, run_queries, run_suite
)
from modules.bench.report import CHECK_COLUMNS, CSV_COLUMNS, ReportGenerator, emit_report
from modules.query.planner import plan
from modules.query.sparql_parser import parse_query

from tests.conftest import LUBM_QUERIES, MAG, MAGAZINE_NT, MAGAZINE_QUERIES


@pytest.fixture
def magazine_report(magazine_triples, magazine_queries):
    return run_queries(magazine_triples, magazine_queries, repetitions=2, check=True, progress=False)


def test_engine_kind():
    assert engine_kind('rmtt-pruned') == 'rmtt'
    assert engine_kind('vp') == 'vp'
    with pytest.raises(ValueError):
        engine_kind('rmtt')


def test_load_queries_sorted_by_file_name():
    queries = load_queries(LUBM_QUERIES)
    assert list(queries) == [f"q{i:02d}" for i in range(1, 15)]


def test_load_queries_missing_directory():
    with pytest.raises(FileNotFoundError):
        load_queries("/nonexistent/queries")


def test_one_row_per_query_and_engine(magazine_report):
    assert len(magazine_report.rows) == 16
    assert magazine_report.engines == DEFAULT_ENGINES
    assert magazine_report.query_ids == ['q1', 'q2', 'q3', 'q4']
    assert magazine_report.metadata['triple_count'] == 25


def test_metadata_describes_dataset(magazine_report):
    metadata = magazine_report.metadata
    assert (metadata['subject_count'], metadata['predicate_count'], metadata['object_count']) == (8, 8, 20)
    assert metadata['repetitions'] == 2


def test_result_counts_agree_across_engines(magazine_report):
    for query_id in magazine_report.query_ids:
        counts = {magazine_report.row(query_id, e).result_count for e in magazine_report.engines}
        assert len(counts) == 1
        row = magazine_report.row(query_id, 'single')
        assert row.oracle_count == row.result_count
        assert row.error is None
    assert magazine_report.row('q4', 'vp').result_count == 2


def test_self_join_totals(magazine_report):
    assert magazine_report.total_self_joins('single') == 6
    assert magazine_report.total_self_joins('rmtt-sound') == 1
    assert magazine_report.total_self_joins('rmtt-pruned') == 0
    assert magazine_report.reduction('rmtt-pruned') == 100.0
    assert magazine_report.reduction('single') == 0.0


def test_reduction_without_baseline():
    report = BenchReport(rows=[BenchRow('q1', 'vp', plan_self_joins=2)])
    assert report.reduction('vp') is None


def test_repetitions_below_one_still_run_once(magazine_triples):
    queries = {'names': parse_query(f"PREFIX : <{MAG}> SELECT ?x WHERE {{ ?x :Name ?n }}")}
    report = run_queries(magazine_triples, queries, engines=['single', 'rmtt-pruned'], repetitions=0,
                         progress=False)
    assert [r.result_count for r in report.rows] == [6, 6]


def test_failed_query_is_recorded(monkeypatch, magazine_triples, magazine_queries):
    def broken(query_plan, store):
        raise RuntimeError("execution failed")

    monkeypatch.setattr('modules.bench.harness.execute', broken)
    report = run_queries(magazine_triples, {'q2': magazine_queries['q2']}, engines=['single', 'vp'],
                         repetitions=1, progress=False)
    assert [r.error for r in report.rows] == ["execution failed", "execution failed"]
    assert report.rows[0].pattern_count == 2
    assert report.total_self_joins('single') == 0


def test_wall_time_includes_planning(monkeypatch, magazine_triples, magazine_queries):
    def slow_plan(query, store, mode=None):
        time.sleep(0.02)
        return plan(query, store, mode)

    monkeypatch.setattr('modules.bench.harness.plan', slow_plan)
    report = run_queries(magazine_triples, {'q1': magazine_queries['q1']}, engines=['vp'],
                         repetitions=1, progress=False)
    assert report.rows[0].wall_ms_median >= 20.0


def test_run_suite_records_paths():
    report = run_suite(MAGAZINE_NT, MAGAZINE_QUERIES, engines=['single', 'rmtt-pruned'],
                       repetitions=1, progress=False)
    assert report.metadata['dataset'] == MAGAZINE_NT
    assert len(report.rows) == 8


def test_run_suite_rejects_unknown_engine():
    with pytest.raises(ValueError):
        run_suite(MAGAZINE_NT, MAGAZINE_QUERIES, engines=['column-store'], progress=False)


def test_csv_report(tmp_path, magazine_report):
    path = str(tmp_path / "report.csv")
    emit_report(magazine_report, path)
    with open(path, newline='') as f:
        rows = list(csv.DictReader(f))
    assert list(rows[0].keys()) == CSV_COLUMNS + CHECK_COLUMNS
    assert len(rows) == 16
    first = rows[0]
    assert (first['query_id'], first['engine'], first['result_count']) == ('q1', 'single', '1')
    assert first['error'] == ''


def test_csv_report_without_check(tmp_path, magazine_triples, magazine_queries):
    report = run_queries(magazine_triples, magazine_queries, engines=['vp'], repetitions=1, progress=False)
    path = str(tmp_path / "nested" / "report.csv")
    emit_report(report, path)
    with open(path, newline='') as f:
        assert next(csv.reader(f)) == CSV_COLUMNS


def test_markdown_report(tmp_path, magazine_report):
    path = str(tmp_path / "report.md")
    emit_report(magazine_report, path, {'templates_dir': str(tmp_path / "no-templates")})
    with open(path, encoding='utf-8') as f:
        text = f.read()
    assert text.startswith("# Benchmark report")
    assert "Triples: 25\nSubjects: 8, predicates: 8, objects: 20\n" in text
    assert "| Query | Patterns | single ms | single self-joins |" in text
    assert "| rmtt-pruned | 0 | 100.0% |" in text
    assert "Oracle mismatches" not in text
    assert "## Errors" not in text


def test_markdown_report_lists_errors(magazine_report):
    magazine_report.rows.append(BenchRow('q5', 'single', pattern_count=1, error="boom"))
    text = ReportGenerator({'templates_dir': '/nonexistent'}).render_markdown(magazine_report)
    assert "## Errors" in text
    assert "- q5 on single: boom" in text


def test_template_conditionals():
    generator = ReportGenerator()
    template = "a[if:x] x=${x}[endif][if:y] y=${y}[endif]"
    assert generator._process_template(template, {'x': '1', 'y': ''}) == "a x=1"
