"""
Tests for planning, execution, explain output and the brute-force evaluator.
"""

import json
import random

import pytest

from modules.engines.engine_factory import build_engine
from modules.query.executor import as_bag, execute, format_rows, run_query
from modules.query.explain import explain
from modules.query.oracle import evaluate_oracle
from modules.query.planner import (
    MODE_RMTT_PRUNED, MODE_RMTT_SOUND, MODE_SINGLE, MODE_VP, plan, resolve_mode
)
from modules.query.sparql_parser import parse_query
from modules.rdf.terms import literal

from tests.conftest import MAG, mag, random_graph, random_query

ALL_MODES = [(MODE_SINGLE, 'single'), (MODE_VP, 'vp'), (MODE_RMTT_SOUND, 'rmtt'), (MODE_RMTT_PRUNED, 'rmtt')]

MAGAZINE_RESULTS = {
    'q1': [(literal("Data Web"),)],
    'q2': [(literal("Bob Hacker"),)],
    'q3': [(mag("B1"), mag("A1"))],
    'q4': [(mag("A2"), mag("B1")), (mag("A2"), mag("B2"))],
}

MAGAZINE_SELF_JOINS = {
    MODE_SINGLE: {'q1': 0, 'q2': 1, 'q3': 2, 'q4': 3},
    MODE_VP: {'q1': 0, 'q2': 0, 'q3': 0, 'q4': 0},
    MODE_RMTT_SOUND: {'q1': 0, 'q2': 1, 'q3': 0, 'q4': 0},
    MODE_RMTT_PRUNED: {'q1': 0, 'q2': 0, 'q3': 0, 'q4': 0},
}


@pytest.fixture
def stores(magazine_triples):
    return {kind: build_engine(kind, magazine_triples) for kind in ('single', 'vp', 'rmtt')}


class TestMagazineQueries:
    @pytest.mark.parametrize("mode, kind", ALL_MODES)
    @pytest.mark.parametrize("name", ['q1', 'q2', 'q3', 'q4'])
    def test_results(self, stores, magazine_queries, mode, kind, name):
        store = stores[kind]
        rows, stats = run_query(plan(magazine_queries[name], store, mode), store)
        assert as_bag(rows) == as_bag(MAGAZINE_RESULTS[name])
        assert stats.rows_out == len(MAGAZINE_RESULTS[name])

    @pytest.mark.parametrize("mode, kind", ALL_MODES)
    def test_self_join_counts(self, stores, magazine_queries, mode, kind):
        counts = {name: plan(query, stores[kind], mode).plan_self_joins
                  for name, query in magazine_queries.items()}
        assert counts == MAGAZINE_SELF_JOINS[mode]

    def test_results_match_oracle(self, magazine_triples, magazine_queries):
        for name, query in magazine_queries.items():
            assert as_bag(evaluate_oracle(query, magazine_triples)) == as_bag(MAGAZINE_RESULTS[name])

    def test_pruned_plan_for_author_then_name(self, stores, magazine_queries):
        query_plan = plan(magazine_queries['q2'], stores['rmtt'], 'pruned')
        scan, join = query_plan.steps
        assert scan.pattern_index == 0
        assert scan.provenance_right == frozenset({'twin0'})
        assert [v.pair for v in join.join_vars] == ['o-s']
        assert join.branches == {('twin0',): frozenset({'twin1'})}
        assert not join.self_join_flag

    def test_sound_plan_for_author_then_name(self, stores, magazine_queries):
        query_plan = plan(magazine_queries['q2'], stores['rmtt'], 'sound')
        join = query_plan.steps[1]
        assert join.provenance_left == frozenset({'twin0'})
        assert join.provenance_right == frozenset({'twin0', 'twin1'})
        assert join.self_join_flag

    def test_runtime_probes(self, stores, magazine_queries):
        query = magazine_queries['q2']
        _, single = execute(plan(query, stores['single']), stores['single'])
        _, pruned = execute(plan(query, stores['rmtt'], 'pruned'), stores['rmtt'])
        _, sound = execute(plan(query, stores['rmtt'], 'sound'), stores['rmtt'])
        assert single.runtime_same_table_probes == 1
        assert sound.runtime_same_table_probes == 1
        assert pruned.runtime_same_table_probes == 0

    def test_greedy_order_follows_connections(self, stores, magazine_queries):
        query_plan = plan(magazine_queries['q4'], stores['single'])
        assert [s.pattern_index for s in query_plan.steps] == [0, 1, 2, 3]
        assert query_plan.cartesian_count == 0

    def test_cartesian_patterns_come_last(self, stores):
        query = parse_query(f"PREFIX : <{MAG}> SELECT * WHERE {{ ?a :Year ?y . ?c :City ?d . ?a :Title ?t }}")
        query_plan = plan(query, stores['single'])
        assert [s.pattern_index for s in query_plan.steps] == [0, 2, 1]
        assert query_plan.steps[2].is_cartesian
        rows, _ = run_query(query_plan, stores['single'])
        assert len(rows) == 4

    def test_distinct_projection(self, stores):
        query = parse_query(f"PREFIX : <{MAG}> SELECT ?A WHERE {{ ?C :Name \"Cyprus\" . "
                            f"?U :City ?C . ?A :Affiliation ?U . ?B :Author ?A }}")
        store = stores['rmtt']
        assert len(run_query(plan(query, store), store)[0]) == 2
        assert run_query(plan(query, store), store, distinct=True)[0] == [(mag("A2"),)]

    def test_repeated_variable_in_pattern(self, stores):
        query = parse_query("SELECT ?x WHERE { ?x ?p ?x }")
        store = stores['single']
        assert run_query(plan(query, store), store)[0] == []

    @pytest.mark.parametrize("mode, kind", ALL_MODES)
    def test_unknown_constant_gives_empty_plan(self, stores, mode, kind):
        query = parse_query(f"PREFIX : <{MAG}> SELECT ?x WHERE {{ ?x :Publisher ?y . ?x :Title ?t }}")
        query_plan = plan(query, stores[kind], mode)
        assert query_plan.empty
        rows, stats = run_query(query_plan, stores[kind])
        assert rows == []
        assert stats.plan_self_joins == 0
        assert "empty result" in explain(query_plan)


class TestModes:
    def test_resolve_mode(self, stores):
        assert resolve_mode(stores['single']) == MODE_SINGLE
        assert resolve_mode(stores['vp'], 'sound') == MODE_VP
        assert resolve_mode(stores['rmtt']) == MODE_RMTT_PRUNED
        assert resolve_mode(stores['rmtt'], 'sound') == MODE_RMTT_SOUND
        assert resolve_mode(stores['rmtt'], MODE_RMTT_PRUNED) == MODE_RMTT_PRUNED

    def test_unknown_mode(self, stores):
        with pytest.raises(ValueError):
            resolve_mode(stores['rmtt'], 'fast')


class TestExplain:
    def test_footer_and_header(self, stores, magazine_queries):
        text = explain(plan(magazine_queries['q4'], stores['single']))
        lines = text.splitlines()
        assert lines[0] == "engine single: 4 patterns, 3 joins"
        assert lines[-1] == "3 self-joins"
        assert len(lines) == 6

    def test_single_self_join_wording(self, stores, magazine_queries):
        assert explain(plan(magazine_queries['q2'], stores['single'])).endswith("\n1 self-join\n")

    def test_single_pattern(self, stores, magazine_queries):
        text = explain(plan(magazine_queries['q1'], stores['single']))
        assert text.endswith("0 self-joins\n")
        assert "step 0  scan  pattern#0 :B1 :Title ?O  order=SPO  est=1  left=-  right={T}  self-join=no" in text

    def test_pruned_step_line(self, stores, magazine_queries):
        text = explain(plan(magazine_queries['q2'], stores['rmtt'], 'pruned'))
        assert text.splitlines()[0] == "engine rmtt-pruned: 2 patterns, 1 joins"
        join_line = text.splitlines()[2]
        assert join_line.startswith("step 1  join[?A:o-s]  pattern#1 ?A :Name ?N")
        assert "left={twin0}  right={twin1}  branches=twin0->{twin1}  self-join=no" in join_line

    def test_deterministic(self, magazine_triples, magazine_queries):
        first = build_engine('rmtt', magazine_triples)
        second = build_engine('rmtt', magazine_triples)
        for query in magazine_queries.values():
            assert explain(plan(query, first)) == explain(plan(query, second))


class TestFormatting:
    def test_text_rows(self):
        text = format_rows(['O'], [(literal("Data Web"),)])
        assert text == '?O\n"Data Web"'

    def test_json_rows(self):
        text = format_rows(['A', 'B'], [(mag("A2"), mag("B1"))], as_json=True)
        assert json.loads(text) == [{'A': {'type': 'IRI', 'value': MAG + "A2"},
                                     'B': {'type': 'IRI', 'value': MAG + "B1"}}]


@pytest.mark.parametrize("seed", range(8))
def test_engines_agree_with_oracle(seed):
    triples = random_graph(seed)
    predicates = sorted({t.p.lexical for t in triples})
    nodes = sorted({t.s.lexical for t in triples})
    stores = {kind: build_engine(kind, triples) for kind in ('single', 'vp', 'rmtt')}
    rng = random.Random(1000 + seed)

    for _ in range(12):
        query = random_query(rng, predicates, nodes)
        expected = as_bag(evaluate_oracle(query, triples))
        joins = {}
        probes = {}
        for mode, kind in ALL_MODES:
            query_plan = plan(query, stores[kind], mode)
            rows, stats = run_query(query_plan, stores[kind])
            assert as_bag(rows) == expected, f"{mode} disagrees on {[str(p) for p in query.patterns]}"
            joins[mode] = stats.plan_self_joins
            probes[mode] = stats.runtime_same_table_probes
        assert joins[MODE_RMTT_PRUNED] <= joins[MODE_RMTT_SOUND]
        assert probes[MODE_RMTT_PRUNED] <= probes[MODE_RMTT_SOUND]


@pytest.mark.slow
@pytest.mark.parametrize("seed", range(100))
def test_engines_agree_with_oracle_at_scale(seed):
    size = 400 + (seed % 9) * 200
    triples = random_graph(seed, nodes=max(40, size // 10), predicates=6, size=size)
    predicates = sorted({t.p.lexical for t in triples})
    nodes = sorted({t.s.lexical for t in triples})
    stores = {kind: build_engine(kind, triples) for kind in ('single', 'vp', 'rmtt')}
    rng = random.Random(seed)
    for _ in range(50):
        query = random_query(rng, predicates, nodes)
        expected = as_bag(evaluate_oracle(query, triples))
        for mode, kind in ALL_MODES:
            rows, _ = run_query(plan(query, stores[kind], mode), stores[kind])
            assert as_bag(rows) == expected
