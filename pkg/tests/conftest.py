"""
Shared fixtures for the RMTT-Workbench test suite.
"""

import os
import random
from typing import List

import pytest

from modules.bench.generator import GenConfig
from modules.engines.engine_factory import build_engine
from modules.query.sparql_parser import BgpQuery, PatternTerm, QueryPattern, parse_query_file
from modules.rdf.ntriples import read_ntriples
from modules.rdf.terms import Triple, iri, literal

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA_DIR = os.path.join(ROOT, 'data')
FIXTURES_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'fixtures')

MAGAZINE_NT = os.path.join(DATA_DIR, 'fixtures', 'magazine.nt')
MAGAZINE_QUERIES = os.path.join(DATA_DIR, 'queries', 'magazine')
LUBM_QUERIES = os.path.join(DATA_DIR, 'queries', 'lubm')

MAG = "http://example.org/magazine/"


def mag(name: str):
    """Magazine fixture IRI."""
    return iri(MAG + name)


@pytest.fixture(scope='session')
def magazine_triples() -> List[Triple]:
    return read_ntriples(MAGAZINE_NT).triples


@pytest.fixture
def magazine_store(magazine_triples):
    """Factory building a fresh magazine store of the given engine kind."""
    def make(kind: str):
        return build_engine(kind, magazine_triples)
    return make


@pytest.fixture(scope='session')
def magazine_queries():
    return {name: parse_query_file(os.path.join(MAGAZINE_QUERIES, f"{name}.rq"))
            for name in ('q1', 'q2', 'q3', 'q4')}


@pytest.fixture
def tiny_config() -> GenConfig:
    """Smallest dataset on which every benchmark query still has answers."""
    return GenConfig(seed=7, universities=2, departments_per_university=1, students_per_department=16,
                     professors_per_department=6, courses_per_department=8,
                     research_groups_per_department=2)


@pytest.fixture
def small_config() -> GenConfig:
    return GenConfig(seed=42, universities=2, departments_per_university=2, students_per_department=40,
                     professors_per_department=12, courses_per_department=20,
                     research_groups_per_department=5)


def random_graph(seed: int, nodes: int = 15, predicates: int = 4, size: int = 80) -> List[Triple]:
    """Random triples over a small vocabulary, with some literal objects and repeats."""
    rng = random.Random(seed)
    node = [iri(f"http://example.org/n{i}") for i in range(nodes)]
    pred = [iri(f"http://example.org/p{i}") for i in range(predicates)]
    triples = []
    for _ in range(size):
        s = rng.choice(node)
        p = rng.choice(pred)
        o = literal(f"v{rng.randrange(4)}") if rng.random() < 0.15 else rng.choice(node)
        triples.append(Triple(s, p, o))
    return triples


def random_query(rng: random.Random, predicates, nodes) -> BgpQuery:
    """A connected BGP of one to five patterns over a random graph's vocabulary."""
    names = ['v0', 'v1']
    patterns = [QueryPattern(PatternTerm.var('v0'), PatternTerm.iri(rng.choice(predicates)), PatternTerm.var('v1'))]
    for i in range(rng.randrange(5)):
        shared = PatternTerm.var(rng.choice(names))
        if rng.random() < 0.2:
            other = PatternTerm.iri(rng.choice(nodes))
        else:
            names.append(f"v{len(names)}")
            other = PatternTerm.var(names[-1])
        if rng.random() < 0.15:
            names.append(f"p{i}")
            predicate = PatternTerm.var(names[-1])
        else:
            predicate = PatternTerm.iri(rng.choice(predicates))
        if rng.random() < 0.5:
            patterns.append(QueryPattern(shared, predicate, other))
        else:
            patterns.append(QueryPattern(other, predicate, shared))
    return BgpQuery(prefixes={}, select_vars=[], patterns=patterns, select_all=True)
