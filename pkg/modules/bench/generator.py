"""
University dataset generator for RMTT-Workbench.

Produces a deterministic, LUBM-flavored N-Triples dataset that uses the
vocabulary of the fourteen benchmark queries. Entity descriptions (types and
literal attributes) are emitted first; relationship triples follow, grouped by
the entity that owns them.

Because queries are matched without RDFS reasoning, every entity is typed
with its most specific class and each superclass the queries ask for.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Dict, Iterator, List, Optional

import numpy as np

from modules.rdf.ntriples import write_ntriples
from modules.rdf.terms import Term, Triple, iri, literal

logger = logging.getLogger(__name__)

UB = "http://www.lehigh.edu/~zhp2/2004/0401/univ-bench.owl#"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

PROFESSOR_RANKS = ("FullProfessor", "AssociateProfessor", "AssistantProfessor")
DEGREE_PREDICATES = ("undergraduateDegreeFrom", "mastersDegreeFrom", "doctoralDegreeFrom")


def ub(name: str) -> Term:
    """Term in the univ-bench vocabulary."""
    return iri(UB + name)


TYPE = iri(RDF_TYPE)


@dataclass
class GenConfig:
    """Generator settings. Identical settings give byte-identical output."""
    seed: int = 42
    universities: int = 2
    departments_per_university: int = 10
    students_per_department: int = 400
    professors_per_department: int = 12
    courses_per_department: int = 20
    research_groups_per_department: int = 5
    # Above three, publication links sit next to each other and some land in the second table
    publications_per_professor: int = 2
    graduate_every: int = 4

    def __post_init__(self):
        for name in ('universities', 'departments_per_university', 'students_per_department',
                     'professors_per_department', 'courses_per_department', 'graduate_every'):
            if getattr(self, name) < 1:
                raise ValueError(f"Generator setting '{name}' must be a positive integer")
        for name in ('research_groups_per_department', 'publications_per_professor'):
            if getattr(self, name) < 0:
                raise ValueError(f"Generator setting '{name}' must not be negative")

    @classmethod
    def from_dict(cls, values: Optional[Dict] = None) -> 'GenConfig':
        """Build a config from a mapping, ignoring unknown keys."""
        values = values or {}
        known = set(asdict(cls()).keys())
        return cls(**{k: v for k, v in values.items() if k in known})


@dataclass
class _Department:
    univ: int
    index: int
    iri: Term
    professors: List[Term]
    courses: List[Term]
    graduate_courses: List[Term]
    research_groups: List[Term]
    # Courses taught, per professor index
    teaching: Dict[int, List[Term]]


class UniversityGenerator:
    """Generates the triple stream for one GenConfig."""

    def __init__(self, config: GenConfig):
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        self.departments = [self._layout(u, d)
                            for u in range(config.universities)
                            for d in range(config.departments_per_university)]

    # Naming

    @staticmethod
    def university(u: int) -> Term:
        return iri(f"http://www.University{u}.edu")

    @staticmethod
    def department_base(u: int, d: int) -> str:
        return f"http://www.Department{d}.University{u}.edu"

    def _layout(self, u: int, d: int) -> _Department:
        cfg = self.config
        base = self.department_base(u, d)
        professors = [iri(f"{base}/{PROFESSOR_RANKS[k % 3]}{k // 3}")
                      for k in range(cfg.professors_per_department)]
        graduate_count = cfg.courses_per_department // 2
        undergraduate_count = cfg.courses_per_department - graduate_count
        courses = [iri(f"{base}/Course{i}") for i in range(undergraduate_count)]
        graduate_courses = [iri(f"{base}/GraduateCourse{i}") for i in range(graduate_count)]
        teaching: Dict[int, List[Term]] = {k: [] for k in range(len(professors))}
        for k, course in enumerate(courses + graduate_courses):
            teaching[k % len(professors)].append(course)
        groups = [iri(f"{base}/ResearchGroup{i}") for i in range(cfg.research_groups_per_department)]
        return _Department(u, d, iri(base), professors, courses, graduate_courses, groups, teaching)

    def _students(self, dept: _Department) -> Iterator[tuple]:
        """(term, is_graduate, per-kind index) for every student of a department."""
        base = self.department_base(dept.univ, dept.index)
        graduates = undergraduates = 0
        for i in range(self.config.students_per_department):
            if i % self.config.graduate_every == 0:
                yield iri(f"{base}/GraduateStudent{graduates}"), True, graduates
                graduates += 1
            else:
                yield iri(f"{base}/UndergraduateStudent{undergraduates}"), False, undergraduates
                undergraduates += 1

    @staticmethod
    def _local(term: Term) -> str:
        return term.lexical.rsplit('/', 1)[-1]

    def _person_attributes(self, person: Term, dept: _Department) -> Iterator[Triple]:
        name = self._local(person)
        host = f"Department{dept.index}.University{dept.univ}.edu"
        yield Triple(person, ub("name"), literal(name))
        yield Triple(person, ub("emailAddress"), literal(f"{name}@{host}"))
        yield Triple(person, ub("telephone"), literal(self._phone(dept, name)))

    @staticmethod
    def _phone(dept: _Department, name: str) -> str:
        digits = sum(ord(c) for c in name) % 10000
        return f"{dept.univ:03d}-{dept.index:03d}-{digits:04d}"

    # Descriptions: objects are classes and literals only

    def descriptions(self) -> Iterator[Triple]:
        cfg = self.config
        for u in range(cfg.universities):
            univ = self.university(u)
            yield Triple(univ, TYPE, ub("University"))
            yield Triple(univ, ub("name"), literal(f"University{u}"))

        for dept in self.departments:
            yield Triple(dept.iri, TYPE, ub("Department"))
            yield Triple(dept.iri, ub("name"), literal(f"Department{dept.index}"))

            for k, professor in enumerate(dept.professors):
                yield Triple(professor, TYPE, ub(PROFESSOR_RANKS[k % 3]))
                if k == 0:
                    yield Triple(professor, TYPE, ub("Chair"))
                for cls in ("Professor", "Faculty", "Person"):
                    yield Triple(professor, TYPE, ub(cls))
                yield from self._person_attributes(professor, dept)
                for j in range(cfg.publications_per_professor):
                    publication = iri(f"{professor.lexical}/Publication{j}")
                    yield Triple(publication, TYPE, ub("Publication"))
                    yield Triple(publication, ub("name"), literal(f"Publication{j}"))

            for course in dept.courses:
                yield Triple(course, TYPE, ub("Course"))
                yield Triple(course, ub("name"), literal(self._local(course)))
            for course in dept.graduate_courses:
                yield Triple(course, TYPE, ub("GraduateCourse"))
                yield Triple(course, TYPE, ub("Course"))
                yield Triple(course, ub("name"), literal(self._local(course)))

            for group in dept.research_groups:
                yield Triple(group, TYPE, ub("ResearchGroup"))
                yield Triple(group, ub("name"), literal(self._local(group)))

            for student, graduate, _ in self._students(dept):
                yield Triple(student, TYPE, ub("GraduateStudent" if graduate else "UndergraduateStudent"))
                yield Triple(student, TYPE, ub("Student"))
                yield Triple(student, TYPE, ub("Person"))
                yield from self._person_attributes(student, dept)

    # Relationships: every link that points back at an entity with its own
    # relationships directly follows a link that does not

    def _professor_links(self, dept: _Department, k: int, professor: Term) -> Iterator[Triple]:
        cfg = self.config
        yield Triple(professor, ub("worksFor"), dept.iri)
        for j in range(max(cfg.publications_per_professor, len(DEGREE_PREDICATES))):
            if j < cfg.publications_per_professor:
                publication = iri(f"{professor.lexical}/Publication{j}")
                yield Triple(publication, ub("publicationAuthor"), professor)
            if j < len(DEGREE_PREDICATES):
                school = self.university(int(self.rng.integers(cfg.universities)))
                yield Triple(professor, ub(DEGREE_PREDICATES[j]), school)
        for course in dept.teaching[k]:
            yield Triple(professor, ub("teacherOf"), course)

    def _student_links(self, dept: _Department, student: Term, graduate: bool, index: int) -> Iterator[Triple]:
        cfg = self.config
        yield Triple(student, ub("memberOf"), dept.iri)
        pool = dept.graduate_courses if graduate and dept.graduate_courses else dept.courses or dept.graduate_courses
        first = pool[index % len(pool)]
        yield Triple(student, ub("takesCourse"), first)

        if graduate:
            teachers = [k for k, taught in dept.teaching.items() if taught]
            advisor = teachers[int(self.rng.integers(len(teachers)))]
            yield Triple(student, ub("advisor"), dept.professors[advisor])
            taught = dept.teaching[advisor]
            graduate_taught = [c for c in taught if c in dept.graduate_courses]
            second = (graduate_taught or taught)[0]
        else:
            second = pool[int(self.rng.integers(len(pool)))]
        if second != first:
            yield Triple(student, ub("takesCourse"), second)

        if graduate:
            # The first graduate of each department studied at home
            school_index = dept.univ if index == 0 else int(self.rng.integers(cfg.universities))
            school = self.university(school_index)
            yield Triple(student, ub("undergraduateDegreeFrom"), school)
            yield Triple(school, ub("hasAlumnus"), student)

    def relationships(self) -> Iterator[Triple]:
        for dept in self.departments:
            univ = self.university(dept.univ)
            for k, professor in enumerate(dept.professors):
                yield from self._professor_links(dept, k, professor)
            for group in dept.research_groups:
                yield Triple(group, ub("subOrganizationOf"), dept.iri)
                yield Triple(group, ub("subOrganizationOf"), univ)
            yield Triple(dept.iri, ub("subOrganizationOf"), univ)
            for student, graduate, index in self._students(dept):
                yield from self._student_links(dept, student, graduate, index)

    def triples(self) -> Iterator[Triple]:
        yield from self.descriptions()
        yield from self.relationships()


def generate_triples(config: Optional[GenConfig] = None) -> List[Triple]:
    """
    Generate the dataset in memory.

    Args:
        config: Generator settings (defaults when omitted)

    Returns:
        list: Triples in emission order
    """
    config = config or GenConfig()
    triples = list(UniversityGenerator(config).triples())
    logger.info(f"Generated {len(triples)} triples (seed {config.seed}, "
                f"{config.universities} universities x {config.departments_per_university} departments)")
    return triples


def generate(config: Optional[GenConfig], output_path: str) -> int:
    """
    Generate the dataset into an N-Triples file.

    Args:
        config: Generator settings
        output_path: Target .nt path

    Returns:
        int: Number of triples written
    """
    count = write_ntriples(generate_triples(config), output_path)
    logger.info(f"Wrote {count} triples to {output_path}")
    return count
