"""
On-disk store format for RMTT-Workbench.

A store directory holds a `manifest` (sorted key=value lines), the dictionary
in `dict.tsv` and one `tableK.tsv` per physical table. Twin-table stores also
keep their membership sets and placement log. Indexes are rebuilt on load.
See docs/STORE_FORMAT.md.
"""

import os
import shutil
import logging
import tempfile
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set

from modules.engines.base_engine import StorageEngine
from modules.engines.engine_factory import engine_factory
from modules.engines.rmtt_engine import BuildStats, PlacementReport, TwinTables
from modules.rdf.dictionary import Dictionary
from modules.rdf.ntriples import unescape_string
from modules.rdf.terms import EncodedTriple, Term, TermKind, escape_string

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
MANIFEST = "manifest"
DICTIONARY = "dict.tsv"
PLACEMENTS = "placements.tsv"
SET_FILES = ("sub", "obj", "overlap")


class StoreLoadError(ValueError):
    """Raised when a store directory cannot be loaded; names the offending file."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def table_file(k: int) -> str:
    return f"table{k}.tsv"


def set_file(kind: str, twin: int) -> str:
    return f"{kind}{twin}.ids"


@dataclass
class StoreManifest:
    """Flat key/value description of a saved store."""
    values: Dict[str, str] = field(default_factory=dict)

    @classmethod
    def for_store(cls, store: StorageEngine) -> 'StoreManifest':
        values = {key: _format_value(value) for key, value in store.stats().items()}
        values['format_version'] = str(FORMAT_VERSION)
        for k, table_id in enumerate(store.table_ids()):
            values[f"table.{k}.id"] = table_id
            values[f"table.{k}.rows"] = str(store.table_size(table_id))
        return cls(values)

    def to_text(self) -> str:
        return ''.join(f"{key}={self.values[key]}\n" for key in sorted(self.values))

    @classmethod
    def from_text(cls, text: str, path: str) -> 'StoreManifest':
        values = {}
        for number, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            key, sep, value = line.partition('=')
            if not sep:
                raise StoreLoadError(path, f"line {number}: expected key=value")
            values[key.strip()] = value.strip()
        return cls(values)

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        return self.values.get(key, default)

    def require(self, key: str, path: str) -> str:
        if key not in self.values:
            raise StoreLoadError(path, f"missing key '{key}'")
        return self.values[key]

    def get_int(self, key: str, path: str) -> int:
        value = self.require(key, path)
        try:
            return int(value)
        except ValueError:
            raise StoreLoadError(path, f"key '{key}' is not an integer: {value!r}")

    @property
    def engine(self) -> str:
        return self.values.get('engine', '')

    @property
    def table_ids(self) -> List[str]:
        ids = []
        while f"table.{len(ids)}.id" in self.values:
            ids.append(self.values[f"table.{len(ids)}.id"])
        return ids


def _format_value(value) -> str:
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


# Writing

def _write_lines(path: str, lines: Iterable[str]):
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for line in lines:
            f.write(line)
            f.write('\n')


def _write_payload(store: StorageEngine, directory: str):
    _write_lines(os.path.join(directory, DICTIONARY),
                 (f"{term_id}\t{term.kind.value}\t{escape_string(term.lexical)}"
                  for term_id, term in store.dictionary.items()))

    for k, table_id in enumerate(store.table_ids()):
        rows = sorted(store.iter_table(table_id))
        _write_lines(os.path.join(directory, table_file(k)), (f"{s}\t{p}\t{o}" for s, p, o in rows))

    if isinstance(store, TwinTables):
        for twin in range(2):
            for kind, sets in zip(SET_FILES, (store.sub_set, store.obj_set, store.overlap)):
                _write_lines(os.path.join(directory, set_file(kind, twin)), (str(i) for i in sorted(sets[twin])))
        _write_lines(os.path.join(directory, PLACEMENTS),
                     (f"{r.row}\t{r.twin}\t{int(r.switched)}\t{int(r.fallback)}" for r in store.placements))

    with open(os.path.join(directory, MANIFEST), 'w', encoding='utf-8', newline='\n') as f:
        f.write(StoreManifest.for_store(store).to_text())


def save_store(store: StorageEngine, directory: str):
    """
    Save a store directory, replacing any existing one.

    The payload is written into a sibling temporary directory which is then
    renamed over the target.

    Args:
        store: Built store
        directory: Target directory
    """
    directory = os.path.abspath(directory)
    parent = os.path.dirname(directory)
    os.makedirs(parent, exist_ok=True)
    staging = tempfile.mkdtemp(prefix=f".{os.path.basename(directory)}.tmp-", dir=parent)
    try:
        _write_payload(store, staging)
        if os.path.exists(directory):
            backup = tempfile.mkdtemp(prefix=f".{os.path.basename(directory)}.old-", dir=parent)
            os.rmdir(backup)
            os.rename(directory, backup)
            os.rename(staging, directory)
            shutil.rmtree(backup, ignore_errors=True)
        else:
            os.rename(staging, directory)
    except Exception:
        shutil.rmtree(staging, ignore_errors=True)
        raise
    logger.info(f"Saved {store.kind} store ({store.triple_count} triples) to {directory}")


# Reading

def _read_lines(path: str) -> List[str]:
    if not os.path.exists(path):
        raise StoreLoadError(path, "file is missing")
    with open(path, 'r', encoding='utf-8', newline='') as f:
        return [line.rstrip('\n') for line in f if line.strip('\n')]


def read_manifest(directory: str) -> StoreManifest:
    """
    Read and check a store manifest without loading the payload.

    Raises:
        FileNotFoundError: If the directory does not exist
        StoreLoadError: If the manifest is missing, malformed or of another version
    """
    if not os.path.isdir(directory):
        raise FileNotFoundError(f"Store directory not found: {directory}")
    path = os.path.join(directory, MANIFEST)
    if not os.path.exists(path):
        raise StoreLoadError(path, "missing manifest")
    with open(path, 'r', encoding='utf-8') as f:
        manifest = StoreManifest.from_text(f.read(), path)
    version = manifest.get_int('format_version', path)
    if version != FORMAT_VERSION:
        raise StoreLoadError(path, f"unsupported format_version {version} (expected {FORMAT_VERSION})")
    return manifest


def _read_dictionary(path: str, expected: int) -> Dictionary:
    kinds = {kind.value: kind for kind in TermKind}
    terms: List[Term] = []
    for number, line in enumerate(_read_lines(path), start=1):
        parts = line.split('\t')
        if len(parts) != 3:
            raise StoreLoadError(path, f"line {number}: expected id, kind and lexical form")
        term_id, kind, lexical = parts
        if term_id != str(len(terms)):
            raise StoreLoadError(path, f"line {number}: id {term_id} out of sequence")
        if kind not in kinds:
            raise StoreLoadError(path, f"line {number}: unknown term kind {kind!r}")
        try:
            terms.append(Term(kinds[kind], unescape_string(lexical)))
        except ValueError as e:
            raise StoreLoadError(path, f"line {number}: {e}")
    if len(terms) != expected:
        raise StoreLoadError(path, f"holds {len(terms)} terms, manifest says {expected}")
    try:
        return Dictionary.from_terms(terms)
    except ValueError as e:
        raise StoreLoadError(path, str(e))


def _read_table(path: str, expected: int, dictionary_size: int) -> List[EncodedTriple]:
    rows = []
    for number, line in enumerate(_read_lines(path), start=1):
        parts = line.split('\t')
        try:
            triple = EncodedTriple(*(int(v) for v in parts))
        except (TypeError, ValueError):
            raise StoreLoadError(path, f"line {number}: expected three integer ids")
        if any(v < 0 or v >= dictionary_size for v in triple):
            raise StoreLoadError(path, f"line {number}: term id outside the dictionary")
        rows.append(triple)
    if len(rows) != expected:
        raise StoreLoadError(path, f"holds {len(rows)} rows, manifest says {expected}")
    return rows


def _read_ids(path: str) -> Set[int]:
    try:
        return {int(line) for line in _read_lines(path)}
    except ValueError:
        raise StoreLoadError(path, "expected one integer id per line")


def read_placements(directory: str) -> List[PlacementReport]:
    """Placement log of a twin-table store directory, empty when the store has none."""
    path = os.path.join(directory, PLACEMENTS)
    placements = []
    for number, line in enumerate(_read_lines(path) if os.path.exists(path) else [], start=1):
        try:
            row, twin, switched, fallback = (int(v) for v in line.split('\t'))
        except ValueError:
            raise StoreLoadError(path, f"line {number}: expected four integers")
        placements.append(PlacementReport(row, twin, bool(switched), bool(fallback)))
    return placements


def _load_twins(directory: str, manifest_path: str, manifest: StoreManifest, dictionary: Dictionary,
                tables: Sequence[List[EncodedTriple]]) -> TwinTables:
    stats = BuildStats(
        switch_count=manifest.get_int('switch_count', manifest_path),
        fallback_count=manifest.get_int('fallback_count', manifest_path),
        reflexive_count=manifest.get_int('reflexive_count', manifest_path),
    )
    store = TwinTables.from_rows(dictionary, list(tables), stats)
    for twin in range(2):
        for kind, sets in zip(SET_FILES, (store.sub_set, store.obj_set, store.overlap)):
            path = os.path.join(directory, set_file(kind, twin))
            if _read_ids(path) != sets[twin]:
                raise StoreLoadError(path, f"{kind} set does not match the rows of twin{twin}")
    store.placements = read_placements(directory)
    return store


def load_store(directory: str) -> StorageEngine:
    """
    Load a saved store and rebuild its indexes.

    Args:
        directory: Store directory

    Returns:
        StorageEngine: The store

    Raises:
        FileNotFoundError: If the directory does not exist
        StoreLoadError: On a missing file, version mismatch, count mismatch or malformed payload
    """
    manifest = read_manifest(directory)
    manifest_path = os.path.join(directory, MANIFEST)
    try:
        engine = engine_factory(manifest.engine)
    except ValueError as e:
        raise StoreLoadError(manifest_path, str(e))

    dictionary = _read_dictionary(os.path.join(directory, DICTIONARY),
                                  manifest.get_int('dictionary_size', manifest_path))
    tables = []
    for k, _ in enumerate(manifest.table_ids):
        tables.append(_read_table(os.path.join(directory, table_file(k)),
                                  manifest.get_int(f"table.{k}.rows", manifest_path), len(dictionary)))

    if engine is TwinTables:
        if len(tables) != 2:
            raise StoreLoadError(manifest_path, f"twin-table store lists {len(tables)} tables")
        store = _load_twins(directory, manifest_path, manifest, dictionary, tables)
    else:
        store = engine.from_encoded([t for rows in tables for t in rows], dictionary)

    expected = manifest.get_int('triple_count', manifest_path)
    if store.triple_count != expected:
        raise StoreLoadError(manifest_path, f"payload holds {store.triple_count} triples, manifest says {expected}")
    if store.table_ids() != manifest.table_ids:
        raise StoreLoadError(manifest_path, "table list does not match the payload")

    logger.info(f"Loaded {store.kind} store ({store.triple_count} triples) from {directory}")
    return store
