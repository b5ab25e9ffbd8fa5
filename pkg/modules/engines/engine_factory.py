"""
Engine registry for RMTT-Workbench.
"""

import logging
from typing import Dict, Iterable, List, Optional, Type

from modules.engines.base_engine import StorageEngine
from modules.engines.rmtt_engine import TwinTables
from modules.engines.single_engine import SingleStore
from modules.engines.vp_engine import VpStore
from modules.rdf.dictionary import Dictionary
from modules.rdf.terms import Triple

logger = logging.getLogger(__name__)

_ENGINES: Dict[str, Type[StorageEngine]] = {
    SingleStore.kind: SingleStore,
    VpStore.kind: VpStore,
    TwinTables.kind: TwinTables,
}

ENGINE_KINDS: List[str] = list(_ENGINES)


def engine_factory(kind: str) -> Type[StorageEngine]:
    """
    Get the engine class registered under a kind name.

    Args:
        kind: 'single', 'vp' or 'rmtt'

    Returns:
        type: StorageEngine subclass

    Raises:
        ValueError: If the kind is unknown
    """
    engine = _ENGINES.get(kind)
    if engine is None:
        raise ValueError(f"Unknown engine '{kind}' (expected one of: {', '.join(ENGINE_KINDS)})")
    return engine


def build_engine(kind: str, triples: Iterable[Triple], dictionary: Optional[Dictionary] = None) -> StorageEngine:
    """
    Build a store of the given kind from a triple stream.

    Args:
        kind: Engine kind
        triples: Triples in stream order
        dictionary: Dictionary to populate (a new one by default)

    Returns:
        StorageEngine: The built store
    """
    logger.debug(f"Building {kind} engine")
    return engine_factory(kind).build(triples, dictionary)
