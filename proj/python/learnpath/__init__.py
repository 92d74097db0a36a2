"""Prerequisite learning paths over frequent-pattern term graphs.

The heavy lifting happens in the compiled ``_learnpath`` extension; this
module only converts its JSON results into plain Python structures.
"""

from __future__ import annotations

import json
from typing import Any, Iterable, Mapping

from ._learnpath import (
    ROOT,
    Graph,
    LearnpathError,
    NoPathError,
    normalize_term,
)
from . import _learnpath

__all__ = [
    "ROOT",
    "Graph",
    "LearnpathError",
    "NoPathError",
    "normalize_term",
    "parse_definitions",
    "snapshot",
    "load_snapshot",
    "apply_qa_log",
    "learning_path",
    "oracle",
]


def parse_definitions(text: str) -> list[dict[str, Any]]:
    return json.loads(_learnpath.parse_definitions_json(text))


def snapshot(graph: Graph) -> dict[str, Any]:
    return json.loads(graph.snapshot_json())


def load_snapshot(doc: Mapping[str, Any] | str) -> Graph:
    text = doc if isinstance(doc, str) else json.dumps(doc)
    return Graph.from_snapshot_json(text)


def apply_qa_log(graph: Graph, jsonl: str) -> list[dict[str, Any]]:
    """Credit each QA record, in order. Associations are not promoted here."""
    return json.loads(graph.apply_qa_log(jsonl))


def learning_path(
    graph: Graph,
    term: str,
    known: Iterable[str] = (),
    **params: Any,
) -> dict[str, Any]:
    """Run the ant search. Keyword arguments override the search parameters
    (alpha, beta, rho, q, tau0, ants, iterations, stagnation, seed,
    greedy_fallback)."""
    overrides = json.dumps(params) if params else ""
    return json.loads(_learnpath.learning_path_json(graph, term, list(known), overrides))


def oracle(graph: Graph, term: str, known: Iterable[str] = ()) -> dict[str, Any]:
    return json.loads(_learnpath.oracle_json(graph, term, list(known)))
