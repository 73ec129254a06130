"""Stallings folding of finite word sets in free groups.

The wedge of one loop per word at a base vertex is folded by merging the
endpoints of equally labelled edges leaving a common vertex. Coincidences
are processed from a queue with union-find labels, always keeping the
smaller vertex id, so the base vertex 0 survives every merge. The folded
graph is stored as a networkx MultiDiGraph whose edges carry a positive
generator `label`; reading label k backwards means reading g_k^-1.
"""

import logging
from dataclasses import dataclass, asdict
from typing import Any, Dict, Iterable, List, Optional, Tuple

import networkx as nx
import numpy as np
from networkx.algorithms.isomorphism import categorical_multiedge_match, categorical_node_match

from src.common.errors import DuplicateElementError, IdentityElementError
from src.groups.words import IDENTITY, as_word, format_word, invert

logger = logging.getLogger(__name__)

BASE = 0


class _Folder:
    """Coincidence procedure on vertices with at most one edge per signed label."""

    def __init__(self, rng: Optional[np.random.Generator] = None):
        self.labels: List[int] = []
        self.out: List[Dict[int, int]] = []
        self.pending: List[Tuple[int, int]] = []
        self.rng = rng
        self.add_vertex()

    def add_vertex(self) -> int:
        c = len(self.labels)
        self.labels.append(c)
        self.out.append({})
        return c

    def find(self, c: int) -> int:
        root = c
        while self.labels[root] != root:
            root = self.labels[root]
        while self.labels[c] != root:
            self.labels[c], c = root, self.labels[c]
        return root

    def add_edge(self, u: int, k: int, v: int):
        for a, letter, b in ((u, k, v), (v, -k, u)):
            a = self.find(a)
            existing = self.out[a].get(letter)
            if existing is None:
                self.out[a][letter] = b
            else:
                self.pending.append((existing, b))

    def _pop(self) -> Tuple[int, int]:
        if self.rng is None:
            return self.pending.pop()
        return self.pending.pop(int(self.rng.integers(len(self.pending))))

    def fold(self):
        while self.pending:
            c1, c2 = self._pop()
            c1, c2 = self.find(c1), self.find(c2)
            if c1 == c2:
                continue
            c1, c2 = min(c1, c2), max(c1, c2)
            self.labels[c2] = c1
            for letter, n2 in self.out[c2].items():
                n1 = self.out[c1].get(letter)
                if n1 is None:
                    self.out[c1][letter] = n2
                else:
                    self.pending.append((n1, n2))
            self.out[c2] = {}

    def to_graph(self) -> nx.MultiDiGraph:
        graph = nx.MultiDiGraph()
        for c in range(len(self.labels)):
            if self.find(c) == c:
                graph.add_node(c, base=(c == BASE))
        for c in graph.nodes:
            for letter, target in self.out[c].items():
                if letter > 0:
                    graph.add_edge(c, self.find(target), label=letter)
        return graph


class FoldingGraph:
    """A labelled graph with a base vertex, read as a subgroup of a free group."""

    def __init__(self, graph: nx.MultiDiGraph, base: int = BASE):
        self.graph = graph
        self.base = base
        self._steps: Optional[Dict[Tuple[int, int], List[int]]] = None

    @property
    def vertex_count(self) -> int:
        return self.graph.number_of_nodes()

    @property
    def edge_count(self) -> int:
        return self.graph.number_of_edges()

    def _step_table(self) -> Dict[Tuple[int, int], List[int]]:
        if self._steps is None:
            steps: Dict[Tuple[int, int], List[int]] = {}
            for u, v, k in self.graph.edges(data='label'):
                steps.setdefault((u, k), []).append(v)
                steps.setdefault((v, -k), []).append(u)
            self._steps = steps
        return self._steps

    def is_folded(self) -> bool:
        """No vertex has two edges leaving it with the same signed label."""
        return all(len(targets) == 1 for targets in self._step_table().values())

    def accepts(self, word) -> bool:
        """Whether the word reads a closed loop at the base vertex."""
        steps = self._step_table()
        current = {self.base}
        for k in as_word(word):
            current = {v for u in current for v in steps.get((u, k), ())}
            if not current:
                return False
        return self.base in current

    def core(self) -> 'FoldingGraph':
        """Iteratively drop non-base vertices of degree at most one."""
        graph = self.graph.copy()
        leaves = [v for v in graph.nodes if v != self.base and graph.degree(v) <= 1]
        while leaves:
            v = leaves.pop()
            if v not in graph:
                continue
            neighbours = set(graph.predecessors(v)) | set(graph.successors(v))
            graph.remove_node(v)
            leaves.extend(u for u in neighbours if u != self.base and u in graph and graph.degree(u) <= 1)
        return FoldingGraph(graph, self.base)

    def rank(self) -> int:
        """Rank E - V + 1 of the (connected) graph's fundamental group."""
        return self.edge_count - self.vertex_count + 1

    def is_isomorphic(self, other: 'FoldingGraph') -> bool:
        """Label- and base-preserving isomorphism."""
        return nx.is_isomorphic(self.graph, other.graph,
                                node_match=categorical_node_match('base', False),
                                edge_match=categorical_multiedge_match('label', None))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'vertices': self.vertex_count,
            'edges': self.edge_count,
            'rank': self.rank(),
            'folded': self.is_folded(),
        }


def fold(words: Iterable, rng: Optional[np.random.Generator] = None) -> FoldingGraph:
    """Fold the wedge of loops spelling `words` at the base vertex.

    With `rng` the pending coincidences are processed in random order; the
    folded graph does not depend on that order.

    Raises:
        ValueError: if no words are given
        IdentityElementError: if some word is e
    """
    words = [as_word(w) for w in words]
    if not words:
        raise ValueError("folding needs at least one word")
    folder = _Folder(rng)
    for w in words:
        if w == IDENTITY:
            raise IdentityElementError("the identity cannot be folded into a subgroup graph")
        current = BASE
        for i, k in enumerate(w):
            target = BASE if i == len(w) - 1 else folder.add_vertex()
            folder.add_edge(current, k, target)
            current = target
    folder.fold()
    graph = FoldingGraph(folder.to_graph())
    logger.debug(f"Folded {len(words)} words into {graph.vertex_count} vertices and {graph.edge_count} edges")
    return graph


@dataclass
class FreenessReport:
    free: bool
    rank: int
    words: int
    pairs: int
    core_vertices: int
    core_edges: int

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def is_free_basis(words: Iterable) -> FreenessReport:
    """Certify that distinct nontrivial words form a free subset.

    Words are grouped into classes {w, w^-1}; the set is free (as the
    symmetric set S ∪ S^-1) exactly when the folded core has rank equal to
    the number of classes, i.e. one representative per class is a free basis.

    Raises:
        IdentityElementError: if e is among the words
        DuplicateElementError: if a word is repeated
    """
    words = [as_word(w) for w in words]
    seen = set()
    for w in words:
        if w == IDENTITY:
            raise IdentityElementError("the identity is never part of a free basis")
        if w in seen:
            raise DuplicateElementError(f"duplicate word '{format_word(w)}'")
        seen.add(w)
    pairs = len({min(w, invert(w)) for w in words})

    core = fold(words).core()
    rank = core.rank()
    report = FreenessReport(rank == pairs, rank, len(words), pairs, core.vertex_count, core.edge_count)
    logger.info(f"Folding certificate for {len(words)} words ({pairs} inverse pairs): rank {rank}, "
                f"free={report.free}")
    return report
