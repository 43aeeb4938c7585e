"""Linking numbers of genuine and virtual components, read off the splice diagram tree."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import networkx as nx

if TYPE_CHECKING:
    from collections.abc import Hashable, Mapping, Sequence

    from src.diagram import SpliceDiagram

logger = logging.getLogger(__name__)


class UnknownVertexError(Exception):
    """Raised when a vertex name is not part of the diagram."""


class SameVertexError(Exception):
    """Raised when a linking number of a vertex with itself is requested."""


def path(d: SpliceDiagram, v: str, w: str) -> list[str]:
    """The unique tree path from `v` to `w`, both included.

    :raises UnknownVertexError: If either vertex is not in the diagram.
    :raises SameVertexError: If `v` equals `w`.
    """
    for name in (v, w):
        if name not in d.vertex_map:
            raise UnknownVertexError(f"Unknown vertex `{name}`")
    if v == w:
        raise SameVertexError(f"Linking number of `{v}` with itself is undefined")
    return nx.shortest_path(d.graph, v, w)


def _off_path_product(d: SpliceDiagram, vertices: Sequence[str]) -> int:
    """Product of the near-end weights of edges touching the path without lying on it."""
    product = 1
    for i, u in enumerate(vertices):
        on_path = {vertices[j] for j in (i - 1, i + 1) if 0 <= j < len(vertices)}
        for edge in d.incident_edges(u):
            if edge.other(u) not in on_path:
                product *= edge.weight_at(u)
    return product


def _arrow_weight(d: SpliceDiagram, name: str) -> int:
    arrow = d.vertex(name).arrow
    return 1 if arrow is None else arrow


def linking_number(d: SpliceDiagram, v: str, w: str) -> int:
    """ℓk(L_v, L_w): off-path weights along the tree path times the arrowhead weights of its ends."""
    vertices = path(d, v, w)
    return _off_path_product(d, vertices) * _arrow_weight(d, v) * _arrow_weight(d, w)


@dataclass(frozen=True)
class LinkingData:
    """Linking numbers of a diagram, with components indexed from 1."""

    components: tuple[str, ...]
    vertices: tuple[str, ...]
    pairs: Mapping[tuple[int, int], int]
    table: Mapping[tuple[int, str], int]

    def pair(self, i: int, j: int) -> int:
        if i == j:
            raise SameVertexError(f"Linking number of component {i} with itself is undefined")
        return self.pairs[min(i, j), max(i, j)]

    def entry(self, i: int, vertex: str) -> int:
        return self.table[i, vertex]

    def vector(self, vertex: str) -> tuple[int, ...]:
        """(ℓ_1v, ..., ℓ_nv)."""
        return tuple(self.table[i, vertex] for i in range(1, len(self.components) + 1))

    def total(self, vertex: str) -> int:
        """ℓ_v, the linking number of the whole link with L_v."""
        return sum(self.vector(vertex))

    def totals(self) -> dict[str, int]:
        return {vertex: self.total(vertex) for vertex in self.vertices}

    def row(self, i: int) -> tuple[int, ...]:
        """(ℓ_ij) for every j != i, in component order."""
        return tuple(self.pair(i, j) for j in range(1, len(self.components) + 1) if j != i)


def linking_table(d: SpliceDiagram) -> LinkingData:
    """Every pairwise and component-vertex linking number of a validated diagram."""
    index = {name: i for i, name in enumerate(d.components, start=1)}
    plain = tuple(d.non_arrowheads())
    pairs: dict[tuple[int, int], int] = {}
    table: dict[tuple[int, str], int] = {}
    for source in d.components:
        i = index[source]
        sign = _arrow_weight(d, source)
        paths = nx.single_source_shortest_path(d.graph, source)
        for target, vertices in paths.items():
            if target == source:
                continue
            value = _off_path_product(d, vertices) * sign * _arrow_weight(d, target)
            if target in index:
                if i < index[target]:
                    pairs[i, index[target]] = value
            else:
                table[i, target] = value
    logger.debug(f"Computed linking table for {len(index)} components and {len(plain)} vertices")
    return LinkingData(components=d.components, vertices=plain, pairs=pairs, table=table)


def linking_graph(d: SpliceDiagram, data: LinkingData | None = None) -> nx.Graph:
    """G_L: components 1..n, joined when their linking number is nonzero."""
    data = data or linking_table(d)
    graph = nx.Graph()
    graph.add_nodes_from(range(1, d.n_components + 1))
    graph.add_edges_from(pair for pair, value in data.pairs.items() if value != 0)
    return graph


@dataclass(frozen=True)
class SplitResult:
    split: bool
    witness: frozenset[int] | None = None

    def __bool__(self) -> bool:
        return self.split


def split_witness(graph: nx.Graph) -> SplitResult:
    if graph.number_of_nodes() < 2 or nx.is_connected(graph):
        return SplitResult(split=False)
    first = min(nx.connected_components(graph), key=min)
    return SplitResult(split=True, witness=frozenset(first))


def is_algebraically_split(d: SpliceDiagram, data: LinkingData | None = None) -> SplitResult:
    """Whether the components fall into two groups with no linking across.

    The witness is the connected component of G_L containing component 1.
    """
    return split_witness(linking_graph(d, data))


def non_cut_vertex(graph: nx.Graph) -> Hashable:
    """A vertex whose removal leaves a connected graph connected: a leaf of a spanning tree.

    :raises ValueError: If the graph is empty or disconnected.
    """
    if graph.number_of_nodes() == 0 or not nx.is_connected(graph):
        raise ValueError("Only nonempty connected graphs have a non-cut vertex")
    tree = nx.bfs_tree(graph, next(iter(graph.nodes))).to_undirected()
    return min((node for node in tree.nodes if tree.degree(node) <= 1), key=str)
