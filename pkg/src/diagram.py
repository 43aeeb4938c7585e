"""Splice diagrams: decorated trees whose arrowheads are the components of a graph link."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from functools import cached_property
from itertools import combinations
from typing import TYPE_CHECKING

import networkx as nx

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

logger = logging.getLogger(__name__)


class ValidationError(Exception):
    """Raised when a diagram violates a splice diagram condition."""

    def __init__(self, message: str, vertex: str | None = None, edge: tuple[str, str] | None = None) -> None:
        super().__init__(message)
        self.vertex = vertex
        self.edge = edge


class NotATreeError(ValidationError):
    """Raised when the underlying graph is not a finite tree."""


class ArrowheadValencyError(ValidationError):
    """Raised when an arrowhead does not have valency one."""


class CoprimalityError(ValidationError):
    """Raised when two edge weights around a node are not coprime."""


class NoComponentsError(ValidationError):
    """Raised when a diagram has no arrowhead."""


class ComponentOrderError(ValidationError):
    """Raised when the component order does not list every arrowhead exactly once."""


class DiagramEditError(Exception):
    """Raised when a component edit or the example builder gets invalid arguments."""


@dataclass(frozen=True)
class Vertex:
    """A vertex; `arrow` is the arrowhead weight (+1 or -1), None for a plain vertex."""

    name: str
    arrow: int | None = None

    @property
    def is_arrowhead(self) -> bool:
        return self.arrow is not None


@dataclass(frozen=True, order=True)
class Edge:
    """An edge with one weight per end. Constructed through `Edge.between` it is stored with `u < v`."""

    u: str
    v: str
    weight_u: int = 1
    weight_v: int = 1

    @classmethod
    def between(cls, a: str, b: str, weight_a: int = 1, weight_b: int = 1) -> Edge:
        if a <= b:
            return cls(u=a, v=b, weight_u=weight_a, weight_v=weight_b)
        return cls(u=b, v=a, weight_u=weight_b, weight_v=weight_a)

    def weight_at(self, name: str) -> int:
        if name == self.u:
            return self.weight_u
        if name == self.v:
            return self.weight_v
        raise KeyError(f"Vertex `{name}` is not an end of edge {self.u}-{self.v}")

    def other(self, name: str) -> str:
        return self.v if name == self.u else self.u


@dataclass(frozen=True)
class SpliceDiagram:
    """A splice diagram.

    Vertices and edges are kept sorted so that equality is structural equality;
    `components` is the variable order t_1..t_n and therefore not sorted.
    Construct through `SpliceDiagram.create`; call `validate` before computing.
    """

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    components: tuple[str, ...]

    @classmethod
    def create(cls, vertices: Iterable[Vertex], edges: Iterable[Edge], components: Sequence[str]) -> SpliceDiagram:
        return cls(
            vertices=tuple(sorted(vertices, key=lambda v: v.name)),
            edges=tuple(sorted(edges)),
            components=tuple(components),
        )

    @cached_property
    def graph(self) -> nx.Graph:
        """The underlying tree; each edge carries its `Edge` under the `edge` attribute."""
        graph = nx.Graph()
        for vertex in self.vertices:
            graph.add_node(vertex.name, vertex=vertex)
        for edge in self.edges:
            graph.add_edge(edge.u, edge.v, edge=edge)
        return graph

    @cached_property
    def vertex_map(self) -> dict[str, Vertex]:
        return {vertex.name: vertex for vertex in self.vertices}

    @property
    def n_components(self) -> int:
        return len(self.components)

    def vertex(self, name: str) -> Vertex:
        return self.vertex_map[name]

    def valency(self, name: str) -> int:
        return sum(1 for edge in self.edges if name in (edge.u, edge.v))

    def incident_edges(self, name: str) -> list[Edge]:
        return [edge for edge in self.edges if name in (edge.u, edge.v)]

    def edge(self, a: str, b: str) -> Edge:
        return self.graph.edges[a, b]["edge"]

    def is_node(self, name: str) -> bool:
        return self.valency(name) > 1

    def non_arrowheads(self) -> list[str]:
        return [vertex.name for vertex in self.vertices if not vertex.is_arrowhead]

    def arrowheads(self) -> list[str]:
        return [vertex.name for vertex in self.vertices if vertex.is_arrowhead]

    def component_index(self, name: str) -> int:
        """1-based position of an arrowhead in the component order."""
        return self.components.index(name) + 1


def validate(d: SpliceDiagram) -> None:
    """Check the splice diagram conditions.

    :raises NoComponentsError: If there is no arrowhead.
    :raises NotATreeError: If the graph is not a tree.
    :raises ArrowheadValencyError: If an arrowhead has valency other than one.
    :raises CoprimalityError: If two weights around a node have gcd other than 1.
    :raises ComponentOrderError: If `components` does not list each arrowhead once.
    """
    arrowheads = d.arrowheads()
    if not arrowheads:
        raise NoComponentsError("The diagram has no arrowhead")

    names = [vertex.name for vertex in d.vertices]
    if len(set(names)) != len(names):
        raise NotATreeError("Duplicate vertex names")
    for edge in d.edges:
        if edge.u == edge.v:
            raise NotATreeError(f"Self-loop at `{edge.u}`", vertex=edge.u, edge=(edge.u, edge.v))
        for end in (edge.u, edge.v):
            if end not in d.vertex_map:
                raise NotATreeError(f"Edge {edge.u}-{edge.v} uses an unknown vertex `{end}`", vertex=end)
    if len(d.edges) != len(d.vertices) - 1 or not nx.is_connected(d.graph):
        raise NotATreeError(f"{len(d.vertices)} vertices and {len(d.edges)} edges do not form a tree")

    for name in arrowheads:
        valency = d.valency(name)
        if valency != 1:
            raise ArrowheadValencyError(f"Arrowhead `{name}` has valency {valency}", vertex=name)

    for name in names:
        if not d.is_node(name):
            continue
        for e1, e2 in combinations(d.incident_edges(name), 2):
            w1, w2 = e1.weight_at(name), e2.weight_at(name)
            if math.gcd(w1, w2) != 1:
                raise CoprimalityError(
                    f"Weights {w1} and {w2} around node `{name}` are not coprime",
                    vertex=name,
                    edge=(e1.other(name), e2.other(name)),
                )

    if sorted(d.components) != sorted(arrowheads):
        raise ComponentOrderError(f"Component order {list(d.components)} does not match arrowheads {arrowheads}")
    logger.debug(f"Validated diagram with {len(d.vertices)} vertices and {d.n_components} components")


def _check_component(d: SpliceDiagram, index: int) -> str:
    if not 1 <= index <= d.n_components:
        raise DiagramEditError(f"Component index {index} out of range 1..{d.n_components}")
    return d.components[index - 1]


def delete_component(d: SpliceDiagram, index: int) -> SpliceDiagram:
    """Turn the arrowhead of component `index` (1-based) into a plain leaf.

    The edge and its weights are kept; the arrowhead sign is dropped because the
    virtual component at the new leaf has weight +1.

    :raises DiagramEditError: If the index is out of range or it is the last component.
    """
    name = _check_component(d, index)
    if d.n_components < 2:
        raise DiagramEditError("Cannot delete the last component of a diagram")
    vertices = [Vertex(name=name) if v.name == name else v for v in d.vertices]
    components = [c for c in d.components if c != name]
    return SpliceDiagram.create(vertices, d.edges, components)


def reverse_component(d: SpliceDiagram, index: int) -> SpliceDiagram:
    """Negate the arrowhead weight of component `index` (1-based)."""
    name = _check_component(d, index)
    vertices = [replace(v, arrow=-v.arrow) if v.name == name and v.arrow is not None else v for v in d.vertices]
    return SpliceDiagram.create(vertices, d.edges, d.components)


def seifert_example(alphas: Sequence[int], n: int) -> SpliceDiagram:
    """One node `c` of valency k; edge i ends in a +1 arrowhead `a<i>` for i <= n, else in a leaf `l<i>`.

    The weight at the node end of edge i is alphas[i - 1].

    :raises DiagramEditError: If n is not in 1..k.
    :raises CoprimalityError: If the alphas are not pairwise coprime.
    """
    k = len(alphas)
    if not 1 <= n <= k:
        raise DiagramEditError(f"Arrow count {n} must be between 1 and {k}")
    vertices = [Vertex(name="c")]
    edges = []
    components = []
    for i, alpha in enumerate(alphas, start=1):
        if i <= n:
            name = f"a{i}"
            vertices.append(Vertex(name=name, arrow=1))
            components.append(name)
        else:
            name = f"l{i}"
            vertices.append(Vertex(name=name))
        edges.append(Edge.between("c", name, alpha, 1))
    d = SpliceDiagram.create(vertices, edges, components)
    validate(d)
    return d


def valency_sums(d: SpliceDiagram) -> tuple[int, int]:
    """Return (Σ over all vertices of δ, Σ over non-arrowheads of δ - 2)."""
    total = sum(d.valency(v.name) for v in d.vertices)
    excess = sum(d.valency(name) - 2 for name in d.non_arrowheads())
    return total, excess
