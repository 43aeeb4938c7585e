"""Line-oriented text format for splice diagrams (`.splice` files).

    vertex NAME
    arrow NAME SIGN            # SIGN is +1 or -1
    edge NAME1 NAME2 [W1 [W2]] # Wi is the weight at NAMEi's end, default 1
    order NAME...              # optional, defaults to arrow declaration order
"""

import logging
from dataclasses import dataclass

import pyparsing as pp

from src.diagram import Edge, SpliceDiagram, Vertex

logger = logging.getLogger(__name__)

SUFFIX = ".splice"


class ParseError(Exception):
    """Raised when diagram source text cannot be parsed."""

    def __init__(self, line: int, column: int, message: str) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


def _check_sign(s: str, loc: int, tokens: pp.ParseResults) -> None:
    if tokens[0] not in (1, -1):
        raise pp.ParseFatalException(s, loc, f"arrowhead sign must be +1 or -1, got {tokens[0]}")


def _check_loop(s: str, loc: int, tokens: pp.ParseResults) -> None:
    if tokens["a"] == tokens["b"]:
        raise pp.ParseFatalException(s, loc, f"self-loop at `{tokens['a']}`")


name = pp.Word(pp.alphas + "_", pp.alphanums + "_")
integer = pp.Regex(r"[+-]?\d+").set_name("integer").set_parse_action(lambda t: int(t[0]))
sign = integer.copy().add_parse_action(_check_sign)

statements = {
    "vertex": pp.Keyword("vertex") + name("name"),
    "arrow": pp.Keyword("arrow") + name("name") + sign("sign"),
    "edge": (
        pp.Keyword("edge") + name("a") + name("b") + pp.Opt(integer("weight_a") + pp.Opt(integer("weight_b")))
    ).add_parse_action(_check_loop),
    "order": pp.Keyword("order") + pp.Group(pp.OneOrMore(name))("names"),
}


@dataclass
class _Located:
    line: int
    column: int


def _column(text: str, token: str, start: int = 0) -> int:
    return text.find(token, start) + 1


def parse(text: str) -> SpliceDiagram:
    """Parse diagram source into a `SpliceDiagram`.

    The result mirrors the source; it is not validated.

    :raises ParseError: With the line and column of the first problem.
    """
    vertices: dict[str, Vertex] = {}
    arrow_order: list[str] = []
    edges: list[tuple[Edge, _Located]] = []
    order: tuple[list[str], _Located] | None = None

    for lineno, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0]
        if not content.strip():
            continue
        directive = content.split()[0]
        start = _column(content, directive)
        if directive not in statements:
            raise ParseError(lineno, start, f"unknown directive `{directive}`")
        try:
            tokens = statements[directive].parse_string(content, parse_all=True)
        except pp.ParseBaseException as e:
            raise ParseError(lineno, e.col, e.msg) from None

        if directive in ("vertex", "arrow"):
            vertex_name = tokens["name"]
            if vertex_name in vertices:
                column = _column(content, vertex_name, start + len(directive))
                raise ParseError(lineno, column, f"duplicate vertex `{vertex_name}`")
            vertices[vertex_name] = Vertex(name=vertex_name, arrow=tokens["sign"] if directive == "arrow" else None)
            if directive == "arrow":
                arrow_order.append(vertex_name)
        elif directive == "edge":
            edge = Edge.between(tokens["a"], tokens["b"], tokens.get("weight_a", 1), tokens.get("weight_b", 1))
            edges.append((edge, _Located(lineno, start)))
        else:
            if order is not None:
                raise ParseError(lineno, start, "duplicate `order` directive")
            order = (list(tokens["names"]), _Located(lineno, start))

    if not vertices:
        raise ParseError(1, 1, "no vertices declared")

    for edge, where in edges:
        for end in (edge.u, edge.v):
            if end not in vertices:
                raise ParseError(where.line, where.column, f"unknown vertex `{end}`")

    components = arrow_order
    if order is not None:
        names, where = order
        if len(set(names)) != len(names):
            raise ParseError(where.line, where.column, "`order` lists a component twice")
        if sorted(names) != sorted(arrow_order):
            raise ParseError(where.line, where.column, f"`order` must list exactly the arrows {arrow_order}")
        components = names

    logger.debug(f"Parsed diagram with {len(vertices)} vertices and {len(edges)} edges")
    return SpliceDiagram.create(vertices.values(), (edge for edge, _ in edges), components)


def _format_weights(edge: Edge) -> str:
    if edge.weight_v != 1:
        return f" {edge.weight_u} {edge.weight_v}"
    if edge.weight_u != 1:
        return f" {edge.weight_u}"
    return ""


def serialize(d: SpliceDiagram) -> str:
    """Render a diagram as source text, vertices and edges in identifier order."""
    lines = []
    for vertex in d.vertices:
        if vertex.arrow is None:
            lines.append(f"vertex {vertex.name}")
        else:
            lines.append(f"arrow {vertex.name} {vertex.arrow:+d}")
    for edge in d.edges:
        lines.append(f"edge {edge.u} {edge.v}{_format_weights(edge)}")
    if list(d.components) != d.arrowheads():
        lines.append(f"order {' '.join(d.components)}")
    return "\n".join(lines) + "\n"
