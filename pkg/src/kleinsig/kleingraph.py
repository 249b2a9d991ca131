"""Abstract Klein graphs: trivalent multigraphs with a proper {a,b,c} edge-coloring.

The three colors are the nontrivial elements of the Klein four-group; a valid
graph has every vertex trivalent with pairwise distinct edge colors at each
vertex.  A graph is 3-Hamiltonian when each bicolored subgraph is a single
cycle through all vertices.
"""

from __future__ import annotations

from dataclasses import dataclass

COLORS = ("a", "b", "c")

PAIRS = ("ab", "bc", "ca")

_PAIR_CANON = {"ab": "ab", "ba": "ab", "bc": "bc", "cb": "bc", "ca": "ca", "ac": "ca"}


def canonical_pair(i: str, j: str = None) -> str:
    """Normalize a color pair to one of 'ab', 'bc', 'ca'."""
    pair = i if j is None else i + j
    if pair not in _PAIR_CANON:
        raise ValueError(f"not a color pair: {pair!r}")
    return _PAIR_CANON[pair]


def third_color(i: str, j: str) -> str:
    pair = canonical_pair(i, j)
    return next(c for c in COLORS if c not in pair)


def check_color(c: str) -> str:
    if c not in COLORS:
        raise ValueError(f"unknown color {c!r}, expected one of {COLORS}")
    return c


class GraphError(ValueError):
    """Invalid Klein graph data; `violations` lists (kind, vertex) pairs."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("; ".join(f"{kind} at vertex {v}" for kind, v in self.violations))


NOT_TRIVALENT = "NotTrivalent"
COLOR_CLASH = "ColorClash"


@dataclass(frozen=True)
class Edge:
    id: str
    v1: str
    v2: str
    color: str


@dataclass(frozen=True)
class KleinGraph:
    vertices: tuple
    edges: tuple

    def edges_at(self, v):
        """Edge ends at v; a loop contributes twice."""
        out = []
        for e in self.edges:
            if e.v1 == v:
                out.append(e)
            if e.v2 == v:
                out.append(e)
        return out

    def edge(self, edge_id):
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(edge_id)


def klein_violations(vertices, edges):
    """All validity violations of the raw data, without raising."""
    violations = []
    ends = {v: [] for v in vertices}
    for e in edges:
        for v in (e.v1, e.v2):
            if v not in ends:
                violations.append((NOT_TRIVALENT, v))
                ends[v] = []
            ends[v].append(e.color)
    for v in vertices:
        cs = ends[v]
        if len(cs) != 3:
            violations.append((NOT_TRIVALENT, v))
        if len(set(cs)) != len(cs):
            violations.append((COLOR_CLASH, v))
    return violations


def validate_klein(vertices, edges) -> KleinGraph:
    """Build a validated KleinGraph or raise GraphError with all violations."""
    vertices = tuple(vertices)
    edges = tuple(
        e if isinstance(e, Edge) else Edge(e[0], e[1], e[2], check_color(e[3])) for e in edges
    )
    seen = set()
    for e in edges:
        if e.id in seen:
            raise GraphError([("DuplicateEdgeId", e.id)])
        seen.add(e.id)
        check_color(e.color)
    violations = klein_violations(vertices, edges)
    if violations:
        raise GraphError(violations)
    return KleinGraph(vertices, edges)


@dataclass(frozen=True)
class Subgraph:
    """Edges of two chosen colors; in a valid Klein graph all degrees are 2."""

    vertices: tuple
    edges: tuple

    def component_count(self):
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            ra, rb = find(e.v1), find(e.v2)
            if ra != rb:
                parent[ra] = rb
        return len({find(v) for v in self.vertices})


def bicolor_subgraph(g: KleinGraph, i: str, j: str) -> Subgraph:
    """The subgraph of edges colored i or j."""
    pair = canonical_pair(i, j)
    edges = tuple(e for e in g.edges if e.color in pair)
    return Subgraph(g.vertices, edges)


def is_three_hamiltonian(g: KleinGraph) -> bool:
    """True when every bicolored subgraph is connected.

    The empty graph passes vacuously.  In a valid graph every vertex meets
    both colors of each pair, so connectivity means a single cycle.
    """
    if not g.vertices:
        return True
    for pair in PAIRS:
        if bicolor_subgraph(g, pair[0], pair[1]).component_count() != 1:
            return False
    return True


def vertex_connected_sum(g1: KleinGraph, v1: str, g2: KleinGraph, v2: str) -> KleinGraph:
    """Remove a vertex from each graph and join the hanging ends color-to-color.

    The second graph's labels get a suffix so the operands may share ids.
    The three edge pairs merge into single edges, keeping the result trivalent.
    """
    if v1 not in g1.vertices:
        raise KeyError(v1)
    if v2 not in g2.vertices:
        raise KeyError(v2)

    def rename(x):
        return f"{x}'"

    at1 = {e.color: e for e in g1.edges_at(v1)}
    at2 = {e.color: e for e in g2.edges_at(v2)}
    if set(at1) != set(COLORS) or set(at2) != set(COLORS):
        raise GraphError([(COLOR_CLASH, v1 if set(at1) != set(COLORS) else v2)])

    vertices = tuple(v for v in g1.vertices if v != v1) + tuple(
        rename(v) for v in g2.vertices if v != v2
    )
    edges = []
    for e in g1.edges:
        if v1 not in (e.v1, e.v2):
            edges.append(e)
    for e in g2.edges:
        if v2 not in (e.v1, e.v2):
            edges.append(Edge(rename(e.id), rename(e.v1), rename(e.v2), e.color))
    for color in COLORS:
        e1, e2 = at1[color], at2[color]
        far1 = e1.v2 if e1.v1 == v1 else e1.v1
        far2 = e2.v2 if e2.v1 == v2 else e2.v1
        edges.append(Edge(f"{e1.id}+{rename(e2.id)}", far1, rename(far2), color))
    return validate_klein(vertices, edges)


def parse_graph(text: str) -> KleinGraph:
    """Parse the line-oriented graph format.

    Lines: `vertex <id>` and `edge <id> <v1> <v2> color=<a|b|c>`; `#` starts
    a comment.
    """
    vertices = []
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "vertex" and len(parts) == 2:
            vertices.append(parts[1])
        elif parts[0] == "edge" and len(parts) == 5 and parts[4].startswith("color="):
            edges.append(Edge(parts[1], parts[2], parts[3], check_color(parts[4][6:])))
        else:
            raise ParseError(lineno, raw.strip())
    return validate_klein(vertices, edges)


class ParseError(ValueError):
    def __init__(self, line, text):
        self.line = line
        super().__init__(f"line {line}: cannot parse {text!r}")


def format_graph(g: KleinGraph) -> str:
    lines = [f"vertex {v}" for v in g.vertices]
    lines += [f"edge {e.id} {e.v1} {e.v2} color={e.color}" for e in g.edges]
    return "\n".join(lines) + "\n"
