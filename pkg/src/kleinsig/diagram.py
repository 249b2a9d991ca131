"""Planar diagrams of knotted Klein graphs.

A diagram is a combinatorial map: crossings (4 arc-ends, counterclockwise)
and trivalent vertices (3 arc-ends), joined by colored arcs that may carry
half-integer framing boxes.  Faces come from tracing the rotation system,
which also yields the planarity (genus 0) check.  Arcs with no endpoints are
allowed and model crossing-free circles, e.g. the output of erasing
structure when restricting to two colors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from fractions import Fraction

from .kleingraph import (
    COLORS,
    Edge,
    canonical_pair,
    check_color,
    third_color,
    validate_klein,
)


class DiagramError(ValueError):
    pass


class ParseError(DiagramError):
    def __init__(self, line, msg):
        self.line = line
        super().__init__(f"line {line}: {msg}")


class DanglingArc(DiagramError):
    pass


class DuplicateEnd(DiagramError):
    pass


class UnknownEntity(DiagramError):
    pass


class AmbiguousOver(DiagramError):
    pass


class NonPlanar(DiagramError):
    pass


class ColorClash(DiagramError):
    pass


class MixedColorStrand(DiagramError):
    pass


@dataclass(frozen=True)
class Crossing:
    id: str
    arcs: tuple  # arc ids at slots 0..3, counterclockwise
    over_diag: int  # 0 if the strand through slots (0,2) is over, else 1

    @property
    def degree(self):
        return 4


@dataclass(frozen=True)
class Vertex:
    id: str
    arcs: tuple  # arc ids at slots 0..2, counterclockwise

    @property
    def degree(self):
        return 3


@dataclass(frozen=True)
class Arc:
    id: str
    color: str
    end0: tuple  # (node id, slot) or None for a closed circle
    end1: tuple
    box: Fraction = Fraction(0)

    @property
    def closed(self):
        return self.end0 is None and self.end1 is None


@dataclass(frozen=True)
class GraphDiagram:
    nodes: tuple
    arcs: tuple

    def __post_init__(self):
        object.__setattr__(self, "_node", {n.id: n for n in self.nodes})
        object.__setattr__(self, "_arc", {a.id: a for a in self.arcs})

    def node(self, nid):
        return self._node[nid]

    def arc(self, aid):
        return self._arc[aid]

    @property
    def crossings(self):
        return tuple(n for n in self.nodes if isinstance(n, Crossing))

    @property
    def vertices(self):
        return tuple(n for n in self.nodes if isinstance(n, Vertex))

    def arc_at(self, nid, slot):
        return self._node[nid].arcs[slot]

    def with_boxes(self, updates):
        """New diagram with boxes adjusted by the given arc->delta mapping."""
        arcs = tuple(
            replace(a, box=a.box + updates[a.id]) if a.id in updates else a for a in self.arcs
        )
        return GraphDiagram(self.nodes, arcs)


@dataclass(frozen=True)
class LinkDiagram:
    """A diagram with no trivalent vertices, split into closed components."""

    diagram: GraphDiagram
    components: tuple  # tuple of tuples of arc ids

    @property
    def crossings(self):
        return self.diagram.crossings


# ---------------------------------------------------------------------------
# construction and structural validation


def check_combinatorics(nodes, arcs):
    """Verify node slot lists and arc endpoints describe the same incidences."""
    node_by_id = {}
    for n in nodes:
        if n.id in node_by_id:
            raise DuplicateEnd(f"node id {n.id} declared twice")
        node_by_id[n.id] = n
    end_claim = {}
    arc_ids = set()
    for a in arcs:
        if a.id in arc_ids:
            raise DuplicateEnd(f"arc id {a.id} declared twice")
        arc_ids.add(a.id)
        ends = [e for e in (a.end0, a.end1) if e is not None]
        if len(ends) == 1:
            raise DanglingArc(f"arc {a.id} has exactly one endpoint")
        for e in ends:
            nid, slot = e
            if nid not in node_by_id:
                raise UnknownEntity(f"arc {a.id} references unknown node {nid}")
            if not 0 <= slot < node_by_id[nid].degree:
                raise UnknownEntity(f"arc {a.id} references bad slot {nid}.{slot}")
            if e in end_claim:
                raise DuplicateEnd(f"end {nid}.{slot} used by {end_claim[e]} and {a.id}")
            end_claim[e] = a.id
    for n in nodes:
        for slot, aid in enumerate(n.arcs):
            if aid not in arc_ids:
                raise DanglingArc(f"{n.id}.{slot} lists unknown arc {aid}")
            claimed = end_claim.get((n.id, slot))
            if claimed != aid:
                raise DanglingArc(
                    f"{n.id}.{slot} lists {aid} but arc ends say {claimed or 'nothing'}"
                )


def build_diagram(nodes, arcs) -> GraphDiagram:
    nodes = tuple(sorted(nodes, key=lambda n: n.id))
    arcs = tuple(sorted(arcs, key=lambda a: a.id))
    check_combinatorics(nodes, arcs)
    return GraphDiagram(nodes, arcs)


# ---------------------------------------------------------------------------
# faces and planarity

# A dart is (arc id, direction); direction 0 runs end0 -> end1.


def dart_head(d: GraphDiagram, dart):
    aid, direction = dart
    a = d.arc(aid)
    return a.end1 if direction == 0 else a.end0


def dart_tail(d: GraphDiagram, dart):
    aid, direction = dart
    a = d.arc(aid)
    return a.end0 if direction == 0 else a.end1


def _departing_dart(d: GraphDiagram, nid, slot):
    aid = d.arc_at(nid, slot)
    a = d.arc(aid)
    if a.end0 == (nid, slot):
        return (aid, 0)
    if a.end1 == (nid, slot):
        return (aid, 1)
    raise DanglingArc(f"{nid}.{slot} inconsistent with arc {aid}")


def face_orbits(d: GraphDiagram):
    """Faces of the rotation system, as tuples of corners (node, arrival slot).

    The corner (n, s) is the sector between slots s and s+1; each face visit
    consumes the corner at its arrival slot.  Closed circle arcs carry no
    darts and do not appear.
    """
    darts = []
    for a in d.arcs:
        if not a.closed:
            darts.extend([(a.id, 0), (a.id, 1)])
    seen = set()
    faces = []
    for start in darts:
        if start in seen:
            continue
        face = []
        cur = start
        while True:
            seen.add(cur)
            nid, slot = dart_head(d, cur)
            face.append((nid, slot))
            nxt_slot = (slot + 1) % d.node(nid).degree
            cur = _departing_dart(d, nid, nxt_slot)
            if cur == start:
                break
        faces.append(tuple(face))
    return faces


def connected_pieces(d: GraphDiagram):
    """Split into connected pieces; each closed circle is its own piece.

    Returns a list of (node id set, arc id set).
    """
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        parent[find(x)] = find(y)

    for n in d.nodes:
        find(("n", n.id))
    for a in d.arcs:
        find(("a", a.id))
        for e in (a.end0, a.end1):
            if e is not None:
                union(("a", a.id), ("n", e[0]))
    groups = {}
    for key in parent:
        groups.setdefault(find(key), []).append(key)
    pieces = []
    for members in groups.values():
        nodes = {m[1] for m in members if m[0] == "n"}
        arcs = {m[1] for m in members if m[0] == "a"}
        pieces.append((nodes, arcs))
    return sorted(pieces, key=lambda p: (sorted(p[0]), sorted(p[1])))


def validate_diagram(d: GraphDiagram) -> GraphDiagram:
    """Check all diagram invariants; returns the diagram for chaining.

    Raises ColorClash, MixedColorStrand or NonPlanar.  Structural end
    consistency is assumed (enforced by build_diagram / parse_diagram).
    """
    for n in d.vertices:
        colors = [d.arc(aid).color for aid in n.arcs]
        if len(set(colors)) != 3:
            raise ColorClash(f"vertex {n.id} has colors {colors}")
    for n in d.crossings:
        for diag in (0, 1):
            c0 = d.arc(n.arcs[diag]).color
            c1 = d.arc(n.arcs[diag + 2]).color
            if c0 != c1:
                raise MixedColorStrand(f"crossing {n.id} strand {diag} mixes {c0}/{c1}")
    for a in d.arcs:
        if a.box.denominator not in (1, 2):
            raise DiagramError(f"box on {a.id} must be a half-integer: {a.box}")

    faces = face_orbits(d)
    face_of_corner = {}
    for idx, face in enumerate(faces):
        for corner in face:
            face_of_corner[corner] = idx
    for nodes, arcs in connected_pieces(d):
        if not nodes:
            continue  # a closed circle is planar by itself
        v = len(nodes)
        e = sum(1 for a in arcs if not d.arc(a).closed)
        piece_faces = {
            face_of_corner[(nid, s)] for nid in nodes for s in range(d.node(nid).degree)
        }
        if v - e + len(piece_faces) != 2:
            raise NonPlanar(
                f"piece with nodes {sorted(nodes)} has Euler characteristic "
                f"{v - e + len(piece_faces)}"
            )
    return d


# ---------------------------------------------------------------------------
# parsing and formatting

_X_RE = re.compile(r"^X\s+(\S+)\s+\(([^)]*)\)\s+over=(\S+)$")
_V_RE = re.compile(r"^V\s+(\S+)\s+\(([^)]*)\)$")
_A_RE = re.compile(r"^A\s+(\S+)\s+color=([abc])\s+(closed|from=(\S+)\.(\d+)\s+to=(\S+)\.(\d+))$")
_B_RE = re.compile(r"^B\s+(\S+)\s+(-?\d+(?:/\d+)?)$")


def _resolve_over(line, cid, slot_arcs, over_spec):
    m = re.match(r"^slots\((\d),(\d)\)$", over_spec)
    if m:
        s0, s1 = int(m.group(1)), int(m.group(2))
        if {s0, s1} == {0, 2}:
            return 0
        if {s0, s1} == {1, 3}:
            return 1
        raise ParseError(line, f"over slots must be an opposite pair, got {s0},{s1}")
    m = re.match(r"^\(([^,()]+),([^,()]+)\)$", over_spec)
    if not m:
        raise ParseError(line, f"cannot parse over={over_spec}")
    x, y = m.group(1), m.group(2)
    matches = []
    for diag in (0, 1):
        if sorted((slot_arcs[diag], slot_arcs[diag + 2])) == sorted((x, y)):
            matches.append(diag)
    if not matches:
        raise UnknownEntity(f"line {line}: over arcs ({x},{y}) not a diagonal of {cid}")
    if len(matches) == 2:
        raise AmbiguousOver(
            f"line {line}: both diagonals of {cid} read ({x},{y}); use over=slots(i,j)"
        )
    return matches[0]


def parse_diagram(text: str) -> GraphDiagram:
    """Parse the extended planar-diagram format.

    Lines (one declaration each, `#` comments):
      X <id> (e1,e2,e3,e4) over=(ei,ej)   crossing, arcs counterclockwise
      X <id> (e1,e2,e3,e4) over=slots(0,2)
      V <id> (e1,e2,e3)                   trivalent vertex
      A <id> color=<a|b|c> from=<node>.<slot> to=<node>.<slot>
      A <id> color=<a|b|c> closed         crossing-free circle
      B <arc id> <p/q>                    framing box, half-integer
    Multiple boxes on one arc are summed.
    """
    nodes = []
    pending_over = []
    arcs = {}
    boxes = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("X"):
            m = _X_RE.match(line)
            if not m:
                raise ParseError(lineno, f"bad crossing declaration: {line!r}")
            cid, arcs_str, over = m.group(1), m.group(2), m.group(3)
            slot_arcs = tuple(s.strip() for s in arcs_str.split(","))
            if len(slot_arcs) != 4:
                raise ParseError(lineno, "a crossing lists exactly 4 arc ends")
            pending_over.append((lineno, cid, slot_arcs, over))
        elif line.startswith("V"):
            m = _V_RE.match(line)
            if not m:
                raise ParseError(lineno, f"bad vertex declaration: {line!r}")
            slot_arcs = tuple(s.strip() for s in m.group(2).split(","))
            if len(slot_arcs) != 3:
                raise ParseError(lineno, "a vertex lists exactly 3 arc ends")
            nodes.append(Vertex(m.group(1), slot_arcs))
        elif line.startswith("A"):
            m = _A_RE.match(line)
            if not m:
                raise ParseError(lineno, f"bad arc declaration: {line!r}")
            aid, color = m.group(1), check_color(m.group(2))
            if m.group(3) == "closed":
                end0 = end1 = None
            else:
                end0 = (m.group(4), int(m.group(5)))
                end1 = (m.group(6), int(m.group(7)))
            if aid in arcs:
                raise DuplicateEnd(f"line {lineno}: arc {aid} declared twice")
            arcs[aid] = Arc(aid, color, end0, end1)
        elif line.startswith("B"):
            m = _B_RE.match(line)
            if not m:
                raise ParseError(lineno, f"bad box declaration: {line!r}")
            val = Fraction(m.group(2))
            if val.denominator not in (1, 2):
                raise ParseError(lineno, f"box value {val} is not a half-integer")
            boxes.setdefault(m.group(1), []).append(val)
        else:
            raise ParseError(lineno, f"unknown declaration: {line!r}")

    for lineno, cid, slot_arcs, over in pending_over:
        over_diag = _resolve_over(lineno, cid, slot_arcs, over)
        nodes.append(Crossing(cid, slot_arcs, over_diag))
    for aid, vals in boxes.items():
        if aid not in arcs:
            raise UnknownEntity(f"box on unknown arc {aid}")
        arcs[aid] = replace(arcs[aid], box=sum(vals, Fraction(0)))
    return build_diagram(nodes, arcs.values())


def format_diagram(d: GraphDiagram) -> str:
    lines = []
    for n in sorted(d.nodes, key=lambda n: n.id):
        if isinstance(n, Crossing):
            lines.append(f"X {n.id} ({','.join(n.arcs)}) over=slots({n.over_diag},{n.over_diag + 2})")
        else:
            lines.append(f"V {n.id} ({','.join(n.arcs)})")
    for a in sorted(d.arcs, key=lambda a: a.id):
        if a.closed:
            lines.append(f"A {a.id} color={a.color} closed")
        else:
            lines.append(
                f"A {a.id} color={a.color} from={a.end0[0]}.{a.end0[1]} to={a.end1[0]}.{a.end1[1]}"
            )
    for a in sorted(d.arcs, key=lambda a: a.id):
        if a.box:
            lines.append(f"B {a.id} {a.box}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# strands, components, sublinks


def strand_color(d: GraphDiagram, c: Crossing, diag: int) -> str:
    return d.arc(c.arcs[diag]).color


def link_components(d: GraphDiagram):
    """Closed strands of a vertex-free diagram, as sorted arc id tuples."""
    if d.vertices:
        raise DiagramError("diagram still has trivalent vertices")
    comp_of = {}
    components = []
    for a in d.arcs:
        if a.id in comp_of:
            continue
        comp = set()
        frontier = [a.id]
        while frontier:
            aid = frontier.pop()
            if aid in comp:
                continue
            comp.add(aid)
            arc = d.arc(aid)
            for e in (arc.end0, arc.end1):
                if e is None:
                    continue
                nid, slot = e
                nxt = d.arc_at(nid, (slot + 2) % 4)
                frontier.append(nxt)
        for aid in comp:
            comp_of[aid] = len(components)
        components.append(tuple(sorted(comp)))
    return tuple(components)


def as_link_diagram(d: GraphDiagram) -> LinkDiagram:
    return LinkDiagram(d, link_components(d))


def splice_diagram(d: GraphDiagram, junctions, drop_nodes=(), drop_arcs=(),
                   box_deltas=None, node_rebuild=None):
    """Merge arcs along junctions and rebuild the remaining nodes.

    `junctions` lists pairs of (arc id, (node, slot)) ends to be glued;
    every glued end must belong to a dropped node.  Boxes along a merged
    chain are summed, after applying `box_deltas` (arc id -> Fraction).
    `node_rebuild` optionally substitutes kept nodes by id before arc ids
    are remapped.  Returns (diagram, merged_of) with the arc id mapping.
    """
    drop_nodes = set(drop_nodes)
    drop_arcs = set(drop_arcs)
    box_deltas = box_deltas or {}
    node_rebuild = node_rebuild or {}
    keep_arcs = {a.id for a in d.arcs} - drop_arcs

    glue = {}  # (arc id, end index) -> (arc id, end index) across a junction
    for (a1, e1), (a2, e2) in junctions:
        k1 = (a1, 0 if d.arc(a1).end0 == e1 else 1)
        k2 = (a2, 0 if d.arc(a2).end0 == e2 else 1)
        glue[k1] = k2
        glue[k2] = k1

    def boxed(aid):
        return d.arc(aid).box + box_deltas.get(aid, Fraction(0))

    merged_of = {}
    new_arcs = []
    for aid in sorted(keep_arcs):
        if aid in merged_of:
            continue
        arc = d.arc(aid)
        if arc.closed:
            merged_of[aid] = aid
            new_arcs.append(replace(arc, box=boxed(aid)))
            continue
        chain = [aid]
        closed = False
        # walk from end1 of aid outward; each arc end sits in at most one
        # junction, so closure can only happen by re-entering aid at end0
        cur = (aid, 1)
        while cur in glue:
            nxt_id, entered_at = glue[cur]
            if (nxt_id, entered_at) == (aid, 0):
                closed = True
                break
            chain.append(nxt_id)
            cur = (nxt_id, 1 - entered_at)
        end1 = None if closed else _open_end(d, cur)
        if closed:
            end0 = None
        else:
            cur = (aid, 0)
            while cur in glue:
                nxt_id, entered_at = glue[cur]
                chain.insert(0, nxt_id)
                cur = (nxt_id, 1 - entered_at)
            end0 = _open_end(d, cur)
        new_id = min(chain)
        box = sum((boxed(x) for x in chain), Fraction(0))
        color = d.arc(new_id).color
        for x in chain:
            merged_of[x] = new_id
        new_arcs.append(Arc(new_id, color, end0, end1, box))

    new_nodes = []
    for n in d.nodes:
        if n.id in drop_nodes:
            continue
        n = node_rebuild.get(n.id, n)
        arcs = tuple(merged_of[a] for a in n.arcs)
        if isinstance(n, Crossing):
            new_nodes.append(Crossing(n.id, arcs, n.over_diag))
        else:
            new_nodes.append(Vertex(n.id, arcs))
    return build_diagram(new_nodes, new_arcs), merged_of


def sublink_diagram(d: GraphDiagram, i: str, j: str) -> LinkDiagram:
    """Restrict to two colors.

    Arcs of the third color are deleted; trivalent vertices become 2-valent
    joins and are absorbed; crossings losing a strand are erased, merging the
    surviving strand's arcs.  Boxes on merged arcs are summed.
    """
    pair = canonical_pair(i, j)
    k = third_color(pair[0], pair[1])

    junctions = []
    drop_nodes = []
    drop_arcs = {a.id for a in d.arcs if a.color == k}
    for n in d.nodes:
        if isinstance(n, Vertex):
            ends = [
                (n.arcs[s], (n.id, s)) for s in range(3) if d.arc(n.arcs[s]).color != k
            ]
            if len(ends) != 2:
                raise ColorClash(f"vertex {n.id} does not see exactly one {k}-arc")
            junctions.append((ends[0], ends[1]))
            drop_nodes.append(n.id)
        else:
            colors = (strand_color(d, n, 0), strand_color(d, n, 1))
            alive = [diag for diag in (0, 1) if colors[diag] != k]
            if len(alive) == 1:
                diag = alive[0]
                junctions.append(
                    ((n.arcs[diag], (n.id, diag)), (n.arcs[diag + 2], (n.id, diag + 2)))
                )
                drop_nodes.append(n.id)
            elif len(alive) == 0:
                drop_nodes.append(n.id)

    sub, _ = splice_diagram(d, junctions, drop_nodes, drop_arcs)
    return as_link_diagram(sub)


def _open_end(d, cursor):
    aid, endidx = cursor
    arc = d.arc(aid)
    return arc.end0 if endidx == 0 else arc.end1


# ---------------------------------------------------------------------------
# self-linking and weak framing sums


def component_passages(ld: LinkDiagram):
    """Crossing passages of each component under its canonical orientation.

    The component is traversed starting from its smallest arc id, running
    from that arc's end0 to end1; the result maps component index to a list
    of (crossing id, entry slot).
    """
    d = ld.diagram
    passages = []
    for comp in ld.components:
        start = d.arc(comp[0])
        visits = []
        if start.closed:
            passages.append(visits)
            continue
        cur = (start.id, 0)
        while True:
            nid, slot = dart_head(d, cur)
            visits.append((nid, slot))
            out_slot = (slot + 2) % 4
            cur = _departing_dart(d, nid, out_slot)
            if cur == (start.id, 0):
                break
        passages.append(visits)
    return passages


def crossing_sign(over_in: int, under_in: int) -> int:
    """Sign of a crossing from the entry slots of its two directed strands."""
    if under_in == (over_in + 1) % 4:
        return 1
    if under_in == (over_in - 1) % 4:
        return -1
    raise ValueError("entry slots must lie on different diagonals")


def component_selflinking(ld: LinkDiagram):
    """Boxes plus algebraic self-crossings, per component.

    Self-writhe and self-framing are orientation independent, so no
    orientation data is required on the diagram.
    """
    d = ld.diagram
    passages = component_passages(ld)
    result = {}
    for idx, comp in enumerate(ld.components):
        total = sum((d.arc(aid).box for aid in comp), Fraction(0))
        entries = {}
        for nid, slot in passages[idx]:
            entries.setdefault(nid, []).append(slot)
        for nid, slots in entries.items():
            if len(slots) == 2:
                c = d.node(nid)
                over_in = next(s for s in slots if s % 2 == c.over_diag)
                under_in = next(s for s in slots if s % 2 != c.over_diag)
                total += crossing_sign(over_in, under_in)
        result[comp] = total
    return result


def weak_euler_numbers(d: GraphDiagram):
    """The three per-pair framing sums read off a boundary frame.

    For each color pair the value is minus the total self-linking of the
    bicolored sublink; returns a dict over 'ab', 'bc', 'ca'.
    """
    out = {}
    for pair in ("ab", "bc", "ca"):
        ld = sublink_diagram(d, pair[0], pair[1])
        out[pair] = -sum(component_selflinking(ld).values(), Fraction(0))
    return out


def mirror_diagram(d: GraphDiagram) -> GraphDiagram:
    """Reverse every crossing and negate every box."""
    nodes = [
        Crossing(n.id, n.arcs, 1 - n.over_diag) if isinstance(n, Crossing) else n
        for n in d.nodes
    ]
    arcs = [replace(a, box=-a.box) for a in d.arcs]
    return build_diagram(nodes, arcs)


# ---------------------------------------------------------------------------
# the underlying abstract graph


def diagrams_isomorphic(d1: GraphDiagram, d2: GraphDiagram) -> bool:
    """Combinatorial isomorphism: a relabeling of nodes and arcs matching
    node kinds, rotations up to cyclic shift, over-strands, colors and boxes.
    Backtracking over node assignments in breadth-first order."""
    if len(d1.nodes) != len(d2.nodes) or len(d1.arcs) != len(d2.arcs):
        return False
    if sorted(type(n).__name__ for n in d1.nodes) != sorted(
        type(n).__name__ for n in d2.nodes
    ):
        return False
    if sorted((a.color, a.box, a.closed) for a in d1.arcs) != sorted(
        (a.color, a.box, a.closed) for a in d2.arcs
    ):
        return False
    if not d1.nodes:
        return True  # only closed circles; the profile check settled it

    # breadth-first node order so each node after a component root touches
    # an already-mapped node
    order = []
    seen = set()
    for root in sorted(d1.nodes, key=lambda n: n.id):
        if root.id in seen:
            continue
        queue = [root.id]
        seen.add(root.id)
        while queue:
            nid = queue.pop(0)
            order.append(d1.node(nid))
            for aid in d1.node(nid).arcs:
                a = d1.arc(aid)
                for e in (a.end0, a.end1):
                    if e and e[0] not in seen:
                        seen.add(e[0])
                        queue.append(e[0])

    node_map = {}  # d1 node id -> (d2 node id, slot shift)

    def end_image(end):
        if end is None:
            return None
        nid, slot = end
        if nid not in node_map:
            return "pending"
        n2id, shift = node_map[nid]
        return (n2id, (slot + shift) % d1.node(nid).degree)

    def locally_consistent(n1):
        n2id, shift = node_map[n1.id]
        n2 = d2.node(n2id)
        for s in range(n1.degree):
            a1 = d1.arc(n1.arcs[s])
            a2 = d2.arc(n2.arcs[(s + shift) % n1.degree])
            if (a1.color, a1.box) != (a2.color, a2.box):
                return False
            img = {end_image(a1.end0), end_image(a1.end1)}
            if "pending" in img:
                continue
            if img != {a2.end0, a2.end1}:
                return False
        return True

    def extend(idx):
        if idx == len(order):
            return all(locally_consistent(n1) for n1 in order)
        n1 = order[idx]
        used = {m[0] for m in node_map.values()}
        for n2 in d2.nodes:
            if n2.id in used or type(n2) is not type(n1):
                continue
            for shift in range(n1.degree):
                if isinstance(n1, Crossing) and (n1.over_diag + shift) % 2 != n2.over_diag:
                    continue
                node_map[n1.id] = (n2.id, shift)
                if locally_consistent(n1) and extend(idx + 1):
                    return True
                del node_map[n1.id]
        return False

    return extend(0)


def abstract_graph(d: GraphDiagram):
    """Forget the embedding and return the validated abstract Klein graph.

    Strands are followed through crossings; every strand must terminate at
    trivalent vertices on both ends (no closed circle components).
    """
    for a in d.arcs:
        if a.closed:
            raise DiagramError("closed circle has no abstract-graph counterpart")
    edges = []
    visited = set()
    used_arcs = set()
    for v in d.vertices:
        for slot in range(3):
            if (v.id, slot) in visited:
                continue
            visited.add((v.id, slot))
            cur = _departing_dart(d, v.id, slot)
            chain = [cur[0]]
            while True:
                nid, s = dart_head(d, cur)
                if isinstance(d.node(nid), Vertex):
                    visited.add((nid, s))
                    edges.append(Edge(min(chain), v.id, nid, d.arc(chain[0]).color))
                    used_arcs.update(chain)
                    break
                cur = _departing_dart(d, nid, (s + 2) % 4)
                chain.append(cur[0])
    stray = {a.id for a in d.arcs} - used_arcs
    if stray:
        raise DiagramError(f"strands not attached to any vertex: {sorted(stray)}")
    return validate_klein([v.id for v in d.vertices], edges)
