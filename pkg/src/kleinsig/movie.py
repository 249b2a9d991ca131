"""Movie presentations of spanning foams.

A movie is an initial diagram plus a sequence of elementary moves; replaying
the moves validates the foam frame by frame.  Box bookkeeping keeps the
tracked parallels honest: a kink insertion compensates the new writhe on the
same arc, a vertex twist spreads the compensation as half-boxes over the two
crossed arcs, and strand-level moves leave all framing sums alone.  Clasp
moves flip one bicolor crossing and record the declared lift data for the
corresponding cover.

Frames are never stored; every consumer replays the moves from the initial
frame, so movie files stay small and every replay re-validates the foam.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

from .diagram import (
    Arc,
    Crossing,
    GraphDiagram,
    Vertex,
    build_diagram,
    component_selflinking,
    crossing_sign,
    diagrams_isomorphic,
    face_orbits,
    parse_diagram,
    splice_diagram,
    strand_color,
    sublink_diagram,
    validate_diagram,
    weak_euler_numbers,
)
from .kleingraph import COLORS, canonical_pair, check_color, third_color


class MovieError(ValueError):
    pass


class NotApplicable(MovieError):
    def __init__(self, move, reason):
        self.move = move
        super().__init__(f"{move}: {reason}")


class UnknownEntity(MovieError):
    pass


class FinalFrameMismatch(MovieError):
    pass


class FrameMismatch(MovieError):
    pass


class UnannotatedClosedComponent(MovieError):
    pass


class MovieParseError(MovieError):
    def __init__(self, line, msg):
        self.line = line
        super().__init__(f"line {line}: {msg}")


MOVE_KINDS = (
    "R1", "R2", "R3", "Rv1", "Rv2", "clasp", "unzip",
    "birth", "death", "saddle", "transfer-box",
)


@dataclass(frozen=True)
class Move:
    kind: str
    params: tuple  # sorted (key, value) pairs

    def get(self, key, default=None):
        for k, v in self.params:
            if k == key:
                return v
        return default

    def __str__(self):
        inner = " ".join(f"{k}={v}" for k, v in self.params)
        return f"{self.kind} {inner}".strip()


def move(kind, **params):
    if kind not in MOVE_KINDS:
        raise MovieError(f"unknown move kind {kind!r}")
    return Move(kind, tuple(sorted(params.items())))


@dataclass(frozen=True)
class ClaspRecord:
    crossing: str
    sign: int
    pair: str  # the two strand colors, canonical
    lift: tuple | None  # (framing, lk_with_branch) when declared inline

    @property
    def sphere_color(self):
        return third_color(self.pair[0], self.pair[1])


@dataclass(frozen=True)
class ClosedComponent:
    color: str
    contribution: Fraction  # declared or the automatic 0
    annotated: bool
    touched: bool


@dataclass(frozen=True)
class FoamData:
    boundary: GraphDiagram
    closed_components: tuple  # ClosedComponent
    clasp_records: tuple  # ClaspRecord


@dataclass(frozen=True)
class Movie:
    initial: GraphDiagram
    moves: tuple
    declared_final: GraphDiagram | None = None


@dataclass
class MoveOutcome:
    diagram: GraphDiagram
    parents: dict = field(default_factory=dict)  # new arc id -> parent arc ids
    removed: tuple = ()
    clasp: ClaspRecord | None = None
    born: tuple = ()  # arc ids born as fresh circles
    died: tuple = ()  # (arc id, annotation or None)
    touching: tuple = ()  # arc ids whose components a saddle/unzip touched
    inverse: Move | None = None


def _fresh(d: GraphDiagram, prefix: str) -> str:
    taken = {a.id for a in d.arcs} | {n.id for n in d.nodes}
    n = 1
    while f"{prefix}{n}" in taken:
        n += 1
    return f"{prefix}{n}"


def _rebuild_nodes(nodes, end_updates):
    """Apply (node id, slot) -> arc id substitutions to node tuples."""
    out = []
    for n in nodes:
        arcs = list(n.arcs)
        changed = False
        for (nid, slot), aid in end_updates.items():
            if nid == n.id:
                arcs[slot] = aid
                changed = True
        if not changed:
            out.append(n)
        elif isinstance(n, Crossing):
            out.append(Crossing(n.id, tuple(arcs), n.over_diag))
        else:
            out.append(Vertex(n.id, tuple(arcs)))
    return out


def _face_of_dart(d: GraphDiagram):
    faces = face_orbits(d)
    face_of_corner = {}
    for idx, f in enumerate(faces):
        for corner in f:
            face_of_corner[corner] = idx
    def lookup(dart):
        aid, direction = dart
        a = d.arc(aid)
        head = a.end1 if direction == 0 else a.end0
        return face_of_corner[head]
    return lookup, face_of_corner, faces


def _sign_token(val):
    if val in ("+", "+1", 1):
        return 1
    if val in ("-", "-1", -1):
        return -1
    raise MovieError(f"bad sign {val!r}")


# ---------------------------------------------------------------------------
# individual moves


def _apply_r1_insert(d, m):
    aid = m.get("arc")
    sign = _sign_token(m.get("sign"))
    if aid is None or aid not in {a.id for a in d.arcs}:
        raise UnknownEntity(f"R1 insert: unknown arc {aid}")
    alpha = d.arc(aid)
    kid = _fresh(d, "k")
    over_diag = 1 if sign > 0 else 0
    if alpha.closed:
        loop = _fresh(d, "l")
        nodes = list(d.nodes) + [Crossing(kid, (aid, aid, loop, loop), over_diag)]
        arcs = [a for a in d.arcs if a.id != aid]
        arcs.append(Arc(aid, alpha.color, (kid, 1), (kid, 0), alpha.box - sign))
        arcs.append(Arc(loop, alpha.color, (kid, 2), (kid, 3)))
        out = build_diagram(nodes, arcs)
        return MoveOutcome(out, parents={loop: (aid,)},
                           inverse=move("R1", op="delete", crossing=kid))
    loop = _fresh(d, "l")
    tail = _fresh(d, "t")
    nodes = _rebuild_nodes(d.nodes, {alpha.end1: tail})
    nodes.append(Crossing(kid, (aid, tail, loop, loop), over_diag))
    arcs = [a for a in d.arcs if a.id != aid]
    arcs.append(Arc(aid, alpha.color, alpha.end0, (kid, 0), alpha.box - sign))
    arcs.append(Arc(loop, alpha.color, (kid, 2), (kid, 3)))
    arcs.append(Arc(tail, alpha.color, (kid, 1), alpha.end1))
    out = build_diagram(nodes, arcs)
    return MoveOutcome(out, parents={loop: (aid,), tail: (aid,)},
                       inverse=move("R1", op="delete", crossing=kid))


def _kink_structure(d, kid):
    """(loop arc, loop slots, through slots) of a kink crossing, or None."""
    c = d.node(kid)
    for p in range(4):
        q = (p + 1) % 4
        if c.arcs[p] == c.arcs[q]:
            a = d.arc(c.arcs[p])
            if a.end0 and a.end1 and {a.end0, a.end1} == {(kid, p), (kid, q)}:
                return c.arcs[p], (p, q), ((p + 2) % 4, (q + 2) % 4)
    return None


def _kink_sign(d, kid, loop_slots):
    c = d.node(kid)
    p, q = loop_slots
    # the strand enters on a through slot, exits into the loop, re-enters on
    # the other loop slot; entries are the loop slot not opposite the first
    # through slot and that through slot itself
    r = (p + 2) % 4  # through slot opposite loop slot p
    entries = (r, q) if (q + 2) % 4 != r else (r, p)
    over_in = next(s for s in entries if s % 2 == c.over_diag)
    under_in = next(s for s in entries if s % 2 != c.over_diag)
    return crossing_sign(over_in, under_in)


def _apply_r1_delete(d, m):
    kid = m.get("crossing")
    if kid not in {n.id for n in d.crossings}:
        raise UnknownEntity(f"R1 delete: unknown crossing {kid}")
    kk = _kink_structure(d, kid)
    if kk is None:
        raise NotApplicable(m, f"crossing {kid} is not a reducible kink")
    loop, loop_slots, through = _kink_structure(d, kid)
    sign = _kink_sign(d, kid, loop_slots)
    a_id, b_id = d.node(kid).arcs[through[0]], d.node(kid).arcs[through[1]]
    junctions = [((a_id, (kid, through[0])), (b_id, (kid, through[1])))]
    box_deltas = {a_id: d.arc(loop).box + sign}
    out, merged = splice_diagram(d, junctions, drop_nodes=[kid], drop_arcs=[loop],
                                 box_deltas=box_deltas)
    new_id = merged[a_id]
    parents = {new_id: tuple(sorted({a_id, b_id, loop}))}
    return MoveOutcome(out, parents=parents, removed=(loop,),
                       inverse=move("R1", op="insert", arc=new_id,
                                    sign="+" if sign > 0 else "-"))


def _common_face_darts(d, aid, bid, side=None):
    """Darts of the two arcs bordering their unique shared face.

    Returns (da, db) for arcs aid and bid; a closed circle floats and gets
    None for its dart, with `side` (0 or 1) picking the open arc's side.
    """
    a, b = d.arc(aid), d.arc(bid)
    if a.closed and b.closed:
        return None, None  # both floating: no ambient face constraints
    if a.closed or b.closed:
        open_id = bid if a.closed else aid
        if side is None:
            raise NotApplicable(
                None, f"floating circle: specify side=0|1 relative to arc {open_id}"
            )
        dart = (open_id, int(side))
        return (dart, None) if open_id == aid else (None, dart)
    lookup, _, _ = _face_of_dart(d)
    pairs = []
    for da in ((aid, 0), (aid, 1)):
        for db in ((bid, 0), (bid, 1)):
            if lookup(da) == lookup(db):
                pairs.append((da, db))
    if side is not None:
        pairs = [(da, db) for da, db in pairs if db == (bid, int(side))]
    if not pairs:
        raise NotApplicable(None, f"arcs {aid} and {bid} share no face")
    if len(pairs) > 1:
        raise NotApplicable(
            None,
            f"arcs {aid} and {bid} share several faces; add side=0|1 for {bid}",
        )
    return pairs[0]


def _fresh_pair(d, prefix):
    taken = {a.id for a in d.arcs} | {n.id for n in d.nodes}
    out = []
    n = 1
    while len(out) < 2:
        cand = f"{prefix}{n}"
        if cand not in taken:
            out.append(cand)
            taken.add(cand)
        n += 1
    return out


def _apply_r2_insert(d, m):
    over, under = m.get("over"), m.get("under")
    ids = {a.id for a in d.arcs}
    if over not in ids or under not in ids:
        raise UnknownEntity(f"R2 insert: unknown arcs {over},{under}")
    if over == under:
        raise NotApplicable(m, "R2 needs two distinct arcs")
    try:
        da, db = _common_face_darts(d, over, under, m.get("side"))
    except NotApplicable as exc:
        raise NotApplicable(m, str(exc)) from None
    alpha, beta = d.arc(over), d.arc(under)
    k1, k2 = _fresh_pair(d, "k")
    nodes = list(d.nodes)
    arcs = [a for a in d.arcs if a.id not in (over, under)]
    parents = {}
    end_updates = {}

    mid_b = _fresh(d, "u")
    if beta.closed:
        arcs.append(Arc(under, beta.color, (k2, 0), (k1, 2), beta.box))
        arcs.append(Arc(mid_b, beta.color, (k1, 0), (k2, 2)))
        parents[mid_b] = (under,)
    else:
        dirb = db[1]
        tail_end, head_end = (beta.end0, beta.end1) if dirb == 0 else (beta.end1, beta.end0)
        out_b = _fresh(d, "v")
        arcs.append(Arc(under, beta.color, tail_end, (k1, 2), beta.box))
        arcs.append(Arc(mid_b, beta.color, (k1, 0), (k2, 2)))
        arcs.append(Arc(out_b, beta.color, (k2, 0), head_end))
        parents[mid_b] = (under,)
        parents[out_b] = (under,)
        end_updates[head_end] = out_b

    mid_a = _fresh(d, "o")
    if alpha.closed:
        arcs.append(Arc(over, alpha.color, (k2, 3), (k1, 3), alpha.box))
        arcs.append(Arc(mid_a, alpha.color, (k1, 1), (k2, 1)))
        parents[mid_a] = (over,)
    else:
        dira = da[1] if da is not None else 0
        tail_end, head_end = (alpha.end0, alpha.end1) if dira == 0 else (alpha.end1, alpha.end0)
        out_a = _fresh(d, "p")
        arcs.append(Arc(over, alpha.color, tail_end, (k1, 3), alpha.box))
        arcs.append(Arc(mid_a, alpha.color, (k1, 1), (k2, 1)))
        arcs.append(Arc(out_a, alpha.color, (k2, 3), head_end))
        parents[mid_a] = (over,)
        parents[out_a] = (over,)
        end_updates[head_end] = out_a

    nodes = _rebuild_nodes(nodes, end_updates)
    b_out_arc = under if beta.closed else out_b
    a_out_arc = over if alpha.closed else out_a
    nodes.append(Crossing(k1, (mid_b, mid_a, under, over), 1))
    nodes.append(Crossing(k2, (b_out_arc, mid_a, mid_b, a_out_arc), 1))
    out = build_diagram(nodes, arcs)
    return MoveOutcome(out, parents=parents,
                       inverse=move("R2", op="delete", crossings=f"({k1},{k2})"))


def _apply_r2_delete(d, m):
    spec = m.get("crossings", "")
    mm = re.match(r"^\(([^,()]+),([^()]+)\)$", spec)
    if not mm:
        raise MovieError(f"R2 delete: bad crossings spec {spec!r}")
    k1, k2 = mm.group(1).strip(), mm.group(2).strip()
    node_ids = {n.id for n in d.crossings}
    if k1 not in node_ids or k2 not in node_ids:
        raise UnknownEntity(f"R2 delete: unknown crossings {k1},{k2}")
    c1, c2 = d.node(k1), d.node(k2)
    # the cancelling pair shares a bigon: two arcs joining k1 and k2, one per
    # strand, with the same strand over at both crossings
    joining = [
        a for a in d.arcs
        if a.end0 and a.end1 and {a.end0[0], a.end1[0]} == {k1, k2}
    ]
    _, face_of_corner, faces = _face_of_dart(d)
    bigon_arcs = None
    for idx, f in enumerate(faces):
        if len(f) == 2 and {c for c, _ in f} == {k1, k2}:
            arcs_of_face = set()
            for nid, slot in f:
                deg = 4
                nxt = (slot + 1) % deg
                arcs_of_face.add(d.node(nid).arcs[nxt])
                arcs_of_face.add(d.node(nid).arcs[slot])
            cand = [a for a in joining if a.id in arcs_of_face]
            if len(cand) == 2:
                bigon_arcs = cand
                break
    if bigon_arcs is None:
        raise NotApplicable(m, f"no bigon between {k1} and {k2}")
    m1, m2 = bigon_arcs

    def over_status(c, aid):
        return int(c.arcs.index(aid) % 2 == 0) == (1 - c.over_diag)

    # strand of m1 must be over at both crossings or under at both
    if over_status(c1, m1.id) != over_status(c2, m1.id):
        raise NotApplicable(m, "bigon is clasped, not cancellable")
    junctions = []
    for c in (c1, c2):
        for diag in (0, 1):
            s1, s2 = diag, diag + 2
            junctions.append(
                ((c.arcs[s1], (c.id, s1)), (c.arcs[s2], (c.id, s2)))
            )
    # the two bigon arcs vanish inside merged chains
    out, merged = splice_diagram(d, junctions, drop_nodes=[k1, k2])
    parents = {}
    for new_id in set(merged.values()):
        src = tuple(sorted(k for k, v in merged.items() if v == new_id))
        if len(src) > 1:
            parents[new_id] = src
    return MoveOutcome(out, parents=parents,
                       inverse=move("R2", op="insert",
                                    over=merged[m1.id] if over_status(c1, m1.id) else merged[m2.id],
                                    under=merged[m2.id] if over_status(c1, m1.id) else merged[m1.id]))


def _apply_r3(d, m):
    spec = m.get("triangle", "")
    mm = re.match(r"^\(([^,()]+),([^,()]+),([^,()]+)\)$", spec)
    if not mm:
        raise MovieError(f"R3: bad triangle spec {spec!r}")
    xa, xb, xc = (s.strip() for s in mm.groups())
    node_ids = {n.id for n in d.crossings}
    for x in (xa, xb, xc):
        if x not in node_ids:
            raise UnknownEntity(f"R3: unknown crossing {x}")
    _, face_of_corner, faces = _face_of_dart(d)
    tri = None
    for f in faces:
        if len(f) == 3 and {c for c, _ in f} == {xa, xb, xc}:
            tri = f
            break
    if tri is None:
        raise NotApplicable(m, f"no triangular face on {xa},{xb},{xc}")
    # rotate the orbit so the non-slider crossing comes first
    while tri[0][0] != xa:
        tri = tri[1:] + tri[:1]
    (n1, k1), (n3, k3), (n2, k2) = tri  # orbit visits X1 -> X3 -> X2
    o1, o3, o2 = (k1 - 2) % 4, (k3 - 1) % 4, (k2 - 0) % 4
    c1, c2, c3 = d.node(n1), d.node(n2), d.node(n3)

    def at(c, offset, template_slot):
        return c.arcs[(template_slot + offset) % 4]

    tri_p, tri_q = at(c1, o1, 2), at(c1, o1, 3)
    tri_r = at(c2, o2, 0)
    e_p1, e_q1 = at(c1, o1, 0), at(c1, o1, 1)
    e_r2, e_p2 = at(c2, o2, 2), at(c2, o2, 3)
    e_r3, e_q3 = at(c3, o3, 0), at(c3, o3, 3)
    if at(c2, o2, 1) != tri_p or at(c3, o3, 1) != tri_q or at(c3, o3, 2) != tri_r:
        raise NotApplicable(m, "triangle sides do not line up")

    def r_is_over(c, offset):
        # r sits on the template (0,2) diagonal of c
        return c.over_diag == (offset % 2)

    if r_is_over(c2, o2) != r_is_over(c3, o3):
        raise NotApplicable(m, "sliding strand is neither over nor under both")

    after = {
        n1: {0: tri_p, 1: tri_q, 2: e_p2, 3: e_q3},
        n2: {0: e_r3, 1: e_p1, 2: tri_r, 3: tri_p},
        n3: {0: tri_r, 1: e_q1, 2: e_r2, 3: tri_q},
    }
    offsets = {n1: o1, n2: o2, n3: o3}
    new_ends = {}  # (arc id, old end) -> new end
    old_ends = {
        (tri_p, (n1, (2 + o1) % 4)): (n1, (0 + o1) % 4),
        (tri_p, (n2, (1 + o2) % 4)): (n2, (3 + o2) % 4),
        (tri_q, (n1, (3 + o1) % 4)): (n1, (1 + o1) % 4),
        (tri_q, (n3, (1 + o3) % 4)): (n3, (3 + o3) % 4),
        (tri_r, (n2, (0 + o2) % 4)): (n2, (2 + o2) % 4),
        (tri_r, (n3, (2 + o3) % 4)): (n3, (0 + o3) % 4),
        (e_p1, (n1, (0 + o1) % 4)): (n2, (1 + o2) % 4),
        (e_q1, (n1, (1 + o1) % 4)): (n3, (1 + o3) % 4),
        (e_r2, (n2, (2 + o2) % 4)): (n3, (2 + o3) % 4),
        (e_p2, (n2, (3 + o2) % 4)): (n1, (2 + o1) % 4),
        (e_r3, (n3, (0 + o3) % 4)): (n2, (0 + o2) % 4),
        (e_q3, (n3, (3 + o3) % 4)): (n1, (3 + o1) % 4),
    }
    arcs = []
    for a in d.arcs:
        e0 = old_ends.get((a.id, a.end0), a.end0) if a.end0 else None
        e1 = old_ends.get((a.id, a.end1), a.end1) if a.end1 else None
        arcs.append(Arc(a.id, a.color, e0, e1, a.box))
    nodes = []
    for n in d.nodes:
        if n.id in after:
            off = offsets[n.id]
            tuple_after = tuple(after[n.id][(s - off) % 4] for s in range(4))
            nodes.append(Crossing(n.id, tuple_after, n.over_diag))
        else:
            nodes.append(n)
    out = build_diagram(nodes, arcs)
    return MoveOutcome(out, inverse=move("R3", triangle=f"({xa},{xb},{xc})"))


def _apply_rv1_twist(d, m):
    vid, axis = m.get("vertex"), m.get("axis")
    sign = _sign_token(m.get("sign"))
    if vid not in {v.id for v in d.vertices}:
        raise UnknownEntity(f"Rv1: unknown vertex {vid}")
    v = d.node(vid)
    if axis not in v.arcs:
        raise NotApplicable(m, f"arc {axis} is not at vertex {vid}")
    p = v.arcs.index(axis)
    m_slot, n_slot = (p + 1) % 3, (p + 2) % 3
    m_id, n_id = v.arcs[m_slot], v.arcs[n_slot]
    if m_id == n_id:
        raise NotApplicable(m, "cannot twist a looped vertex")
    kid = _fresh(d, "k")
    m_near = _fresh(d, "w")
    arcs = []
    parents = {}
    half = Fraction(sign, 2)
    over_diag = 1 if sign > 0 else 0

    def split(arc_id, slot_at_v, far_slot_k, near_slot_k, near_name):
        a = d.arc(arc_id)
        far_end = a.end1 if a.end0 == (vid, slot_at_v) else a.end0
        arcs.append(Arc(arc_id, a.color, far_end, (kid, far_slot_k), a.box))
        arcs.append(Arc(near_name, a.color, (kid, near_slot_k), (vid, slot_at_v), -half))
        parents[near_name] = (arc_id,)

    split(m_id, m_slot, 0, 2, m_near)
    n_near = m_near + "n"
    while n_near in {a.id for a in d.arcs}:
        n_near += "n"
    split(n_id, n_slot, 1, 3, n_near)
    arcs.extend(a for a in d.arcs if a.id not in (m_id, n_id))
    new_v = Vertex(vid, tuple(
        axis if s == p else (n_near if s == m_slot else m_near) for s in range(3)
    ))
    nodes = [new_v if n.id == vid else n for n in d.nodes]
    nodes.append(Crossing(kid, (m_id, n_id, m_near, n_near), over_diag))
    out = build_diagram(nodes, arcs)
    return MoveOutcome(out, parents=parents,
                       inverse=move("Rv1", op="untwist", crossing=kid))


def _apply_rv1_untwist(d, m):
    kid = m.get("crossing")
    if kid not in {n.id for n in d.crossings}:
        raise UnknownEntity(f"Rv1 untwist: unknown crossing {kid}")
    c = d.node(kid)
    # find the vertex joined to this crossing by two arcs on distinct strands
    candidates = {}
    for s in range(4):
        a = d.arc(c.arcs[s])
        other = a.end1 if a.end0 == (kid, s) else a.end0
        if other and isinstance(d.node(other[0]), Vertex):
            candidates.setdefault(other[0], []).append((s, a.id, other[1]))
    target = None
    for vid, hits in candidates.items():
        if len(hits) == 2 and (hits[0][0] % 2) != (hits[1][0] % 2):
            target = (vid, hits)
            break
    if target is None:
        raise NotApplicable(m, f"crossing {kid} is not a vertex twist")
    vid, hits = target
    v = d.node(vid)
    (s_m, m_near, vslot_m), (s_n, n_near, vslot_n) = hits
    # near arcs occupy adjacent crossing slots; the far arcs sit opposite
    m_far = c.arcs[(s_m + 2) % 4]
    n_far = c.arcs[(s_n + 2) % 4]
    entries = ((s_m + 2) % 4, s_n)
    over_in = next(s for s in entries if s % 2 == c.over_diag)
    under_in = next(s for s in entries if s % 2 != c.over_diag)
    sign = crossing_sign(over_in, under_in)
    half = Fraction(sign, 2)
    junctions = [
        ((m_far, (kid, (s_m + 2) % 4)), (m_near, (kid, s_m))),
        ((n_far, (kid, (s_n + 2) % 4)), (n_near, (kid, s_n))),
    ]
    box_deltas = {m_near: half, n_near: half}
    # swap the two non-axis slots back
    new_v = Vertex(vid, tuple(
        v.arcs[vslot_n] if s == vslot_m else (v.arcs[vslot_m] if s == vslot_n else v.arcs[s])
        for s in range(3)
    ))
    out, merged = splice_diagram(d, junctions, drop_nodes=[kid],
                                 box_deltas=box_deltas, node_rebuild={vid: new_v})
    parents = {}
    for new_id in set(merged.values()):
        src = tuple(sorted(k for k, v_ in merged.items() if v_ == new_id))
        if len(src) > 1:
            parents[new_id] = src
    axis_slot = next(s for s in range(3) if s not in (vslot_m, vslot_n))
    return MoveOutcome(out, parents=parents,
                       inverse=move("Rv1", op="twist", vertex=vid,
                                    axis=merged.get(v.arcs[axis_slot], v.arcs[axis_slot]),
                                    sign="+" if sign > 0 else "-"))


def _apply_rv2(d, m):
    aid, vid = m.get("arc"), m.get("vertex")
    if vid not in {v.id for v in d.vertices}:
        raise UnknownEntity(f"Rv2: unknown vertex {vid}")
    if aid not in {a.id for a in d.arcs}:
        raise UnknownEntity(f"Rv2: unknown arc {aid}")
    v = d.node(vid)
    # crossings between the alpha strand and the vertex's edges, adjacent to v
    adj = []
    for t in range(3):
        near = d.arc(v.arcs[t])
        other = near.end1 if near.end0 == (vid, t) else near.end0
        if other and other[0] in {n.id for n in d.crossings}:
            x = d.node(other[0])
            opp = d.arc(x.arcs[(other[1] + 1) % 4])
            for s in range(4):
                if s % 2 != other[1] % 2 and x.arcs[s] == aid:
                    adj.append((t, other[0], other[1]))
                    break
    if len(adj) == 1:
        return _rv2_expand(d, m, vid, aid, adj[0])
    if len(adj) == 2:
        return _rv2_contract(d, m, vid, aid, adj)
    raise NotApplicable(m, f"arc {aid} does not cross an edge of {vid} next to it")


def _rv2_expand(d, m, vid, aid, hit):
    t, xid, p_near_slot_at_x = hit
    v = d.node(vid)
    x = d.node(xid)
    p_near = v.arcs[t]
    b1 = p_near_slot_at_x
    a1_slot, pfar_slot, a2_slot = (b1 + 1) % 4, (b1 + 2) % 4, (b1 + 3) % 4
    a1_id, a2_id = x.arcs[a1_slot], x.arcs[a2_slot]
    p_far = x.arcs[pfar_slot]
    alpha_over = x.over_diag == a1_slot % 2
    _, face_of_corner, _ = _face_of_dart(d)
    corridor = face_of_corner[(xid, b1)]
    # which side of the vertex the A1 piece hugs
    cA = (vid, t)  # corner between slot t and t+1
    cB = (vid, (t + 2) % 3)  # corner between slot t+2 and t
    if face_of_corner.get(cB) == corridor:
        partner1_slot, partner2_slot = (t + 2) % 3, (t + 1) % 3
        template = "B"
    elif face_of_corner.get(cA) == corridor:
        partner1_slot, partner2_slot = (t + 1) % 3, (t + 2) % 3
        template = "A"
    else:
        raise NotApplicable(m, "no corridor between the crossing and the vertex")
    q_id, r_id = v.arcs[partner1_slot], v.arcs[partner2_slot]
    if q_id == r_id or p_near == q_id or p_near == r_id:
        raise NotApplicable(m, "vertex edges too entangled for a slide")

    k1, k2 = _fresh(d, "k"), None
    taken = {a.id for a in d.arcs} | {n.id for n in d.nodes} | {k1}
    n = 1
    while f"k{n}" in taken:
        n += 1
    k2 = f"k{n}"
    mid = _fresh(d, "w")
    qn = _fresh(d, "q")
    rn = _fresh(d, "r")

    arcs = [a for a in d.arcs if a.id not in (p_near, p_far, a1_id, a2_id, q_id, r_id)]
    parents = {}
    # p rejoins into one arc from p_far's far end to the vertex
    pf, pn = d.arc(p_far), d.arc(p_near)
    far_end = pf.end1 if pf.end0 == (xid, pfar_slot) else pf.end0
    keep = min(p_far, p_near)
    arcs.append(Arc(keep, pf.color, far_end, (vid, t), pf.box + pn.box))
    parents[keep] = tuple(sorted({p_far, p_near}))
    end_updates = {far_end: keep} if far_end and far_end[0] != vid else {}

    def far_end_of(arc_id, at_end):
        a = d.arc(arc_id)
        return a.end1 if a.end0 == at_end else a.end0

    # the alpha pieces
    a1_far = far_end_of(a1_id, (xid, a1_slot))
    a2_far = far_end_of(a2_id, (xid, a2_slot))
    # q and r split near the vertex
    q_far_end = far_end_of(q_id, (vid, partner1_slot))
    r_far_end = far_end_of(r_id, (vid, partner2_slot))

    if template == "B":
        k1_tuple = {0: q_id, 1: a1_id, 2: qn, 3: mid}
        k2_tuple = {0: mid, 1: rn, 2: a2_id, 3: r_id}
        od1 = 1 if alpha_over else 0
        od2 = 0 if alpha_over else 1
    else:
        k1_tuple = {0: q_id, 1: mid, 2: qn, 3: a1_id}
        k2_tuple = {0: mid, 1: r_id, 2: a2_id, 3: rn}
        od1 = 1 if alpha_over else 0
        od2 = 0 if alpha_over else 1
    qa, ra = d.arc(q_id), d.arc(r_id)
    arcs.append(Arc(a1_id, d.arc(a1_id).color, a1_far,
                    (k1, 1 if template == "B" else 3), d.arc(a1_id).box))
    arcs.append(Arc(mid, d.arc(a1_id).color, (k1, 3 if template == "B" else 1), (k2, 0)))
    arcs.append(Arc(a2_id, d.arc(a2_id).color, (k2, 2), a2_far, d.arc(a2_id).box))
    arcs.append(Arc(q_id, qa.color, q_far_end, (k1, 0), qa.box))
    arcs.append(Arc(qn, qa.color, (k1, 2), (vid, partner1_slot)))
    arcs.append(Arc(r_id, ra.color, r_far_end, (k2, 3 if template == "B" else 1), ra.box))
    arcs.append(Arc(rn, ra.color, (k2, 1 if template == "B" else 3), (vid, partner2_slot)))
    parents[mid] = (a1_id, a2_id)
    parents[qn] = (q_id,)
    parents[rn] = (r_id,)

    nodes = []
    for node in d.nodes:
        if node.id == xid:
            continue
        if node.id == vid:
            vt = [None, None, None]
            vt[t] = keep
            vt[partner1_slot] = qn
            vt[partner2_slot] = rn
            nodes.append(Vertex(vid, tuple(vt)))
        else:
            nodes.append(node)
    nodes = _rebuild_nodes(nodes, {
        **end_updates,
        **({a1_far: a1_id} if a1_far and a1_far[0] != xid else {}),
        **({a2_far: a2_id} if a2_far and a2_far[0] != xid else {}),
        **({q_far_end: q_id} if q_far_end and q_far_end[0] != vid else {}),
        **({r_far_end: r_id} if r_far_end and r_far_end[0] != vid else {}),
    })
    nodes.append(Crossing(k1, tuple(k1_tuple[s] for s in range(4)), od1))
    nodes.append(Crossing(k2, tuple(k2_tuple[s] for s in range(4)), od2))
    out = build_diagram(nodes, arcs)
    return MoveOutcome(out, parents=parents,
                       inverse=move("Rv2", arc=a1_id, vertex=vid))


def _rv2_contract(d, m, vid, aid, hits):
    raise NotApplicable(m, "contracting vertex slides are not implemented; "
                           "replay the expanding slide's inverse instead")


def _apply_clasp(d, m):
    spec = m.get("strands", "")
    mm = re.match(r"^\(([^,()]+),([^()]+)\)$", spec)
    if not mm:
        raise MovieError(f"clasp: bad strands spec {spec!r}")
    a_id, b_id = mm.group(1).strip(), mm.group(2).strip()
    sign = _sign_token(m.get("sign"))
    ids = {a.id for a in d.arcs}
    if a_id not in ids or b_id not in ids:
        raise UnknownEntity(f"clasp: unknown arcs {a_id},{b_id}")
    ca, cb = d.arc(a_id).color, d.arc(b_id).color
    if ca == cb:
        raise NotApplicable(m, "clasp needs strands of distinct colors")
    hits = []
    for c in d.crossings:
        diag_arcs = ({c.arcs[0], c.arcs[2]}, {c.arcs[1], c.arcs[3]})
        if (a_id in diag_arcs[0] and b_id in diag_arcs[1]) or (
            a_id in diag_arcs[1] and b_id in diag_arcs[0]
        ):
            hits.append(c)
    wanted = m.get("crossing")
    if wanted:
        hits = [c for c in hits if c.id == wanted]
    if not hits:
        raise NotApplicable(m, f"no crossing between {a_id} and {b_id}")
    if len(hits) > 1:
        raise NotApplicable(m, "several crossings match; add crossing=<id>")
    c = hits[0]
    pair = canonical_pair(ca, cb)
    ld = sublink_diagram(d, pair[0], pair[1])
    cur_sign = _bicolor_crossing_sign(ld, c.id)
    if cur_sign != -sign:
        raise NotApplicable(
            m, f"crossing {c.id} has sign {cur_sign:+d}; a {'+' if sign > 0 else '-'}"
               f" clasp flips a {-sign:+d} crossing"
        )
    nodes = [
        Crossing(n.id, n.arcs, 1 - n.over_diag) if n.id == c.id else n for n in d.nodes
    ]
    out = build_diagram(nodes, d.arcs)
    lift = None
    if m.get("framing") is not None:
        lift = (int(m.get("framing")), int(m.get("lk")))
    record = ClaspRecord(c.id, sign, pair, lift)
    inverse_params = dict(sign="+" if -sign > 0 else "-", strands=spec, crossing=c.id)
    if lift:
        inverse_params.update(framing=str(-lift[0]), lk=str(lift[1]))
    return MoveOutcome(out, clasp=record, inverse=move("clasp", **inverse_params))


def _bicolor_crossing_sign(ld, crossing_id):
    d = ld.diagram
    from .diagram import component_passages

    entries = []
    for visits in component_passages(ld):
        for nid, slot in visits:
            if nid == crossing_id:
                entries.append(slot)
    if len(entries) != 2:
        raise MovieError(f"crossing {crossing_id} not traversed twice")
    c = d.node(crossing_id)
    over_in = next(s for s in entries if s % 2 == c.over_diag)
    under_in = next(s for s in entries if s % 2 != c.over_diag)
    return crossing_sign(over_in, under_in)


def _apply_unzip(d, m):
    aid = m.get("edge")
    if aid not in {a.id for a in d.arcs}:
        raise UnknownEntity(f"unzip: unknown arc {aid}")
    a = d.arc(aid)
    if a.closed or a.end0[0] == a.end1[0]:
        raise NotApplicable(m, "unzip needs an edge between two distinct vertices")
    w1, t1 = a.end0
    w2, t2 = a.end1
    for w in (w1, w2):
        if not isinstance(d.node(w), Vertex):
            raise NotApplicable(m, f"{w} is not a trivalent vertex")
    if a.box.denominator != 1:
        raise NotApplicable(m, f"half-integer box {a.box} on {aid}; transfer it first")
    v1, v2 = d.node(w1), d.node(w2)
    p, q = v1.arcs[(t1 + 1) % 3], v1.arcs[(t1 + 2) % 3]
    r, s = v2.arcs[(t2 + 1) % 3], v2.arcs[(t2 + 2) % 3]
    if d.arc(p).color != d.arc(s).color:
        raise NotApplicable(
            m, "colors do not line up across the edge; twist one end first"
        )
    half = a.box / 2
    junctions = [
        ((p, (w1, (t1 + 1) % 3)), (s, (w2, (t2 + 2) % 3))),
        ((q, (w1, (t1 + 2) % 3)), (r, (w2, (t2 + 1) % 3))),
    ]
    out, merged = splice_diagram(
        d, junctions, drop_nodes=[w1, w2], drop_arcs=[aid],
        box_deltas={p: half, q: half},
    )
    parents = {}
    for new_id in set(merged.values()):
        src = tuple(sorted(k for k, v in merged.items() if v == new_id))
        if len(src) > 1:
            parents[new_id] = src + (aid,)
    touching = tuple(sorted(set(merged.values())))
    return MoveOutcome(out, parents=parents, removed=(aid,), touching=touching,
                       inverse=None)


def _apply_birth(d, m):
    color = check_color(m.get("color", ""))
    aid = m.get("id") or _fresh(d, "c")
    if aid in {a.id for a in d.arcs}:
        raise MovieError(f"birth: arc id {aid} already used")
    out = build_diagram(d.nodes, list(d.arcs) + [Arc(aid, color, None, None)])
    return MoveOutcome(out, born=(aid,), inverse=move("death", circle=aid))


def _apply_death(d, m):
    aid = m.get("circle")
    ids = {a.id for a in d.arcs}
    if aid not in ids:
        raise UnknownEntity(f"death: unknown arc {aid}")
    a = d.arc(aid)
    if not a.closed:
        raise NotApplicable(m, f"arc {aid} still has endpoints")
    annotation = m.get("euler")
    out = build_diagram(d.nodes, [x for x in d.arcs if x.id != aid])
    return MoveOutcome(
        out,
        removed=(aid,),
        died=((aid, Fraction(annotation) if annotation is not None else None),),
        inverse=move("birth", color=a.color, id=aid),
    )


def _apply_saddle(d, m):
    spec = m.get("arcs", "")
    mm = re.match(r"^\(([^,()]+),([^()]+)\)$", spec)
    if not mm:
        raise MovieError(f"saddle: bad arcs spec {spec!r}")
    a_id, b_id = mm.group(1).strip(), mm.group(2).strip()
    ids = {a.id for a in d.arcs}
    if a_id not in ids or b_id not in ids:
        raise UnknownEntity(f"saddle: unknown arcs {a_id},{b_id}")
    if a_id == b_id:
        raise NotApplicable(m, "saddle needs two distinct arcs")
    a, b = d.arc(a_id), d.arc(b_id)
    if a.color != b.color:
        raise NotApplicable(m, "saddle joins strands of one color")
    try:
        da, db = _common_face_darts(d, a_id, b_id, m.get("side"))
    except NotApplicable as exc:
        raise NotApplicable(m, str(exc)) from None
    arcs = [x for x in d.arcs if x.id not in (a_id, b_id)]
    parents = {}
    if a.closed and b.closed:
        arcs.append(Arc(min(a_id, b_id), a.color, None, None, a.box + b.box))
        parents[min(a_id, b_id)] = (a_id, b_id)
    elif a.closed or b.closed:
        circle, other = (a, b) if a.closed else (b, a)
        arcs.append(Arc(other.id, a.color, other.end0, other.end1,
                        a.box + b.box))
        parents[other.id] = (a_id, b_id)
    else:
        dira = da[1]
        dirb = db[1]
        a_tail, a_head = (a.end0, a.end1) if dira == 0 else (a.end1, a.end0)
        b_tail, b_head = (b.end0, b.end1) if dirb == 0 else (b.end1, b.end0)
        arcs.append(Arc(a_id, a.color, a_tail, b_head, a.box))
        arcs.append(Arc(b_id, b.color, b_tail, a_head, b.box))
        parents[a_id] = (a_id, b_id)
        parents[b_id] = (a_id, b_id)
    out = build_diagram(d.nodes, arcs)
    return MoveOutcome(out, parents=parents, touching=tuple(sorted(parents)),
                       inverse=move("saddle", arcs=spec))


def _apply_transfer_box(d, m):
    src, dst = m.get("from"), m.get("to")
    ids = {a.id for a in d.arcs}
    if src not in ids or dst not in ids:
        raise UnknownEntity(f"transfer-box: unknown arcs {src},{dst}")
    if d.arc(src).color != d.arc(dst).color:
        raise NotApplicable(m, "boxes travel only along arcs of one color")
    amount = d.arc(src).box
    out = d.with_boxes({src: -amount, dst: amount})
    return MoveOutcome(out, inverse=move("transfer-box", **{"from": dst, "to": src}))


_HANDLERS = {
    ("R1", "insert"): _apply_r1_insert,
    ("R1", "delete"): _apply_r1_delete,
    ("R2", "insert"): _apply_r2_insert,
    ("R2", "delete"): _apply_r2_delete,
    ("Rv1", "twist"): _apply_rv1_twist,
    ("Rv1", "untwist"): _apply_rv1_untwist,
}


def apply_move(d: GraphDiagram, m: Move, validate=True) -> MoveOutcome:
    """Apply one move; raises NotApplicable when the local pattern is absent.

    The result is re-validated (planarity included) unless validate=False.
    """
    if m.kind in ("R1", "R2", "Rv1"):
        op = m.get("op")
        handler = _HANDLERS.get((m.kind, op))
        if handler is None:
            raise MovieError(f"{m.kind}: unknown op {op!r}")
        outcome = handler(d, m)
    elif m.kind == "R3":
        outcome = _apply_r3(d, m)
    elif m.kind == "Rv2":
        outcome = _apply_rv2(d, m)
    elif m.kind == "clasp":
        outcome = _apply_clasp(d, m)
    elif m.kind == "unzip":
        outcome = _apply_unzip(d, m)
    elif m.kind == "birth":
        outcome = _apply_birth(d, m)
    elif m.kind == "death":
        outcome = _apply_death(d, m)
    elif m.kind == "saddle":
        outcome = _apply_saddle(d, m)
    elif m.kind == "transfer-box":
        outcome = _apply_transfer_box(d, m)
    else:
        raise MovieError(f"unknown move kind {m.kind!r}")
    if validate:
        validate_diagram(outcome.diagram)
    return outcome


def inverse_move(d: GraphDiagram, m: Move) -> Move:
    """The move undoing m when applied to apply_move(d, m)."""
    return apply_move(d, m).inverse


# ---------------------------------------------------------------------------
# foam component tracking and movie validation


class _Components:
    def __init__(self, diagram):
        self.parent = {}
        self.meta = {}  # root -> dict(colors=set, touched=bool)
        self.token_of_arc = {}
        for a in diagram.arcs:
            t = ("t", a.id, 0)
            self.parent[t] = t
            self.meta[t] = {"colors": {a.color}, "touched": False}
            self.token_of_arc[a.id] = t
        self._counter = 1
        self._link(diagram)

    def find(self, t):
        while self.parent[t] != t:
            self.parent[t] = self.parent[self.parent[t]]
            t = self.parent[t]
        return t

    def union(self, t1, t2):
        r1, r2 = self.find(t1), self.find(t2)
        if r1 == r2:
            return r1
        self.parent[r2] = r1
        self.meta[r1]["colors"] |= self.meta[r2]["colors"]
        self.meta[r1]["touched"] |= self.meta[r2]["touched"]
        return r1

    def fresh(self, arc_id, color):
        t = ("t", arc_id, self._counter)
        self._counter += 1
        self.parent[t] = t
        self.meta[t] = {"colors": {color}, "touched": False}
        self.token_of_arc[arc_id] = t
        return t

    def advance(self, new_diagram, outcome):
        old_tokens = dict(self.token_of_arc)
        new_tokens = {}
        for a in new_diagram.arcs:
            if a.id in outcome.parents:
                parent_ids = [p for p in outcome.parents[a.id] if p in old_tokens]
                if parent_ids:
                    root = old_tokens[parent_ids[0]]
                    for p in parent_ids[1:]:
                        root = self.union(root, old_tokens[p])
                    new_tokens[a.id] = root
                    continue
            if a.id in outcome.born:
                new_tokens[a.id] = self.fresh(a.id, a.color)
            elif a.id in old_tokens:
                new_tokens[a.id] = old_tokens[a.id]
            else:
                raise MovieError(f"arc {a.id} appeared with no lineage")
        self.token_of_arc = new_tokens
        for aid in outcome.touching:
            if aid in new_tokens:
                self.meta[self.find(new_tokens[aid])]["touched"] = True
        self._link(new_diagram)

    def _link(self, diagram):
        for n in diagram.nodes:
            if isinstance(n, Vertex):
                t0 = self.token_of_arc[n.arcs[0]]
                for aid in n.arcs[1:]:
                    self.union(t0, self.token_of_arc[aid])
            else:
                for diag in (0, 1):
                    self.union(
                        self.token_of_arc[n.arcs[diag]],
                        self.token_of_arc[n.arcs[diag + 2]],
                    )

    def color_of(self, token):
        colors = self.meta[self.find(token)]["colors"]
        if len(colors) != 1:
            raise MovieError(f"closed component spans colors {sorted(colors)}")
        return next(iter(colors))

    def touched(self, token):
        return self.meta[self.find(token)]["touched"]


def validate_movie(mv: Movie) -> FoamData:
    """Replay the movie, validating every frame; returns the foam data.

    Fails with FinalFrameMismatch when a declared final frame is not
    isomorphic to the computed one, and with UnannotatedClosedComponent when
    a closed component was reshaped by saddles or unzips but carries no
    declared contribution.
    """
    d = validate_diagram(mv.initial)
    comps = _Components(d)
    clasps = []
    deaths = []  # (token, annotation, color)
    for m in mv.moves:
        outcome = apply_move(d, m)
        if outcome.clasp:
            clasps.append(outcome.clasp)
        for aid, annotation in outcome.died:
            token = comps.token_of_arc[aid]
            deaths.append((token, annotation, d.arc(aid).color))
        d = outcome.diagram
        comps.advance(d, outcome)

    if mv.declared_final is not None and not diagrams_isomorphic(d, mv.declared_final):
        raise FinalFrameMismatch("declared final frame differs from the computed one")

    live_roots = {comps.find(t) for t in comps.token_of_arc.values()}
    closed = []
    for token, annotation, color in deaths:
        root = comps.find(token)
        if root in live_roots:
            continue  # the component resurfaced elsewhere
        touched = comps.touched(token)
        if annotation is None and touched:
            raise UnannotatedClosedComponent(
                f"closed {color}-component was reshaped; declare euler=<p/q> on its death"
            )
        closed.append(
            ClosedComponent(color, annotation if annotation is not None else Fraction(0),
                            annotation is not None, touched)
        )
    return FoamData(d, tuple(closed), tuple(clasps))


def final_frame(mv: Movie) -> GraphDiagram:
    d = mv.initial
    for m in mv.moves:
        d = apply_move(d, m).diagram
    return d


def accumulate_foam_data(mv: Movie):
    """Weak framing sums, per-color sphere contributions, and clasp records.

    The weak numbers read the boundary frame and add the declared closed
    contributions of matching colors; each clasp contributes a sphere worth
    twice its sign to the third color's cover.
    """
    foam = validate_movie(mv)
    weak = weak_euler_numbers(foam.boundary)
    for comp in foam.closed_components:
        for pair in weak:
            if comp.color in pair:
                weak[pair] += comp.contribution
    spheres = {c: [] for c in COLORS}
    for rec in foam.clasp_records:
        spheres[rec.sphere_color].append(Fraction(2 * rec.sign))
    return weak, spheres, foam


def compose_movies(m1: Movie, m2: Movie) -> Movie:
    """Concatenate; the final frame of m1 must equal m2's initial frame.

    Equality is on the nose: isomorphic-but-relabeled frames are rejected,
    since the second movie's parameters would not resolve.
    """
    end = final_frame(m1)
    if format_frame(end) != format_frame(m2.initial):
        hint = "isomorphic" if diagrams_isomorphic(end, m2.initial) else "different"
        raise FrameMismatch(f"frames do not match ({hint})")
    return Movie(m1.initial, m1.moves + m2.moves, m2.declared_final)


def format_frame(d: GraphDiagram) -> str:
    from .diagram import format_diagram

    return format_diagram(d)


def reverse_movie(mv: Movie) -> Movie:
    """The movie played backward from the final frame."""
    d = mv.initial
    inverses = []
    for m in mv.moves:
        outcome = apply_move(d, m)
        if outcome.inverse is None:
            raise MovieError(f"move {m} has no inverse")
        inverses.append(outcome.inverse)
        d = outcome.diagram
    return Movie(d, tuple(reversed(inverses)), mv.initial)


def mirror_move(m: Move) -> Move:
    params = dict(m.params)
    if m.kind in ("R1", "Rv1") and "sign" in params:
        params["sign"] = "+" if _sign_token(params["sign"]) < 0 else "-"
    elif m.kind == "R2" and params.get("op") == "insert":
        params["over"], params["under"] = params["under"], params["over"]
    elif m.kind == "clasp":
        params["sign"] = "+" if _sign_token(params["sign"]) < 0 else "-"
        if "framing" in params:
            params["framing"] = str(-int(params["framing"]))
    elif m.kind == "death" and "euler" in params:
        params["euler"] = str(-Fraction(params["euler"]))
    return Move(m.kind, tuple(sorted(params.items())))


def mirror_movie(mv: Movie) -> Movie:
    from .diagram import mirror_diagram

    return Movie(
        mirror_diagram(mv.initial),
        tuple(mirror_move(m) for m in mv.moves),
        mirror_diagram(mv.declared_final) if mv.declared_final else None,
    )


# ---------------------------------------------------------------------------
# parsing

_MOVE_RE = re.compile(r"^move\s+(\S+)\s*(.*)$")


def parse_movie(text: str, base: Path | str = ".") -> Movie:
    """Parse a movie file.

    Lines: `initial <diagram file>`, one `move <kind> <params>` per line,
    optional `final <diagram file>`; `#` comments.  Paths resolve relative
    to `base`.  Clasp lift data follows a `lift:` marker, e.g.
    `move clasp sign=+ strands=(x,y) lift: framing=1 lk=3`.
    """
    base = Path(base)
    initial = None
    declared_final = None
    moves = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("initial "):
            initial = parse_diagram((base / line[8:].strip()).read_text())
        elif line.startswith("final "):
            declared_final = parse_diagram((base / line[6:].strip()).read_text())
        elif line.startswith("move "):
            mm = _MOVE_RE.match(line)
            kind = mm.group(1)
            rest = mm.group(2)
            if kind not in MOVE_KINDS:
                raise MovieParseError(lineno, f"unknown move kind {kind!r}")
            lift_part = None
            if "lift:" in rest:
                rest, lift_part = rest.split("lift:", 1)
            params = {}
            tokens = rest.split()
            if kind in ("R1", "R2", "Rv1") and tokens and "=" not in tokens[0]:
                op = tokens.pop(0)
                allowed = {"R1": ("insert", "delete"), "R2": ("insert", "delete"),
                           "Rv1": ("twist", "untwist")}[kind]
                if op not in allowed:
                    raise MovieParseError(lineno, f"{kind}: unknown op {op!r}")
                params["op"] = op
            for tok in tokens:
                if "=" not in tok:
                    raise MovieParseError(lineno, f"expected key=value, got {tok!r}")
                k, v = tok.split("=", 1)
                params[k] = v
            if lift_part is not None:
                for tok in lift_part.split():
                    if "=" not in tok:
                        raise MovieParseError(lineno, f"bad lift field {tok!r}")
                    k, v = tok.split("=", 1)
                    if k not in ("framing", "lk"):
                        raise MovieParseError(lineno, f"unknown lift field {k!r}")
                    params[k] = v
                if "framing" not in params or "lk" not in params:
                    raise MovieParseError(lineno, "lift needs framing=<int> lk=<int>")
            moves.append(Move(kind, tuple(sorted(params.items()))))
        else:
            raise MovieParseError(lineno, f"cannot parse {line!r}")
    if initial is None:
        raise MovieParseError(0, "movie has no initial frame")
    return Movie(initial, tuple(moves), declared_final)


def identity_movie(d: GraphDiagram) -> Movie:
    return Movie(d, (), d)
