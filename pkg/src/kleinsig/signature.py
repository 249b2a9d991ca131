"""Unoriented link signature from the checkerboard form of a diagram.

The diagram's faces are 2-colored, a symmetric form is built on the white
regions, and the signature of that form minus a crossing-type correction
gives the signature of the link.  The sign and type conventions below are
fixed once by calibration: a crossing-free circle and any reducible kink
give 0, and the positive (writhe +3) trefoil closure gives -2.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactlinalg import SymMatrix, congruence_signature, determinant
from .diagram import (
    Crossing,
    DiagramError,
    GraphDiagram,
    LinkDiagram,
    as_link_diagram,
    component_passages,
    connected_pieces,
    face_orbits,
)

class NotBipartite(DiagramError):
    pass


@dataclass(frozen=True)
class GoeritzForm:
    """Symmetric integer form on bounded white regions, plus the correction."""

    matrix: SymMatrix
    mu: int
    white_regions: tuple  # face ids, unbounded region first


def checkerboard_regions(ld: LinkDiagram):
    """2-color the faces of each connected piece, unbounded face white.

    Returns (faces, face_of_corner, color_of_face, unbounded) where colors
    are 0 for white and 1 for black and `unbounded` maps each piece's face
    set to its chosen outer face.  Crossing-free circles have no faces here
    and are skipped.
    """
    d = ld.diagram
    faces = face_orbits(d)
    face_of_corner = {}
    for idx, face in enumerate(faces):
        for corner in face:
            face_of_corner[corner] = idx

    adjacency = {idx: set() for idx in range(len(faces))}
    for a in d.arcs:
        if a.closed:
            continue
        sides = []
        for direction in (0, 1):
            nid, slot = (a.end1 if direction == 0 else a.end0)
            sides.append(face_of_corner[(nid, slot)])
        adjacency[sides[0]].add(sides[1])
        adjacency[sides[1]].add(sides[0])

    color_of_face = {}
    unbounded = {}
    for nodes, arcs in connected_pieces(d):
        if not nodes:
            continue
        piece_faces = sorted(
            {face_of_corner[(nid, s)] for nid in nodes for s in range(d.node(nid).degree)}
        )
        # deterministic outer face: the one met first from the smallest arc
        first_arc = d.arc(sorted(arcs)[0])
        outer = face_of_corner[first_arc.end1]
        unbounded[frozenset(piece_faces)] = outer
        color_of_face[outer] = 0
        queue = [outer]
        while queue:
            f = queue.pop()
            for g in adjacency[f]:
                if g not in color_of_face:
                    color_of_face[g] = 1 - color_of_face[f]
                    queue.append(g)
                elif color_of_face[g] == color_of_face[f]:
                    raise NotBipartite(f"faces {f} and {g} clash")
    return faces, face_of_corner, color_of_face, unbounded


def _crossing_eta(c: Crossing, white_parity: int) -> int:
    # calibrated so reducible kinks contribute zero and the positive
    # trefoil closure comes out at -2
    return -1 if c.over_diag == white_parity else 1


def _crossing_type_is_ii(entry_slots, white_parity: int) -> bool:
    # a crossing is of the corrected type when its two outgoing strand
    # directions point at different white corners (same calibration)
    e1, e2 = [(s + 2) % 4 for s in entry_slots]
    if (e1 + 1) % 4 == e2:
        y = e1
    elif (e2 + 1) % 4 == e1:
        y = e2
    else:
        raise ValueError("exit slots must be adjacent")
    return (y - white_parity) % 2 == 1


def _piece_goeritz(ld: LinkDiagram, piece_nodes, faces, face_of_corner, color_of_face, outer):
    d = ld.diagram
    white = sorted(
        {
            face_of_corner[(nid, s)]
            for nid in piece_nodes
            for s in range(4)
            if color_of_face[face_of_corner[(nid, s)]] == 0
        }
    )
    white = [outer] + [f for f in white if f != outer]
    index = {f: i for i, f in enumerate(white)}
    m = len(white)
    full = [[Fraction(0)] * m for _ in range(m)]

    entry_slots = {}
    for visits in component_passages(ld):
        for nid, slot in visits:
            entry_slots.setdefault(nid, []).append(slot)

    mu = 0
    for nid in sorted(piece_nodes):
        c = d.node(nid)
        corner_faces = [face_of_corner[(nid, s)] for s in range(4)]
        whites = [s for s in range(4) if color_of_face[corner_faces[s]] == 0]
        white_parity = whites[0] % 2
        eta = _crossing_eta(c, white_parity)
        fi, fj = corner_faces[whites[0]], corner_faces[whites[1]]
        if fi != fj:
            i, j = index[fi], index[fj]
            full[i][j] -= eta
            full[j][i] -= eta
        if _crossing_type_is_ii(entry_slots[nid], white_parity):
            mu += eta
    for i in range(m):
        full[i][i] = -sum(full[i][j] for j in range(m) if j != i)
    reduced = [row[1:] for row in full[1:]]
    return GoeritzForm(SymMatrix(tuple(tuple(r) for r in reduced)), mu, tuple(white))


def goeritz_forms(ld: LinkDiagram):
    """One GoeritzForm per connected piece with nodes; circles contribute none."""
    faces, face_of_corner, color_of_face, unbounded = checkerboard_regions(ld)
    d = ld.diagram
    forms = []
    for nodes, arcs in connected_pieces(d):
        if not nodes:
            continue
        piece_faces = frozenset(
            {face_of_corner[(nid, s)] for nid in nodes for s in range(d.node(nid).degree)}
        )
        forms.append(
            _piece_goeritz(ld, nodes, faces, face_of_corner, color_of_face,
                           unbounded[piece_faces])
        )
    return forms


def goeritz_form(ld: LinkDiagram) -> GoeritzForm:
    """The checkerboard form of a connected diagram (empty for circles only)."""
    forms = goeritz_forms(ld)
    if len(forms) > 1:
        raise DiagramError("diagram is split; use goeritz_forms or link_signature")
    if not forms:
        return GoeritzForm(SymMatrix(()), 0, ())
    return forms[0]


def link_signature(ld: LinkDiagram) -> int:
    """Signature of the unoriented link; additive over split pieces."""
    total = 0
    for form in goeritz_forms(ld):
        sig, _ = congruence_signature(form.matrix)
        total += sig - form.mu
    return total


def link_determinant(ld: LinkDiagram) -> int:
    """|det| of the checkerboard form, multiplied over split pieces."""
    total = 1
    for form in goeritz_forms(ld):
        total *= abs(determinant(form.matrix.to_lists()))
    return int(total)


def diagram_signature(d: GraphDiagram) -> int:
    return link_signature(as_link_diagram(d))
