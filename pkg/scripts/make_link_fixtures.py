"""Generate the link diagram fixtures used by the tests and the demos.

Builds closed-braid diagrams in the planar text format, checks them against
the expected writhe, and writes them under fixtures/.  Rerunning the script
reproduces the files byte for byte.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from kleinsig.diagram import (
    Arc,
    Crossing,
    as_link_diagram,
    build_diagram,
    component_selflinking,
    format_diagram,
    mirror_diagram,
    validate_diagram,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def braid_closure(word, n_strands, color="a"):
    """Closed-braid diagram for a word of nonzero generator indices.

    Positive letter i crosses strands i, i+1 with the strand arriving from
    position i+1 on top; slots run (NE, NW, SW, SE) counterclockwise and the
    braid is read downward.
    """
    markers = {p: ("top", p) for p in range(1, n_strands + 1)}
    ends = {}  # arc id -> [end, end]
    counter = 0

    def new_arc():
        nonlocal counter
        counter += 1
        return f"s{counter}"

    pending = {p: new_arc() for p in markers}
    for p, aid in pending.items():
        ends[aid] = [markers[p], None]
    crossings = []
    for t, letter in enumerate(word, start=1):
        i = abs(letter)
        if not 1 <= i < n_strands:
            raise ValueError(f"letter {letter} out of range")
        cid = f"x{t}"
        left, right = pending[i], pending[i + 1]
        _close(ends, left, (cid, 1))  # NW
        _close(ends, right, (cid, 0))  # NE
        out_left, out_right = new_arc(), new_arc()
        ends[out_left] = [(cid, 2), None]  # SW
        ends[out_right] = [(cid, 3), None]  # SE
        pending[i], pending[i + 1] = out_left, out_right
        over_diag = 0 if letter > 0 else 1
        crossings.append((cid, over_diag))
    for p in sorted(pending):
        _close_loop(ends, pending[p], ("top", p))

    slot_arcs = {}
    for aid, (e0, e1) in ends.items():
        for e in (e0, e1):
            slot_arcs[e] = aid
    nodes = [
        Crossing(cid, tuple(slot_arcs[(cid, s)] for s in range(4)), od)
        for cid, od in crossings
    ]
    arcs = [Arc(aid, color, e0, e1) for aid, (e0, e1) in ends.items()]
    return build_diagram(nodes, arcs)


def _close(ends, aid, end):
    assert ends[aid][1] is None
    ends[aid][1] = end


def _close_loop(ends, aid, marker):
    # splice the strand hanging at the braid bottom onto its top marker
    for other, (e0, e1) in list(ends.items()):
        if e0 == marker:
            if other == aid:
                # single arc wrapping around: a crossing-free circle
                if ends[aid][1] is None:
                    ends[aid] = [None, None]
                return
            bottom = ends.pop(other)[1]
            ends[aid][1] = bottom
            return
    raise AssertionError(f"no marker {marker}")


def writhe(d):
    ld = as_link_diagram(d)
    return sum(component_selflinking(ld).values())


def main():
    specs = {
        # 0-crossing unknot
        "unknot.kd": build_diagram([], [Arc("u1", "a", None, None)]),
        "trefoil.kd": braid_closure([1, 1, 1], 2),
        "figure8.kd": braid_closure([1, -2, 1, -2], 3),
        "granny.kd": braid_closure([1, 1, 1, 2, 2, 2], 3),
        "mirror_10_124.kd": mirror_diagram(braid_closure([1, 2] * 5, 3)),
    }
    expected_writhe = {
        "unknot.kd": 0,
        "trefoil.kd": 3,
        "figure8.kd": 0,
        "granny.kd": 6,
        "mirror_10_124.kd": -10,
    }
    for name, d in specs.items():
        validate_diagram(d)
        w = writhe(d)
        assert w == expected_writhe[name], f"{name}: writhe {w}"
        (FIXTURES / name).write_text(format_diagram(d))
        print(f"{name}: {len(d.crossings)} crossings, writhe {w}")


if __name__ == "__main__":
    main()
