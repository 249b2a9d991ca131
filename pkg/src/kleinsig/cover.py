"""Linking calculus in surgery presentations of rational homology spheres.

A clasp move on a diagram lifts to a half-integer surgery curve in the
relevant double cover; linking numbers after surgery differ from the
ambient ones by a quadratic correction in the framed linking matrix.  The
strong framing data of a lifted branch surface then combines closed-piece
contributions with the corrected boundary self-linking.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction

from .exactlinalg import SingularMatrix, SymMatrix, determinant, quadratic_pairing
from .kleingraph import COLORS, check_color


class EvenOrderWarning(UserWarning):
    """The presented homology sphere has even first-homology order."""


class UncalibratedWarning(UserWarning):
    """Multi-curve surgery data is accepted but has no worked calibration."""


class LiftParseError(ValueError):
    def __init__(self, line, msg):
        self.line = line
        super().__init__(f"line {line}: {msg}")


@dataclass(frozen=True)
class SurgeryPresentation:
    """Framed link data: rational coefficients plus integer pairwise linkings."""

    coefficients: tuple  # Fraction per component
    linkings: tuple  # symmetric integer matrix rows, zero diagonal

    def __post_init__(self):
        n = len(self.coefficients)
        if len(self.linkings) != n or any(len(r) != n for r in self.linkings):
            raise ValueError("linking matrix shape mismatch")
        for i in range(n):
            if self.linkings[i][i] != 0:
                raise ValueError("pairwise linkings carry no diagonal")
            for j in range(i):
                if self.linkings[i][j] != self.linkings[j][i]:
                    raise ValueError("linkings must be symmetric")

    @property
    def size(self):
        return len(self.coefficients)

    def framed_matrix(self) -> SymMatrix:
        rows = []
        for i in range(self.size):
            row = list(self.linkings[i])
            row[i] = self.coefficients[i]
            rows.append(tuple(Fraction(x) for x in row))
        m = SymMatrix(tuple(rows))
        if determinant(m.to_lists()) == 0:
            raise SingularMatrix("framed linking matrix is singular")
        return m


def py_linking(v1, v2, lk0, g: SymMatrix) -> Fraction:
    """Linking number after surgery: ambient linking minus the pairing.

    `v1`, `v2` hold the ambient linkings of the two knots with the surgery
    curves, `lk0` their ambient mutual linking, and `g` the framed linking
    matrix of the surgery link.
    """
    return Fraction(lk0) - quadratic_pairing(v1, v2, g)


def clasp_surgery_coefficient(sign: int, framing: int) -> Fraction:
    """Surgery coefficient of a lifted clasp curve, in the standard basis.

    In the basis given by the curve's framing the coefficient is -sign/2;
    rebasing to the standard longitude adds the framing twice.
    """
    if sign not in (1, -1):
        raise ValueError("clasp sign must be +1 or -1")
    return Fraction(-sign + 2 * framing, 2)


def h1_order(sp: SurgeryPresentation) -> int:
    """Order of the first homology group presented by the surgery.

    Each row is scaled by its coefficient's denominator to reach an integer
    matrix; the absolute determinant is the order.  An even order draws an
    EvenOrderWarning since downstream signature bookkeeping needs odd order.
    """
    g = sp.framed_matrix()
    rows = []
    for i, row in enumerate(g.rows):
        d = sp.coefficients[i].denominator
        rows.append([x * d for x in row])
    order = abs(determinant(rows))
    if order == 0:
        raise SingularMatrix("not a rational homology sphere")
    if order % 2 == 0:
        warnings.warn(f"first homology has even order {order}", EvenOrderWarning)
    return int(order)


def strong_euler_number(closed_contribs, boundary_lk) -> Fraction:
    """Closed-piece contributions minus the boundary self-linking."""
    return sum((Fraction(x) for x in closed_contribs), Fraction(0)) - Fraction(boundary_lk)


# ---------------------------------------------------------------------------
# declared lift data for the covers of a movie


@dataclass(frozen=True)
class ClaspLift:
    sign: int  # +1 or -1
    framing: int
    lk_with_branch: int


@dataclass(frozen=True)
class ColorLift:
    """Declared lift data for the cover the given color's surface lives in."""

    color: str
    clasps: tuple = ()
    mutual_linkings: tuple = ()  # (i, j, lk) triples, 0-based clasp indices
    lk0: Fraction = Fraction(0)
    closed_euler: tuple = ()  # extra closed contributions beyond clasp pieces

    def surgery(self) -> SurgeryPresentation:
        n = len(self.clasps)
        coeffs = tuple(clasp_surgery_coefficient(c.sign, c.framing) for c in self.clasps)
        lk = [[0] * n for _ in range(n)]
        for i, j, val in self.mutual_linkings:
            if not (0 <= i < n and 0 <= j < n and i != j):
                raise ValueError(f"bad mutual linking indices ({i},{j})")
            lk[i][j] = lk[j][i] = val
        return SurgeryPresentation(coeffs, tuple(tuple(r) for r in lk))

    def boundary_selflinking(self) -> Fraction:
        """Self-linking of the lifted boundary knot after the clasp surgeries."""
        if not self.clasps:
            return Fraction(self.lk0)
        if len(self.clasps) > 1:
            warnings.warn(
                f"{len(self.clasps)} surgery curves for color {self.color}: "
                "multi-clasp lifts have no worked calibration",
                UncalibratedWarning,
            )
        v = [c.lk_with_branch for c in self.clasps]
        return py_linking(v, v, self.lk0, self.surgery().framed_matrix())

    def strong_euler(self, clasp_sphere_contribs=()) -> Fraction:
        contribs = list(clasp_sphere_contribs) + list(self.closed_euler)
        return strong_euler_number(contribs, self.boundary_selflinking())


def parse_lift(text: str):
    """Parse a lift file into ColorLift records keyed by color.

    Lines, grouped under `color <a|b|c>` headers:
      clasp sign=<+|-> framing=<int> lk_with_branch=<int>
      lk <i> <j> <int>            mutual linking of that color's clasp curves
      lk0 <p/q>                   ambient self-linking before surgery
      closed_euler <p/q>          extra closed contribution
    Clasp lines pair up, in order, with the movie's clasp moves of the
    matching color.
    """
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "color":
            if len(parts) != 2:
                raise LiftParseError(lineno, "color header takes one color")
            current = check_color(parts[1])
            if current in sections:
                raise LiftParseError(lineno, f"color {current} declared twice")
            sections[current] = {"clasps": [], "lk": [], "lk0": Fraction(0), "closed": []}
        elif current is None:
            raise LiftParseError(lineno, "lift data before any color header")
        elif parts[0] == "clasp":
            kv = _keyvals(lineno, parts[1:])
            try:
                sign = {"+": 1, "-": -1}[kv.pop("sign")]
                clasp = ClaspLift(sign, int(kv.pop("framing")), int(kv.pop("lk_with_branch")))
            except (KeyError, ValueError) as exc:
                raise LiftParseError(lineno, f"bad clasp declaration ({exc})")
            if kv:
                raise LiftParseError(lineno, f"unknown clasp fields {sorted(kv)}")
            sections[current]["clasps"].append(clasp)
        elif parts[0] == "lk" and len(parts) == 4:
            sections[current]["lk"].append((int(parts[1]), int(parts[2]), int(parts[3])))
        elif parts[0] == "lk0" and len(parts) == 2:
            sections[current]["lk0"] = Fraction(parts[1])
        elif parts[0] == "closed_euler" and len(parts) == 2:
            sections[current]["closed"].append(Fraction(parts[1]))
        else:
            raise LiftParseError(lineno, f"cannot parse {line!r}")
    return {
        color: ColorLift(
            color,
            tuple(data["clasps"]),
            tuple(data["lk"]),
            data["lk0"],
            tuple(data["closed"]),
        )
        for color, data in sections.items()
    }


def parse_surgery(text: str) -> SurgeryPresentation:
    """Parse `J <id> coeff=<p/q>` and `lk <id1> <id2> <int>` lines."""
    ids = []
    coeffs = {}
    linkings = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "J" and len(parts) == 3 and parts[2].startswith("coeff="):
            cid = parts[1]
            if cid in coeffs:
                raise LiftParseError(lineno, f"component {cid} declared twice")
            ids.append(cid)
            coeffs[cid] = Fraction(parts[2][6:])
        elif parts[0] == "lk" and len(parts) == 4:
            linkings.append((parts[1], parts[2], int(parts[3])))
        else:
            raise LiftParseError(lineno, f"cannot parse {line!r}")
    index = {cid: i for i, cid in enumerate(ids)}
    n = len(ids)
    lk = [[0] * n for _ in range(n)]
    for a, b, val in linkings:
        if a not in index or b not in index or a == b:
            raise LiftParseError(0, f"bad linking pair {a},{b}")
        lk[index[a]][index[b]] = lk[index[b]][index[a]] = val
    return SurgeryPresentation(tuple(coeffs[c] for c in ids), tuple(tuple(r) for r in lk))


def _keyvals(lineno, parts):
    kv = {}
    for p in parts:
        if "=" not in p:
            raise LiftParseError(lineno, f"expected key=value, got {p!r}")
        k, v = p.split("=", 1)
        kv[k] = v
    return kv
