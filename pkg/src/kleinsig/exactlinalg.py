"""Exact rational linear algebra: symmetric-form signatures and linear solving.

Everything here works over `fractions.Fraction` (arbitrary-precision
rationals); no floating point enters any computation path.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class SingularMatrix(ValueError):
    """Raised when an operation needs an invertible matrix and det = 0."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


@dataclass(frozen=True)
class SymMatrix:
    """Dense symmetric matrix of rationals.

    Entries are stored as a tuple of row tuples; symmetry is checked at
    construction time.
    """

    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(_frac(x) for x in row) for row in self.rows)
        n = len(rows)
        for row in rows:
            if len(row) != n:
                raise ValueError("matrix must be square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError(f"not symmetric at ({i},{j})")
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return len(self.rows)

    def entry(self, i: int, j: int) -> Fraction:
        return self.rows[i][j]

    def to_lists(self):
        return [list(row) for row in self.rows]

    def __neg__(self) -> "SymMatrix":
        return SymMatrix(tuple(tuple(-x for x in row) for row in self.rows))

    @staticmethod
    def diagonal(entries) -> "SymMatrix":
        es = [_frac(x) for x in entries]
        n = len(es)
        return SymMatrix(
            tuple(tuple(es[i] if i == j else Fraction(0) for j in range(n)) for i in range(n))
        )

    @staticmethod
    def direct_sum(a: "SymMatrix", b: "SymMatrix") -> "SymMatrix":
        n, m = a.n, b.n
        rows = []
        for i in range(n):
            rows.append(tuple(a.rows[i]) + (Fraction(0),) * m)
        for i in range(m):
            rows.append((Fraction(0),) * n + tuple(b.rows[i]))
        return SymMatrix(tuple(rows))


def determinant(rows) -> Fraction:
    """Exact determinant by fraction elimination."""
    a = [[_frac(x) for x in row] for row in rows]
    n = len(a)
    for row in a:
        if len(row) != n:
            raise ValueError("matrix must be square")
    det = Fraction(1)
    for k in range(n):
        piv = next((r for r in range(k, n) if a[r][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        for r in range(k + 1, n):
            f = a[r][k] / a[k][k]
            if f:
                for c in range(k, n):
                    a[r][c] -= f * a[k][c]
    return det


def congruence_signature(m: SymMatrix):
    """Signature and nullity of a symmetric rational form.

    Diagonalizes by exact congruence operations and counts diagonal signs.
    A zero diagonal pivot whose row still has a nonzero entry is handled by
    splitting off a 2x2 hyperbolic block, which contributes (+1, -1); this
    keeps the procedure total on symmetric input.

    Returns (signature, nullity).
    """
    a = m.to_lists()
    n = m.n
    pos = neg = 0

    def swap(i, j):
        a[i], a[j] = a[j], a[i]
        for row in a:
            row[i], row[j] = row[j], row[i]

    def add_multiple(dst, src, f):
        # row_dst += f*row_src, then the matching column operation
        for c in range(n):
            a[dst][c] += f * a[src][c]
        for r in range(n):
            a[r][dst] += f * a[r][src]

    k = 0
    while k < n:
        if a[k][k] == 0:
            j = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
            if j is not None:
                swap(k, j)
            else:
                j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if j is None:
                    # row k is zero on the trailing block; it stays in the kernel
                    k += 1
                    continue
                if j != k + 1:
                    swap(j, k + 1)
                q = a[k][k + 1]
                for r in range(k + 2, n):
                    u, v = a[r][k], a[r][k + 1]
                    if v:
                        add_multiple(r, k, -v / q)
                    if u:
                        add_multiple(r, k + 1, -u / q)
                pos += 1
                neg += 1
                k += 2
                continue
        d = a[k][k]
        for r in range(k + 1, n):
            if a[r][k]:
                add_multiple(r, k, -a[r][k] / d)
        if d > 0:
            pos += 1
        else:
            neg += 1
        k += 1

    return pos - neg, n - pos - neg


@dataclass(frozen=True)
class LinearSolution:
    """Outcome of an exact linear solve.

    status is one of "unique", "parametric", "inconsistent".  For solvable
    systems `solution` holds a particular solution (free variables set to 0)
    and `free_columns` the indices of the free variables.  For inconsistent
    systems `witness_tags` names the input rows whose combination reduced to
    0 = nonzero.
    """

    status: str
    solution: tuple = ()
    free_columns: tuple = ()
    witness_tags: tuple = ()


def solve_linear(a, b, tags=None) -> LinearSolution:
    """Solve a x = b exactly over the rationals.

    `tags` optionally labels each row; labels are tracked through the
    elimination so an inconsistency can be blamed on the rows involved.
    """
    rows = [[_frac(x) for x in row] for row in a]
    rhs = [_frac(x) for x in b]
    if len(rows) != len(rhs):
        raise ValueError("row/rhs length mismatch")
    ncols = len(rows[0]) if rows else 0
    for row in rows:
        if len(row) != ncols:
            raise ValueError("ragged matrix")
    if tags is None:
        tags = list(range(len(rows)))
    tagsets = [frozenset([t]) for t in tags]

    piv_of_col = {}
    piv_row = 0
    for col in range(ncols):
        r = next((r for r in range(piv_row, len(rows)) if rows[r][col] != 0), None)
        if r is None:
            continue
        rows[piv_row], rows[r] = rows[r], rows[piv_row]
        rhs[piv_row], rhs[r] = rhs[r], rhs[piv_row]
        tagsets[piv_row], tagsets[r] = tagsets[r], tagsets[piv_row]
        d = rows[piv_row][col]
        rows[piv_row] = [x / d for x in rows[piv_row]]
        rhs[piv_row] /= d
        for rr in range(len(rows)):
            if rr != piv_row and rows[rr][col] != 0:
                f = rows[rr][col]
                rows[rr] = [x - f * y for x, y in zip(rows[rr], rows[piv_row])]
                rhs[rr] -= f * rhs[piv_row]
                tagsets[rr] = tagsets[rr] | tagsets[piv_row]
        piv_of_col[col] = piv_row
        piv_row += 1
        if piv_row == len(rows):
            break

    for r in range(piv_row, len(rows)):
        if rhs[r] != 0:
            return LinearSolution("inconsistent", witness_tags=tuple(sorted(tagsets[r], key=str)))

    free = tuple(c for c in range(ncols) if c not in piv_of_col)
    sol = [Fraction(0)] * ncols
    for col, r in piv_of_col.items():
        sol[col] = rhs[r]
    status = "unique" if not free else "parametric"
    return LinearSolution(status, solution=tuple(sol), free_columns=free)


def quadratic_pairing(v, w, g: SymMatrix) -> Fraction:
    """Evaluate v . G^{-1} . w^t for an invertible symmetric G."""
    v = [_frac(x) for x in v]
    w = [_frac(x) for x in w]
    if len(v) != g.n or len(w) != g.n:
        raise ValueError("vector dimension must match the matrix")
    if g.n == 0:
        return Fraction(0)
    res = solve_linear(g.to_lists(), w)
    if res.status != "unique":
        raise SingularMatrix("pairing matrix is singular")
    return sum((vi * xi for vi, xi in zip(v, res.solution)), Fraction(0))
