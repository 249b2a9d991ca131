import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kleinsig.exactlinalg import (
    LinearSolution,
    SingularMatrix,
    SymMatrix,
    congruence_signature,
    determinant,
    quadratic_pairing,
    solve_linear,
)

from oracles import eigenvalue_sign_pattern


def sym(rows):
    return SymMatrix(tuple(tuple(x) for x in rows))


def random_symmetric(rng, n, lo=-9, hi=9):
    a = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1):
            a[i][j] = a[j][i] = rng.randint(lo, hi)
    return sym(a)


def random_unimodular(rng, n, steps=12):
    """Product of elementary integer operations; determinant +-1."""
    p = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.randrange(n), rng.randrange(n)
        if i == j:
            continue
        f = rng.randint(-3, 3)
        for c in range(n):
            p[i][c] += f * p[j][c]
    if rng.random() < 0.5 and n > 1:
        p[0], p[1] = p[1], p[0]
    return p


def congruent(m: SymMatrix, p) -> SymMatrix:
    n = m.n
    pm = [[sum(p[i][k] * m.entry(k, j) for k in range(n)) for j in range(n)] for i in range(n)]
    pmpt = [[sum(pm[i][k] * p[j][k] for k in range(n)) for j in range(n)] for i in range(n)]
    return sym(pmpt)


class TestCongruenceSignature:
    def test_positive_1x1(self):
        assert congruence_signature(sym([[2]])) == (1, 0)

    def test_hyperbolic_plane(self):
        assert congruence_signature(sym([[0, 1], [1, 0]])) == (0, 0)

    def test_mixed_diagonal(self):
        assert congruence_signature(SymMatrix.diagonal([1, -1, 0])) == (0, 1)

    def test_empty(self):
        assert congruence_signature(sym([])) == (0, 0)

    def test_matches_eigenvalue_oracle_on_random_integer_matrices(self):
        rng = random.Random(20260810)
        for _ in range(60):
            m = random_symmetric(rng, rng.randint(1, 6))
            sig, nullity = congruence_signature(m)
            pos, neg, zero = eigenvalue_sign_pattern(m.to_lists())
            assert (sig, nullity) == (pos - neg, zero)

    def test_invariant_under_unimodular_congruence(self):
        rng = random.Random(77)
        for _ in range(40):
            n = rng.randint(1, 6)
            m = random_symmetric(rng, n)
            p = random_unimodular(rng, n)
            assert congruence_signature(congruent(m, p)) == congruence_signature(m)

    def test_direct_sum_additivity_and_negation(self):
        rng = random.Random(3)
        for _ in range(20):
            a = random_symmetric(rng, rng.randint(1, 4))
            b = random_symmetric(rng, rng.randint(1, 4))
            sa, na = congruence_signature(a)
            sb, nb = congruence_signature(b)
            assert congruence_signature(SymMatrix.direct_sum(a, b)) == (sa + sb, na + nb)
            assert congruence_signature(-a) == (-sa, na)


class TestSolveLinear:
    def test_unique(self):
        res = solve_linear([[1, 1], [1, -1]], [2, 0])
        assert res.status == "unique"
        assert res.solution == (1, 1)

    def test_parametric_free_variable(self):
        res = solve_linear([[1, 1]], [1])
        assert res.status == "parametric"
        assert res.free_columns == (1,)
        assert res.solution[0] + res.solution[1] == 1

    def test_inconsistent_with_witness(self):
        res = solve_linear([[1], [1]], [1, 2], tags=["first", "second"])
        assert res.status == "inconsistent"
        assert set(res.witness_tags) == {"first", "second"}

    @given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=2, max_size=5),
           st.lists(st.integers(-5, 5), min_size=3, max_size=3))
    @settings(max_examples=60, deadline=None)
    def test_image_recovered_for_consistent_rhs(self, rows, x):
        b = [sum(r * xi for r, xi in zip(row, x)) for row in rows]
        res = solve_linear(rows, b)
        assert res.status in ("unique", "parametric")
        for row, bi in zip(rows, b):
            assert sum(r * s for r, s in zip(row, res.solution)) == bi


class TestQuadraticPairing:
    def test_paper_clasp_value(self):
        assert quadratic_pairing([3], [3], sym([[Fraction(1, 2)]])) == 18

    def test_zero_vector(self):
        g = sym([[3, 1], [1, 2]])
        assert quadratic_pairing([0, 0], [5, -7], g) == 0

    def test_hand_inverted_2x2(self):
        # adjugate oracle: v.adj(G).w / det(G) = (1,2).(3,0)/3 = 1
        g = sym([[2, 1], [1, 2]])
        v, w = [1, 2], [2, 1]
        adj = [[2, -1], [-1, 2]]
        det = determinant(g.to_lists())
        byadj = sum(v[i] * adj[i][j] * w[j] for i in range(2) for j in range(2)) / det
        assert byadj == 1
        assert quadratic_pairing(v, w, g) == byadj

    def test_singular_matrix_rejected(self):
        with pytest.raises(SingularMatrix):
            quadratic_pairing([1], [1], sym([[0]]))

    @given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6),
           st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6))
    @settings(max_examples=80, deadline=None)
    def test_symmetric_and_bilinear(self, v1, v2, w1, w2, g11, g12, g22):
        g = sym([[g11, g12], [g12, g22]])
        if determinant(g.to_lists()) == 0:
            return
        v, w = [v1, v2], [w1, w2]
        assert quadratic_pairing(v, w, g) == quadratic_pairing(w, v, g)
        v2x = [2 * v1, 2 * v2]
        assert quadratic_pairing(v2x, w, g) == 2 * quadratic_pairing(v, w, g)
        vsum = [v1 + w1, v2 + w2]
        assert quadratic_pairing(vsum, w, g) == (
            quadratic_pairing(v, w, g) + quadratic_pairing(w, w, g)
        )


def test_determinant_basics():
    assert determinant([[2, 1], [1, 2]]) == 3
    assert determinant([[0]]) == 0
    assert determinant([]) == 1
