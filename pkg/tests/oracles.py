"""Independent numeric oracles used only by the test suite.

The shipped library never touches floating point; these helpers exist so
tests can cross-check exact results against a second, unrelated route.
"""

import numpy as np


def eigenvalue_sign_pattern(rows, tol=1e-9):
    """(#positive, #negative, #zero) eigenvalues of a symmetric matrix."""
    if not rows:
        return (0, 0, 0)
    eigs = np.linalg.eigvalsh(np.array(rows, dtype=float))
    pos = int(np.sum(eigs > tol))
    neg = int(np.sum(eigs < -tol))
    return (pos, neg, len(eigs) - pos - neg)


def seifert_form_signature(v):
    """Signature of V + V^t for an integer Seifert matrix V."""
    a = np.array(v, dtype=float)
    s = a + a.T
    pos, neg, _ = eigenvalue_sign_pattern(s.tolist())
    return pos - neg


def seifert_form_determinant(v):
    """|det(V + V^t)|, the knot determinant, from a Seifert matrix."""
    a = np.array(v, dtype=int)
    s = a + a.T
    n = len(s)
    if n == 0:
        return 1
    return abs(int(round(np.linalg.det(s.astype(float)))))


# Standard genus-1 Seifert matrices, frozen from the usual band pictures.
SEIFERT_RIGHT_TREFOIL = [[-1, 1], [0, -1]]
SEIFERT_FIGURE_EIGHT = [[1, 1], [0, -1]]
