"""Hypothesis strategies shared by the property tests."""
from hypothesis import strategies as st

from supersingular import intmat
from supersingular.lattice import IntegerLattice


def int_matrices(n, lo=-4, hi=4):
    return st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n)


@st.composite
def unimodular(draw, n):
    """Product of a few random elementary integer matrices."""
    m = [list(r) for r in intmat.identity(n)]
    for _ in range(draw(st.integers(0, 6))):
        i = draw(st.integers(0, n - 1))
        j = draw(st.integers(0, n - 1))
        if i == j:
            continue
        c = draw(st.integers(-2, 2))
        for r in range(n):
            m[r][j] += c * m[r][i]
    return intmat.as_matrix(m)


@st.composite
def negative_definite(draw, max_rank=4, max_entry=6):
    """A negative definite even lattice: -(B^T D B) for diagonal D with even entries, plus noise."""
    n = draw(st.integers(1, max_rank))
    diag = [2 * draw(st.integers(1, max_entry // 2 + 1)) for _ in range(n)]
    b = draw(unimodular(n))
    gram = [[-sum(b[k][i] * diag[k] * b[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)]
    return IntegerLattice(gram)


@st.composite
def nonsingular_symmetric(draw, max_rank=4):
    n = draw(st.integers(1, max_rank))
    vals = draw(int_matrices(n, -5, 5))
    g = [[vals[min(i, j)][max(i, j)] for j in range(n)] for i in range(n)]
    # det(g + cI) is a degree-n polynomial in c, so some c <= n works
    for c in range(n + 1):
        shifted = [[g[i][j] + c * (i == j) for j in range(n)] for i in range(n)]
        if intmat.det(shifted) != 0:
            return IntegerLattice(shifted)
    raise AssertionError("unreachable")
