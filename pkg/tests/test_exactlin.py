from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from tiltfilt.exactlin import (
    GF, QQ, Coordinatizer, Mat, Subspace, block_diag, hstack, kernel_vectors, rref, solve, solve_vector, vstack,
)

small = st.integers(-4, 4)


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    rows = [[draw(small) for _ in range(c)] for _ in range(r)]
    return Mat(QQ, r, c, [[QQ(x) for x in row] for row in rows]), rows


def sym(rows, c):
    return sympy.Matrix(len(rows), c, [x for r in rows for x in r])


def test_field_parse_and_format():
    assert QQ.format(QQ.parse("3/2")) == "3/2"
    assert QQ.format(QQ.parse("-4/2")) == "-2"
    f5 = GF(5)
    assert f5(7) == 2 and f5("1/2") == 3
    assert f5.inv(2) == 3
    with pytest.raises(ZeroDivisionError):
        QQ.inv(QQ.zero)


def test_matrix_products_and_inverse():
    a = Mat.from_rows(QQ, [[1, 2], [3, 4]])
    assert (a @ a.inverse()) == Mat.identity(QQ, 2)
    assert a.T.rows[0] == (1, 3)
    assert a.rank() == 2
    b = Mat.from_rows(QQ, [[1, 2], [2, 4]])
    assert b.rank() == 1 and not b.is_invertible()


@given(matrices())
def test_rank_agrees_with_sympy(mr):
    m, rows = mr
    expected = sym(rows, m.ncols).rank() if m.nrows and m.ncols else 0
    assert m.rank() == expected


@given(matrices())
def test_kernel_is_kernel_and_has_right_dimension(mr):
    m, rows = mr
    ker = kernel_vectors(m)
    assert len(ker) == m.ncols - m.rank()
    for v in ker:
        assert all(x == 0 for x in m.apply(v))


@given(matrices(), st.lists(small, min_size=5, max_size=5))
def test_solve_vector_finds_preimages(mr, xs):
    m, _ = mr
    x = [QQ(v) for v in xs[:m.ncols]]
    b = m.apply(x)
    sol = solve_vector(m, b)
    assert sol is not None and m.apply(sol) == b


def test_solve_reports_inconsistent_system():
    a = Mat.from_rows(QQ, [[1, 0], [0, 0]])
    assert solve_vector(a, [QQ(0), QQ(1)]) is None
    assert solve(a, Mat.from_rows(QQ, [[1], [0]])) is not None


@given(matrices(max_rows=4, max_cols=4), matrices(max_rows=4, max_cols=4))
def test_subspace_dimension_formula(a, b):
    (ma, _), (mb, _) = a, b
    n = 4
    u = Subspace.span(QQ, n, [list(r) + [0] * (n - ma.ncols) for r in ma.rows])
    w = Subspace.span(QQ, n, [list(r) + [0] * (n - mb.ncols) for r in mb.rows])
    assert (u + w).dim + u.intersection(w).dim == u.dim + w.dim


def test_subspace_membership_and_coordinates():
    s = Subspace.span(QQ, 3, [[1, 1, 0], [0, 1, 1]])
    assert s.dim == 2
    assert s.contains_vector([QQ(1), QQ(2), QQ(1)])
    assert not s.contains_vector([QQ(0), QQ(0), QQ(1)])
    c = Coordinatizer(QQ, [[1, 1, 0], [0, 1, 1]], 3)
    assert c.coords([QQ(2), QQ(5), QQ(3)]) == [2, 3]


def test_stacking_shapes():
    a = Mat.identity(QQ, 2)
    assert hstack(QQ, [a, a]).shape == (2, 4)
    assert vstack(QQ, [a, a]).shape == (4, 2)
    assert block_diag(QQ, [a, Mat.identity(QQ, 1)]) == Mat.identity(QQ, 3)


def test_rref_over_prime_field():
    f = GF(3)
    m = Mat.from_rows(f, [[1, 2], [2, 1]])
    assert m.rank() == 1
    red, rank, piv = rref(m)
    assert rank == 1 and list(piv) == [0]
    assert red.rows == ((1, 2), (0, 0))


def test_exact_rationals_do_not_round():
    m = Mat.from_rows(QQ, [[3, 1], [1, 3]])
    inv = m.inverse()
    assert Fraction(int(inv.rows[0][0].numerator), int(inv.rows[0][0].denominator)) == Fraction(3, 8)
