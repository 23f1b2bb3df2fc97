import pytest
from hypothesis import given
from hypothesis import strategies as st

from base_algebra import FiniteField, Poly
from linear_algebra import EchelonBasis, mat_vec, nullspace, rank, smith_normal_form, transpose
from tests.strategies import fields, polys


@st.composite
def matrices(draw):
    field = draw(fields())
    rows = draw(st.integers(1, 5))
    cols = draw(st.integers(1, 6))
    entry = st.integers(0, field.order - 1)
    mat = [[draw(entry) for _ in range(cols)] for _ in range(rows)]
    return field, mat, cols


@given(matrices())
def test_nullspace_is_kernel(data):
    field, mat, cols = data
    kernel = nullspace(field, mat, cols)
    for x in kernel:
        assert not any(mat_vec(field, mat, x))
    assert rank(field, mat, cols) + len(kernel) == cols
    if kernel:
        assert rank(field, kernel, cols) == len(kernel)


@given(matrices())
def test_row_rank_equals_column_rank(data):
    field, mat, cols = data
    assert rank(field, mat, cols) == rank(field, transpose(mat), len(mat))


def test_echelon_insert_and_quotient(F3):
    basis = EchelonBasis(F3, 3)
    assert basis.insert([1, 2, 0])
    assert not basis.insert([2, 1, 0])
    assert basis.insert([0, 0, 1])
    assert basis.free_columns() == [1]
    assert basis.quotient_coordinates([0, 1, 0]) == [1]
    assert basis.contains([2, 1, 2])


def test_echelon_copy_is_independent(F2):
    basis = EchelonBasis(F2, 2)
    basis.insert([1, 0])
    other = basis.copy()
    other.insert([0, 1])
    assert (basis.rank, other.rank) == (1, 2)


# ----------------------------------------------------------------------
# Smith form over F[x]
# ----------------------------------------------------------------------

def _p(field, *coeffs):
    return Poly(field, coeffs, "t")


def test_smith_combines_coprime_blocks(F2):
    zero = _p(F2)
    snf = smith_normal_form([[_p(F2, 0, 1), zero], [zero, _p(F2, 1, 1)]], F2, "t")
    assert [d.coeffs for d in snf.divisors] == [(1,), (0, 1, 1)]
    assert [d.coeffs for d in snf.nonunit_divisors()] == [(0, 1, 1)]
    assert snf.torsion_degree() == 2


def test_smith_divisibility_chain(F2):
    zero = _p(F2)
    t = _p(F2, 0, 1)
    snf = smith_normal_form([[t * t, zero], [zero, t]], F2, "t")
    assert [d.coeffs for d in snf.divisors] == [(0, 1), (0, 0, 1)]
    assert snf.torsion_length(t) == 3
    assert snf.rank() == 0


def test_smith_free_rank(F3):
    snf = smith_normal_form([[_p(F3, 0, 1), _p(F3, 1)]], F3, "t", ncols=2)
    assert [d.coeffs for d in snf.nonzero] == [(1,)]
    assert snf.matrix_rank() == 1
    assert snf.rank() == 1


def test_smith_of_empty_relations(F2):
    snf = smith_normal_form([], F2, "t", ncols=3)
    assert snf.rank() == 3
    assert snf.divisors == ()


@given(st.lists(st.integers(0, 2), min_size=4, max_size=4), st.lists(st.integers(0, 2), min_size=4, max_size=4))
def test_smith_preserves_determinant_degree(a, b):
    F3 = FiniteField(3)
    x, y = _p(F3, *a[:2], 1), _p(F3, *b[:2], 1)
    u, v = _p(F3, a[2]), _p(F3, b[3])
    det = x * y - u * v
    snf = smith_normal_form([[x, u], [v, y]], F3, "t")
    if det.is_zero():
        assert snf.matrix_rank() < 2
    else:
        assert snf.torsion_degree() == det.degree()
        assert snf.divisors[0].divides(snf.divisors[1])


def _matmul(a, b, zero):
    return [[sum((a[i][k] * b[k][j] for k in range(len(b))), zero) for j in range(len(b[0]))]
            for i in range(len(a))]


@st.composite
def unimodular_pair(draw, field, n):
    """Upper and lower unitriangular matrices over field[t]."""
    one, zero = _p(field, 1), _p(field)
    entry = polys(field, 2, "t")
    upper = [[one if i == j else (draw(entry) if j > i else zero) for j in range(n)] for i in range(n)]
    lower = [[one if i == j else (draw(entry) if j < i else zero) for j in range(n)] for i in range(n)]
    return upper, lower


@given(st.data())
def test_smith_is_invariant_under_unimodular_change(data):
    F2 = FiniteField(2)
    entry = polys(F2, 2, "t")
    mat = [[data.draw(entry) for _ in range(3)] for _ in range(3)]
    left, _ = data.draw(unimodular_pair(F2, 3))
    _, right = data.draw(unimodular_pair(F2, 3))
    zero = _p(F2)
    changed = _matmul(_matmul(left, mat, zero), right, zero)
    before = smith_normal_form(mat, F2, "t")
    after = smith_normal_form(changed, F2, "t")
    assert [d.coeffs for d in after.divisors] == [d.coeffs for d in before.divisors]
