import pytest
from hypothesis import given
from hypothesis import strategies as st

from base_algebra import FiniteField, Poly, RationalFunction
from exceptions import PrecisionError
from laurent import LaurentSlice, laurent_expand
from tests.strategies import elements, polys


def test_geometric_expansion_over_f2(F2):
    x = RationalFunction(Poly(F2, (1,)), Poly(F2, (1, 1)))
    s = laurent_expand(x, 0, 5)
    assert s.coeffs == (0, 1, 1, 1, 1, 1)
    assert s.floor
    assert s.valuation() == 1


def test_geometric_expansion_over_f3(F3):
    # 1/(θ − 1) = u + u^2 + ...
    x = RationalFunction(Poly(F3, (1,)), Poly(F3, (2, 1)))
    assert laurent_expand(x, 1, 4).coeffs == (1, 1, 1, 1)


def test_window_above_valuation_is_not_floored(F2):
    x = RationalFunction(Poly(F2, (1,)), Poly(F2, (1, 1)))
    s = laurent_expand(x, 3, 5)
    assert not s.floor
    with pytest.raises(PrecisionError):
        s.coefficient(2)


def test_polynomial_round_trip(F2):
    a = Poly(F2, (1, 0, 1))
    s = LaurentSlice.from_poly(a, 2)
    assert (s.lo, s.coeffs) == (-2, (1, 0, 1, 0, 0))
    assert s.polynomial_part() == a


def test_coefficients_outside_window(F2):
    s = LaurentSlice.monomial(F2, 1, 1, 3)
    assert s.coefficient(-7) == 0
    with pytest.raises(PrecisionError):
        s.coefficient(4)


def test_mul_poly_inverts_expansion(F3):
    den = Poly(F3, (1, 1))
    s = laurent_expand(RationalFunction(Poly(F3, (1,)), den), 0, 8)
    product = s.mul_poly(den)
    assert product.coefficient(0) == 1
    assert all(product.coefficient(k) == 0 for k in range(1, product.hi + 1))


def test_series_product(F2):
    den = Poly(F2, (1, 1))
    inverse = laurent_expand(RationalFunction(Poly(F2, (1,)), den), 0, 6)
    product = inverse * LaurentSlice.from_poly(den, 6)
    assert product.hi == 5
    assert [product.coefficient(k) for k in range(-1, 6)] == [0, 1, 0, 0, 0, 0, 0]


def test_product_needs_floor(F2):
    s = LaurentSlice(F2, 0, 2, (1, 0, 0), False)
    with pytest.raises(PrecisionError):
        s * s


def test_addition_keeps_common_precision(F2):
    a = LaurentSlice.monomial(F2, 1, 1, 4)
    b = LaurentSlice.monomial(F2, 1, -1, 2)
    c = a + b
    assert c.hi == 2
    assert c.coefficient(-1) == 1 and c.coefficient(1) == 1
    assert (c - c).is_zero()


def test_frobenius_stretches_window(F2):
    s = LaurentSlice(F2, 1, 2, (1, 1), True)
    sq = s.frobenius(2)
    assert (sq.lo, sq.hi) == (2, 5)
    assert sq.coeffs == (1, 0, 1, 0)


def test_to_vector_over_subfield(F2, F4):
    s = LaurentSlice(F4, 0, 1, (3, 2), True)
    assert s.to_vector(0, 1, F2) == [1, 1, 0, 1]


def test_window_length_must_match(F2):
    with pytest.raises(ValueError):
        LaurentSlice(F2, 0, 2, (1,), True)


def test_empty_window_rejected(F2):
    with pytest.raises(ValueError):
        laurent_expand(Poly(F2, (1,)), 3, 2)


@given(st.data())
def test_nested_windows_agree(data):
    field = data.draw(st.sampled_from([FiniteField(2), FiniteField(3)]))
    num = data.draw(polys(field, 3))
    den = Poly(field, data.draw(st.lists(elements(field), max_size=3)) + [1])
    x = RationalFunction(num, den)
    lo = data.draw(st.integers(-4, 4))
    hi = data.draw(st.integers(lo, 8))
    outer_lo = data.draw(st.integers(-6, lo))
    outer_hi = data.draw(st.integers(hi, 12))
    assert laurent_expand(x, lo, hi) == laurent_expand(x, outer_lo, outer_hi).restrict(lo, hi)


def test_restrict_beyond_exact_window(F2):
    s = laurent_expand(Poly(F2, (1, 1)), 0, 3)
    with pytest.raises(PrecisionError):
        s.restrict(0, 4)
