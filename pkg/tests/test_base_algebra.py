import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from base_algebra import (
    FiniteField,
    Poly,
    RationalFunction,
    factor,
    irreducible_polys,
    is_irreducible,
    least_irreducible,
    multiplicity,
    parse_poly,
    parse_rational,
)
from exceptions import FieldError, ParseError
from tests.strategies import FIELDS, field_and_polys, fields, nonzero_elements


# ----------------------------------------------------------------------
# Finite fields
# ----------------------------------------------------------------------

def test_prime_field_arithmetic(F3):
    assert F3.add(2, 2) == 1
    assert F3.neg(1) == 2
    assert F3.mul(2, 2) == 1
    assert F3.inv(2) == 2


def test_extension_of_f2_uses_least_irreducible(F4):
    assert F4.order == 4
    x = F4.generator
    assert x == 2
    # x^2 = x + 1 modulo x^2 + x + 1
    assert F4.mul(x, x) == 3
    assert F4.pow(x, 3) == 1


def test_non_prime_characteristic_rejected():
    with pytest.raises(FieldError):
        FiniteField(4)
    with pytest.raises(FieldError):
        FiniteField(2, 0)


def test_subfield_containment(F2, F4):
    F16 = F2.extension(4)
    assert F16.contains(F2)
    assert F4.contains(F2)
    assert not F2.contains(F4)
    assert F16.degree_over(F2) == 4
    assert F16.basis(F2) == [1, 2, 4, 8]


def test_trace_to_prime_field_is_surjective(F2):
    F8 = F2.extension(3)
    traces = {F8.trace(a, 2) for a in F8.elements()}
    assert traces == {0, 1}


def test_format_of_extension_elements(F4):
    assert F4.format(1) == "1"
    assert F4.format(2) == "(w)"
    assert F4.format(3) == "(w + 1)"


@given(st.data())
def test_field_inverses(data):
    field = data.draw(fields())
    a = data.draw(nonzero_elements(field))
    assert field.mul(a, field.inv(a)) == 1


@given(st.data())
def test_multiplication_distributes(data):
    field = data.draw(fields())
    a, b, c = (data.draw(st.integers(0, field.order - 1)) for _ in range(3))
    assert field.mul(a, field.add(b, c)) == field.add(field.mul(a, b), field.mul(a, c))


@pytest.mark.parametrize("field", FIELDS, ids=repr)
def test_frobenius_fixes_prime_field(field):
    for a in range(field.p):
        assert field.frobenius(a) == a


# ----------------------------------------------------------------------
# Polynomials
# ----------------------------------------------------------------------

@given(field_and_polys(2))
def test_division_with_remainder(data):
    field, a, b = data
    if b.is_zero():
        with pytest.raises(ZeroDivisionError):
            divmod(a, b)
        return
    quo, rem = divmod(a, b)
    assert quo * b + rem == a
    assert rem.degree() < b.degree()


@given(field_and_polys(2, max_degree=5))
def test_xgcd_bezout_identity(data):
    field, a, b = data
    g, s, t = a.xgcd(b)
    assert s * a + t * b == g
    if not g.is_zero():
        assert g.divides(a) and g.divides(b)


@settings(max_examples=40)
@given(field_and_polys(1, max_degree=6))
def test_factorization_reconstructs_monic_part(data):
    field, a = data
    if a.degree() < 1:
        return
    product = Poly.constant(field, 1)
    for g, k in factor(a):
        assert is_irreducible(g)
        product = product * g ** k
    assert product == a.monic()


def test_poly_string_form(F2):
    assert str(Poly(F2, (1, 1, 0, 1))) == "θ^3 + θ + 1"
    assert str(Poly(F2, ())) == "0"
    assert str(Poly(F2, (0, 1), "t")) == "t"


def test_irreducible_counts_over_f2(F2):
    assert [len(irreducible_polys(F2, d)) for d in (1, 2, 3, 4)] == [2, 1, 2, 3]


def test_irreducibility_over_extension(F4):
    # x^2 + x + 1 splits over F_4
    assert not is_irreducible(Poly(F4, (1, 1, 1)))
    assert len(irreducible_polys(F4, 1)) == 4
    assert len(irreducible_polys(F4, 2)) == 6


def test_least_irreducible(F3):
    assert least_irreducible(F3, 2).coeffs == (1, 0, 1)


def test_multiplicity(F2):
    t = Poly.x(F2, "t")
    g = Poly(F2, (1, 1), "t")
    assert multiplicity(t ** 3 * g, t) == 3
    assert multiplicity(t ** 3 * g, g) == 1
    with pytest.raises(ValueError):
        multiplicity(Poly(F2, (), "t"), t)


# ----------------------------------------------------------------------
# Rational functions
# ----------------------------------------------------------------------

def test_rational_function_reduces(F2):
    x = Poly.x(F2)
    r = RationalFunction(x * x, x * (x + Poly.constant(F2, 1)))
    assert r.num == x
    assert r.valuation() == 0
    assert RationalFunction(Poly(F2, ())).valuation() is None


def test_rational_function_zero_denominator(F2):
    with pytest.raises(ZeroDivisionError):
        RationalFunction(Poly.x(F2), Poly(F2, ()))


# ----------------------------------------------------------------------
# Parsing
# ----------------------------------------------------------------------

def test_parse_poly_aliases(F2):
    expected = Poly(F2, (1, 1, 1))
    assert parse_poly("theta^2+theta+1", F2) == expected
    assert parse_poly("θ^2 + θ + 1", F2) == expected
    assert parse_poly("x**2 + x + 1", F2) == expected


def test_parse_poly_reduces_coefficients(F3):
    assert parse_poly("3*theta + 4", F3) == Poly(F3, (1,))
    assert parse_poly("theta/2", F3) == Poly(F3, (0, 2))


def test_parse_poly_with_generator(F4):
    assert parse_poly("w*theta + 1", F4) == Poly(F4, (1, 2))


@pytest.mark.parametrize("text", ["1/theta", "theta + y", "theta +", "sqrt(theta)"])
def test_parse_poly_rejects(F2, text):
    with pytest.raises(ParseError):
        parse_poly(text, F2)


def test_parse_rational(F2):
    r = parse_rational("theta^2/(theta + 1)", F2)
    assert r.valuation() == -1
    assert r.den == Poly(F2, (1, 1))


def test_parse_rejects_generator_over_prime_field(F2):
    with pytest.raises(ParseError):
        parse_poly("w*theta", F2)
