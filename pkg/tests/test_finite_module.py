import pytest
from hypothesis import given
from hypothesis import strategies as st

from base_algebra import FiniteField, Poly
from exceptions import FieldError, ResourceGuardExceeded
from finite_module import (
    enumerate_primes,
    finite_module_structure,
    from_divisors,
    mass_formula,
    quotient_endomorphism,
)
from linear_algebra import EchelonBasis


def t_poly(field, *coeffs):
    return Poly(field, coeffs, "t")


def test_divisor_chain_is_kept(F2):
    mod = from_divisors(F2, [t_poly(F2, 0, 1), t_poly(F2, 0, 0, 1)])
    assert mod.dim == 3
    assert [str(d) for d in mod.divisors] == ["t", "t^2"]
    assert mod.describe() == "A/(t) ⊕ A/(t^2)"
    assert mod.p_part(t_poly(F2, 0, 1)) == 3
    assert mod.characteristic_polynomial() == t_poly(F2, 0, 0, 0, 1)


def test_coprime_blocks_merge(F2):
    mod = from_divisors(F2, [t_poly(F2, 1, 1), t_poly(F2, 1, 1, 1)])
    assert [str(d) for d in mod.divisors] == ["t^3 + 1"]
    assert [str(g) for g in mod.primes()] == ["t + 1", "t^2 + t + 1"]


def test_mass_formula(F2):
    mod = from_divisors(F2, [t_poly(F2, 1, 0, 0, 1)])
    lengths, remainder = mass_formula(mod, enumerate_primes(F2, 1))
    assert lengths == {"t": 0, "t + 1": 1}
    assert remainder == 2
    lengths, remainder = mass_formula(mod, enumerate_primes(F2, 2))
    assert lengths["t^2 + t + 1"] == 1
    assert remainder == 0


def test_enumerate_primes_adds_module_primes(F2):
    mod = from_divisors(F2, [t_poly(F2, 1, 1, 0, 1)])
    primes = enumerate_primes(F2, 1, [mod])
    assert [str(g) for g in primes] == ["t", "t + 1", "t^3 + t + 1"]


def test_zero_module(F3):
    mod = finite_module_structure(F3, [])
    assert mod.is_zero()
    assert mod.describe() == "0"
    assert mod.to_dict() == {"dim": 0, "elementary_divisors": [], "structure": "0"}


def test_p_part_needs_irreducible(F2):
    mod = from_divisors(F2, [t_poly(F2, 0, 1)])
    with pytest.raises(FieldError):
        mod.p_part(t_poly(F2, 0, 0, 1))


def test_structure_limits(F2):
    with pytest.raises(ValueError):
        finite_module_structure(F2, [[1, 0]])
    with pytest.raises(ResourceGuardExceeded):
        finite_module_structure(F2, [[0] * 3 for _ in range(3)], max_dim=2)


def test_quotient_endomorphism(F2):
    # swap on F_2^2 modulo the diagonal acts as the identity
    columns = [[0, 1], [1, 0]]
    diagonal = EchelonBasis(F2, 2)
    diagonal.insert([1, 1])
    endo = quotient_endomorphism(F2, columns, diagonal)
    assert endo == [[1]]
    assert [str(d) for d in finite_module_structure(F2, endo).divisors] == ["t + 1"]


def test_same_structure(F3):
    a = from_divisors(F3, [t_poly(F3, 1, 1)])
    b = finite_module_structure(F3, [[2]])
    assert a.same_structure(b)
    assert not a.same_structure(from_divisors(F3, [t_poly(F3, 0, 1)]))


@given(st.lists(st.lists(st.integers(0, 2), max_size=2), min_size=1, max_size=3))
def test_dimension_is_total_degree(lower_coeffs):
    F3 = FiniteField(3)
    divisors = [Poly(F3, cs + [1], "t") for cs in lower_coeffs]
    mod = from_divisors(F3, divisors)
    assert mod.dim == sum(d.degree() for d in divisors)
    product = Poly(F3, (1,), "t")
    for d in divisors:
        product = product * d
    assert mod.characteristic_polynomial() == product
