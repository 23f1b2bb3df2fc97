import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from base_algebra import FiniteField, Poly
from drinfeld_core import (
    DrinfeldModule,
    ExpData,
    Residue,
    SkewPoly,
    StandardModules,
    apply_t,
    carlitz_lattice_rank,
    certified_exp,
    drinfeld_apply,
    drinfeld_rank,
    exp_coeffs,
    exp_laurent,
    exp_poly,
    exp_threshold,
    known_lattice_rank,
    phi,
    skew_mul,
)
from exceptions import CertificateNotFound, FieldError, ModuleSpecError, ResourceGuardExceeded
from laurent import LaurentSlice


# ----------------------------------------------------------------------
# Module specs
# ----------------------------------------------------------------------

def test_carlitz_spec(carlitz2):
    assert carlitz2.rank == 1
    assert carlitz2.is_carlitz
    assert carlitz2.q == 2 and carlitz2.p == 2
    assert str(carlitz2) == "φ(t) = θ + τ over F_2"


def test_regression_module(regression):
    assert regression.rank == 1
    assert not regression.is_carlitz
    assert regression.c == 3
    assert regression.label == "regression"


def test_spec_round_trip(regression, carlitz3):
    for E in (regression, carlitz3):
        assert DrinfeldModule.from_spec(E.to_spec()) == E


def test_prime_power_field_spec():
    E = DrinfeldModule.from_spec({"q": 4, "field_modulus": "x^2+x+1", "phi_t": "carlitz"})
    assert E.q == 4
    assert E.is_carlitz
    assert "field_modulus" in E.to_spec()


@pytest.mark.parametrize("spec", [
    {"phi_t": ["theta"]},
    {"q": 6, "phi_t": ["theta"]},
    {"q": "two", "phi_t": ["theta"]},
    {"q": 2, "phi_t": ["theta + 1", "1"]},
    {"q": 2, "phi_t": []},
    {"q": 2, "phi_t": ["theta", "theta +"]},
    {"q": 4, "field_modulus": "x^2+1", "phi_t": "carlitz"},
])
def test_invalid_specs(spec):
    with pytest.raises(ModuleSpecError):
        DrinfeldModule.from_spec(spec)


def test_lattice_ranks(carlitz2, carlitz3, trivial2, regression):
    assert known_lattice_rank(carlitz2) == 1
    assert known_lattice_rank(carlitz3) == 0
    assert known_lattice_rank(trivial2) == 0
    assert known_lattice_rank(regression) is None


def test_carlitz_lattice_rank(carlitz2, carlitz3, regression, F4):
    assert carlitz_lattice_rank(carlitz2) == 1
    assert carlitz_lattice_rank(carlitz2, F4) == 1
    assert carlitz_lattice_rank(carlitz3) == 0
    with pytest.raises(ModuleSpecError):
        carlitz_lattice_rank(regression)
    with pytest.raises(FieldError):
        carlitz_lattice_rank(carlitz3, F4)


# ----------------------------------------------------------------------
# Twisted polynomials and the action
# ----------------------------------------------------------------------

def test_phi_of_t_squared(carlitz2, F2):
    # (θ + τ)^2 = θ^2 + (θ + θ^2)τ + τ^2
    square = phi(carlitz2, Poly(F2, (0, 0, 1), "t"))
    assert [c.coeffs for c in square.coeffs] == [(0, 0, 1), (0, 1, 1), (1,)]


def test_skew_multiplication_twists(F2):
    tau = SkewPoly(F2, 2, (Poly(F2, ()), Poly(F2, (1,))))
    theta = SkewPoly(F2, 2, (Poly.x(F2),))
    assert (tau * theta).coeffs[1] == Poly(F2, (0, 0, 1))
    assert (theta * tau).coeffs[1] == Poly.x(F2)


def test_rank_is_additive_in_t_degree(regression, trivial2, F2):
    assert drinfeld_rank(regression) == 1
    assert drinfeld_rank(trivial2) == 0
    t3 = Poly(F2, (0, 0, 0, 1), "t")
    assert len(phi(regression, t3).coeffs) - 1 == 3
    assert len(phi(trivial2, t3).coeffs) == 1
    pt = regression.phi_t()
    assert skew_mul(pt, pt) == phi(regression, Poly(F2, (0, 0, 1), "t"))


@settings(max_examples=30)
@given(st.lists(st.integers(0, 1), max_size=3), st.lists(st.integers(0, 1), max_size=3))
def test_phi_is_a_ring_map(a, b):
    E = StandardModules.regression()
    F2 = E.field
    pa, pb = Poly(F2, a, "t"), Poly(F2, b, "t")
    assert phi(E, pa + pb) == phi(E, pa) + phi(E, pb)
    assert phi(E, pa * pb) == phi(E, pa) * phi(E, pb)


def test_action_on_residues(carlitz2, F2):
    theta = Poly.x(F2)
    x = Residue(Poly.constant(F2, 1), theta)
    # t·1 = θ + 1 ≡ 1 mod θ
    assert apply_t(carlitz2, x) == x
    assert drinfeld_apply(carlitz2, Poly.x(F2, "t"), x) == apply_t(carlitz2, x)
    assert drinfeld_apply(carlitz2, 0, x).is_zero()


def test_residue_needs_nonzero_modulus(F2):
    with pytest.raises(ValueError):
        Residue(Poly.x(F2), Poly(F2, ()))


# ----------------------------------------------------------------------
# The exponential
# ----------------------------------------------------------------------

def test_carlitz_coefficient_valuations(carlitz2_exp):
    assert [carlitz2_exp.valuation(i) for i in (1, 2, 3)] == [2, 8, 24]


def test_regression_first_coefficient(regression_exp, F2):
    e1 = regression_exp.coefficient(1)
    assert e1.valuation() == -1
    assert e1.num == Poly(F2, (0, 0, 1))


def test_thresholds(carlitz2_exp, regression_exp, trivial2):
    assert carlitz2_exp.threshold == 1
    assert regression_exp.threshold == 2
    assert certified_exp(trivial2).threshold == 1
    assert regression_exp.certificate.certified


def test_rank_zero_has_no_coefficients(trivial2):
    assert ExpData(trivial2).coefficients(3) == []


def test_eager_coefficients(carlitz2):
    data = exp_coeffs(carlitz2, 3)
    assert [e.valuation() for e in data.coefficients(3)] == [2, 8, 24]
    with pytest.raises(ValueError):
        exp_coeffs(carlitz2, 0)


def test_coefficient_limit(regression):
    exp = ExpData(regression, max_terms=2)
    with pytest.raises(ResourceGuardExceeded):
        exp.coefficient(3)


def test_threshold_window_below_rank(regression):
    with pytest.raises(CertificateNotFound):
        exp_threshold(regression, ExpData(regression), 0)


def test_exp_of_one(carlitz2_exp, F2):
    value = exp_poly(carlitz2_exp, F2, Poly.constant(F2, 1), 4)
    assert value.coefficient(0) == 1
    assert [value.coefficient(k) for k in range(1, 5)] == [0, 1, 1, 1]


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["carlitz2", "carlitz3", "regression"]), st.lists(st.integers(0, 2), min_size=1, max_size=3))
def test_exponential_functional_equation(name, digits):
    E = {"carlitz2": StandardModules.carlitz(2), "carlitz3": StandardModules.carlitz(3),
         "regression": StandardModules.regression()}[name]
    exp = certified_exp(E)
    hi = exp.threshold + 3
    top = hi + E.c + 1
    coeffs = [d % E.q for d in digits] + [0] * (top - len(digits))
    y = LaurentSlice(E.field, 1, top, tuple(coeffs), True)
    left = exp_laurent(exp, y.mul_poly(Poly.x(E.field)), hi)
    right = apply_t(E, exp_laurent(exp, y, top))
    lo = min(left.lo, right.lo)
    assert all(left.coefficient(k) == right.coefficient(k) for k in range(lo, hi + 1))


def test_exp_over_extension_lifts_scalars(carlitz2_exp, F2):
    F4 = F2.extension(2)
    value = exp_poly(carlitz2_exp, F4, Poly.constant(F4, F4.generator), 2)
    assert value.field == F4
    assert value.coefficient(0) == F4.generator
