import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from base_algebra import FiniteField, Poly
from exceptions import ParseError
from lambda_mu_engine import (
    ElementaryModule,
    Lengths,
    PresentationMatrix,
    SeriesT,
    closed_form_matches_oracle,
    direct_sum,
    elementary_invariants,
    elementary_lengths,
    finite_part_length,
    fit_affine,
    gamma_iso_check,
    length_quotient,
    presentation_lengths,
    pseudo_isomorphism_stability,
    pseudo_null,
    random_series,
    standard_battery,
    torsion_reduction,
    verify_alg_T,
)


def s(text, field=None):
    return SeriesT.parse(text, field or FiniteField(2))


def elem(rank, *texts):
    F2 = FiniteField(2)
    return ElementaryModule(F2, rank, tuple(s(t, F2) for t in texts))


def matrix(rows):
    return PresentationMatrix(FiniteField(2), [[s(x) for x in row] for row in rows], len(rows[0]))


# ----------------------------------------------------------------------
# Series in T over F_q[π]
# ----------------------------------------------------------------------

def test_parse_and_print():
    f = s("pi + T")
    assert f.coefficient(0) == Poly(FiniteField(2), (0, 1), "π")
    assert f.coefficient(1).is_one()
    assert str(f) == "T + π"
    assert str(s("0")) == "0"


def test_star_strips_powers_of_T():
    f = s("T^2*(pi^2 + T)")
    assert f.ord_T() == 2
    assert f.star() == s("pi^2 + T")
    assert s("pi").star() == s("pi")


def test_series_arithmetic():
    assert s("pi + T") * s("pi + T") == s("pi^2 + T^2")
    assert s("pi + T") - s("T") == s("pi")
    assert s("pi + T") + s("pi + T") == s("0")


def test_parse_rejects_other_variables():
    with pytest.raises(ParseError):
        s("pi + y")


def test_gamma_identity():
    for p in (2, 3, 5):
        for n in range(4):
            assert gamma_iso_check(p, n)
    with pytest.raises(ValueError):
        gamma_iso_check(2, -1)


# ----------------------------------------------------------------------
# Closed forms
# ----------------------------------------------------------------------

def test_length_quotient():
    assert length_quotient(s("pi + T"), 5) == 5
    assert length_quotient(s("pi^3 + T"), 2) == 6
    assert length_quotient(s("T"), 4) is None
    assert length_quotient(s("T"), 0) == 0
    with pytest.raises(ValueError):
        length_quotient(s("0"), 3)


def test_finite_part_length():
    assert finite_part_length(s("T^2*(pi^2 + T)"), 5) == 6
    assert finite_part_length(s("1 + T"), 7) == 0
    with pytest.raises(ValueError):
        finite_part_length(s("T^2"), 1)


@settings(max_examples=40)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 5), st.sampled_from([2, 3]))
def test_closed_forms_match_smith_oracle(seed, N, p):
    f = random_series(FiniteField(p), random.Random(seed), degree=2)
    assert closed_form_matches_oracle(f, N)


def test_elementary_invariants():
    inv = elementary_invariants(elem(0, "pi + T", "pi"))
    assert inv.F == s("pi^2 + pi*T")
    assert (inv.rank, inv.ord_T, inv.mu, inv.mu_star) == (0, 0, 2, 2)
    assert elementary_invariants(elem(0, "T*(pi + T)")).mu is None
    assert elementary_invariants(elem(0, "T*(pi + T)")).to_dict()["mu"] == "undefined"


def test_elementary_lengths():
    assert elementary_lengths(elem(1, "pi + T"), 3) == Lengths(3, None, 3)
    assert elementary_lengths(elem(0, "pi + T", "pi"), 4) == Lengths(0, 8, 8)
    assert elementary_lengths(elem(0, "T^2*(pi^2 + T)"), 1) == Lengths(1, None, 0)
    assert Lengths(1, None, 0).to_dict()["total"] == "infinite"


def test_elementary_module_validation():
    with pytest.raises(ValueError):
        ElementaryModule(FiniteField(2), -1)
    with pytest.raises(ValueError):
        ElementaryModule(FiniteField(2), 0, (s("0"),))
    assert elem(0).describe() == "0"


# ----------------------------------------------------------------------
# Presentation matrices
# ----------------------------------------------------------------------

@pytest.mark.parametrize("E", [
    elem(0, "pi + T", "pi"),
    elem(1, "pi + T"),
    elem(0, "T^2*(pi^2 + T)"),
    elem(2),
])
@pytest.mark.parametrize("N", [1, 2, 4])
def test_oracle_agrees_with_elementary_closed_form(E, N):
    assert presentation_lengths(E, N) == elementary_lengths(E, N)


def test_upper_triangular_matrix():
    A = matrix([["T", "pi"], ["0", "T"]])
    assert A.determinant() == s("T^2")
    assert A.expected_slopes() == (0, None, 0)
    assert presentation_lengths(A, 1) == Lengths(1, None, 1)
    assert presentation_lengths(A, 2) == Lengths(2, None, 0)


def test_determinant_and_slopes():
    A = matrix([["pi", "T"], ["T", "pi"]])
    assert A.determinant() == s("pi^2 + T^2")
    assert A.expected_slopes() == (0, 2, 2)
    assert matrix([["pi", "T"]]).expected_slopes() is None


def test_presentation_validation():
    with pytest.raises(ValueError):
        PresentationMatrix(FiniteField(2), [[s("T")], [s("T"), s("pi")]], 1)
    with pytest.raises(ParseError):
        PresentationMatrix.from_dict({"cols": 2}, FiniteField(2))
    with pytest.raises(ValueError):
        presentation_lengths(matrix([["T"]]), 0)


def test_matrix_dict_form():
    A = PresentationMatrix.from_dict({"rows": [["pi + T", "1"], ["0", "pi^2"]]}, FiniteField(2))
    assert A.ncols == 2
    assert A.to_dict() == {"rows": [["T + π", "1"], ["0", "π^2"]], "cols": 2}


def test_direct_sum_and_pseudo_null():
    F2 = FiniteField(2)
    P = pseudo_null(F2, 2, 3)
    assert presentation_lengths(P, 5) == Lengths(0, 6, 6)
    both = direct_sum(elem(0, "pi").presentation(), P)
    assert both.ncols == 2 and both.nrows == 3
    assert presentation_lengths(both, 5).finite == 11


# ----------------------------------------------------------------------
# Affine growth
# ----------------------------------------------------------------------

def test_fit_affine():
    assert fit_affine([1, 2, 3, 4], [5, 3, 4, 5]) == (1, 1, 2)
    assert fit_affine([1, 2, 3], [0, 0, 0]) == (0, 0, 1)
    assert fit_affine([1, 2], [None, None]) == (None, None, None)


def test_verify_elementary_module():
    report = verify_alg_T(elem(0, "pi + T"), range(1, 9))
    assert report.passed
    assert [seq.slope for seq in report.sequences] == [0, 1, 1]
    assert report.to_dict()["name"] == "R[[T]]/(T + π)"


def test_verify_matrix_in_parallel():
    A = matrix([["T", "pi"], ["0", "T"]])
    sequential = verify_alg_T(A, range(1, 13))
    parallel = verify_alg_T(A, range(1, 13), parallel=True, max_workers=2)
    assert sequential.passed
    assert [q.values for q in parallel.sequences] == [q.values for q in sequential.sequences]


def test_wrong_expected_slope_fails():
    report = verify_alg_T(elem(0, "pi + T"), range(1, 9), expected=(0, 2, 2))
    assert not report.passed


def test_verify_range_checks():
    with pytest.raises(ValueError):
        verify_alg_T(elem(0, "pi"), [1, 2, 4, 5, 6])
    with pytest.raises(ValueError):
        verify_alg_T(elem(0, "pi"), range(1, 3))


@pytest.mark.parametrize("entry", standard_battery(), ids=lambda e: e.name)
def test_battery_grows_affinely(entry):
    window = max(4, entry.bound + 2)
    report = verify_alg_T(entry.matrix, range(1, window + 5), expected=entry.expected, name=entry.name)
    assert report.passed


def test_battery_size():
    assert len(standard_battery()) >= 20


def test_pseudo_null_summand_shifts_by_a_constant():
    F2 = FiniteField(2)
    M = elem(0, "pi + T").presentation()
    assert pseudo_isomorphism_stability(M, pseudo_null(F2, 1, 2), range(1, 9))


def test_free_part_does_not_change_finite_length():
    assert torsion_reduction(elem(1, "pi"), range(1, 9))
    assert torsion_reduction(elem(2, "T*(pi + T)"), range(1, 9))
