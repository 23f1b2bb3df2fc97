import pytest

from base_algebra import Poly
from drinfeld_core import certified_exp, exp_laurent
from laurent import LaurentSlice
from unit_search import UnitSearch, unit_group_search, unit_search_degree


def test_rank_zero_units(trivial2, F2):
    exp = certified_exp(trivial2)
    search = UnitSearch(trivial2, F2, exp)
    assert search.pole_order(3) == 3
    assert search.window_floor() == 1
    report = search.run(1)
    assert report.certificate == "rank-zero"
    assert report.certified
    assert len(report.generators) == 2
    assert report.rank_found == 1
    assert report.expected_rank == 1
    assert report.unit_prime_rank == 1


def test_carlitz_q2_leading_terms_tie(carlitz2, carlitz2_exp, F2):
    report = unit_group_search(carlitz2, F2, 1, carlitz2_exp)
    assert report.certificate == "carlitz-closed-form"
    assert report.status == "inconclusive"
    assert report.lattice_rank == 1
    assert report.expected_rank == 0


def test_carlitz_q3_is_certified(carlitz3):
    report = unit_group_search(carlitz3, carlitz3.field, 1)
    assert report.certificate == "carlitz-closed-form"
    assert report.certified
    assert report.rank_found <= report.expected_rank


def test_general_module_checks_leading_forms(regression, regression_exp):
    report = unit_group_search(regression, regression.field, 1, regression_exp)
    assert report.certificate == "leading-forms"
    assert report.horizon_checked == [report.search_bound + 1, report.search_bound + 2]
    assert report.rank_found is None
    assert report.unit_prime_rank is None


def test_horizon_override(regression, regression_exp):
    report = unit_group_search(regression, regression.field, 1, regression_exp, horizon=4)
    assert len(report.horizon_checked) == 4


def test_witnesses_reproduce_generators(regression, regression_exp):
    report = unit_group_search(regression, regression.field, 2, regression_exp)
    lo, hi = report.window
    for a, y in zip(report.generators, report.witnesses):
        image = exp_laurent(regression_exp, y, hi) - LaurentSlice.from_poly(a, hi)
        assert not any(image.coefficient(k) for k in range(lo, hi + 1))


def test_degree_bound_must_be_positive(trivial2, F2):
    with pytest.raises(ValueError):
        unit_group_search(trivial2, F2, 0)


def test_report_serializes(trivial2, F2):
    data = unit_group_search(trivial2, F2, 1).to_dict()
    assert data["status"] == "certified"
    assert data["dim_found"] == len(data["generators"]) == 2
    assert data["rank_U_prime"] == 1


def test_unit_search_degree_follows_the_modulus(F2):
    assert unit_search_degree(1) == 1
    assert unit_search_degree(1, Poly(F2, (1, 1, 0, 1))) == 2
    assert unit_search_degree(4, Poly.x(F2)) == 4
