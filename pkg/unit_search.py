"""Search for the units U(E/O_K) = O_K ∩ exp_E(K_∞) of bounded degree."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from typing import List, Optional, Tuple

from base_algebra import FiniteField, Poly
from drinfeld_core import DrinfeldModule, ExpData, certified_exp, exp_laurent, exp_monomial, known_lattice_rank
from exceptions import ConsistencyError
from laurent import LaurentSlice
from linear_algebra import EchelonBasis, nullspace, rank, smith_normal_form
from utils import ResourceGuard

logger = logging.getLogger(__name__)


@dataclass
class UnitSearchReport:
    degree_bound: int
    search_bound: int
    window: Tuple[int, int]
    generators: List[Poly]
    witnesses: List[LaurentSlice]
    preimage_rank: int
    rank_found: Optional[int]
    expected_rank: Optional[int]
    lattice_rank: Optional[int]
    certified: bool
    certificate: str
    horizon_checked: List[int] = dc_field(default_factory=list)

    @property
    def unit_prime_rank(self) -> Optional[int]:
        """rank U′ = rank U + r_E when r_E is known."""
        if self.rank_found is None or self.lattice_rank is None:
            return None
        return self.rank_found + self.lattice_rank

    @property
    def status(self) -> str:
        return "certified" if self.certified else "inconclusive"

    def to_dict(self) -> dict:
        return {
            "degree_bound": self.degree_bound,
            "search_bound": self.search_bound,
            "window": list(self.window),
            "generators": [str(a) for a in self.generators],
            "dim_found": len(self.generators),
            "preimage_rank": self.preimage_rank,
            "rank_found": self.rank_found,
            "expected_rank": self.expected_rank,
            "rank_U_prime": self.unit_prime_rank,
            "certificate": self.certificate,
            "status": self.status,
        }


class UnitSearch:
    """Exact linear solve for a ∈ L[θ], deg a ≤ D, with a ≡ exp(y) mod m^M."""

    def __init__(self, module: DrinfeldModule, L: FiniteField, exp: ExpData):
        self.module = module
        self.L = L
        self.exp = exp
        self.fq = module.field
        self.basis = L.basis(self.fq)
        self.d = len(self.basis)
        self.M = exp.threshold
        self.hi = self.M - 1

    # -- pole orders ------------------------------------------------------

    def _terms(self, w: int) -> List[int]:
        N = self.exp.terms_needed(w, self.hi)
        return [i for i in range(N + 1) if not self.exp.coefficient(i).is_zero()]

    def pole_order(self, j: int) -> int:
        """Largest possible pole g(j) = max_i (j·q^i − v(e_i)) of exp(c·θ^j)."""
        q = self.module.q
        return max(j * q ** i - self.exp.valuation(i) for i in self._terms(-j))

    def window_floor(self) -> int:
        """Lower bound b ≤ 1 for the valuation of exp of any element of the u-window."""
        q = self.module.q
        return min([1] + [self.exp.valuation(i) + q ** i for i in self._terms(1)])

    def leading_form_injective(self, j: int) -> bool:
        """c ↦ Σ_{ties} lc(e_i)·c^{q^i} is injective on L."""
        q = self.module.q
        g = self.pole_order(j)
        ties = [i for i in self._terms(-j) if j * q ** i - self.exp.valuation(i) == g]
        L = self.L
        cols = []
        for ell in self.basis:
            value = 0
            for i in ties:
                lc = self.exp.coefficient(i).leading_coefficient()
                value = L.add(value, L.mul(lc, L.pow(ell, q ** i)))
            cols.append(L.coordinates(value, self.fq))
        return rank(self.fq, cols, self.d) == self.d

    # -- the solve --------------------------------------------------------

    def run(self, D: int, horizon: Optional[int] = None, guard: Optional[ResourceGuard] = None) -> UnitSearchReport:
        if D < 1:
            raise ValueError(f"degree bound must be at least 1, got {D}")
        E, L, fq, d = self.module, self.L, self.fq, self.d
        b = self.window_floor()
        B = max(D, -b)
        J = -1
        while self.pole_order(J + 1) <= B:
            J += 1
        D_prime = max(D, self.pole_order(J) if J >= 0 else 0, -b)
        lo, hi = -D_prime, self.hi
        logger.info(f"Unit search: D = {D}, J = {J}, window [{lo}, {hi}]")

        columns = []
        for j in range(J + 1):
            for ell in self.basis:
                columns.append(exp_monomial(self.exp, L, ell, -j, hi).to_vector(lo, hi, fq))
        for k in range(1, self.M):
            for ell in self.basis:
                columns.append(exp_monomial(self.exp, L, ell, k, hi).to_vector(lo, hi, fq))
        for m in range(D + 1):
            for ell in self.basis:
                columns.append(LaurentSlice.monomial(L, L.neg(ell), -m, hi).to_vector(lo, hi, fq))
        n_alpha, n_beta = (J + 1) * d, (self.M - 1) * d
        n_unknowns = len(columns)
        if guard is not None:
            guard.check_matrix(n_unknowns)
            guard.check_time("unit search")
        rows = [[col[i] for col in columns] for i in range((hi - lo + 1) * d)]
        solutions = nullspace(fq, rows, n_unknowns)

        gamma_basis = EchelonBasis(fq, (D + 1) * d)
        generators, witnesses = [], []
        for sol in solutions:
            gamma = sol[n_alpha + n_beta:]
            if gamma_basis.insert(gamma):
                a = self._poly_from(gamma, D + 1)
                y = self._preimage(sol, J)
                self._verify(a, y, lo, hi)
                generators.append(a)
                witnesses.append(y)

        preimage_rank = self._preimage_rank(solutions, J)
        r_E = known_lattice_rank(E)
        expected = None if r_E is None else d - r_E
        rank_found = None if r_E is None else max(0, preimage_rank - r_E)
        if expected is not None and rank_found > expected:
            raise ConsistencyError(f"found unit rank {rank_found} exceeds the expected {expected}")

        certified, kind, checked = self._certificate(J, horizon)
        report = UnitSearchReport(
            degree_bound=D, search_bound=J, window=(lo, hi), generators=generators,
            witnesses=witnesses, preimage_rank=preimage_rank, rank_found=rank_found,
            expected_rank=expected, lattice_rank=r_E, certified=certified,
            certificate=kind, horizon_checked=checked,
        )
        logger.info(f"Unit search found {len(generators)} generators, rank {rank_found} ({report.status})")
        return report

    def _poly_from(self, coords: List[int], length: int) -> Poly:
        d = self.d
        return Poly(self.L, [self.L.from_coordinates(coords[m * d:(m + 1) * d], self.fq) for m in range(length)], "θ")

    def _preimage(self, sol: List[int], J: int) -> LaurentSlice:
        """y = Σ α_j θ^j + Σ β_k u^k as a Laurent polynomial."""
        d, L = self.d, self.L
        lo = min(-J, 1) if J >= 0 else 1
        coeffs = [0] * (self.hi - lo + 1)
        for j in range(J + 1):
            coeffs[-j - lo] = L.from_coordinates(sol[j * d:(j + 1) * d], self.fq)
        offset = (J + 1) * d
        for k in range(1, self.M):
            start = offset + (k - 1) * d
            coeffs[k - lo] = L.from_coordinates(sol[start:start + d], self.fq)
        return LaurentSlice(L, lo, self.hi, tuple(coeffs), True)

    def _verify(self, a: Poly, y: LaurentSlice, lo: int, hi: int) -> None:
        image = exp_laurent(self.exp, y, hi) - LaurentSlice.from_poly(a, hi, self.L)
        if any(image.coefficient(k) for k in range(lo, hi + 1)):
            raise ConsistencyError(f"witness for unit {a} does not reproduce it on the window")

    def _preimage_rank(self, solutions: List[List[int]], J: int) -> int:
        """Rank over F_q(u) of the preimages, each scaled by u^J into F_q[u]^d."""
        if not solutions:
            return 0
        fq, d = self.fq, self.d
        shift = max(J, 0)
        rows = []
        for sol in solutions:
            y = self._preimage(sol, J)
            row = []
            for b in range(d):
                coeffs = [0] * (shift + self.hi + 1)
                for k in range(y.lo, y.hi + 1):
                    c = fq_coordinate(self.L, y.coefficient(k), fq, b)
                    if c:
                        coeffs[k + shift] = c
                row.append(Poly(fq, coeffs, "u"))
            rows.append(row)
        return smith_normal_form(rows, field=fq, var="u", ncols=d).matrix_rank()

    def _certificate(self, J: int, horizon: Optional[int]) -> Tuple[bool, str, List[int]]:
        E = self.module
        if E.rank == 0:
            return True, "rank-zero", []
        if E.is_carlitz:
            # Leading terms of exp(cθ^j) tie exactly when (q − 1)(j − i) = q, i.e. only for q = 2.
            return E.q != 2, "carlitz-closed-form", []
        horizon = horizon if horizon is not None else E.rank + 1
        checked = list(range(J + 1, J + horizon + 1))
        ok = all(self.leading_form_injective(j) for j in checked)
        return ok, "leading-forms", checked


def fq_coordinate(L: FiniteField, c: int, fq: FiniteField, b: int) -> int:
    return L.coordinates(c, fq)[b]


def unit_group_search(E: DrinfeldModule, L: FiniteField, D: int, exp: Optional[ExpData] = None,
                      horizon: Optional[int] = None, guard: Optional[ResourceGuard] = None) -> UnitSearchReport:
    exp = exp or certified_exp(E, guard.max_exp_terms if guard else 48)
    return UnitSearch(E, L, exp).run(D, horizon, guard)


def unit_search_degree(D: int, modulus: Optional[Poly] = None) -> int:
    """Degree bound for a unit search feeding H_f: units of degree < deg f reach all of L[θ]/f."""
    if modulus is None:
        return D
    return max(D, modulus.degree() - 1)
