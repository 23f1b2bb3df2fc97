"""Finite F_q[t]-modules: elementary divisors, 𝔭-parts and prime enumeration."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from base_algebra import FiniteField, Poly, factor, irreducible_polys, is_irreducible, multiplicity
from exceptions import FieldError, ResourceGuardExceeded
from linear_algebra import EchelonBasis, Matrix, smith_normal_form

logger = logging.getLogger(__name__)

MAX_MATRIX_DIM = 400


@dataclass(frozen=True)
class FiniteAModule:
    """A finite F_q[t]-module: an F_q-space with the matrix of t and its elementary divisors."""

    field: FiniteField
    dim: int
    matrix: Tuple[Tuple[int, ...], ...]
    divisors: Tuple[Poly, ...]

    def is_zero(self) -> bool:
        return self.dim == 0

    def p_part(self, prime: Poly) -> int:
        return p_part(self, prime)

    def primes(self) -> List[Poly]:
        """Monic irreducibles dividing some elementary divisor."""
        found = {}
        for d in self.divisors:
            for g, _ in factor(d):
                found[g.coeffs] = g
        return sorted(found.values(), key=lambda g: (g.degree(), g.coeffs))

    def characteristic_polynomial(self) -> Poly:
        out = Poly.constant(self.field, 1, "t")
        for d in self.divisors:
            out = out * d
        return out

    def describe(self) -> str:
        if not self.divisors:
            return "0"
        return " ⊕ ".join(f"A/({d})" for d in self.divisors)

    def same_structure(self, other: "FiniteAModule") -> bool:
        return [d.coeffs for d in self.divisors] == [d.coeffs for d in other.divisors]

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "elementary_divisors": [str(d) for d in self.divisors],
            "structure": self.describe(),
        }


def companion(poly: Poly) -> Matrix:
    """Matrix of t on F_q[t]/(poly) in the basis 1, t, …, t^{n−1}."""
    f = poly.field
    monic = poly.monic()
    n = monic.degree()
    mat = [[0] * n for _ in range(n)]
    for i in range(1, n):
        mat[i][i - 1] = 1
    for i in range(n):
        mat[i][n - 1] = f.neg(monic.coefficient(i))
    return mat


def block_diagonal(blocks: Sequence[Matrix]) -> Matrix:
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    offset = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, c in enumerate(row):
                out[offset + i][offset + j] = c
        offset += len(b)
    return out


def finite_module_structure(field: FiniteField, endo: Sequence[Sequence[int]],
                            max_dim: int = MAX_MATRIX_DIM) -> FiniteAModule:
    """Elementary divisors of t·Id − endo over F_q[t], nonunits only."""
    n = len(endo)
    if any(len(row) != n for row in endo):
        raise ValueError("endomorphism matrix must be square")
    if n > max_dim:
        raise ResourceGuardExceeded(f"matrix dimension {n} exceeds the limit {max_dim}")
    t = Poly.x(field, "t")
    zero = Poly(field, (), "t")
    mat = [
        [(t if i == j else zero) - Poly.constant(field, endo[i][j], "t") for j in range(n)]
        for i in range(n)
    ]
    snf = smith_normal_form(mat, field=field, var="t", ncols=n)
    divisors = tuple(d.with_var("t") for d in snf.nonunit_divisors())
    if snf.torsion_degree() != n:
        raise ValueError("characteristic matrix is singular; the endomorphism data is inconsistent")
    return FiniteAModule(field, n, tuple(tuple(row) for row in endo), divisors)


def from_divisors(field: FiniteField, divisors: Sequence[Poly]) -> FiniteAModule:
    """The module ⊕ A/(d) built from companion blocks."""
    return finite_module_structure(field, block_diagonal([companion(d) for d in divisors if d.degree() > 0]))


def p_part(mod: FiniteAModule, prime: Poly) -> int:
    """length over A_𝔭 of the 𝔭-part: Σ ord_𝔭(d) over the elementary divisors."""
    if not is_irreducible(prime):
        raise FieldError(f"{prime} is not irreducible over {prime.field}")
    prime = prime.monic().with_var("t")
    return sum(multiplicity(d, prime) for d in mod.divisors)


def quotient_endomorphism(field: FiniteField, endo_columns: Sequence[Sequence[int]],
                          subspace: EchelonBasis) -> Matrix:
    """Matrix of the induced map on V/U in the coordinates given by the free columns of U.

    ``endo_columns[j]`` is the image of the j-th basis vector; U must be stable.
    """
    free = subspace.free_columns()
    cols = [subspace.quotient_coordinates(endo_columns[j]) for j in free]
    k = len(free)
    return [[cols[j][i] for j in range(k)] for i in range(k)]


# ----------------------------------------------------------------------
# Prime enumeration
# ----------------------------------------------------------------------

def enumerate_primes(field: FiniteField, degree_bound: int,
                     modules: Iterable[FiniteAModule] = ()) -> List[Poly]:
    """Monic irreducibles of degree ≤ degree_bound plus every prime dividing a module's divisors."""
    found: Dict[Tuple[int, ...], Poly] = {}
    for d in range(1, degree_bound + 1):
        for g in irreducible_polys(field, d, "t"):
            found[g.coeffs] = g
    for mod in modules:
        for g in mod.primes():
            found.setdefault(g.coeffs, g)
    return sorted(found.values(), key=lambda g: (g.degree(), g.coeffs))


def mass_formula(mod: FiniteAModule, primes: Sequence[Poly]) -> Tuple[Dict[str, int], int]:
    """Per-prime lengths and the remainder dim − Σ deg𝔭·ℓ_𝔭 left by primes outside the list."""
    lengths = {str(g): p_part(mod, g) for g in primes}
    covered = sum(g.degree() * lengths[str(g)] for g in primes)
    return lengths, mod.dim - covered
