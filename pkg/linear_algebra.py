"""Linear algebra over finite fields and over polynomial rings F[x]."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from base_algebra import FiniteField, Poly, multiplicity

logger = logging.getLogger(__name__)

Vector = List[int]
Matrix = List[List[int]]


# ----------------------------------------------------------------------
# Matrices over a finite field
# ----------------------------------------------------------------------

class EchelonBasis:
    """Incrementally maintained reduced row echelon basis of a subspace of F^dim."""

    def __init__(self, field: FiniteField, dim: int):
        self.field = field
        self.dim = dim
        self.rows: List[Vector] = []
        self.pivots: List[int] = []

    @property
    def rank(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Sequence[int]) -> Vector:
        """Remainder of vec against the basis; zero at every pivot column."""
        f = self.field
        v = list(vec)
        for row, piv in zip(self.rows, self.pivots):
            c = v[piv]
            if c:
                for j in range(piv, self.dim):
                    if row[j]:
                        v[j] = f.sub(v[j], f.mul(c, row[j]))
        return v

    def contains(self, vec: Sequence[int]) -> bool:
        return not any(self.reduce(vec))

    def insert(self, vec: Sequence[int]) -> bool:
        """Add vec to the span; returns True when the rank grew."""
        f = self.field
        v = self.reduce(vec)
        piv = next((j for j, c in enumerate(v) if c), None)
        if piv is None:
            return False
        inv = f.inv(v[piv])
        v = [f.mul(inv, c) for c in v]
        for row in self.rows:
            c = row[piv]
            if c:
                for j in range(piv, self.dim):
                    if v[j]:
                        row[j] = f.sub(row[j], f.mul(c, v[j]))
        pos = sum(1 for p in self.pivots if p < piv)
        self.rows.insert(pos, v)
        self.pivots.insert(pos, piv)
        return True

    def extend(self, vectors: Sequence[Sequence[int]]) -> int:
        return sum(1 for v in vectors if self.insert(v))

    def free_columns(self) -> List[int]:
        pivots = set(self.pivots)
        return [j for j in range(self.dim) if j not in pivots]

    def quotient_coordinates(self, vec: Sequence[int]) -> Vector:
        """Coordinates of the class of vec in F^dim / span, on the free columns."""
        v = self.reduce(vec)
        return [v[j] for j in self.free_columns()]

    def copy(self) -> "EchelonBasis":
        other = EchelonBasis(self.field, self.dim)
        other.rows = [list(r) for r in self.rows]
        other.pivots = list(self.pivots)
        return other


def rref(field: FiniteField, mat: Sequence[Sequence[int]], ncols: Optional[int] = None) -> EchelonBasis:
    ncols = ncols if ncols is not None else (len(mat[0]) if mat else 0)
    basis = EchelonBasis(field, ncols)
    basis.extend(mat)
    return basis


def rank(field: FiniteField, mat: Sequence[Sequence[int]], ncols: Optional[int] = None) -> int:
    return rref(field, mat, ncols).rank


def nullspace(field: FiniteField, mat: Sequence[Sequence[int]], ncols: Optional[int] = None) -> List[Vector]:
    """Basis of {x : mat·x = 0}, one vector per free column in increasing order."""
    basis = rref(field, mat, ncols)
    n = basis.dim
    out = []
    for free in basis.free_columns():
        x = [0] * n
        x[free] = 1
        for row, piv in zip(basis.rows, basis.pivots):
            if row[free]:
                x[piv] = field.neg(row[free])
        out.append(x)
    return out


def mat_vec(field: FiniteField, mat: Sequence[Sequence[int]], vec: Sequence[int]) -> Vector:
    out = []
    for row in mat:
        acc = 0
        for a, b in zip(row, vec):
            if a and b:
                acc = field.add(acc, field.mul(a, b))
        out.append(acc)
    return out


def transpose(mat: Sequence[Sequence[int]], nrows: int = 0) -> Matrix:
    if not mat:
        return [[] for _ in range(nrows)]
    return [list(col) for col in zip(*mat)]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


# ----------------------------------------------------------------------
# Smith normal form over F[x]
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SmithForm:
    """Elementary divisors of a matrix whose rows are relations on its columns.

    Nonzero divisors come first, monic and forming a divisibility chain; zero
    divisors pad the list to ``min(rows, cols)``.
    """

    divisors: Tuple[Poly, ...]
    rows: int
    cols: int

    @property
    def nonzero(self) -> Tuple[Poly, ...]:
        return tuple(d for d in self.divisors if not d.is_zero())

    def rank(self) -> int:
        """Free rank of the cokernel."""
        return self.cols - len(self.nonzero)

    def matrix_rank(self) -> int:
        return len(self.nonzero)

    def nonunit_divisors(self) -> Tuple[Poly, ...]:
        return tuple(d for d in self.nonzero if d.degree() > 0)

    def torsion_length(self, prime: Poly) -> int:
        """Length of the prime-primary torsion of the cokernel."""
        return sum(multiplicity(d, prime) for d in self.nonzero)

    def torsion_degree(self) -> int:
        """Dimension over the coefficient field of the torsion of the cokernel."""
        return sum(d.degree() for d in self.nonzero)


def smith_normal_form(mat: Sequence[Sequence[Poly]], field: Optional[FiniteField] = None,
                      var: str = "π", ncols: Optional[int] = None) -> SmithForm:
    """Elementary divisors of a polynomial matrix.

    Pivots are chosen by least degree, ties broken row-major. When a remaining
    entry is not divisible by the pivot its row is added to the pivot row and
    elimination restarts, which enforces the divisibility chain.
    """
    rows = len(mat)
    cols = ncols if ncols is not None else (len(mat[0]) if rows else 0)
    if rows and field is None:
        field = mat[0][0].field if cols else None
    if field is None:
        return SmithForm((), rows, cols)
    zero = Poly(field, (), var)
    a = [[entry for entry in row] for row in mat]
    divisors: List[Poly] = []

    def least_in(cells):
        best = None
        for i, j in cells:
            e = a[i][j]
            if not e.is_zero() and (best is None or e.degree() < a[best[0]][best[1]].degree()):
                best = (i, j)
        return best

    def bring(k, pos):
        i, j = pos
        if i != k:
            a[k], a[i] = a[i], a[k]
        if j != k:
            for row in a:
                row[k], row[j] = row[j], row[k]

    for k in range(min(rows, cols)):
        pos = least_in((i, j) for i in range(k, rows) for j in range(k, cols))
        if pos is None:
            break
        bring(k, pos)
        while True:
            pivot = a[k][k]
            clean = True
            for i in range(k + 1, rows):
                e = a[i][k]
                if e.is_zero():
                    continue
                q, r = divmod(e, pivot)
                a[i] = [a[i][j] - q * a[k][j] if j >= k else a[i][j] for j in range(cols)]
                clean = clean and r.is_zero()
            for j in range(k + 1, cols):
                e = a[k][j]
                if e.is_zero():
                    continue
                q, r = divmod(e, pivot)
                for i in range(k, rows):
                    if not a[i][k].is_zero():
                        a[i][j] = a[i][j] - q * a[i][k]
                clean = clean and r.is_zero()
            if not clean:
                cells = [(k, j) for j in range(k, cols)] + [(i, k) for i in range(k + 1, rows)]
                bring(k, least_in(cells))
                continue
            bad = next(
                ((i, j) for i in range(k + 1, rows) for j in range(k + 1, cols)
                 if not pivot.divides(a[i][j])),
                None,
            )
            if bad is None:
                break
            i = bad[0]
            a[k] = [a[k][j] + a[i][j] for j in range(cols)]
        divisors.append(a[k][k].monic())

    divisors.extend(zero for _ in range(min(rows, cols) - len(divisors)))
    logger.debug(f"Smith form of {rows}x{cols} matrix: {[str(d) for d in divisors]}")
    return SmithForm(tuple(divisors), rows, cols)
