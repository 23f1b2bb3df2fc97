"""Lengths of R[[T]]-modules modulo T^N for R = F_q[[π]], with a Smith-form oracle.

Power series are kept as polynomials in F_q[π][T]; every length is the π-adic
length of an F_q[π]-module, read off exact elementary divisors.
"""

from __future__ import annotations

import logging
import random
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field as dc_field
from functools import reduce
from typing import Dict, List, Optional, Sequence, Tuple, Union

from base_algebra import FiniteField, Poly, parse_terms
from exceptions import ParseError
from linear_algebra import smith_normal_form

logger = logging.getLogger(__name__)

PI = "π"


def ord_R(a: Poly) -> Optional[int]:
    """π-adic order of an element of F_q[π]; None for zero."""
    return a.order_at_zero()


@dataclass(frozen=True)
class SeriesT:
    """f = Σ_k f_k(π) T^k with f_k ∈ F_q[π]."""

    field: FiniteField
    coeffs: Tuple[Poly, ...] = ()

    def __post_init__(self):
        coeffs = [c.with_var(PI) for c in self.coeffs]
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def parse(cls, text: str, field: FiniteField) -> "SeriesT":
        terms = parse_terms(text, field, [PI, "T"])
        by_T: Dict[int, Dict[int, int]] = {}
        for (a, b), c in terms.items():
            by_T.setdefault(b, {})[a] = c
        top = max(by_T, default=-1)
        coeffs = []
        for k in range(top + 1):
            row = by_T.get(k, {})
            coeffs.append(Poly(field, [row.get(a, 0) for a in range(max(row, default=-1) + 1)], PI))
        return cls(field, tuple(coeffs))

    @classmethod
    def constant(cls, a: Poly) -> "SeriesT":
        return cls(a.field, (a,))

    @classmethod
    def one(cls, field: FiniteField) -> "SeriesT":
        return cls(field, (Poly.constant(field, 1, PI),))

    @classmethod
    def pi_power(cls, field: FiniteField, a: int) -> "SeriesT":
        return cls(field, (Poly.monomial(field, 1, a, PI),))

    @classmethod
    def T_power(cls, field: FiniteField, b: int) -> "SeriesT":
        zero = Poly(field, (), PI)
        return cls(field, tuple([zero] * b + [Poly.constant(field, 1, PI)]))

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, k: int) -> Poly:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Poly(self.field, (), PI)

    def degree_T(self) -> int:
        return len(self.coeffs) - 1

    def ord_T(self) -> Optional[int]:
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                return k
        return None

    def star(self) -> "SeriesT":
        """f* with f = T^{ord_T f}·f*."""
        k = self.ord_T()
        return self if k is None else SeriesT(self.field, self.coeffs[k:])

    def at_zero(self) -> Poly:
        return self.coefficient(0)

    def __add__(self, other: "SeriesT") -> "SeriesT":
        n = max(len(self.coeffs), len(other.coeffs))
        return SeriesT(self.field, tuple(self.coefficient(k) + other.coefficient(k) for k in range(n)))

    def __neg__(self) -> "SeriesT":
        return SeriesT(self.field, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "SeriesT") -> "SeriesT":
        return self + (-other)

    def __mul__(self, other: "SeriesT") -> "SeriesT":
        if self.is_zero() or other.is_zero():
            return SeriesT(self.field, ())
        out = [Poly(self.field, (), PI)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return SeriesT(self.field, tuple(out))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SeriesT):
            return NotImplemented
        return self.field == other.field and [c.coeffs for c in self.coeffs] == [c.coeffs for c in other.coeffs]

    def __hash__(self) -> int:
        return hash(tuple(c.coeffs for c in self.coeffs))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c.is_zero():
                continue
            power = "" if k == 0 else ("T" if k == 1 else f"T^{k}")
            if not power:
                terms.append(str(c))
            elif c.is_one():
                terms.append(power)
            else:
                inner = str(c)
                terms.append(f"({inner})*{power}" if " " in inner else f"{inner}*{power}")
        return " + ".join(terms)


def _product(field: FiniteField, factors: Sequence[SeriesT]) -> SeriesT:
    return reduce(lambda a, b: a * b, factors, SeriesT.one(field))


# ----------------------------------------------------------------------
# Closed forms for cyclic quotients
# ----------------------------------------------------------------------

def gamma_iso_check(p: int, n: int) -> bool:
    """(1 + T)^{p^n} − 1 = T^{p^n} in F_p[T], computed by n successive p-th powers."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    power: Dict[int, int] = {0: 1, 1: 1}
    for _ in range(n):
        result = {0: 1}
        for _ in range(p):
            step: Dict[int, int] = {}
            for a, x in result.items():
                for b, y in power.items():
                    step[a + b] = (step.get(a + b, 0) + x * y) % p
            result = {k: v for k, v in step.items() if v}
        power = result
    power[0] = (power.get(0, 0) - 1) % p
    power = {k: v for k, v in power.items() if v}
    return power == {p ** n: 1}


def length_quotient(f: SeriesT, N: int) -> Optional[int]:
    """length_R R[[T]]/(f, T^N); None when the quotient has positive R-rank."""
    if f.is_zero():
        raise ValueError("f must be nonzero")
    if N < 0:
        raise ValueError(f"N must be nonnegative, got {N}")
    if N == 0:
        return 0
    f0 = f.at_zero()
    if f0.is_zero():
        return None
    return ord_R(f0) * N


def finite_part_length(f: SeriesT, N: int) -> int:
    """length_R of the finite part of R[[T]]/(f, T^N), for N ≥ ord_T f."""
    if f.is_zero():
        raise ValueError("f must be nonzero")
    k = f.ord_T()
    if N < k:
        raise ValueError(f"N = {N} is below ord_T(f) = {k}")
    return ord_R(f.star().at_zero()) * (N - k)


# ----------------------------------------------------------------------
# Elementary modules
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Lengths:
    rank: int
    total: Optional[int]
    finite: int

    def as_tuple(self) -> Tuple[int, Optional[int], int]:
        return (self.rank, self.total, self.finite)

    def to_dict(self) -> dict:
        return {"rank": self.rank, "total": "infinite" if self.total is None else self.total,
                "finite": self.finite}


@dataclass(frozen=True)
class Invariants:
    rank: int
    F: SeriesT
    ord_T: int
    mu: Optional[int]
    mu_star: int

    def to_dict(self) -> dict:
        return {"rank": self.rank, "F": str(self.F), "ord_T": self.ord_T,
                "mu": "undefined" if self.mu is None else self.mu, "mu_star": self.mu_star}


@dataclass(frozen=True)
class ElementaryModule:
    """R[[T]]^r ⊕ ⊕_i R[[T]]/(f_i)."""

    field: FiniteField
    rank: int = 0
    factors: Tuple[SeriesT, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise ValueError(f"free rank must be nonnegative, got {self.rank}")
        if any(f.is_zero() for f in self.factors):
            raise ValueError("torsion factors must be nonzero")

    @property
    def F(self) -> SeriesT:
        return _product(self.field, self.factors)

    def torsion_part(self) -> "ElementaryModule":
        return ElementaryModule(self.field, 0, self.factors)

    def ord_T_bound(self) -> int:
        return max((f.ord_T() for f in self.factors), default=0)

    def presentation(self) -> "PresentationMatrix":
        s = len(self.factors)
        zero = SeriesT(self.field, ())
        rows = [[f if j == i else zero for j in range(s)] + [zero] * self.rank
                for i, f in enumerate(self.factors)]
        return PresentationMatrix(self.field, rows, s + self.rank)

    def describe(self) -> str:
        parts = [f"R[[T]]^{self.rank}"] if self.rank else []
        parts += [f"R[[T]]/({f})" for f in self.factors]
        return " ⊕ ".join(parts) or "0"


def elementary_invariants(E: ElementaryModule) -> Invariants:
    F = E.F
    f0 = F.at_zero()
    mu = None if f0.is_zero() else ord_R(f0)
    return Invariants(E.rank, F, F.ord_T(), mu, ord_R(F.star().at_zero()))


def elementary_lengths(E: ElementaryModule, N: int) -> Lengths:
    """(rank_R, length or None, finite-part length) of E/T^N from the blockwise closed forms."""
    if N < 0:
        raise ValueError(f"N must be nonnegative, got {N}")
    rank = E.rank * N
    finite = 0
    for f in E.factors:
        k = f.ord_T()
        rank += min(k, N)
        finite += ord_R(f.star().at_zero()) * max(0, N - k)
    return Lengths(rank, finite if rank == 0 else None, finite)


# ----------------------------------------------------------------------
# Presentation matrices and the Smith oracle
# ----------------------------------------------------------------------

@dataclass
class PresentationMatrix:
    """Rows are relations among ``ncols`` generators of an R[[T]]-module."""

    field: FiniteField
    rows: List[List[SeriesT]]
    ncols: int

    def __post_init__(self):
        if any(len(row) != self.ncols for row in self.rows):
            raise ValueError(f"every relation row must have {self.ncols} entries")

    @classmethod
    def from_dict(cls, data: dict, field: FiniteField) -> "PresentationMatrix":
        rows = data.get("rows")
        if not isinstance(rows, list):
            raise ParseError("matrix JSON needs a 'rows' list of string lists")
        ncols = data.get("cols", len(rows[0]) if rows else 0)
        parsed = [[SeriesT.parse(str(x), field) for x in row] for row in rows]
        return cls(field, parsed, ncols)

    def to_dict(self) -> dict:
        return {"rows": [[str(x) for x in row] for row in self.rows], "cols": self.ncols}

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def determinant(self) -> SeriesT:
        if not self.is_square():
            raise ValueError("determinant needs a square matrix")
        return _det(self.field, self.rows)

    def expected_slopes(self) -> Optional[Tuple[int, Optional[int], int]]:
        """(rank, μ, μ*) when the matrix is square with nonzero determinant."""
        if not self.is_square():
            return None
        det = self.determinant()
        if det.is_zero():
            return None
        f0 = det.at_zero()
        return (0, None if f0.is_zero() else ord_R(f0), ord_R(det.star().at_zero()))

    def ord_T_bound(self) -> int:
        if self.is_square():
            det = self.determinant()
            if not det.is_zero():
                return det.ord_T()
        return max((x.degree_T() for row in self.rows for x in row), default=0) + 1

    def block_matrix(self, N: int) -> List[List[Poly]]:
        """The F_q[π]-relations on the generators e_c·T^s, 0 ≤ s < N, of M/T^N."""
        zero = Poly(self.field, (), PI)
        out = []
        for row in self.rows:
            for shift in range(N):
                rel = [zero] * (self.ncols * N)
                for c, entry in enumerate(row):
                    for s in range(shift, N):
                        a = entry.coefficient(s - shift)
                        if not a.is_zero():
                            rel[c * N + s] = a
                out.append(rel)
        return out


def _det(field: FiniteField, rows: List[List[SeriesT]]) -> SeriesT:
    n = len(rows)
    if n == 0:
        return SeriesT.one(field)
    if n == 1:
        return rows[0][0]
    total = SeriesT(field, ())
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in rows[1:]]
        term = rows[0][j] * _det(field, minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def direct_sum(*mats: PresentationMatrix) -> PresentationMatrix:
    field = mats[0].field
    zero = SeriesT(field, ())
    ncols = sum(m.ncols for m in mats)
    rows, offset = [], 0
    for m in mats:
        for row in m.rows:
            rows.append([zero] * offset + list(row) + [zero] * (ncols - offset - m.ncols))
        offset += m.ncols
    return PresentationMatrix(field, rows, ncols)


def pseudo_null(field: FiniteField, a: int, b: int) -> PresentationMatrix:
    """R[[T]]/(π^a, T^b), of finite length ab."""
    return PresentationMatrix(field, [[SeriesT.pi_power(field, a)], [SeriesT.T_power(field, b)]], 1)


def presentation_lengths(A: Union[PresentationMatrix, ElementaryModule], N: int) -> Lengths:
    """Lengths of M/T^N from the Smith form of its block presentation over F_q[π]."""
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    if isinstance(A, ElementaryModule):
        A = A.presentation()
    ncols = A.ncols * N
    block = A.block_matrix(N)
    if not block:
        return Lengths(ncols, None if ncols else 0, 0)
    snf = smith_normal_form(block, field=A.field, var=PI, ncols=ncols)
    rank = snf.rank()
    finite = sum(ord_R(d) for d in snf.nonzero)
    return Lengths(rank, finite if rank == 0 else None, finite)


# ----------------------------------------------------------------------
# Affine stabilization
# ----------------------------------------------------------------------

@dataclass
class SequenceFit:
    name: str
    values: List[Optional[int]]
    slope: Optional[int]
    intercept: Optional[int]
    stable_from: Optional[int]
    expected: Optional[int] = None
    passed: bool = False

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "values": ["infinite" if v is None else v for v in self.values],
            "slope": self.slope,
            "intercept": self.intercept,
            "stable_from": self.stable_from,
            "expected_slope": self.expected,
            "passed": self.passed,
        }


def fit_affine(Ns: Sequence[int], values: Sequence[Optional[int]]) -> Tuple[Optional[int], Optional[int], Optional[int]]:
    """Slope and intercept of the tail through the last two points, and where that line starts to hold."""
    if len(values) < 2 or values[-1] is None or values[-2] is None:
        return None, None, None
    slope = values[-1] - values[-2]
    intercept = values[-1] - slope * Ns[-1]
    start = len(values) - 1
    while start > 0 and values[start - 1] is not None and values[start - 1] == slope * Ns[start - 1] + intercept:
        start -= 1
    return slope, intercept, Ns[start]


@dataclass
class AlgTReport:
    name: str
    N_range: List[int]
    sequences: List[SequenceFit] = dc_field(default_factory=list)
    ord_T_bound: int = 0

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.sequences)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "N": self.N_range,
            "ord_T_bound": self.ord_T_bound,
            "sequences": [s.to_dict() for s in self.sequences],
            "passed": self.passed,
        }


def sweep(A: PresentationMatrix, N_range: Sequence[int], parallel: bool = False,
          max_workers: int = 3) -> List[Lengths]:
    """presentation_lengths for every N; results ordered by N."""
    if not parallel:
        return [presentation_lengths(A, N) for N in N_range]
    results: Dict[int, Lengths] = {}
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        future_to_N = {executor.submit(presentation_lengths, A, N): N for N in N_range}
        for future in as_completed(future_to_N):
            results[future_to_N[future]] = future.result()
    return [results[N] for N in N_range]


def verify_alg_T(A: Union[PresentationMatrix, ElementaryModule], N_range: Sequence[int],
                 expected: Optional[Tuple[int, Optional[int], int]] = None,
                 name: str = "", window_min: int = 4, parallel: bool = False,
                 max_workers: int = 3) -> AlgTReport:
    """Check that rank, length and finite-part length of M/T^N become exactly affine in N."""
    Ns = list(N_range)
    if any(b != a + 1 for a, b in zip(Ns, Ns[1:])):
        raise ValueError(f"N range must be consecutive, got {Ns}")
    if isinstance(A, ElementaryModule):
        if expected is None:
            inv = elementary_invariants(A)
            expected = (inv.rank, inv.mu if inv.rank == 0 else None, inv.mu_star)
        bound = A.ord_T_bound()
        name = name or A.describe()
        A = A.presentation()
    else:
        expected = expected if expected is not None else A.expected_slopes()
        bound = A.ord_T_bound()
    window = max(window_min, bound + 2)
    if len(Ns) < window:
        raise ValueError(f"N range of {len(Ns)} values is shorter than the required window {window}")

    data = sweep(A, Ns, parallel, max_workers)
    report = AlgTReport(name or "matrix", Ns, ord_T_bound=bound)
    columns = [
        ("rank", [x.rank for x in data], expected[0] if expected else None),
        ("length", [x.total for x in data], expected[1] if expected else None),
        ("finite", [x.finite for x in data], expected[2] if expected else None),
    ]
    for label, values, exp_slope in columns:
        slope, intercept, start = fit_affine(Ns, values)
        tail = values[-window:]
        if all(v is None for v in tail):
            passed = exp_slope is None
        else:
            passed = start is not None and start <= Ns[-window]
            if exp_slope is not None:
                passed = passed and slope == exp_slope
        report.sequences.append(SequenceFit(label, values, slope, intercept, start, exp_slope, passed))
    logger.info(f"affine growth check for {report.name}: {'pass' if report.passed else 'FAIL'}")
    return report


# ----------------------------------------------------------------------
# Stability under pseudo-isomorphism and torsion reduction
# ----------------------------------------------------------------------

def _eventually_constant(values: Sequence[int], window: int) -> bool:
    tail = values[-window:]
    return len(tail) >= 2 and len(set(tail)) == 1


def pseudo_isomorphism_stability(M: PresentationMatrix, P: PresentationMatrix,
                                 N_range: Sequence[int], window: int = 4) -> bool:
    """Finite-part lengths of M and M ⊕ P differ by an eventually constant sequence."""
    both = direct_sum(M, P)
    diffs = [presentation_lengths(both, N).finite - presentation_lengths(M, N).finite for N in N_range]
    logger.debug(f"pseudo-null differences: {diffs}")
    return _eventually_constant(diffs, window)


def torsion_reduction(E: ElementaryModule, N_range: Sequence[int], window: int = 4) -> bool:
    """Finite-part lengths of E and of its torsion part differ by an eventually constant sequence."""
    tors = E.torsion_part()
    diffs = [presentation_lengths(E, N).finite - presentation_lengths(tors, N).finite for N in N_range]
    return _eventually_constant(diffs, window)


# ----------------------------------------------------------------------
# Reference modules
# ----------------------------------------------------------------------

@dataclass
class BatteryEntry:
    name: str
    matrix: PresentationMatrix
    expected: Optional[Tuple[int, Optional[int], int]]
    bound: int


def standard_battery(field: Optional[FiniteField] = None) -> List[BatteryEntry]:
    """Elementary blocks, free summands, pseudo-null perturbations and three explicit matrices."""
    field = field or FiniteField(2)

    def s(text: str) -> SeriesT:
        return SeriesT.parse(text, field)

    def elem(rank: int, *texts: str) -> ElementaryModule:
        return ElementaryModule(field, rank, tuple(s(t) for t in texts))

    entries: List[BatteryEntry] = []

    def add_elementary(E: ElementaryModule, extra: Optional[PresentationMatrix] = None,
                       extra_bound: int = 0, label: str = ""):
        inv = elementary_invariants(E)
        expected = (inv.rank, inv.mu if inv.rank == 0 else None, inv.mu_star)
        matrix = E.presentation() if extra is None else direct_sum(E.presentation(), extra)
        entries.append(BatteryEntry(label or E.describe(), matrix, expected, max(E.ord_T_bound(), extra_bound)))

    for E in [
        elem(0, "pi + T"), elem(0, "pi"), elem(0, "pi^2"), elem(0, "T"), elem(0, "T^2*(pi^2 + T)"),
        elem(0, "pi + T", "pi"), elem(0, "pi + T^2"), elem(0, "pi^3 + T"), elem(0, "1 + T"),
        elem(1), elem(2), elem(1, "pi + T"), elem(0, "pi + T", "pi^2 + T^2"), elem(0, "T*(pi + T)"),
        elem(1, "T^2", "pi"),
    ]:
        add_elementary(E)
    for E, (a, b) in [
        (elem(0, "pi + T"), (1, 2)),
        (elem(0, "pi^2"), (2, 1)),
        (elem(1, "pi"), (1, 1)),
        (elem(0, "T*(pi + T)"), (2, 3)),
    ]:
        add_elementary(E, pseudo_null(field, a, b), b, f"{E.describe()} ⊕ R[[T]]/(π^{a}, T^{b})")

    for label, rows in [
        ("[[T, π], [0, T]]", [["T", "pi"], ["0", "T"]]),
        ("[[π, T], [T, π]]", [["pi", "T"], ["T", "pi"]]),
        ("[[π + T, 1], [0, π^2]]", [["pi + T", "1"], ["0", "pi^2"]]),
    ]:
        matrix = PresentationMatrix(field, [[s(x) for x in row] for row in rows], 2)
        entries.append(BatteryEntry(label, matrix, matrix.expected_slopes(), matrix.ord_T_bound()))
    return entries


def random_series(field: FiniteField, rng: random.Random, degree: int = 4) -> SeriesT:
    """A nonzero element of F_q[π][T] with degrees ≤ degree in each variable."""
    while True:
        coeffs = tuple(
            Poly(field, [rng.randrange(field.order) for _ in range(degree + 1)], PI)
            for _ in range(degree + 1)
        )
        f = SeriesT(field, coeffs)
        if not f.is_zero():
            return f


def closed_form_matches_oracle(f: SeriesT, N: int) -> bool:
    """length_quotient and finite_part_length against presentation_lengths on the 1×1 matrix [f]."""
    oracle = presentation_lengths(PresentationMatrix(f.field, [[f]], 1), N)
    if length_quotient(f, N) != oracle.total:
        return False
    if N >= f.ord_T() and finite_part_length(f, N) != oracle.finite:
        return False
    return True
