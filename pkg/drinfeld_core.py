"""Drinfeld F_q[t]-modules over O_K = L[θ]: twisted polynomials, the module action, the exponential."""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from sympy import factorint

from base_algebra import FiniteField, Poly, RationalFunction, parse_poly
from exceptions import CertificateNotFound, FieldError, ModuleSpecError, ParseError, ResourceGuardExceeded
from laurent import LaurentSlice, laurent_expand

logger = logging.getLogger(__name__)

DEFAULT_MAX_TERMS = 48


# ----------------------------------------------------------------------
# Twisted polynomials
# ----------------------------------------------------------------------

class SkewPoly:
    """Σ c_i τ^i with c_i in L[θ] and τ·c = c^q·τ."""

    __slots__ = ("field", "q", "coeffs")

    def __init__(self, field: FiniteField, q: int, coeffs: Sequence[Poly] = ()):
        cs = [c.lift(field) if c.field != field else c for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.field = field
        self.q = q
        self.coeffs: Tuple[Poly, ...] = tuple(cs)

    def degree(self) -> int:
        """τ-degree; -1 for zero."""
        return len(self.coeffs) - 1

    def derivative(self) -> Poly:
        """The constant τ-term ∂f."""
        return self.coeffs[0] if self.coeffs else Poly(self.field, ())

    def coefficient(self, i: int) -> Poly:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Poly(self.field, ())

    def _check(self, other: "SkewPoly") -> FiniteField:
        if self.q != other.q:
            raise FieldError(f"twisted polynomials over different q: {self.q} and {other.q}")
        if self.field.contains(other.field):
            return self.field
        if other.field.contains(self.field):
            return other.field
        raise FieldError(f"twisted polynomials over {self.field} and {other.field}")

    def __add__(self, other: "SkewPoly") -> "SkewPoly":
        field = self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return SkewPoly(field, self.q, [self.coefficient(i) + other.coefficient(i) for i in range(n)])

    def __mul__(self, other: "SkewPoly") -> "SkewPoly":
        return skew_mul(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, SkewPoly) and self.q == other.q and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.q, self.coeffs))

    def __str__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            coeff = str(c) if len(c.coeffs) == 1 or i == 0 else f"({c})"
            if i == 0:
                terms.append(coeff)
            else:
                tau = "τ" if i == 1 else f"τ^{i}"
                terms.append(tau if c.is_one() else f"{coeff}*{tau}")
        return " + ".join(terms) if terms else "0"

    __repr__ = __str__


def skew_mul(f: SkewPoly, g: SkewPoly) -> SkewPoly:
    """(a τ^i)(b τ^j) = a·b^{q^i} τ^{i+j}."""
    field = f._check(g)
    if not f.coeffs or not g.coeffs:
        return SkewPoly(field, f.q)
    out = [Poly(field, ()) for _ in range(len(f.coeffs) + len(g.coeffs) - 1)]
    for i, a in enumerate(f.coeffs):
        if a.is_zero():
            continue
        power = f.q ** i
        for j, b in enumerate(g.coeffs):
            if not b.is_zero():
                out[i + j] = out[i + j] + a * b.frobenius(power)
    return SkewPoly(field, f.q, out)


# ----------------------------------------------------------------------
# Drinfeld modules
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class DrinfeldModule:
    """φ(t) = θ + a_1 τ + … + a_r τ^r with a_j in F_q[θ]."""

    field: FiniteField
    coefficients: Tuple[Poly, ...]
    label: str = ""

    def __post_init__(self):
        cs = list(self.coefficients)
        while cs and cs[-1].is_zero():
            cs.pop()
        for c in cs:
            if not self.field.contains(c.field):
                raise ModuleSpecError(f"coefficient {c} does not lie in F_q[θ] for q = {self.field.order}")
        object.__setattr__(self, "coefficients", tuple(c.lift(self.field).with_var("θ") for c in cs))

    @property
    def q(self) -> int:
        return self.field.order

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def rank(self) -> int:
        return len(self.coefficients)

    @property
    def c(self) -> int:
        """max(0, max_j deg a_j), the growth constant of the exponential recursion."""
        return max([0] + [a.degree() for a in self.coefficients])

    @property
    def is_carlitz(self) -> bool:
        return self.rank == 1 and self.coefficients[0].is_one()

    def a(self, j: int) -> Poly:
        return self.coefficients[j - 1] if 1 <= j <= self.rank else Poly(self.field, ())

    def phi_t(self) -> SkewPoly:
        theta = Poly.x(self.field, "θ")
        return SkewPoly(self.field, self.q, (theta,) + self.coefficients)

    def __str__(self) -> str:
        return f"φ(t) = {self.phi_t()} over F_{self.q}"

    # -- module specs -------------------------------------------------------

    @classmethod
    def from_spec(cls, data: dict) -> "DrinfeldModule":
        """Build a module from ``{"q": 2, "field_modulus": "x^2+x+1", "phi_t": ["theta", ...]}``."""
        if not isinstance(data, dict) or "q" not in data or "phi_t" not in data:
            raise ModuleSpecError("module spec needs the keys 'q' and 'phi_t'")
        try:
            q = int(data["q"])
        except (TypeError, ValueError) as e:
            raise ModuleSpecError(f"q must be an integer, got {data['q']!r}") from e
        factors = factorint(q) if q > 1 else {}
        if len(factors) != 1:
            raise ModuleSpecError(f"q must be a prime power, got {q}")
        (p, e), = factors.items()
        try:
            fq = FiniteField(p, e, data.get("field_modulus")) if e > 1 else FiniteField(p)
        except (FieldError, ParseError) as err:
            raise ModuleSpecError(f"invalid field modulus: {err}") from err
        label = str(data.get("label", ""))
        phi_t = data["phi_t"]
        if phi_t == "carlitz":
            return StandardModules.carlitz_over(fq, label or "carlitz")
        if not isinstance(phi_t, list) or not phi_t:
            raise ModuleSpecError("phi_t must be a non-empty list of polynomial strings or 'carlitz'")
        try:
            terms = [parse_poly(str(s), fq, "θ") for s in phi_t]
        except ParseError as err:
            raise ModuleSpecError(f"invalid phi_t entry: {err}") from err
        if terms[0] != Poly.x(fq, "θ"):
            raise ModuleSpecError(f"the constant τ-term of phi_t must be theta, got {terms[0]}")
        return cls(fq, tuple(terms[1:]), label)

    def to_spec(self) -> dict:
        spec = {"q": self.q, "phi_t": ["theta"] + [str(a) for a in self.coefficients]}
        if not self.field.is_prime:
            spec["field_modulus"] = str(Poly(self.field.base, self.field.modulus, "x"))
        if self.label:
            spec["label"] = self.label
        return spec


class StandardModules:
    """Factory for the modules used throughout the examples and checks."""

    @staticmethod
    def carlitz_over(fq: FiniteField, label: str = "carlitz") -> DrinfeldModule:
        return DrinfeldModule(fq, (Poly.constant(fq, 1),), label)

    @staticmethod
    def carlitz(q: int) -> DrinfeldModule:
        return DrinfeldModule.from_spec({"q": q, "phi_t": "carlitz"})

    @staticmethod
    def trivial(q: int) -> DrinfeldModule:
        """Rank 0: φ(t) = θ."""
        return DrinfeldModule.from_spec({"q": q, "phi_t": ["theta"], "label": "trivial"})

    @staticmethod
    def regression() -> DrinfeldModule:
        """φ(t) = θ + θ³τ over F_2."""
        return DrinfeldModule.from_spec({"q": 2, "phi_t": ["theta", "theta^3"], "label": "regression"})


def drinfeld_rank(E: DrinfeldModule) -> int:
    return E.rank


def phi(E: DrinfeldModule, a: Union[Poly, int]) -> SkewPoly:
    """φ_E(a) for a in F_q[t], by Horner evaluation in t."""
    if isinstance(a, int):
        a = Poly.constant(E.field, a, "t")
    pt = E.phi_t()
    result = SkewPoly(E.field, E.q)
    for c in reversed(a.coeffs):
        result = skew_mul(result, pt) + SkewPoly(E.field, E.q, (Poly.constant(E.field, c),))
    return result


def apply_t(E: DrinfeldModule, x):
    """φ(t)(x) = θx + Σ a_j x^{q^j}."""
    theta = Poly.x(E.field, "θ")
    y = x.mul_poly(theta)
    for j, a in enumerate(E.coefficients, start=1):
        if not a.is_zero():
            y = y + x.frobenius(E.q ** j).mul_poly(a)
    return y


def drinfeld_apply(E: DrinfeldModule, a: Union[Poly, int], x):
    """a·x in E(R) for any L[θ]-algebra element offering +, frobenius and mul_poly."""
    if isinstance(a, int):
        a = Poly.constant(E.field, a, "t")
    if a.is_zero():
        return x.mul_poly(Poly(E.field, ()))
    y = None
    for c in reversed(a.coeffs):
        term = x.mul_poly(Poly.constant(E.field, c))
        y = term if y is None else apply_t(E, y) + term
    return y


def known_lattice_rank(E: DrinfeldModule) -> Optional[int]:
    """r_E(K) where it has a closed form: Carlitz modules and rank 0."""
    if E.rank == 0:
        return 0
    if E.is_carlitz:
        return 1 if E.q == 2 else 0
    return None


def carlitz_lattice_rank(E: DrinfeldModule, L: Optional[FiniteField] = None) -> int:
    """r_C(K) for K = L(θ): 1 exactly when (−θ)^{1/(q−1)} lies in L((1/θ)), i.e. q = 2."""
    if not E.is_carlitz:
        raise ModuleSpecError(f"lattice rank is only available for the Carlitz module, not {E}")
    if L is not None and not L.contains(E.field):
        raise FieldError(f"{L} does not contain F_{E.q}")
    return 1 if E.q == 2 else 0


# ----------------------------------------------------------------------
# Residues in L[θ]/f
# ----------------------------------------------------------------------

class Residue:
    """x mod f in L[θ]/f, the carrier of E(O_K/f)."""

    __slots__ = ("value", "modulus")

    def __init__(self, value: Poly, modulus: Poly):
        if modulus.is_zero():
            raise ValueError("modulus must be nonzero")
        self.modulus = modulus.monic()
        self.value = value % self.modulus

    def __add__(self, other: "Residue") -> "Residue":
        return Residue(self.value + other.value, self.modulus)

    def __neg__(self) -> "Residue":
        return Residue(-self.value, self.modulus)

    def __sub__(self, other: "Residue") -> "Residue":
        return self + (-other)

    def frobenius(self, power: int) -> "Residue":
        return Residue(self.value.frobenius(power), self.modulus)

    def mul_poly(self, a: Poly) -> "Residue":
        return Residue(self.value * a, self.modulus)

    def is_zero(self) -> bool:
        return self.value.is_zero()

    def __eq__(self, other) -> bool:
        return isinstance(other, Residue) and self.modulus == other.modulus and self.value == other.value

    def __hash__(self) -> int:
        return hash((self.value, self.modulus))

    def __repr__(self) -> str:
        return f"({self.value} mod {self.modulus})"


# ----------------------------------------------------------------------
# The exponential
# ----------------------------------------------------------------------

@dataclass
class TailCertificate:
    window_index: int
    constant: int
    window_ok: bool
    marginal_ok: bool
    doublings: int = 0

    @property
    def certified(self) -> bool:
        return self.window_ok and self.marginal_ok


class ExpData:
    """Coefficients e_i of exp_E = Σ e_i X^{q^i}, computed on demand.

    e_0 = 1 and e_i·(θ^{q^i} − θ) = Σ_{j ≤ min(i, r)} a_j e_{i−j}^{q^j}.
    """

    def __init__(self, module: DrinfeldModule, max_terms: int = DEFAULT_MAX_TERMS):
        self.module = module
        self.max_terms = max_terms
        fq = module.field
        self._coeffs: List[RationalFunction] = [RationalFunction(Poly.constant(fq, 1))]
        self._bounds: List[Optional[int]] = [0]
        self._expansions: Dict[Tuple[int, int], LaurentSlice] = {}
        self._lock = threading.RLock()
        self.threshold: Optional[int] = None
        self.certificate: Optional[TailCertificate] = None

    @property
    def computed(self) -> int:
        return len(self._coeffs) - 1

    def coefficient(self, i: int) -> RationalFunction:
        if i > self.max_terms:
            raise ResourceGuardExceeded(f"exponential coefficient e_{i} exceeds the limit of {self.max_terms} terms")
        with self._lock:
            while len(self._coeffs) <= i:
                self._coeffs.append(self._next_coefficient())
            return self._coeffs[i]

    def coefficients(self, count: int) -> List[RationalFunction]:
        """e_1..e_count; empty for rank 0."""
        if self.module.rank == 0:
            return []
        return [self.coefficient(i) for i in range(1, count + 1)]

    def _next_coefficient(self) -> RationalFunction:
        E = self.module
        fq = E.field
        i = len(self._coeffs)
        q = E.q
        total = RationalFunction(Poly(fq, ()))
        for j in range(1, min(i, E.rank) + 1):
            a = E.a(j)
            prev = self._coeffs[i - j]
            if a.is_zero() or prev.is_zero():
                continue
            total = total + prev.frobenius(q ** j).mul_poly(a)
        denom = Poly.monomial(fq, 1, q ** i) - Poly.x(fq)
        e_i = total / RationalFunction(denom)
        logger.debug(f"e_{i} computed, valuation {e_i.valuation()}")
        return e_i

    def valuation(self, i: int) -> Optional[int]:
        """v_∞(e_i); None when e_i = 0."""
        return self.coefficient(i).valuation()

    def lower_bound(self, i: int) -> Optional[int]:
        """Lower bound for v(e_i) from the recursion alone; None stands for +∞."""
        E = self.module
        with self._lock:
            while len(self._bounds) <= i:
                k = len(self._bounds)
                best = None
                for j in range(1, min(k, E.rank) + 1):
                    a, prev = E.a(j), self._bounds[k - j]
                    if a.is_zero() or prev is None:
                        continue
                    cand = E.q ** j * prev - a.degree()
                    best = cand if best is None else min(best, cand)
                self._bounds.append(None if best is None else E.q ** k + best)
            return self._bounds[i]

    def terms_needed(self, w: int, hi: int) -> int:
        """N such that e_i·(c u^w)^{q^i} only meets exponents above hi for every i > N."""
        E = self.module
        r, q = E.rank, E.q
        if r == 0:
            return 0
        for N in range(max(r, 1), self.max_terms + 1):
            ratios = [Fraction(b, q ** k) for k in range(N - r + 1, N + 1)
                      if (b := self.lower_bound(k)) is not None]
            if not ratios:
                return N
            rho = min(ratios) + w
            if rho > 0 and rho * q ** (N + 1) > hi and q ** (N + 1) >= E.c:
                return N
        raise ResourceGuardExceeded(f"exp(c·u^{w}) up to u^{hi} needs more than {self.max_terms} terms")

    def expansion(self, i: int, hi: int) -> LaurentSlice:
        """e_i over F_q, exact from its valuation up to u^hi."""
        key = (i, hi)
        with self._lock:
            cached = self._expansions.get(key)
        if cached is not None:
            return cached
        e_i = self.coefficient(i)
        v = e_i.valuation()
        lo = hi + 1 if v is None or v > hi else v
        if lo > hi:
            result = LaurentSlice.zero(self.module.field, hi + 1, hi)
        else:
            result = laurent_expand(e_i, lo, hi)
        with self._lock:
            self._expansions[key] = result
        return result


def exp_coeffs(E: DrinfeldModule, count: int, max_terms: int = DEFAULT_MAX_TERMS) -> ExpData:
    """ExpData with e_1..e_count computed eagerly."""
    if count < 1:
        raise ValueError(f"need at least one coefficient, got {count}")
    data = ExpData(E, max(max_terms, count))
    data.coefficients(count)
    return data


def exp_threshold(E: DrinfeldModule, exp: ExpData, index: int) -> int:
    """Threshold M from the window (index − r, index]; raises CertificateNotFound when it fails."""
    r, q, c = E.rank, E.q, E.c
    if r == 0:
        exp.threshold = 1
        exp.certificate = TailCertificate(0, c, True, True)
        return 1
    if index < r:
        raise CertificateNotFound(f"window index {index} is below the rank {r}")
    window_ok = all(
        (v := exp.valuation(i)) is None or v >= 0 for i in range(index - r + 1, index + 1)
    )
    marginal_ok = q ** (index + 1) >= c
    certificate = TailCertificate(index, c, window_ok, marginal_ok)
    if not certificate.certified:
        raise CertificateNotFound(
            f"tail certificate fails at index {index} (window {window_ok}, q^(I+1) >= c {marginal_ok})"
        )
    M = 1
    for i in range(1, index + 1):
        v = exp.valuation(i)
        if v is not None and v <= 0:
            M = max(M, (-v) // (q ** i - 1) + 1)
    exp.threshold = M
    exp.certificate = certificate
    logger.info(f"Exponential threshold M = {M} certified at window index {index}")
    return M


def certified_exp(E: DrinfeldModule, max_terms: int = DEFAULT_MAX_TERMS) -> ExpData:
    """ExpData with a certified threshold: scan the window index upward, doubling on the marginal case."""
    exp = ExpData(E, max_terms)
    if E.rank == 0:
        exp_threshold(E, exp, 0)
        return exp
    index, doublings = E.rank, 0
    while index <= max_terms:
        try:
            exp_threshold(E, exp, index)
            exp.certificate.doublings = doublings
            return exp
        except CertificateNotFound:
            window_ok = all(
                (v := exp.valuation(i)) is None or v >= 0 for i in range(index - E.rank + 1, index + 1)
            )
            if window_ok:
                index, doublings = 2 * index, doublings + 1
            else:
                index += 1
    raise CertificateNotFound(f"no tail certificate within {max_terms} exponential coefficients for {E}")


def exp_monomial(exp: ExpData, L: FiniteField, c: int, w: int, hi: int) -> LaurentSlice:
    """exp_E(c·u^w) over L, exact up to u^hi and zero below its window."""
    E = exp.module
    result = LaurentSlice.zero(L, hi + 1, hi)
    if c == 0:
        return result
    if E.rank == 0:
        return LaurentSlice.monomial(L, c, w, hi)
    N = exp.terms_needed(w, hi)
    for i in range(N + 1):
        power = E.q ** i
        shift = w * power
        if exp.coefficient(i).is_zero():
            continue
        term = exp.expansion(i, hi - shift)
        result = result + term.lift(L).scale(L.pow(c, power)).shift(shift)
    return result


def exp_laurent(exp: ExpData, x: LaurentSlice, hi: int) -> LaurentSlice:
    """exp_E of the Laurent polynomial carried by x, exact up to u^hi."""
    if not x.floor:
        raise ValueError("exp_laurent needs a Laurent polynomial known from below")
    result = LaurentSlice.zero(x.field, hi + 1, hi)
    for k, c in zip(range(x.lo, x.hi + 1), x.coeffs):
        if c:
            result = result + exp_monomial(exp, x.field, c, k, hi)
    return result


def exp_poly(exp: ExpData, L: FiniteField, a: Poly, hi: int) -> LaurentSlice:
    """exp_E(a) for a in L[θ], exact up to u^hi."""
    result = LaurentSlice.zero(L, hi + 1, hi)
    for j, c in enumerate(a.coeffs):
        if c:
            result = result + exp_monomial(exp, L, c, -j, hi)
    return result
