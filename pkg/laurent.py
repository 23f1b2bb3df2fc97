"""Exact Laurent windows in u = 1/θ over a finite field."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

from base_algebra import FiniteField, Poly, RationalFunction
from exceptions import PrecisionError


@dataclass(frozen=True)
class LaurentSlice:
    """Coefficients of u^lo .. u^hi of an element of L((u)).

    ``floor`` records that every coefficient below ``lo`` is zero, so the slice
    determines the element exactly up to u^hi.
    """

    field: FiniteField
    lo: int
    hi: int
    coeffs: Tuple[int, ...]
    floor: bool = False

    def __post_init__(self):
        if len(self.coeffs) != max(0, self.hi - self.lo + 1):
            raise ValueError(f"window [{self.lo}, {self.hi}] does not match {len(self.coeffs)} coefficients")

    @classmethod
    def zero(cls, field: FiniteField, lo: int, hi: int) -> "LaurentSlice":
        return cls(field, lo, hi, (0,) * max(0, hi - lo + 1), True)

    @classmethod
    def monomial(cls, field: FiniteField, c: int, w: int, hi: int) -> "LaurentSlice":
        """c·u^w, exact up to u^hi."""
        lo = min(w, hi + 1)
        coeffs = [0] * (hi - lo + 1)
        if w <= hi:
            coeffs[w - lo] = c
        return cls(field, lo, hi, tuple(coeffs), True)

    @classmethod
    def from_poly(cls, poly: Poly, hi: int, field: Optional[FiniteField] = None) -> "LaurentSlice":
        """A polynomial in θ read as a Laurent polynomial in u."""
        field = field or poly.field
        lo = min(-poly.degree(), hi + 1) if not poly.is_zero() else min(0, hi + 1)
        coeffs = [0] * (hi - lo + 1)
        for s, c in enumerate(poly.coeffs):
            if c and lo <= -s <= hi:
                coeffs[-s - lo] = c
        return cls(field, lo, hi, tuple(coeffs), True)

    # -- access ---------------------------------------------------------

    def coefficient(self, k: int) -> int:
        if self.lo <= k <= self.hi:
            return self.coeffs[k - self.lo]
        if k < self.lo and self.floor:
            return 0
        raise PrecisionError(f"coefficient of u^{k} is outside the exact window [{self.lo}, {self.hi}]")

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def valuation(self) -> Optional[int]:
        """Lowest exponent with a nonzero coefficient inside the window."""
        for k, c in enumerate(self.coeffs):
            if c:
                return self.lo + k
        return None

    def restrict(self, lo: int, hi: int) -> "LaurentSlice":
        if hi > self.hi or (lo < self.lo and not self.floor):
            raise PrecisionError(f"[{lo}, {hi}] is not inside the exact window [{self.lo}, {self.hi}]")
        coeffs = tuple(self.coefficient(k) for k in range(lo, hi + 1))
        floor = self.floor and all(self.coefficient(k) == 0 for k in range(self.lo, lo))
        return LaurentSlice(self.field, lo, hi, coeffs, floor)

    def lift(self, field: FiniteField) -> "LaurentSlice":
        if field == self.field:
            return self
        return LaurentSlice(field, self.lo, self.hi, self.coeffs, self.floor)

    # -- linear operations --------------------------------------------------

    def __add__(self, other: "LaurentSlice") -> "LaurentSlice":
        field = self.field if self.field.contains(other.field) else other.field
        hi = min(self.hi, other.hi)
        if self.floor and other.floor:
            lo, floor = min(self.lo, other.lo), True
        elif self.floor:
            lo, floor = other.lo, False
        elif other.floor:
            lo, floor = self.lo, False
        else:
            lo, floor = max(self.lo, other.lo), False
        lo = min(lo, hi + 1)
        coeffs = tuple(field.add(self.coefficient(k), other.coefficient(k)) for k in range(lo, hi + 1))
        return LaurentSlice(field, lo, hi, coeffs, floor)

    def __neg__(self) -> "LaurentSlice":
        f = self.field
        return LaurentSlice(f, self.lo, self.hi, tuple(f.neg(c) for c in self.coeffs), self.floor)

    def __sub__(self, other: "LaurentSlice") -> "LaurentSlice":
        return self + (-other)

    def scale(self, c: int) -> "LaurentSlice":
        f = self.field
        return LaurentSlice(f, self.lo, self.hi, tuple(f.mul(c, x) for x in self.coeffs), self.floor)

    def shift(self, n: int) -> "LaurentSlice":
        """Multiply by u^n."""
        return LaurentSlice(self.field, self.lo + n, self.hi + n, self.coeffs, self.floor)

    # -- ring operations --------------------------------------------------

    def frobenius(self, power: int) -> "LaurentSlice":
        """x^power for power a power of p; exact on [power·lo, power·(hi+1) − 1]."""
        f = self.field
        lo, hi = power * self.lo, power * (self.hi + 1) - 1
        coeffs = [0] * (hi - lo + 1)
        for k, c in enumerate(self.coeffs):
            if c:
                coeffs[power * k] = f.pow(c, power)
        return LaurentSlice(f, lo, hi, tuple(coeffs), self.floor)

    def mul_poly(self, a: Poly) -> "LaurentSlice":
        """Multiply by a polynomial in θ, i.e. by Σ a_s u^{-s}."""
        f = self.field
        if a.is_zero():
            return LaurentSlice.zero(f, self.lo, self.hi)
        m = a.degree()
        hi = self.hi - m
        lo = self.lo - m if self.floor else self.lo
        lo = min(lo, hi + 1)
        coeffs = []
        for k in range(lo, hi + 1):
            acc = 0
            for s, c in enumerate(a.coeffs):
                if c:
                    x = self.coefficient(k + s)
                    if x:
                        acc = f.add(acc, f.mul(c, x))
            coeffs.append(acc)
        return LaurentSlice(f, lo, hi, tuple(coeffs), self.floor)

    def __mul__(self, other: "LaurentSlice") -> "LaurentSlice":
        if not (self.floor and other.floor):
            raise PrecisionError("products need slices known to be zero below their windows")
        f = self.field if self.field.contains(other.field) else other.field
        lo = self.lo + other.lo
        hi = min(self.hi + other.lo, other.hi + self.lo)
        coeffs = [0] * max(0, hi - lo + 1)
        for i, x in enumerate(self.coeffs):
            if x == 0:
                continue
            for j, y in enumerate(other.coeffs):
                k = i + j
                if k >= len(coeffs):
                    break
                if y:
                    coeffs[k] = f.add(coeffs[k], f.mul(x, y))
        return LaurentSlice(f, lo, hi, tuple(coeffs), True)

    # -- projections ------------------------------------------------------

    def polynomial_part(self, var: str = "θ") -> Poly:
        """The θ-polynomial formed by the exponents ≤ 0."""
        if not self.floor:
            raise PrecisionError("polynomial part needs a slice that is exact from below")
        if self.hi < 0:
            raise PrecisionError(f"window ends at u^{self.hi}, before the constant term")
        top = max(0, -self.lo)
        return Poly(self.field, [self.coefficient(-s) for s in range(top + 1)], var)

    def to_vector(self, lo: int, hi: int, over: FiniteField) -> List[int]:
        """Coordinates over ``over`` of the coefficients of u^lo .. u^hi, ordered by (exponent, basis)."""
        out: List[int] = []
        for k in range(lo, hi + 1):
            out.extend(self.field.coordinates(self.coefficient(k), over))
        return out

    def __str__(self) -> str:
        terms = [
            self.field.format(c) if k == 0 else (f"u^{k}" if c == 1 else f"{self.field.format(c)}*u^{k}")
            for k, c in zip(range(self.lo, self.hi + 1), self.coeffs) if c
        ]
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(u^{self.hi + 1})"


def _series_quotient(field: FiniteField, num: Sequence[int], den: Sequence[int], length: int) -> List[int]:
    """First ``length`` coefficients of num/den as power series, den[0] = 1."""
    out: List[int] = []
    for k in range(length):
        acc = num[k] if k < len(num) else 0
        for i in range(1, min(k, len(den) - 1) + 1):
            d = den[i]
            if d:
                s = out[k - i]
                if s:
                    acc = field.sub(acc, field.mul(d, s))
        out.append(acc)
    return out


def laurent_expand(x: Union[RationalFunction, Poly], lo: int, hi: int,
                   field: Optional[FiniteField] = None) -> LaurentSlice:
    """Exact u-adic expansion of x on the window [lo, hi]."""
    if lo > hi:
        raise ValueError(f"empty window [{lo}, {hi}]")
    if isinstance(x, Poly):
        x = RationalFunction(x)
    field = field or x.field
    if x.is_zero():
        return LaurentSlice.zero(field, lo, hi)
    v = x.valuation()
    num_rev = list(reversed(x.num.coeffs))
    den_rev = list(reversed(x.den.coeffs))
    length = hi - v + 1
    series = _series_quotient(x.field, num_rev, den_rev, length) if length > 0 else []
    coeffs = tuple(
        series[k - v] if 0 <= k - v < len(series) else 0
        for k in range(lo, hi + 1)
    )
    return LaurentSlice(field, lo, hi, coeffs, lo <= v)
