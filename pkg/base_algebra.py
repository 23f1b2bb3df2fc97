"""Exact arithmetic over finite fields: fields, polynomials, rational functions."""

from __future__ import annotations

import logging
from functools import cached_property, lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from sympy import Rational, Symbol, fraction, together
from sympy import Poly as SympyPoly
from sympy.ntheory import isprime, primefactors
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication,
    parse_expr,
    standard_transformations,
)
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor, gf_irreducible_p

from exceptions import FieldError, ParseError, ResourceGuardExceeded

logger = logging.getLogger(__name__)

# Hard ceiling for log/exp tables; the configurable guard sits well below it.
TABLE_LIMIT = 1 << 20
ENUMERATION_LIMIT = 1 << 16


class FiniteField:
    """A finite field whose elements are the integers ``0 .. order - 1``.

    An element is written in base ``base.order``: its digits are its coordinates
    over the base field.  Absolute fields ``FiniteField(p, e)`` sit over the prime
    field, relative fields come from :meth:`extension`.  Because the base field is
    the set of one-digit integers, ``F_q ⊂ L`` is the identity on integers below q.
    """

    def __init__(self, p: int, e: int = 1, modulus=None):
        if not isprime(p):
            raise FieldError(f"characteristic must be prime, got {p}")
        if e < 1:
            raise FieldError(f"degree must be positive, got {e}")
        self.p = p
        if e == 1:
            self.base = None
            self.rel_degree = 1
            self.order = p
            self.modulus = None
        else:
            prime = FiniteField(p)
            self._init_relative(prime, e, modulus)
        self.e = e

    @classmethod
    def _relative(cls, base: "FiniteField", degree: int, modulus=None) -> "FiniteField":
        field = cls.__new__(cls)
        field.p = base.p
        field._init_relative(base, degree, modulus)
        field.e = base.e * degree
        return field

    def _init_relative(self, base: "FiniteField", degree: int, modulus) -> None:
        self.base = base
        self.rel_degree = degree
        self.order = base.order ** degree
        if modulus is None:
            poly = least_irreducible(base, degree, var="x")
        elif isinstance(modulus, str):
            poly = parse_poly(modulus, base, var="x")
        elif isinstance(modulus, Poly):
            poly = modulus
        else:
            poly = Poly(base, modulus, var="x")
        if poly.degree() != degree or not is_irreducible(poly):
            raise FieldError(f"modulus {poly} is not an irreducible polynomial of degree {degree}")
        self.modulus = poly.monic().coeffs

    # ------------------------------------------------------------------
    # Structure
    # ------------------------------------------------------------------

    @property
    def is_prime(self) -> bool:
        return self.base is None

    @property
    def prime_field(self) -> "FiniteField":
        return self if self.base is None else self.base.prime_field

    @property
    def key(self) -> tuple:
        return (self.p, self.order, self.modulus, None if self.base is None else self.base.key)

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteField) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        if self.base is None:
            return f"GF({self.p})"
        if self.base.is_prime:
            return f"GF({self.p}^{self.rel_degree})"
        return f"GF({self.base.order}^{self.rel_degree})"

    def contains(self, other: "FiniteField") -> bool:
        """True when ``other`` is this field or lies in its base chain."""
        if other == self:
            return True
        if other.is_prime and other.p == self.p:
            return True
        return self.base is not None and self.base.contains(other)

    def extension(self, degree: int, modulus=None) -> "FiniteField":
        """Relative extension of the given degree; degree 1 returns the field itself."""
        if degree == 1 and modulus is None:
            return self
        return FiniteField._relative(self, degree, modulus)

    def degree_over(self, sub: "FiniteField") -> int:
        if sub == self:
            return 1
        if self.base is not None and sub == self.base:
            return self.rel_degree
        raise FieldError(f"{sub} is not the field or base field of {self}")

    @property
    def generator(self) -> int:
        """Class of x modulo the defining polynomial."""
        if self.is_prime:
            raise FieldError(f"{self} has no generator over a smaller field")
        return self.base.order

    def elements(self) -> Iterator[int]:
        return iter(range(self.order))

    # ------------------------------------------------------------------
    # Coordinates
    # ------------------------------------------------------------------

    def digits(self, a: int) -> List[int]:
        if self.base is None:
            return [a]
        b = self.base.order
        out = []
        for _ in range(self.rel_degree):
            a, r = divmod(a, b)
            out.append(r)
        return out

    def from_digits(self, digits: Sequence[int]) -> int:
        if self.base is None:
            return digits[0] if digits else 0
        b = self.base.order
        value = 0
        for d in reversed(digits):
            value = value * b + d
        return value

    def coordinates(self, a: int, over: "FiniteField") -> List[int]:
        if over == self:
            return [a]
        if self.base is not None and over == self.base:
            return self.digits(a)
        raise FieldError(f"cannot take coordinates of {self} over {over}")

    def from_coordinates(self, coords: Sequence[int], over: "FiniteField") -> int:
        if over == self:
            return coords[0]
        return self.from_digits(coords)

    def basis(self, over: "FiniteField") -> List[int]:
        if over == self:
            return [1]
        if self.base is not None and over == self.base:
            return [self.base.order ** b for b in range(self.rel_degree)]
        raise FieldError(f"{over} is not the field or base field of {self}")

    # ------------------------------------------------------------------
    # Arithmetic
    # ------------------------------------------------------------------

    def add(self, a: int, b: int) -> int:
        p = self.p
        if p == 2:
            return a ^ b
        if self.base is None:
            return (a + b) % p
        out, place = 0, 1
        while a or b:
            a, x = divmod(a, p)
            b, y = divmod(b, p)
            out += ((x + y) % p) * place
            place *= p
        return out

    def neg(self, a: int) -> int:
        p = self.p
        if p == 2 or a == 0:
            return a
        if self.base is None:
            return (-a) % p
        out, place = 0, 1
        while a:
            a, x = divmod(a, p)
            out += ((-x) % p) * place
            place *= p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self.base is None:
            return (a * b) % self.p
        exp, log = self._tables
        return exp[log[a] + log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"zero has no inverse in {self}")
        if self.base is None:
            return pow(a, self.p - 2, self.p)
        exp, log = self._tables
        return exp[(self.order - 1 - log[a]) % (self.order - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if a == 0:
            if n < 0:
                raise ZeroDivisionError(f"zero has no inverse in {self}")
            return 1 if n == 0 else 0
        if self.base is None:
            return pow(a, n % (self.p - 1), self.p)
        exp, log = self._tables
        return exp[(log[a] * n) % (self.order - 1)]

    def frobenius(self, a: int, k: int = 1) -> int:
        """a^(p^k)."""
        return self.pow(a, self.p ** k)

    def from_int(self, n: int) -> int:
        """Image of an integer in the prime field."""
        return n % self.p

    def trace(self, a: int, sub_order: int) -> int:
        """Tr to the subfield with ``sub_order`` elements."""
        m = _log_exact(self.order, sub_order)
        total, c = 0, a
        for _ in range(m):
            total = self.add(total, c)
            c = self.pow(c, sub_order)
        return total

    def format(self, a: int) -> str:
        """Prime-field elements as integers, F_q elements as polynomials in w, others as {code}."""
        if a < self.p:
            return str(a)
        if self.base is not None and self.base.is_prime:
            terms = []
            for k in range(self.rel_degree - 1, -1, -1):
                d = self.digits(a)[k]
                if d == 0:
                    continue
                power = "" if k == 0 else ("w" if k == 1 else f"w^{k}")
                terms.append(str(d) if k == 0 else (power if d == 1 else f"{d}*{power}"))
            return "(" + " + ".join(terms) + ")"
        return "{" + str(a) + "}"

    # ------------------------------------------------------------------
    # Log/exp tables
    # ------------------------------------------------------------------

    @cached_property
    def _tables(self) -> Tuple[List[int], List[int]]:
        if self.order > TABLE_LIMIT:
            raise ResourceGuardExceeded(f"field {self} of order {self.order} is too large for tables")
        n = self.order - 1
        primes = primefactors(n)
        g = next(
            cand for cand in range(2, self.order)
            if all(self._slow_pow(cand, n // r) != 1 for r in primes)
        )
        exp = [1] * (2 * n)
        log = [0] * self.order
        value = 1
        for k in range(n):
            exp[k] = value
            log[value] = k
            value = self._mulmod(value, g)
        for k in range(n, 2 * n):
            exp[k] = exp[k - n]
        logger.debug(f"Built tables for {self} with primitive element {g}")
        return exp, log

    def _mulmod(self, a: int, b: int) -> int:
        base = self.base
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.rel_degree - 1)
        for i, x in enumerate(da):
            if x == 0:
                continue
            for j, y in enumerate(db):
                if y:
                    prod[i + j] = base.add(prod[i + j], base.mul(x, y))
        mod = self.modulus
        d = self.rel_degree
        for k in range(len(prod) - 1, d - 1, -1):
            c = prod[k]
            if c == 0:
                continue
            for i in range(d):
                if mod[i]:
                    prod[k - d + i] = base.sub(prod[k - d + i], base.mul(c, mod[i]))
            prod[k] = 0
        return self.from_digits(prod[:d])

    def _slow_pow(self, a: int, n: int) -> int:
        result, base = 1, a
        while n:
            if n & 1:
                result = self._mulmod(result, base)
            base = self._mulmod(base, base)
            n >>= 1
        return result


def _log_exact(order: int, sub_order: int) -> int:
    m, value = 0, 1
    while value < order:
        value *= sub_order
        m += 1
    if value != order or sub_order < 2:
        raise FieldError(f"{sub_order} is not a subfield order of a field with {order} elements")
    return m


# ----------------------------------------------------------------------
# Polynomials
# ----------------------------------------------------------------------

class Poly:
    """Immutable univariate polynomial, coefficients stored low to high."""

    __slots__ = ("field", "coeffs", "var")

    def __init__(self, field: FiniteField, coeffs: Sequence[int] = (), var: str = "θ"):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)
        self.var = var

    @classmethod
    def constant(cls, field: FiniteField, c: int, var: str = "θ") -> "Poly":
        return cls(field, (c,), var)

    @classmethod
    def monomial(cls, field: FiniteField, c: int, n: int, var: str = "θ") -> "Poly":
        return cls(field, [0] * n + [c], var)

    @classmethod
    def x(cls, field: FiniteField, var: str = "θ") -> "Poly":
        return cls(field, (0, 1), var)

    # -- basic queries --------------------------------------------------

    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_one(self) -> bool:
        return self.coeffs == (1,)

    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def coefficient(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def order_at_zero(self) -> Optional[int]:
        """Index of the lowest nonzero coefficient; None for zero."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return None

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        if self.coeffs != other.coeffs or self.field != other.field:
            return False
        return self.var == other.var or len(self.coeffs) <= 1

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({self}, {self.field})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for n in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[n]
            if c == 0:
                continue
            power = "" if n == 0 else (self.var if n == 1 else f"{self.var}^{n}")
            if n == 0:
                terms.append(self.field.format(c))
            elif c == 1:
                terms.append(power)
            else:
                terms.append(f"{self.field.format(c)}*{power}")
        return " + ".join(terms)

    # -- coercion -----------------------------------------------------

    def lift(self, field: FiniteField) -> "Poly":
        if field == self.field:
            return self
        if not field.contains(self.field):
            raise FieldError(f"{self.field} does not embed in {field}")
        return Poly(field, self.coeffs, self.var)

    def with_var(self, var: str) -> "Poly":
        return Poly(self.field, self.coeffs, var)

    def _common(self, other: "Poly") -> Tuple["Poly", "Poly"]:
        if self.var != other.var and self.degree() > 0 and other.degree() > 0:
            raise FieldError(f"variable mismatch: {self.var} vs {other.var}")
        if self.field == other.field:
            a, b = self, other
        elif self.field.contains(other.field):
            a, b = self, other.lift(self.field)
        elif other.field.contains(self.field):
            a, b = self.lift(other.field), other
        else:
            raise FieldError(f"incompatible fields {self.field} and {other.field}")
        var = a.var if a.degree() > 0 else b.var
        return a.with_var(var), b.with_var(var)

    # -- ring operations ----------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self._common(other)
        f = a.field
        n = max(len(a.coeffs), len(b.coeffs))
        return Poly(f, [f.add(a.coefficient(i), b.coefficient(i)) for i in range(n)], a.var)

    def __neg__(self) -> "Poly":
        f = self.field
        return Poly(f, [f.neg(c) for c in self.coeffs], self.var)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        a, b = self._common(other)
        if a.is_zero() or b.is_zero():
            return Poly(a.field, (), a.var)
        f = a.field
        if len(a.coeffs) > len(b.coeffs):
            a, b = b, a
        out = [0] * (len(a.coeffs) + len(b.coeffs) - 1)
        bc = b.coeffs
        for i, x in enumerate(a.coeffs):
            if x == 0:
                continue
            for j, y in enumerate(bc):
                if y:
                    out[i + j] = f.add(out[i + j], f.mul(x, y))
        return Poly(f, out, a.var if a.degree() > 0 else b.var)

    def scale(self, c: int) -> "Poly":
        f = self.field
        return Poly(f, [f.mul(c, x) for x in self.coeffs], self.var)

    def shift(self, n: int) -> "Poly":
        """Multiply by var^n (n >= 0)."""
        if self.is_zero():
            return self
        return Poly(self.field, [0] * n + list(self.coeffs), self.var)

    def monic(self) -> "Poly":
        if self.is_zero() or self.lc() == 1:
            return self
        return self.scale(self.field.inv(self.lc()))

    def __divmod__(self, other: "Poly") -> Tuple["Poly", "Poly"]:
        a, b = self._common(other)
        if b.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        f = a.field
        rem = list(a.coeffs)
        db = b.degree()
        if len(rem) - 1 < db:
            return Poly(f, (), a.var), a
        inv_lc = f.inv(b.lc())
        quo = [0] * (len(rem) - db)
        bc = b.coeffs
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k]
            if c == 0:
                continue
            c = f.mul(c, inv_lc)
            quo[k - db] = c
            for i in range(db + 1):
                if bc[i]:
                    rem[k - db + i] = f.sub(rem[k - db + i], f.mul(c, bc[i]))
        return Poly(f, quo, a.var), Poly(f, rem[:db], a.var)

    def __floordiv__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return divmod(self, other)[1]

    def divides(self, other: "Poly") -> bool:
        if self.is_zero():
            return other.is_zero()
        return (other % self).is_zero()

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self._common(other)
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def xgcd(self, other: "Poly") -> Tuple["Poly", "Poly", "Poly"]:
        """(g, s, t) with s*self + t*other = g monic."""
        a, b = self._common(other)
        f, var = a.field, a.var
        s0, s1 = Poly(f, (1,), var), Poly(f, (), var)
        t0, t1 = Poly(f, (), var), Poly(f, (1,), var)
        while not b.is_zero():
            q, r = divmod(a, b)
            a, b = b, r
            s0, s1 = s1, s0 - q * s1
            t0, t1 = t1, t0 - q * t1
        if a.is_zero():
            return a, s0, t0
        inv = f.inv(a.lc())
        return a.scale(inv), s0.scale(inv), t0.scale(inv)

    def __pow__(self, n: int) -> "Poly":
        result = Poly(self.field, (1,), self.var)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def powmod(self, n: int, modulus: "Poly") -> "Poly":
        result = Poly(self.field, (1,), self.var) % modulus
        base = self % modulus
        while n:
            if n & 1:
                result = (result * base) % modulus
            base = (base * base) % modulus
            n >>= 1
        return result

    def evaluate(self, x: int) -> int:
        f = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = f.add(f.mul(acc, x), c)
        return acc

    def frobenius(self, power: int) -> "Poly":
        """self^power for power a power of p: coefficients to the power, exponents stretched."""
        if self.is_zero():
            return self
        f = self.field
        out = [0] * ((len(self.coeffs) - 1) * power + 1)
        for i, c in enumerate(self.coeffs):
            if c:
                out[i * power] = f.pow(c, power)
        return Poly(f, out, self.var)

    def mul_poly(self, a: "Poly") -> "Poly":
        return self * a


# ----------------------------------------------------------------------
# Rational functions
# ----------------------------------------------------------------------

class RationalFunction:
    """Reduced quotient num/den with den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Optional[Poly] = None, reduced: bool = False):
        if den is None:
            den = Poly(num.field, (1,), num.var)
        num, den = num._common(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            den = Poly(num.field, (1,), num.var)
        elif not reduced:
            g = num.gcd(den)
            if not g.is_one():
                num, den = num // g, den // g
        if den.lc() != 1:
            inv = num.field.inv(den.lc())
            num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den

    @property
    def field(self) -> FiniteField:
        return self.num.field

    @property
    def var(self) -> str:
        return self.num.var if self.num.degree() > 0 else self.den.var

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def valuation(self) -> Optional[int]:
        """Valuation at infinity, deg den - deg num; None for zero."""
        if self.num.is_zero():
            return None
        return self.den.degree() - self.num.degree()

    def leading_coefficient(self) -> int:
        """First coefficient of the expansion in 1/var."""
        return self.num.lc()

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            other = RationalFunction(other)
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __str__(self) -> str:
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = __str__

    @staticmethod
    def _wrap(x) -> "RationalFunction":
        return x if isinstance(x, RationalFunction) else RationalFunction(x)

    def __add__(self, other) -> "RationalFunction":
        other = self._wrap(other)
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den, reduced=True)

    def __sub__(self, other) -> "RationalFunction":
        return self + (-self._wrap(other))

    def __mul__(self, other) -> "RationalFunction":
        other = self._wrap(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other) -> "RationalFunction":
        other = self._wrap(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def frobenius(self, power: int) -> "RationalFunction":
        # Frobenius is an injective ring map, so the quotient stays reduced.
        return RationalFunction(self.num.frobenius(power), self.den.frobenius(power), reduced=True)

    def mul_poly(self, a: Poly) -> "RationalFunction":
        return self * RationalFunction(a)


# ----------------------------------------------------------------------
# Irreducibility and factorization
# ----------------------------------------------------------------------

def _high_to_low(poly: Poly) -> List:
    return [ZZ(c) for c in reversed(poly.coeffs)]


def is_irreducible(poly: Poly) -> bool:
    """Irreducibility over the coefficient field."""
    n = poly.degree()
    if n <= 0:
        return False
    if n == 1:
        return True
    field = poly.field
    f = poly.monic()
    if field.is_prime:
        return bool(gf_irreducible_p(_high_to_low(f), field.p, ZZ))
    # Rabin's test.
    q = field.order
    x = Poly.x(field, f.var)

    def frob_power(k: int) -> Poly:
        h = x % f
        for _ in range(k):
            h = h.powmod(q, f)
        return h

    if not ((frob_power(n) - x) % f).is_zero():
        return False
    for r in primefactors(n):
        if not (frob_power(n // r) - x).gcd(f).is_one():
            return False
    return True


@lru_cache(maxsize=256)
def irreducible_polys(field: FiniteField, degree: int, var: str = "t") -> Tuple[Poly, ...]:
    """All monic irreducibles of a degree, ordered by the integer encoding of lower coefficients."""
    q = field.order
    if q ** degree > ENUMERATION_LIMIT:
        raise ResourceGuardExceeded(f"enumerating degree {degree} polynomials over {field} is too large")
    out = []
    for n in range(q ** degree):
        digits = []
        for _ in range(degree):
            n, r = divmod(n, q)
            digits.append(r)
        poly = Poly(field, digits + [1], var)
        if is_irreducible(poly):
            out.append(poly)
    return tuple(out)


def least_irreducible(field: FiniteField, degree: int, var: str = "x") -> Poly:
    """Monic irreducible with the least integer encoding of its lower coefficients."""
    q = field.order
    for n in range(q ** degree):
        digits = []
        for _ in range(degree):
            n, r = divmod(n, q)
            digits.append(r)
        poly = Poly(field, digits + [1], var)
        if is_irreducible(poly):
            return poly
    raise FieldError(f"no irreducible polynomial of degree {degree} over {field}")


def factor(poly: Poly) -> List[Tuple[Poly, int]]:
    """Monic irreducible factors with multiplicities, sorted by degree then coefficients."""
    if poly.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    field = poly.field
    if poly.degree() == 0:
        return []
    if field.is_prime:
        _, facs = gf_factor(_high_to_low(poly), field.p, ZZ)
        out = [(Poly(field, [int(c) for c in reversed(g)], poly.var), int(k)) for g, k in facs]
    else:
        out = []
        rest = poly.monic()
        d = 1
        while rest.degree() >= 2 * d:
            for g in irreducible_polys(field, d, poly.var):
                k = 0
                while True:
                    quo, rem = divmod(rest, g)
                    if not rem.is_zero():
                        break
                    rest, k = quo, k + 1
                if k:
                    out.append((g, k))
            d += 1
        if rest.degree() > 0:
            out.append((rest, 1))
    out.sort(key=lambda gk: (gk[0].degree(), gk[0].coeffs))
    return out


def multiplicity(poly: Poly, prime: Poly) -> int:
    """ord_prime(poly) for nonzero poly."""
    if poly.is_zero():
        raise ValueError("order of zero is infinite")
    k = 0
    while True:
        quo, rem = divmod(poly, prime)
        if not rem.is_zero():
            return k
        poly, k = quo, k + 1


# ----------------------------------------------------------------------
# Literal parsing
# ----------------------------------------------------------------------

_TRANSFORMS = standard_transformations + (implicit_multiplication, convert_xor)
_SYMBOLS = {
    "theta": Symbol("theta"),
    "t": Symbol("t"),
    "pi": Symbol("pi_"),
    "T": Symbol("T"),
    "u": Symbol("u"),
    "w": Symbol("w"),
}
_ALIASES = {"x": "theta", "θ": "theta", "π": "pi", "omega": "w", "ω": "w"}
VAR_NAMES = {"θ": "theta", "x": "theta", "t": "t", "π": "pi", "T": "T", "u": "u"}


def parse_expression(text: str):
    """Parse a literal into a sympy expression over the project's fixed symbols."""
    source = text.strip()
    for alias, name in (("θ", "theta"), ("π", "pi"), ("ω", "w")):
        source = source.replace(alias, name)
    local = dict(_SYMBOLS)
    local.update({alias: _SYMBOLS[name] for alias, name in _ALIASES.items() if alias.isascii()})
    try:
        expr = parse_expr(source, local_dict=local, transformations=_TRANSFORMS, evaluate=True)
    except Exception as e:
        raise ParseError(f"cannot parse {text!r}: {e}") from e
    unknown = expr.free_symbols - set(_SYMBOLS.values())
    if unknown:
        raise ParseError(f"unknown symbols {sorted(map(str, unknown))} in {text!r}")
    return expr


def _coefficient(field: FiniteField, value, w_power: int) -> int:
    value = Rational(value)
    den = int(value.q)
    if den % field.p == 0:
        raise ParseError(f"coefficient {value} is not defined modulo {field.p}")
    c = field.from_int(int(value.p) * pow(den, -1, field.p))
    if w_power:
        c = field.mul(c, field.pow(field.generator, w_power))
    return c


def parse_terms(text_or_expr, field: FiniteField, variables: Sequence[str]) -> Dict[Tuple[int, ...], int]:
    """Monomial exponents -> field coefficient for a polynomial literal."""
    expr = parse_expression(text_or_expr) if isinstance(text_or_expr, str) else text_or_expr
    gens = [_SYMBOLS[VAR_NAMES[v]] for v in variables]
    allowed = set(gens) | {_SYMBOLS["w"]}
    stray = expr.free_symbols - allowed
    if stray:
        raise ParseError(f"unexpected symbols {sorted(map(str, stray))}; allowed: {list(variables)}")
    w_sym = _SYMBOLS["w"]
    if w_sym in expr.free_symbols and field.is_prime:
        raise ParseError(f"w denotes a generator of a prime-power field, not of {field}")
    try:
        poly = SympyPoly(expr, *gens, w_sym, domain="QQ")
    except Exception as e:
        raise ParseError(f"{expr} is not a polynomial in {list(variables)}: {e}") from e
    terms: Dict[Tuple[int, ...], int] = {}
    for monom, coeff in poly.terms():
        key = tuple(int(e) for e in monom[:-1])
        c = _coefficient(field, coeff, int(monom[-1]))
        terms[key] = field.add(terms.get(key, 0), c)
    return {k: v for k, v in terms.items() if v}


def parse_poly(text: str, field: FiniteField, var: str = "θ") -> Poly:
    expr = parse_expression(text)
    num, den = fraction(together(expr))
    den_terms = parse_terms(den, field, [var])
    if list(den_terms) != [(0,)]:
        raise ParseError(f"{text!r} is not a polynomial in {var}")
    terms = parse_terms(num, field, [var])
    deg = max((k[0] for k in terms), default=-1)
    coeffs = [0] * (deg + 1)
    for (k,), c in terms.items():
        coeffs[k] = c
    return Poly(field, coeffs, var).scale(field.inv(den_terms[(0,)]))


def parse_rational(text: str, field: FiniteField, var: str = "θ") -> RationalFunction:
    expr = parse_expression(text)
    num, den = fraction(together(expr))
    polys = []
    for part in (num, den):
        terms = parse_terms(part, field, [var])
        deg = max((k[0] for k in terms), default=-1)
        coeffs = [0] * (deg + 1)
        for (k,), c in terms.items():
            coeffs[k] = c
        polys.append(Poly(field, coeffs, var))
    if polys[1].is_zero():
        raise ParseError(f"{text!r} has a zero denominator over {field}")
    return RationalFunction(polys[0], polys[1])
