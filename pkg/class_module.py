"""Class modules H(E/O_K) and H_f(E/O_K) for K = L(θ), computed on a finite window of K_∞."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Sequence

from base_algebra import FiniteField, Poly
from drinfeld_core import (
    DrinfeldModule,
    ExpData,
    Residue,
    apply_t,
    certified_exp,
    exp_monomial,
    known_lattice_rank,
)
from exceptions import CertificateNotFound, ConsistencyError, FieldError
from finite_module import FiniteAModule, finite_module_structure, quotient_endomorphism
from laurent import LaurentSlice
from linear_algebra import EchelonBasis, Vector, nullspace
from utils import ResourceGuard

logger = logging.getLogger(__name__)


class WindowModel:
    """The F_q-space K_∞/(O_K + m^M) ⊕ L[θ]/f with the t-action read off canonical lifts.

    Coordinates: the window part has index (w − 1)·d + b for the basis element ℓ_b·u^w,
    1 ≤ w ≤ M − 1; the residue part follows at offset (M − 1)·d with index s·d + b for ℓ_b·θ^s.
    Without a modulus the residue part is empty and the space is V itself.
    """

    def __init__(self, module: DrinfeldModule, L: FiniteField, exp: ExpData,
                 modulus: Optional[Poly] = None):
        if exp.threshold is None:
            raise CertificateNotFound("the exponential has no certified threshold")
        if not L.contains(module.field):
            raise FieldError(f"{L} does not contain F_{module.q}")
        if modulus is not None:
            if modulus.is_zero():
                raise ValueError("modulus must be a nonzero polynomial")
            modulus = modulus.lift(L).with_var("θ").monic()
        self.module = module
        self.L = L
        self.fq = module.field
        self.exp = exp
        self.M = exp.threshold
        self.modulus = modulus
        self.basis = L.basis(self.fq)
        self.d = len(self.basis)
        self.window_dim = (self.M - 1) * self.d
        self.residue_degree = modulus.degree() if modulus is not None else 0
        self.residue_dim = self.residue_degree * self.d
        self.dim = self.window_dim + self.residue_dim
        self._columns: Optional[List[Vector]] = None

    # -- coordinates ------------------------------------------------------

    def strip(self, y: LaurentSlice) -> Vector:
        """Window coordinates: drop the θ-polynomial part and the u^{≥M} tail."""
        return y.to_vector(1, self.M - 1, self.fq)

    def residue_vector(self, z: Poly) -> Vector:
        if self.modulus is None:
            return []
        z = z.lift(self.L) % self.modulus
        out: Vector = []
        for s in range(self.residue_degree):
            out.extend(self.L.coordinates(z.coefficient(s), self.fq))
        return out

    def project(self, y: LaurentSlice) -> Vector:
        """ρ(y) = (strip y, −P(y) mod f) with P the polynomial part."""
        vec = self.strip(y)
        if self.modulus is not None:
            vec += self.residue_vector(-y.polynomial_part())
        return vec

    def lift_window(self, vec: Sequence[int], hi: int) -> LaurentSlice:
        """The canonical lift: a Laurent polynomial supported on u^1 .. u^{M−1}."""
        coeffs = [0] * hi
        for w in range(1, self.M):
            block = vec[(w - 1) * self.d: w * self.d]
            coeffs[w - 1] = self.L.from_coordinates(list(block), self.fq)
        return LaurentSlice(self.L, 1, hi, tuple(coeffs), True)

    # -- the t-action -----------------------------------------------------

    @property
    def lift_precision(self) -> int:
        """Exactness needed on a lift so that φ(t) of it is exact up to u^{M−1}."""
        return self.M + self.module.c + 1

    def columns(self) -> List[Vector]:
        """Images of the coordinate basis vectors under T."""
        if self._columns is None:
            cols = []
            hi = self.lift_precision
            for w in range(1, self.M):
                for ell in self.basis:
                    x = LaurentSlice.monomial(self.L, ell, w, hi)
                    cols.append(self.project(apply_t(self.module, x)))
            for s in range(self.residue_degree):
                for ell in self.basis:
                    z = Residue(Poly.monomial(self.L, ell, s, "θ"), self.modulus)
                    image = apply_t(self.module, z)
                    cols.append([0] * self.window_dim + self.residue_vector(image.value))
            self._columns = cols
        return self._columns

    def apply_T(self, vec: Sequence[int]) -> Vector:
        f = self.fq
        out = [0] * self.dim
        for j, c in enumerate(vec):
            if c:
                for i, x in enumerate(self.columns()[j]):
                    if x:
                        out[i] = f.add(out[i], f.mul(c, x))
        return out

    def seeds(self) -> List[Vector]:
        """ρ(exp(ℓ_b u^k)) for 1 ≤ k ≤ M − 1 and ρ(exp(ℓ_b))."""
        hi = self.M - 1
        out = []
        for k in range(1, self.M):
            for ell in self.basis:
                out.append(self.project(exp_monomial(self.exp, self.L, ell, k, hi)))
        for ell in self.basis:
            out.append(self.project(exp_monomial(self.exp, self.L, ell, 0, hi)))
        return out


def build_window(E: DrinfeldModule, L: FiniteField, exp: Optional[ExpData] = None,
                 modulus: Optional[Poly] = None, guard: Optional[ResourceGuard] = None) -> WindowModel:
    if guard is not None:
        guard.check_field(L)
    exp = exp or certified_exp(E, guard.max_exp_terms if guard else 48)
    model = WindowModel(E, L, exp, modulus)
    if guard is not None:
        guard.check_window(model.dim)
    logger.debug(f"Window model over {L}: M = {model.M}, dim = {model.dim}")
    return model


@dataclass
class Closure:
    """The T-stable span of the exponential seeds."""

    basis: EchelonBasis
    rounds: int
    seed_count: int

    @property
    def rank(self) -> int:
        return self.basis.rank


def denominator_closure(model: WindowModel, guard: Optional[ResourceGuard] = None) -> Closure:
    """Smallest T-stable subspace containing the seeds, built by U ← U + T(U)."""
    basis = EchelonBasis(model.fq, model.dim)
    seeds = model.seeds()
    frontier = [s for s in seeds if basis.insert(s)]
    rounds = 0
    while frontier:
        if guard is not None:
            guard.check_time("denominator closure")
        rounds += 1
        frontier = [img for img in (model.apply_T(v) for v in frontier) if basis.insert(img)]
        if rounds > model.dim + 1:
            raise ConsistencyError(f"closure did not stabilize within {model.dim} rounds")
    logger.debug(f"Closure rank {basis.rank} of {model.dim} after {rounds} rounds")
    return Closure(basis, rounds, len(seeds))


def quotient_module(model: WindowModel, subspace: EchelonBasis,
                    guard: Optional[ResourceGuard] = None) -> FiniteAModule:
    endo = quotient_endomorphism(model.fq, model.columns(), subspace)
    if guard is not None:
        guard.check_matrix(len(endo))
    return finite_module_structure(model.fq, endo)


@dataclass
class ClassModuleResult:
    module: FiniteAModule
    model: WindowModel
    closure: Closure

    def diagnostics(self) -> Dict[str, int]:
        return {
            "M": self.model.M,
            "dim_V": self.model.window_dim,
            "dim_residue": self.model.residue_dim,
            "closure_rank": self.closure.rank,
            "closure_iterations": self.closure.rounds,
            "seeds": self.closure.seed_count,
        }


def solve_class_module(E: DrinfeldModule, L: FiniteField, modulus: Optional[Poly] = None,
                       exp: Optional[ExpData] = None,
                       guard: Optional[ResourceGuard] = None) -> ClassModuleResult:
    """H (or H_f when a modulus is given) together with the model it was computed on."""
    model = build_window(E, L, exp, modulus, guard)
    closure = denominator_closure(model, guard)
    module = quotient_module(model, closure.basis, guard)
    logger.info(f"Class module over {L}{'' if modulus is None else f' mod {modulus}'}: {module.describe()}")
    return ClassModuleResult(module, model, closure)


def compute_class_module(E: DrinfeldModule, L: FiniteField, exp: Optional[ExpData] = None,
                         guard: Optional[ResourceGuard] = None) -> FiniteAModule:
    return solve_class_module(E, L, None, exp, guard).module


# ----------------------------------------------------------------------
# E(O_K/f)
# ----------------------------------------------------------------------

def _residue_columns(E: DrinfeldModule, L: FiniteField, f: Poly) -> List[Vector]:
    fq = E.field
    basis = L.basis(fq)
    n = f.degree()
    cols = []
    for s in range(n):
        for ell in basis:
            image = apply_t(E, Residue(Poly.monomial(L, ell, s, "θ"), f)).value
            col: Vector = []
            for k in range(n):
                col.extend(L.coordinates(image.coefficient(k), fq))
            cols.append(col)
    return cols


def local_quotient_module(E: DrinfeldModule, f: Poly, L: Optional[FiniteField] = None) -> FiniteAModule:
    """E(L[θ]/f) with t·x = θx + Σ a_i x^{q^i} mod f."""
    if f.is_zero():
        raise ValueError("modulus must be a nonzero polynomial")
    L = L or (f.field if f.field.contains(E.field) else E.field)
    f = f.lift(L).with_var("θ").monic()
    cols = _residue_columns(E, L, f)
    k = len(cols)
    endo = [[cols[j][i] for j in range(k)] for i in range(k)]
    return finite_module_structure(E.field, endo)


# ----------------------------------------------------------------------
# H_f and the comparison sequence
# ----------------------------------------------------------------------

@dataclass
class ModulusResult:
    """H_f with the comparison 0 → U_f → U → E(O_K/f) → H_f → H → 0 checked on dimensions."""

    H: FiniteAModule
    H_f: FiniteAModule
    local: FiniteAModule
    deduced_unit_image: int
    found_unit_image: Optional[int] = None
    diagnostics: Dict[str, int] = dc_field(default_factory=dict)
    units_complete: bool = False

    @property
    def certified(self) -> bool:
        return self.found_unit_image is not None and self.found_unit_image == self.deduced_unit_image

    @property
    def failed(self) -> bool:
        """A complete unit group whose images fall short of dim U/U_f contradicts the sequence."""
        return self.units_complete and self.found_unit_image is not None and not self.certified

    @property
    def status(self) -> str:
        if self.certified:
            return "certified"
        return "failed" if self.failed else "inconclusive"

    def euler_characteristic(self) -> Optional[int]:
        """dim U/U_f − dim E(O_K/f) + dim H_f − dim H using the unit images actually found."""
        if self.found_unit_image is None:
            return None
        return self.found_unit_image - self.local.dim + self.H_f.dim - self.H.dim

    def to_dict(self) -> dict:
        return {
            "H": self.H.to_dict(),
            "H_f": self.H_f.to_dict(),
            "local": self.local.to_dict(),
            "unit_image_deduced": self.deduced_unit_image,
            "unit_image_found": self.found_unit_image,
            "euler_characteristic": self.euler_characteristic(),
            "compar_certificate": self.status,
        }


def unit_image_dimension(E: DrinfeldModule, L: FiniteField, f: Poly, units: Sequence[Poly]) -> int:
    """F_q-dimension of the A-submodule of E(L[θ]/f) generated by the images of ``units``."""
    f = f.lift(L).with_var("θ").monic()
    n = f.degree()
    fq = E.field
    cols = _residue_columns(E, L, f)
    basis = EchelonBasis(fq, n * len(L.basis(fq)))

    def vector(z: Poly) -> Vector:
        z = z.lift(L).with_var("θ") % f
        out: Vector = []
        for k in range(n):
            out.extend(L.coordinates(z.coefficient(k), fq))
        return out

    def image(v: Vector) -> Vector:
        out = [0] * len(v)
        for j, c in enumerate(v):
            if c:
                for i, x in enumerate(cols[j]):
                    if x:
                        out[i] = fq.add(out[i], fq.mul(c, x))
        return out

    frontier = [v for v in (vector(a) for a in units) if basis.insert(v)]
    while frontier:
        frontier = [w for w in (image(v) for v in frontier) if basis.insert(w)]
    return basis.rank


def class_module_with_modulus(E: DrinfeldModule, L: FiniteField, f: Poly,
                              units: Optional[Sequence[Poly]] = None,
                              exp: Optional[ExpData] = None,
                              guard: Optional[ResourceGuard] = None,
                              units_complete: bool = False) -> ModulusResult:
    """H_f computed on V ⊕ L[θ]/f, certified against the images of known units.

    ``units_complete`` says the units generate all of U; their images must then span
    exactly dim U/U_f, and a shortfall is reported as ``failed``.
    """
    exp = exp or certified_exp(E, guard.max_exp_terms if guard else 48)
    plain = solve_class_module(E, L, None, exp, guard)
    ray = solve_class_module(E, L, f, exp, guard)
    local = local_quotient_module(E, f, L)
    deduced = local.dim - ray.module.dim + plain.module.dim
    if deduced < 0:
        raise ConsistencyError(f"negative unit image dimension {deduced} for modulus {f}")
    found = None
    if units is not None:
        found = unit_image_dimension(E, L, f, units)
        if found > deduced:
            raise ConsistencyError(f"unit images span {found} dimensions, the sequence allows {deduced}")
    result = ModulusResult(plain.module, ray.module, local, deduced, found, ray.diagnostics(), units_complete)
    if result.failed:
        logger.error(f"Complete unit group spans {found} of {deduced} dimensions mod {f}")
    logger.info(f"H_f for f = {f}: {ray.module.describe()} ({result.status})")
    return result


# ----------------------------------------------------------------------
# Galois coinvariants
# ----------------------------------------------------------------------

def trace_map(L: FiniteField, x: int, sub_order: int) -> int:
    """Tr from L down to its subfield with sub_order elements."""
    return L.trace(x, sub_order)


def _is_power(n: int, base: int) -> bool:
    if base < 2:
        return False
    value = base
    while value < n:
        value *= base
    return value == n


def galois_relations(model: WindowModel, sub_order: int) -> List[Vector]:
    """A spanning set of (g − 1)V for G = Gal(L/L_0), |L_0| = sub_order.

    G is cyclic and acts coefficientwise, so (g − 1)V is the blockwise kernel of Tr_{L/L_0}.
    """
    L, fq, d = model.L, model.fq, model.d
    if not (_is_power(sub_order, fq.order) and _is_power(L.order, sub_order)):
        raise FieldError(f"no subfield of {L} with {sub_order} elements containing F_{fq.order}")
    if model.modulus is not None and any(L.pow(c, sub_order) != c for c in model.modulus.coeffs):
        raise FieldError("the modulus is not defined over the fixed field of the Galois group")
    images = [L.coordinates(trace_map(L, ell, sub_order), fq) for ell in model.basis]
    trace_rows = [[images[j][i] for j in range(d)] for i in range(d)]
    kernel = nullspace(fq, trace_rows, d)
    relations = []
    for block in range(model.M - 1 + model.residue_degree):
        for v in kernel:
            vec = [0] * model.dim
            vec[block * d: (block + 1) * d] = v
            relations.append(vec)
    return relations


def galois_coinvariants(result: ClassModuleResult, sub_order: int,
                        guard: Optional[ResourceGuard] = None) -> FiniteAModule:
    """H_G = V/(U + (g − 1)V) for G = Gal(L/L_0), |L_0| = sub_order."""
    model = result.model
    basis = result.closure.basis.copy()
    basis.extend(galois_relations(model, sub_order))
    return quotient_module(model, basis, guard)


def descent_check(upper: ClassModuleResult, lower: FiniteAModule, sub_order: int) -> bool:
    """Coinvariants of the upper module against the module over the fixed field."""
    return galois_coinvariants(upper, sub_order).same_structure(lower)


def unit_rank_expectation(E: DrinfeldModule, L: FiniteField) -> Optional[int]:
    """[K:Q] − r_E(K) where r_E is known."""
    r = known_lattice_rank(E)
    return None if r is None else L.degree_over(E.field) - r
