"""Constant-field Z_p-towers K_n = F_{q^{p^n}}(θ): per-layer class modules and length tables."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

from base_algebra import FiniteField, Poly
from class_module import ClassModuleResult, galois_coinvariants, solve_class_module
from drinfeld_core import DrinfeldModule, ExpData, certified_exp
from exceptions import ConfigError
from finite_module import FiniteAModule, enumerate_primes, mass_formula, p_part
from utils import ResourceGuard

logger = logging.getLogger(__name__)


@dataclass
class TowerSpec:
    """The constant-field tower of E; layer n has constants F_{q^{p^n}}."""

    module: DrinfeldModule
    n_max: int = 2
    prime_degree_bound: int = 3
    primes: Optional[List[Poly]] = None
    kind: str = "constant"

    def __post_init__(self):
        if self.kind != "constant":
            raise ConfigError(f"only constant-field towers are supported, got {self.kind!r}")
        if self.n_max < 0:
            raise ConfigError(f"n_max must be nonnegative, got {self.n_max}")
        if self.prime_degree_bound < 0:
            raise ConfigError(f"prime degree bound must be nonnegative, got {self.prime_degree_bound}")

    @property
    def p(self) -> int:
        return self.module.p

    def layer_field(self, n: int) -> FiniteField:
        return self.module.field.extension(self.p ** n)

    def layer_order(self, n: int) -> int:
        return self.module.q ** (self.p ** n)


@dataclass
class LayerResult:
    n: int
    constants: FiniteField
    result: ClassModuleResult
    lengths: Dict[str, int] = dc_field(default_factory=dict)
    remainder: int = 0
    millis: Optional[int] = None

    @property
    def H(self) -> FiniteAModule:
        return self.result.module

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "constants": repr(self.constants),
            "H": self.H.to_dict(),
            "lengths": dict(self.lengths),
            "remainder": self.remainder,
            "diagnostics": self.result.diagnostics(),
        }
        if self.millis is not None:
            out["millis"] = self.millis
        return out


@dataclass
class FitResult:
    mu: Fraction
    nu: Fraction
    n0: int
    consistent: bool

    def to_dict(self) -> dict:
        return {"mu": str(self.mu), "nu": str(self.nu), "n0": self.n0, "consistent": self.consistent}


@dataclass
class LayerTable:
    spec: TowerSpec
    layers: List[LayerResult]
    primes: List[Poly]

    def lengths(self, prime: Poly) -> List[int]:
        key = str(prime.with_var("t"))
        return [layer.lengths[key] for layer in self.layers]

    def dims(self) -> List[int]:
        return [layer.H.dim for layer in self.layers]

    def header(self) -> List[str]:
        return ["n", "dim_H", "divisors"] + [str(g) for g in self.primes]

    def rows(self) -> List[List[Any]]:
        out = []
        for layer in self.layers:
            divisors = "; ".join(str(d) for d in layer.H.divisors)
            out.append([layer.n, layer.H.dim, divisors] + [layer.lengths[str(g)] for g in self.primes])
        return out

    def fits(self) -> Dict[str, FitResult]:
        if len(self.layers) < 3:
            return {}
        return {str(g): asymptotic_fit(self.lengths(g), self.spec.p) for g in self.primes}

    def to_dict(self) -> dict:
        return {
            "module": self.spec.module.to_spec(),
            "p": self.spec.p,
            "n_max": self.spec.n_max,
            "primes": [str(g) for g in self.primes],
            "layers": [layer.to_dict() for layer in self.layers],
            "fits": {k: v.to_dict() for k, v in self.fits().items()},
        }


# ----------------------------------------------------------------------
# Asymptotic consistency
# ----------------------------------------------------------------------

def asymptotic_fit(lengths: Sequence[int], p: int) -> FitResult:
    """Fit ℓ(n) = μp^n + ν through the last two layers and find where the tail becomes affine."""
    if len(lengths) < 3:
        raise ValueError(f"need at least three layers (n_max ≥ 2), got {len(lengths)}")
    n = len(lengths) - 1
    mu = Fraction(lengths[n] - lengths[n - 1], p ** n - p ** (n - 1))
    nu = lengths[n] - mu * p ** n
    n0 = n - 1
    while n0 > 0 and lengths[n0 - 1] == mu * p ** (n0 - 1) + nu:
        n0 -= 1
    consistent = mu.denominator == 1 and mu >= 0 and nu.denominator == 1
    return FitResult(mu, nu, n0, consistent)


def difference_law(lengths: Sequence[int], p: int, n0: int = 0) -> bool:
    """Δ(n+1) = p·Δ(n) for n > n0, Δ(n) = ℓ(n) − ℓ(n−1)."""
    deltas = [lengths[k] - lengths[k - 1] for k in range(1, len(lengths))]
    return all(deltas[k + 1] == p * deltas[k] for k in range(n0, len(deltas) - 1))


# ----------------------------------------------------------------------
# Layer fan-out
# ----------------------------------------------------------------------

class LayerProcessor:
    """Computes the class module of every layer, sequentially or on a thread pool."""

    def __init__(self, spec: TowerSpec, exp: ExpData, guard: Optional[ResourceGuard] = None,
                 config: Optional[Dict[str, Any]] = None):
        self.spec = spec
        self.exp = exp
        self.guard = guard
        self.config = config or {}

    def process_layers(self, indices: Sequence[int]) -> List[LayerResult]:
        if self.config.get("parallel_layers", False) and len(indices) > 1:
            return self._process_parallel(indices)
        return self._process_sequential(indices)

    def _process_sequential(self, indices: Sequence[int]) -> List[LayerResult]:
        logger.info(f"Computing {len(indices)} layers (sequential)")
        return [self._compute_layer(n) for n in indices]

    def _process_parallel(self, indices: Sequence[int]) -> List[LayerResult]:
        max_workers = self.config.get("max_workers", 3)
        logger.info(f"Computing {len(indices)} layers (parallel, max_workers={max_workers})")
        results: Dict[int, LayerResult] = {}
        with ThreadPoolExecutor(max_workers=max_workers) as executor:
            future_to_n = {executor.submit(self._compute_layer, n): n for n in indices}
            for future in as_completed(future_to_n):
                n = future_to_n[future]
                try:
                    results[n] = future.result()
                except Exception as e:
                    logger.error(f"Layer {n} failed: {e}")
                    raise
        return [results[n] for n in sorted(results)]

    def _compute_layer(self, n: int) -> LayerResult:
        if self.guard is not None:
            self.guard.check_time(f"layer {n}")
        start = time.perf_counter_ns()
        L = self.spec.layer_field(n)
        logger.info(f"Layer {n}: constants {L}")
        result = solve_class_module(self.spec.module, L, None, self.exp, self.guard)
        millis = (time.perf_counter_ns() - start) // 1_000_000
        return LayerResult(n, L, result, millis=millis if self.config.get("report_timings") else None)


# ----------------------------------------------------------------------
# Orchestrator
# ----------------------------------------------------------------------

@dataclass
class DescentReport:
    n: int
    coinvariants: FiniteAModule
    lower: FiniteAModule

    @property
    def holds(self) -> bool:
        return self.coinvariants.same_structure(self.lower)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "coinvariants": self.coinvariants.describe(),
            "lower": self.lower.describe(),
            "holds": self.holds,
        }


class TowerRunner:
    """Runs a constant-field tower through the class-module engine."""

    def __init__(self, spec: TowerSpec, config: Optional[Dict[str, Any]] = None,
                 guard: Optional[ResourceGuard] = None):
        self.spec = spec
        self.config = config or {}
        self.guard = guard or ResourceGuard.from_config(self.config)
        self.exp: Optional[ExpData] = None
        self.table: Optional[LayerTable] = None

    def run_tower(self) -> LayerTable:
        """Run the complete tower workflow."""
        try:
            logger.info(f"Starting tower for {self.spec.module.label or 'module'} up to n = {self.spec.n_max}")

            # Step 1: certify the exponential once; it is layer-independent
            self._certify_exponential()

            # Step 2: class module of every layer
            layers = self._compute_layers()

            # Step 3: primes to tabulate
            primes = self._select_primes(layers)

            # Step 4: per-prime lengths with the mass formula remainder
            self._tabulate(layers, primes)

            self.table = LayerTable(self.spec, layers, primes)
            logger.info("Tower completed successfully!")
            return self.table

        except Exception as e:
            logger.error(f"Tower run failed: {str(e)}")
            raise

    def _certify_exponential(self) -> None:
        logger.info("Certifying the exponential...")
        self.exp = certified_exp(self.spec.module, self.guard.max_exp_terms)
        logger.info(f"Threshold M = {self.exp.threshold}")

    def _compute_layers(self) -> List[LayerResult]:
        processor = LayerProcessor(self.spec, self.exp, self.guard, self.config)
        layers = processor.process_layers(list(range(self.spec.n_max + 1)))
        for prev, layer in zip(layers, layers[1:]):
            if layer.result.model.window_dim != self.spec.p * prev.result.model.window_dim:
                raise ValueError(f"window dimension did not scale by p at layer {layer.n}")
        return layers

    def _select_primes(self, layers: List[LayerResult]) -> List[Poly]:
        fq = self.spec.module.field
        if self.spec.primes is not None:
            primes = [g.with_var("t").monic() for g in self.spec.primes]
            for g in primes:
                p_part(layers[0].H, g)
            extra = enumerate_primes(fq, 0, [layer.H for layer in layers])
            known = {g.coeffs for g in primes}
            return primes + [g for g in extra if g.coeffs not in known]
        return enumerate_primes(fq, self.spec.prime_degree_bound, [layer.H for layer in layers])

    def _tabulate(self, layers: List[LayerResult], primes: List[Poly]) -> None:
        for layer in layers:
            layer.lengths, layer.remainder = mass_formula(layer.H, primes)
            if layer.remainder != 0:
                raise ValueError(f"mass formula leaves {layer.remainder} at layer {layer.n}")
            logger.info(f"Layer {layer.n}: {layer.H.describe()} (dim {layer.H.dim})")

    # -- checks -----------------------------------------------------------

    def _require_table(self) -> LayerTable:
        if self.table is None:
            self.run_tower()
        return self.table

    def descent_check(self, n: int) -> DescentReport:
        """Coinvariants of H_n under Gal(L_n/L_{n−1}) against H_{n−1}."""
        table = self._require_table()
        if not 1 <= n <= self.spec.n_max:
            raise ValueError(f"descent step n = {n} outside 1..{self.spec.n_max}")
        upper = table.layers[n].result
        lower = table.layers[n - 1].H
        coinv = galois_coinvariants(upper, self.spec.layer_order(n - 1), self.guard)
        report = DescentReport(n, coinv, lower)
        logger.info(f"Descent at n = {n}: {coinv.describe()} vs {lower.describe()} ({report.holds})")
        return report

    def nakayama_vanishing_check(self, prime: Poly) -> bool:
        """A vanishing 𝔭-part at the base forces vanishing at every computed layer."""
        table = self._require_table()
        prime = prime.with_var("t").monic()
        lengths = [p_part(layer.H, prime) for layer in table.layers]
        if lengths[0] != 0:
            return True
        return all(x == 0 for x in lengths)


def run_tower(spec: TowerSpec, config: Optional[Dict[str, Any]] = None,
              guard: Optional[ResourceGuard] = None) -> LayerTable:
    return TowerRunner(spec, config, guard).run_tower()
