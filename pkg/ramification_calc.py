"""Different and trace valuations of totally ramified Z_p-extensions from their Hasse–Arf breaks."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import List, Tuple

from sympy.ntheory import isprime

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BreakData:
    """Lower-numbering jump data i_0, i_1, ... shared by every layer of the tower."""

    p: int
    breaks: Tuple[int, ...]

    def __post_init__(self):
        if not isprime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        object.__setattr__(self, "breaks", tuple(int(i) for i in self.breaks))
        if any(i < 1 for i in self.breaks):
            raise ValueError(f"breaks must be positive integers, got {list(self.breaks)}")

    @property
    def levels(self) -> int:
        return len(self.breaks)

    def extended(self, count: int, value: int = 1) -> "BreakData":
        return BreakData(self.p, self.breaks + (value,) * count)

    def _check_level(self, n: int) -> None:
        if n < 0:
            raise ValueError(f"level must be nonnegative, got {n}")
        if n > self.levels:
            raise ValueError(f"level {n} needs {n} breaks, only {self.levels} given")

    def jumps(self, n: int) -> List[int]:
        """s_j = i_0 + p·i_1 + ⋯ + p^j·i_j for j < n: the last index with #G_i = p^{n−j}."""
        self._check_level(n)
        out, total = [], 0
        for j in range(n):
            total += self.p ** j * self.breaks[j]
            out.append(total)
        return out


@dataclass
class RamificationFiltration:
    """i ↦ #G_i^{(n)}, stored as its constant pieces."""

    p: int
    n: int
    pieces: List[Tuple[int, int, int]] = dc_field(default_factory=list)

    def order(self, i: int) -> int:
        if i < 0:
            raise ValueError("filtration index must be nonnegative")
        for lo, hi, size in self.pieces:
            if lo <= i <= hi:
                return size
        return 1

    def support(self) -> int:
        """Largest i with #G_i > 1, or −1."""
        return self.pieces[-1][1] if self.pieces else -1

    def sizes(self) -> List[int]:
        return [self.order(i) for i in range(self.support() + 2)]


def filtration(bd: BreakData, n: int) -> RamificationFiltration:
    """#G_i = p^n for 0 ≤ i ≤ i_0 and p^{n−j} for s_{j−1} < i ≤ s_j."""
    jumps = bd.jumps(n)
    pieces, lo = [], 0
    for j, s in enumerate(jumps):
        pieces.append((lo, s, bd.p ** (n - j)))
        lo = s + 1
    return RamificationFiltration(bd.p, n, pieces)


def different_valuation_oracle(bd: BreakData, n: int) -> int:
    """Σ_{i ≥ 0} (#G_i − 1) summed over the filtration."""
    return sum((hi - lo + 1) * (size - 1) for lo, hi, size in filtration(bd, n).pieces)


def different_valuation(bd: BreakData, n: int) -> int:
    """(p^n − 1)(i_0 + 1) + Σ_{1 ≤ j < n} (p^{n−j} − 1)·p^j·i_j."""
    bd._check_level(n)
    if n == 0:
        return 0
    p, i = bd.p, bd.breaks
    value = (p ** n - 1) * (i[0] + 1)
    value += sum((p ** (n - j) - 1) * p ** j * i[j] for j in range(1, n))
    return value


def trace_valuation(bd: BreakData, n: int) -> int:
    """v_F of Tr(O_{F_n}) = ⌊v(D_n)/p^n⌋."""
    return different_valuation(bd, n) // bd.p ** n


def lower_bound(bd: BreakData, n: int) -> Fraction:
    """(1 − 1/p)(1 + i_0 + ⋯ + i_{n−1})."""
    bd._check_level(n)
    return (1 - Fraction(1, bd.p)) * (1 + sum(bd.breaks[:n]))


@dataclass
class DivergenceReport:
    p: int
    breaks: List[int]
    rows: List[dict]
    monotone: bool
    oracle_agrees: bool
    bound_holds: bool

    @property
    def passed(self) -> bool:
        return self.monotone and self.oracle_agrees and self.bound_holds

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "breaks": self.breaks,
            "layers": self.rows,
            "trace_monotone": self.monotone,
            "oracle_agrees": self.oracle_agrees,
            "bound_holds": self.bound_holds,
            "passed": self.passed,
        }


def divergence_certificate(bd: BreakData, n_max: int) -> DivergenceReport:
    """Exact check of v(D_n)/p^n ≥ (1 − 1/p)(1 + Σ_{j<n} i_j) and of trace monotonicity for n ≤ n_max."""
    if n_max < 1:
        raise ValueError(f"n_max must be at least 1, got {n_max}")
    bd._check_level(n_max)
    rows, traces = [], []
    oracle_ok = bound_ok = True
    for n in range(1, n_max + 1):
        v = different_valuation(bd, n)
        oracle = different_valuation_oracle(bd, n)
        ratio = Fraction(v, bd.p ** n)
        bound = lower_bound(bd, n)
        oracle_ok = oracle_ok and v == oracle
        bound_ok = bound_ok and ratio >= bound
        traces.append(trace_valuation(bd, n))
        rows.append({
            "n": n,
            "different": v,
            "oracle": oracle,
            "ratio": str(ratio),
            "bound": str(bound),
            "trace": traces[-1],
        })
    monotone = all(a <= b for a, b in zip(traces, traces[1:]))
    report = DivergenceReport(bd.p, list(bd.breaks[:n_max]), rows, monotone, oracle_ok, bound_ok)
    logger.debug(f"Divergence certificate p = {bd.p}, n ≤ {n_max}: {'pass' if report.passed else 'FAIL'}")
    return report


def extend_until(bd: BreakData, target: int, max_levels: int = 1024) -> Tuple[BreakData, int]:
    """Append breaks equal to 1 until the trace valuation exceeds ``target``; returns the data and level."""
    current = bd
    n = current.levels
    while True:
        if n > 0 and trace_valuation(current, n) > target:
            return current, n
        if n >= max_levels:
            raise ValueError(f"trace valuation did not exceed {target} within {max_levels} levels")
        if n == current.levels:
            current = current.extended(1)
        n += 1
