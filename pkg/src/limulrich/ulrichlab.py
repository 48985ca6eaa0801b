"""Verification suites: Ulrich predicates, Euler-characteristic inequalities,
lim-sequence diagnostics, the Segre lim Ulrich modules and Frobenius checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import InputError
from .grcomplex import (FreeComplex, betti_numbers, frobenius_pullback, homology_lengths, koszul_complex,
                        minimal_free_resolution, require_short)
from .grmod import GammaSegreModule, GradedModule, frobenius_pushforward, gamma_module_on_segre, minimal_generators, ring_module
from .monoring import GradedRingSpec, RingElement
from .mult import e_d, ring_multiplicity

DEFAULT_TAIL_THRESHOLD = Fraction(1, 5)
DEFAULT_RATIO_THRESHOLD = Fraction(1, 5)


@dataclass
class UlrichReport:
    ulrich: bool
    mcm: bool
    koszul: tuple[int, ...]
    e_d: int
    nu: int

    def __bool__(self) -> bool:
        return self.ulrich


def is_ulrich_module(M: GradedModule, sop: Sequence[RingElement]) -> UlrichReport:
    """MCM (Koszul homology on sop vanishes above degree 0) and e_d(M) = nu(M)."""
    ring = M.ring
    if len(sop) != ring.declared_dim:
        raise InputError(f"need {ring.declared_dim} parameters, got {len(sop)}")
    table = homology_lengths(koszul_complex(ring, sop), M)
    mcm = not any(table.lengths[1:])
    e = e_d(M)
    nu = minimal_generators(M).total
    return UlrichReport(mcm and e == nu, mcm, table.lengths, e, nu)


@dataclass
class InequalityRow:
    i: int
    left: int
    right: int

    @property
    def margin(self) -> int:
        return self.left - self.right

    @property
    def verdict(self) -> bool:
        return self.margin >= 0


@dataclass
class InequalityReport:
    label: str
    d: int
    chi: int
    betti: list[int]
    e: int
    rows: list[InequalityRow]

    @property
    def passed(self) -> bool:
        return all(r.verdict for r in self.rows)

    @property
    def margins(self) -> tuple[int, ...]:
        return tuple(r.margin for r in self.rows)


def check_euler_inequality(F: FreeComplex, U: GradedModule | None = None, label: str = "") -> InequalityReport:
    """C(d, i) chi(F (x) U) >= beta_i(F) e_d(U) for 0 <= i <= d; F must be short."""
    require_short(F)
    ring = F.ring
    U = U if U is not None else ring_module(ring)
    d = ring.declared_dim
    chi = homology_lengths(F, U).chi
    betti = betti_numbers(F)
    betti = betti + [0] * (d + 1 - len(betti))
    e = e_d(U)
    rows = [InequalityRow(i, math.comb(d, i) * chi, betti[i] * e) for i in range(d + 1)]
    return InequalityReport(label or F.label, d, chi, betti, e, rows)


@dataclass
class WalkerReport:
    beta: int
    chi: int
    total_length: int
    bound: Fraction
    guaranteed: bool

    @property
    def passed(self) -> bool:
        return self.beta >= self.bound


def check_walker(F: FreeComplex) -> WalkerReport:
    """beta(F) >= 2^d |chi(F)| / sum_i l(H_i F); the bound is a theorem only for p >= 3."""
    ring = F.ring
    table = homology_lengths(F, ring_module(ring))
    if table.total == 0:
        raise InputError("the Walker bound needs nonzero homology")
    beta = sum(betti_numbers(F))
    bound = Fraction(2**ring.declared_dim * abs(table.chi), table.total)
    return WalkerReport(beta, table.chi, table.total, bound, ring.p >= 3)


# ---------------------------------------------------------------------------
# lim sequences


@dataclass
class LimRow:
    n: int
    nu: int
    e_d: int
    koszul: tuple[int, ...]

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.e_d, self.nu)

    @property
    def tail(self) -> Fraction:
        return Fraction(max(self.koszul[1:], default=0), self.nu)

    @property
    def chi1(self) -> Fraction:
        return Fraction(sum((-1) ** (i - 1) * h for i, h in enumerate(self.koszul) if i >= 1), self.nu)


def _weakly_decreasing(xs: Sequence[Fraction]) -> bool:
    return all(b <= a for a, b in zip(xs, xs[1:]))


@dataclass
class LimSequenceDiagnostics:
    rows: list[LimRow]
    tail_threshold: Fraction
    ratio_threshold: Fraction

    @property
    def tails(self) -> list[Fraction]:
        return [r.tail for r in self.rows]

    @property
    def ratio_gaps(self) -> list[Fraction]:
        return [abs(r.ratio - 1) for r in self.rows]

    @property
    def lim_cm_trend(self) -> bool:
        return _weakly_decreasing(self.tails) and self.tails[-1] < self.tail_threshold

    @property
    def lim_ulrich_trend(self) -> bool:
        return _weakly_decreasing(self.ratio_gaps) and self.ratio_gaps[-1] < self.ratio_threshold

    @property
    def chi1_weakly_decreasing(self) -> bool:
        return _weakly_decreasing([r.chi1 for r in self.rows])

    @property
    def tail_shrinks(self) -> bool:
        return self.tails[-1] < self.tails[0]


def lim_sequence_diagnostics(builder: Callable[[int], GradedModule], sop: Sequence[RingElement],
                             n_range: Iterable[int], tail_threshold: Fraction = DEFAULT_TAIL_THRESHOLD,
                             ratio_threshold: Fraction = DEFAULT_RATIO_THRESHOLD) -> LimSequenceDiagnostics:
    rows = []
    for n in n_range:
        U = builder(n)
        K = koszul_complex(U.ring, sop)
        nu = minimal_generators(U).total
        if nu == 0:
            raise InputError(f"module at n={n} is zero")
        rows.append(LimRow(n, nu, e_d(U), homology_lengths(K, U).lengths))
    if not rows:
        raise InputError("empty n range")
    return LimSequenceDiagnostics(rows, Fraction(tail_threshold), Fraction(ratio_threshold))


def lim_ulrich_weights(c: int, p: int, n: int) -> tuple[int, ...]:
    q = p**n
    return tuple(i * q for i in range(1, c + 1))


def build_lim_ulrich_segre(c: int, p: int, n: int, ring: GradedRingSpec | None = None) -> GammaSegreModule:
    """U_n with degree-t piece spanned by Cox monomials of multidegree ((t+1) p^n, ..., (t+c) p^n)."""
    return gamma_module_on_segre(c, p, n, lim_ulrich_weights(c, p, n), ring)


# ---------------------------------------------------------------------------
# Frobenius


@dataclass
class ProjectionReport:
    n: int
    left: int
    right: int

    @property
    def passed(self) -> bool:
        return self.left == self.right


def check_projection_formula(F: FreeComplex, M: GradedModule, n: int) -> ProjectionReport:
    """chi(phi^*n F (x) M) = chi(F (x) phi_*^n M)."""
    left = homology_lengths(frobenius_pullback(F, n), M).chi
    right = homology_lengths(F, frobenius_pushforward(M, n)).chi
    return ProjectionReport(n, left, right)


@dataclass
class ScalingReport:
    n: int
    e_M: int
    e_push: int
    factor: int

    @property
    def passed(self) -> bool:
        return self.e_push == self.factor * self.e_M


def check_frobenius_scaling(M: GradedModule, n: int) -> ScalingReport:
    """e_d(phi_*^n M) = p^(n d) e_d(M)."""
    ring = M.ring
    return ScalingReport(n, e_d(M), e_d(frobenius_pushforward(M, n)), ring.p ** (n * ring.declared_dim))


# ---------------------------------------------------------------------------
# strict complete intersections


def is_monomial_complete_intersection(ring: GradedRingSpec) -> bool:
    if ring.kind != "poly":
        return False
    used = set()
    for g in ring.ideal:
        support = [j for j, a in enumerate(g) if a]
        if len(support) != 1 or support[0] in used:
            return False
        used.add(support[0])
    return True


@dataclass
class SciResult:
    label: str
    length: int
    report: InequalityReport


@dataclass
class SciSuite:
    ring: str
    e: int
    results: list[SciResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.report.passed for r in self.results)


def sci_suite(ring: GradedRingSpec, modules: Sequence[GradedModule], length_cap: int = 10) -> SciSuite:
    """C(d, i) l(M) >= beta_i(M) e(R) for finite-length modules of finite projective dimension."""
    if not is_monomial_complete_intersection(ring):
        raise InputError(f"{ring} is not a monomial complete intersection")
    out = SciSuite(str(ring), ring_multiplicity(ring))
    for M in modules:
        F = minimal_free_resolution(ring, M, length_cap=length_cap)
        length = homology_lengths(F, ring_module(ring)).lengths[0]
        out.results.append(SciResult(M.label, length, check_euler_inequality(F, label=M.label)))
    return out
