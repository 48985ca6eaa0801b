"""Multiplicities: Hilbert polynomials, e_d, Koszul multiplicity, Dutta sequences, Lech checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import monoring as mr
from .errors import CapExceeded, HomologyNotFinite, InputError, NotPolynomial, NotSystemOfParameters
from .exactlin import QQ, ExactMatrix, solve
from .grcomplex import FreeComplex, frobenius_pullback, homology_lengths, koszul_complex, minimalize
from .grmod import GradedModule, ring_module
from .monoring import GradedRingSpec, RingElement

DEFAULT_HILB_WINDOW = 8


@dataclass(frozen=True)
class HilbertPolynomial:
    """sum_k coeffs[k] * t^k, agreeing with the Hilbert function for t >= t0."""

    coeffs: tuple[Fraction, ...]
    t0: int
    dim: int

    def __call__(self, t: int) -> Fraction:
        return sum((c * t**k for k, c in enumerate(self.coeffs)), Fraction(0))

    @property
    def degree(self) -> int:
        nz = [k for k, c in enumerate(self.coeffs) if c]
        return max(nz) if nz else -1

    def e_d(self) -> int:
        d = self.dim
        if d == 0:
            raise InputError("e_0 is a length, not a polynomial coefficient")
        lead = self.coeffs[d - 1] if len(self.coeffs) >= d else Fraction(0)
        value = math.factorial(d - 1) * lead
        if value.denominator != 1 or value < 0:
            raise NotPolynomial(f"(d-1)! * leading coefficient = {value} is not a nonnegative integer")
        return int(value)


def _differences(values: list[int], order: int) -> list[int]:
    for _ in range(order):
        values = [b - a for a, b in zip(values, values[1:])]
    return values


def _interpolate(ts: Sequence[int], vs: Sequence[int]) -> tuple[Fraction, ...]:
    n = len(ts)
    if n == 0:
        return ()
    vander = ExactMatrix.from_rows(QQ, [[Fraction(t) ** k for k in range(n)] for t in ts])
    sol = solve(vander, [Fraction(v) for v in vs])
    return tuple(Fraction(x) for x in sol)


def hilbert_polynomial(M: GradedModule, window: int = DEFAULT_HILB_WINDOW, dim: int | None = None) -> HilbertPolynomial:
    """Interpolate HF(M) once its d-th difference has vanished for ``window`` consecutive degrees."""
    d = M.ring.declared_dim if dim is None else dim
    start = M.t_min
    values: list[int] = []
    t = start
    while True:
        try:
            values.append(M.dim(t))
        except CapExceeded:
            raise NotPolynomial(f"Hilbert function of {M.label} not polynomial within cap") from None
        diffs = _differences(values, d)
        if len(diffs) >= window and not any(diffs[-window:]):
            break
        if M.t_max is not None and t > M.t_max + window + d:
            break
        t += 1
    top = start + len(values) - 1
    if d == 0:
        return HilbertPolynomial((), top + 1 - window, 0)
    ts = list(range(top - d + 1, top + 1))
    coeffs = _interpolate(ts, values[-d:])
    poly = HilbertPolynomial(coeffs, start, d)
    t0 = top
    while t0 - 1 >= start and poly(t0 - 1) == values[t0 - 1 - start]:
        t0 -= 1
    return HilbertPolynomial(coeffs, t0, d)


def e_d(M: GradedModule, window: int = DEFAULT_HILB_WINDOW) -> int:
    """Graded multiplicity with respect to the ring's declared dimension; 0 when dim M is smaller."""
    d = M.ring.declared_dim
    if d == 0:
        return sum(M.dim(t) for t in range(M.t_min, (M.t_max if M.t_max is not None else M.t_cap) + 1))
    return hilbert_polynomial(M, window).e_d()


def ring_multiplicity(ring: GradedRingSpec) -> int:
    return e_d(ring_module(ring))


def e_via_koszul(ring: GradedRingSpec, sop: Sequence[RingElement], window: int | None = None) -> int:
    """chi(K(sop) (x) A) for a linear system of parameters."""
    if len(sop) != ring.declared_dim:
        raise NotSystemOfParameters(f"need {ring.declared_dim} elements, got {len(sop)}")
    if any(e.degree != 1 or e.is_zero() for e in sop):
        raise NotSystemOfParameters("system of parameters must consist of nonzero linear forms")
    try:
        return homology_lengths(koszul_complex(ring, sop), ring_module(ring), window).chi
    except HomologyNotFinite as exc:
        raise NotSystemOfParameters(f"not a system of parameters: {exc}") from None


def verify_sop(ring: GradedRingSpec, sop: Sequence[RingElement], window: int | None = None) -> int:
    """Length of A/(sop); raises when the Koszul homology is not of finite length."""
    if len(sop) != ring.declared_dim:
        raise NotSystemOfParameters(f"need {ring.declared_dim} elements, got {len(sop)}")
    try:
        return homology_lengths(koszul_complex(ring, sop), ring_module(ring), window).lengths[0]
    except HomologyNotFinite as exc:
        raise NotSystemOfParameters(f"not a system of parameters: {exc}") from None


# ---------------------------------------------------------------------------
# dimension one


def determinant(ring: GradedRingSpec, mat: Sequence[Sequence[RingElement | None]]) -> RingElement | None:
    """Cofactor expansion along the first row; None for the zero determinant."""
    n = len(mat)
    if n == 0:
        return mr.one(ring)
    if n == 1:
        e = mat[0][0]
        return None if e is None or e.is_zero() else e
    total = None
    for c in range(n):
        e = mat[0][c]
        if e is None or e.is_zero():
            continue
        minor = [row[:c] + row[c + 1:] for row in mat[1:]]
        sub = determinant(ring, minor)
        if sub is None:
            continue
        term = mr.multiply(ring, e, sub)
        if c % 2:
            term = mr.neg(ring, term)
        if total is None:
            total = term
        elif total.degree != term.degree:
            raise InputError("matrix entries do not give a homogeneous determinant")
        else:
            total = mr.add(ring, total, term)
    return None if total is None or total.is_zero() else total


@dataclass
class Dim1Report:
    a: int
    det: str
    chi_F: int
    chi_det: int
    e_R: int
    equality: bool
    inequality: bool

    @property
    def passed(self) -> bool:
        return self.equality and self.inequality


def dim1_det_check(F: FreeComplex) -> Dim1Report:
    """chi(F) = chi(K(det phi)) and chi(F) >= a * e(R) for 0 -> R^a -> R^a -> 0 over a 1-dimensional ring."""
    ring = F.ring
    if ring.declared_dim != 1:
        raise InputError("the determinant check needs a ring of dimension 1")
    G = minimalize(F)
    ranks = G.ranks()
    if len(ranks) != 2 or ranks[0] != ranks[1] or ranks[0] == 0:
        raise InputError(f"minimal complex has shape {ranks}, expected 0 -> R^a -> R^a -> 0")
    a = ranks[0]
    det = determinant(ring, G.diffs[0])
    if det is None:
        raise InputError("determinant is zero; homology is not of finite length")
    A = ring_module(ring)
    chi_F = homology_lengths(G, A).chi
    chi_det = homology_lengths(koszul_complex(ring, [det]), A).chi
    e_R = ring_multiplicity(ring)
    return Dim1Report(a, mr.format_element(ring, det), chi_F, chi_det, e_R, chi_F == chi_det, chi_F >= a * e_R)


# ---------------------------------------------------------------------------
# Dutta multiplicity


@dataclass
class DuttaReport:
    terms: list[Fraction]
    chi: int
    stable: bool
    truncated: bool
    message: str = ""

    @property
    def matches_chi(self) -> bool:
        return all(x == self.chi for x in self.terms)


def dutta_multiplicity(F: FreeComplex, n_max: int, M: GradedModule | None = None) -> DuttaReport:
    """chi((phi^*)^n F) / p^(n d) for n = 0..n_max; stops early at the degree cap."""
    ring = F.ring
    M = M if M is not None else ring_module(ring)
    d = ring.declared_dim
    terms: list[Fraction] = []
    truncated, msg = False, ""
    for n in range(n_max + 1):
        try:
            chi = homology_lengths(frobenius_pullback(F, n), M).chi
        except CapExceeded as exc:
            truncated, msg = True, f"stopped at n={n}: {exc}"
            break
        terms.append(Fraction(chi, ring.p ** (n * d)))
    chi0 = int(terms[0]) if terms else homology_lengths(F, M).chi
    # two equal consecutive values plus one confirming value
    stable = len(terms) >= 3 and terms[-1] == terms[-2] == terms[-3]
    return DuttaReport(terms, chi0, stable, truncated, msg)


# ---------------------------------------------------------------------------
# monomial ideals in k[x, y]


@dataclass(frozen=True)
class MonomialIdeal2D:
    gens: tuple[tuple[int, int], ...]

    def __post_init__(self):
        gens = tuple(sorted({(int(a), int(b)) for a, b in self.gens}))
        if any(a < 0 or b < 0 for a, b in gens):
            raise InputError("exponents must be nonnegative")
        if not any(b == 0 for a, b in gens) or not any(a == 0 for a, b in gens):
            raise InputError("ideal is not primary to (x, y): needs pure powers of x and y")
        kept = [g for g in gens if not any(h != g and h[0] <= g[0] and h[1] <= g[1] for h in gens)]
        object.__setattr__(self, "gens", tuple(kept))

    def power(self, m: int) -> "MonomialIdeal2D":
        if m < 1:
            raise InputError("power must be >= 1")
        cur = {(0, 0)}
        for _ in range(m):
            cur = {(a + c, b + d) for a, b in cur for c, d in self.gens}
        return MonomialIdeal2D(tuple(cur))

    def colength(self) -> int:
        """Number of monomials outside the ideal (staircase count)."""
        xpow = min(a for a, b in self.gens if b == 0)
        total = 0
        for i in range(xpow):
            total += min(b for a, b in self.gens if a <= i)
        return total


def monomial_colength(J: MonomialIdeal2D, m: int = 1) -> int:
    return J.power(m).colength()


def monomial_multiplicity(J: MonomialIdeal2D, m_cap: int = 40) -> int:
    """Stable second difference of m -> colength(J^m), by the three-point rule."""
    lengths = [0] + [monomial_colength(J, m) for m in range(1, 4)]
    m = 3
    while True:
        second = _differences(lengths, 2)
        if len(second) >= 3 and second[-1] == second[-2] == second[-3]:
            return second[-1]
        m += 1
        if m > m_cap:
            raise NotPolynomial(f"second difference of colengths not stable by m = {m_cap}")
        lengths.append(monomial_colength(J, m))


@dataclass
class LechReport:
    m: int
    colength: int
    bound: Fraction
    multiplicity: int

    @property
    def passed(self) -> bool:
        return self.colength >= self.bound


def lech_check(J: MonomialIdeal2D, m: int) -> LechReport:
    """colength(J^m) >= m^2 e(J) / 2."""
    e = monomial_multiplicity(J)
    return LechReport(m, monomial_colength(J, m), Fraction(m * m * e, 2), e)


def parse_monomial_ideal(gens: Sequence[Sequence[int]]) -> MonomialIdeal2D:
    return MonomialIdeal2D(tuple(tuple(g) for g in gens))
