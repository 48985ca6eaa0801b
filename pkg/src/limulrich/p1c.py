"""Line-bundle cohomology on Z = (P^1)^c and the lim Ulrich sheaf tables.

On P^1, h^0(O(a)) = max(a+1, 0) and h^1(O(a)) = max(-a-1, 0); on a product
the Kunneth formula multiplies these factor by factor.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InputError
from .exactlin import is_prime


@dataclass(frozen=True)
class LineBundleSum:
    """A direct sum of line bundles O(a) on (P^1)^c, one weight vector per summand."""

    c: int
    weights: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.c < 1:
            raise InputError("c must be at least 1")
        ws = tuple(tuple(int(x) for x in w) for w in self.weights)
        if not ws:
            raise InputError("a line bundle sum needs at least one summand")
        if any(len(w) != self.c for w in ws):
            raise InputError(f"every weight must have length c = {self.c}")
        object.__setattr__(self, "weights", ws)

    @classmethod
    def of(cls, *weights: Sequence[int]) -> "LineBundleSum":
        return cls(len(weights[0]), tuple(tuple(w) for w in weights))

    @property
    def rank(self) -> int:
        return len(self.weights)

    def twist(self, b: Sequence[int]) -> "LineBundleSum":
        return LineBundleSum(self.c, tuple(tuple(x + y for x, y in zip(w, b)) for w in self.weights))

    def __str__(self) -> str:
        return " + ".join(f"O({','.join(map(str, w))})" for w in self.weights)


def _h0(a: int) -> int:
    return max(a + 1, 0)


def _h1(a: int) -> int:
    return max(-a - 1, 0)


def cohomology_line(c: int, a: Sequence[int], i: int) -> int:
    """h^i(Z, O(a)) by Kunneth."""
    if len(a) != c:
        raise InputError(f"weight must have length {c}")
    if not 0 <= i <= c:
        return 0
    total = 0
    for S in itertools.combinations(range(c), i):
        term = 1
        for j in range(c):
            term *= _h1(a[j]) if j in S else _h0(a[j])
            if not term:
                break
        total += term
    return total


def total_cohomology(c: int, a: Sequence[int]) -> int:
    return math.prod(abs(x + 1) for x in a)


def cohomology(N: LineBundleSum, i: int) -> int:
    return sum(cohomology_line(N.c, w, i) for w in N.weights)


def euler_characteristic(c: int, a: Sequence[int]) -> int:
    return sum((-1) ** i * cohomology_line(c, a, i) for i in range(c + 1))


# ---------------------------------------------------------------------------
# Hilbert polynomials


@dataclass(frozen=True)
class MultiPoly:
    """Integer polynomial in z_1..z_c stored as {exponent tuple: coefficient}."""

    c: int
    terms: tuple[tuple[tuple[int, ...], int], ...]

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self.terms)

    def __call__(self, z: Sequence[int]) -> int:
        return sum(coef * math.prod(x**e for x, e in zip(z, exps)) for exps, coef in self.terms)

    def coefficient(self, exps: Sequence[int]) -> int:
        return self.as_dict().get(tuple(exps), 0)


def sheaf_hilbert_polynomial(N: LineBundleSum) -> MultiPoly:
    """sum over summands of prod_i (z_i + a_i + 1)."""
    acc: dict[tuple[int, ...], int] = {}
    for w in N.weights:
        # expand prod (z_i + (a_i + 1)) by choosing z_i or the constant in each factor
        for pick in itertools.product((0, 1), repeat=N.c):
            coef = math.prod(w[j] + 1 for j in range(N.c) if not pick[j])
            if coef:
                acc[pick] = acc.get(pick, 0) + coef
    return MultiPoly(N.c, tuple(sorted((k, v) for k, v in acc.items() if v)))


def serre_vanishing_bound(N: LineBundleSum) -> tuple[int, ...]:
    """A vector b with h^{>=1}(N(b')) = 0 whenever b' >= b componentwise."""
    return tuple(max(max(-w[j] - 1, 0) for w in N.weights) for j in range(N.c))


# ---------------------------------------------------------------------------
# twist sequences and Ulrich conditions


def b_n_t(c: int, p: int, n: int, t: int) -> tuple[int, ...]:
    """((t+1) p^n, ..., (t+c) p^n)."""
    if not is_prime(p):
        raise InputError(f"{p} is not prime")
    if n < 0:
        raise InputError("n must be >= 0")
    q = p**n
    return tuple((t + i) * q for i in range(1, c + 1))


def allowed_nonzero(c: int, i: int, t: int) -> bool:
    """Cells where an Ulrich sheaf may have cohomology: i = 0, t >= 0, or i = c, t <= -c-1."""
    return (i == 0 and t >= 0) or (i == c and t <= -c - 1)


@dataclass
class UlrichSheafReport:
    ulrich: bool
    violations: list[tuple[int, int, int]]  # (i, t, h^i)

    def __bool__(self) -> bool:
        return self.ulrich


def is_ulrich_sheaf(N: LineBundleSum, t_range: Iterable[int]) -> UlrichSheafReport:
    bad = []
    for t in t_range:
        Nt = N.twist((t,) * N.c)
        for i in range(N.c + 1):
            if not allowed_nonzero(N.c, i, t):
                h = cohomology(Nt, i)
                if h:
                    bad.append((i, t, h))
    return UlrichSheafReport(not bad, bad)


@dataclass(frozen=True)
class LimitCell:
    i: int
    t: int
    n: int
    value: int  # h^i(N(b_n(t)))
    ratio: Fraction  # value / p^(n c)
    region: str  # "limit" or "zero"
    limit: Fraction
    constant: Fraction  # zero cells: ratio <= constant * p^-(n-1)
    verdict: str  # "ok", "FAIL" or "-" (not judged at this n)


def _zero_region_constant(N: LineBundleSum, p: int, i: int, t: int) -> Fraction:
    """A priori C with h^i(N(b_n(t))) / p^(nc) <= C p^-(n-1) for all n >= 0."""
    c = N.c
    if -c <= t <= -1:
        j0 = -t - 1  # the factor (t + j0 + 1) p^n vanishes
        total = 0
        for w in N.weights:
            total += abs(w[j0] + 1) * math.prod(abs(t + j + 1) + abs(w[j] + 1) for j in range(c) if j != j0)
        return Fraction(total, 1)
    # outside the band a cell can only be nonzero for the finitely many n with p^n <= reach
    if t >= 0:
        reach = max(-x - 2 for w in N.weights for x in w)  # some factor must be <= -2
    else:
        reach = max(x for w in N.weights for x in w)  # some factor must be >= 0
    if reach < 1:
        return Fraction(0)
    n_star = 0
    while p ** (n_star + 1) <= reach:
        n_star += 1
    bound = sum(math.prod(abs(t + j + 1) + abs(w[j] + 1) for j in range(c)) for w in N.weights)
    return Fraction(bound) * Fraction(p) ** (n_star - 1)


def lim_ulrich_sheaf_table(N: LineBundleSum, p: int, n_range: Iterable[int], t_range: Iterable[int],
                           tolerance: Fraction = Fraction(1, 4)) -> list[LimitCell]:
    """Exact ratios h^i(N(b_n(t))) / p^(nc) with a verdict per cell.

    Zero-limit cells pass when the ratio is within the a priori decay bound.
    Limit cells are judged at the largest n only, against relative ``tolerance``.
    """
    c = N.c
    ns = sorted(n_range)
    n_last = ns[-1]
    cells = []
    for t in sorted(t_range):
        for i in range(c + 1):
            zero_region = not allowed_nonzero(c, i, t)
            limit = Fraction(0) if zero_region else Fraction(N.rank * abs(math.prod(t + j for j in range(1, c + 1))))
            const = _zero_region_constant(N, p, i, t) if zero_region else Fraction(0)
            for n in ns:
                val = cohomology(N.twist(b_n_t(c, p, n, t)), i)
                ratio = Fraction(val, p ** (n * c))
                if zero_region:
                    ok = ratio <= const * Fraction(p) ** (1 - n)
                    verdict = "ok" if ok else "FAIL"
                elif n == n_last:
                    ok = abs(ratio - limit) <= tolerance * limit
                    verdict = "ok" if ok else "FAIL"
                else:
                    verdict = "-"
                cells.append(LimitCell(i, t, n, val, ratio, "zero" if zero_region else "limit",
                                       limit, const, verdict))
    return cells


def e_from_cohomology(N: LineBundleSum) -> int:
    """sum_{i,j} (-1)^(i+j) C(c, j) h^i(N(-j, ..., -j))."""
    c = N.c
    total = 0
    for j in range(c + 1):
        Nj = N.twist((-j,) * c)
        for i in range(c + 1):
            total += (-1) ** (i + j) * math.comb(c, j) * cohomology(Nj, i)
    return total


def gamma_hilbert_function(c: int, p: int, n: int, t: int) -> int:
    """prod_i max((t+i) p^n + 1, 0): the Hilbert function of the Segre lim Ulrich module U_n."""
    q = p**n
    return math.prod(max((t + i) * q + 1, 0) for i in range(1, c + 1))
