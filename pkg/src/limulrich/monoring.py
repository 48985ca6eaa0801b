"""Monomially presented standard graded rings over a finite field.

Two presentations are supported:

* ``poly``  -- k[x_1..x_n] / I with I generated by monomials;
* ``segre`` -- the diagonal subring of k[x_1, y_1, ..., x_c, y_c] whose degree-t
  piece is spanned by monomials of multidegree (t, ..., t).  Its Proj is
  (P^1)^c embedded by O(1, ..., 1).

Every degree-t basis monomial is a literal product of t degree-one basis
monomials, and that factorization is recorded.  Modules use it to turn
degree-one actions into actions of arbitrary ring elements.

Basis order is ascending lexicographic on exponent vectors.  For the Segre
ring the Cox variables are ordered x1, y1, x2, y2, ...
"""

from __future__ import annotations

import itertools
import math
import re
import threading
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import CapExceeded, InputError
from .exactlin import FieldSpec

DEFAULT_DEGREE_CAP = 64


@dataclass(frozen=True)
class RingElement:
    """Homogeneous element: ``coeffs[i]`` multiplies the i-th basis monomial of degree ``degree``."""

    degree: int
    coeffs: tuple[int, ...]

    def terms(self) -> list[tuple[int, int]]:
        return [(i, c) for i, c in enumerate(self.coeffs) if c]

    def is_zero(self) -> bool:
        return not any(self.coeffs)


@dataclass(frozen=True)
class RingDegreeBasis:
    degree: int
    monomials: tuple[tuple[int, ...], ...]
    # each entry: indices into the degree-one basis, multiplied left to right
    factorizations: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.monomials)


@dataclass(frozen=True, eq=False)
class GradedRingSpec:
    """A standard graded ring with a monomial presentation; hashed by identity."""

    field: FieldSpec
    kind: str
    nvars: int
    ideal: tuple[tuple[int, ...], ...]
    declared_dim: int
    degree_cap: int = DEFAULT_DEGREE_CAP
    c: int = 0
    names: tuple[str, ...] = ()
    label: str = ""
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, init=False, repr=False, compare=False)

    def __str__(self) -> str:
        return self.label or f"{self.kind}-ring"

    @property
    def p(self) -> int:
        return self.field.p

    def check_degree(self, t: int) -> None:
        if t > self.degree_cap:
            raise CapExceeded(f"degree {t} exceeds ring degree cap {self.degree_cap} of {self}")

    def _memo(self, key, build):
        hit = self._cache.get(key)
        if hit is None:
            value = build()
            with self._lock:
                hit = self._cache.setdefault(key, value)
        return hit

    def with_cap(self, degree_cap: int) -> "GradedRingSpec":
        """Same ring with a different degree cap (fresh caches)."""
        return GradedRingSpec(self.field, self.kind, self.nvars, self.ideal, self.declared_dim,
                              degree_cap, self.c, self.names, self.label)


def _minimize_ideal(gens: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    gens = sorted({tuple(g) for g in gens}, key=lambda g: (sum(g), g))
    kept: list[tuple[int, ...]] = []
    for g in gens:
        if not any(all(a <= b for a, b in zip(h, g)) for h in kept):
            kept.append(g)
    return tuple(sorted(kept))


def poly_ring(fld: FieldSpec, nvars: int, ideal: Sequence[Sequence[int]] = (),
              declared_dim: int | None = None, degree_cap: int = DEFAULT_DEGREE_CAP,
              names: Sequence[str] | None = None, label: str = "") -> GradedRingSpec:
    """k[x_1..x_n]/I for a monomial ideal I given by exponent vectors."""
    if nvars < 1:
        raise InputError("a polynomial ring needs at least one variable")
    if degree_cap < 1:
        raise InputError("degree_cap must be positive")
    for g in ideal:
        if len(g) != nvars or any(a < 0 for a in g):
            raise InputError(f"ideal generator {tuple(g)} is not an exponent vector of length {nvars}")
        if sum(g) == 0:
            raise InputError("the unit ideal is not allowed")
    gens = _minimize_ideal(ideal)
    if declared_dim is None:
        if gens:
            raise InputError("declared_dim is required for a quotient ring")
        declared_dim = nvars
    if not 0 <= declared_dim <= nvars:
        raise InputError(f"declared_dim {declared_dim} out of range 0..{nvars}")
    if names is None:
        names = ("x", "y", "z", "w")[:nvars] if nvars <= 4 else tuple(f"x{i + 1}" for i in range(nvars))
    names = tuple(names)
    if len(names) != nvars or len(set(names)) != nvars:
        raise InputError("variable names must be distinct, one per variable")
    if not label:
        label = _poly_label(fld, names, gens)
    return GradedRingSpec(fld, "poly", nvars, gens, declared_dim, degree_cap, 0, names, label)


def segre_ring(fld: FieldSpec, c: int, degree_cap: int = DEFAULT_DEGREE_CAP,
               label: str = "") -> GradedRingSpec:
    """Segre coordinate ring of (P^1)^c; Krull dimension c+1."""
    if c < 1:
        raise InputError("Segre block count must be at least 1")
    if degree_cap < 1:
        raise InputError("degree_cap must be positive")
    names = tuple(v for i in range(1, c + 1) for v in (f"x{i}", f"y{i}"))
    return GradedRingSpec(fld, "segre", 2 * c, (), c + 1, degree_cap, c, names,
                          label or f"Segre(P1^{c}) over {fld}")


def _mono_str(names: Sequence[str], exps: Sequence[int]) -> str:
    parts = []
    for v, a in zip(names, exps):
        if a == 1:
            parts.append(v)
        elif a > 1:
            parts.append(f"{v}^{a}")
    return "*".join(parts) or "1"


def _poly_label(fld, names, gens) -> str:
    base = f"{fld}[{','.join(names)}]"
    if not gens:
        return base
    return base + "/(" + ",".join(_mono_str(names, g) for g in gens) + ")"


# ---------------------------------------------------------------------------
# bases


def _compositions(total: int, parts: int):
    """Exponent vectors of the given total degree, ascending lex."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _in_ideal(ring: GradedRingSpec, exps: Sequence[int]) -> bool:
    return any(all(a >= g for a, g in zip(exps, gen)) for gen in ring.ideal)


def _segre_mono(c: int, t: int, xexps: Sequence[int]) -> tuple[int, ...]:
    out = []
    for a in xexps:
        out.extend((a, t - a))
    return tuple(out)


def degree_basis(ring: GradedRingSpec, t: int) -> RingDegreeBasis:
    """Canonical monomial basis of A_t with factorizations into degree-one monomials."""
    if t < 0:
        raise InputError(f"negative degree {t}")
    ring.check_degree(t)
    return ring._memo(("basis", t), lambda: _build_basis(ring, t))


def _build_basis(ring: GradedRingSpec, t: int) -> RingDegreeBasis:
    if ring.kind == "segre":
        c = ring.c
        monos = tuple(_segre_mono(c, t, xs) for xs in itertools.product(range(t + 1), repeat=c))
        # factor k picks x_i when k < a_i; in degree one, x_i is digit 1 and y_i digit 0
        facts = []
        for m in monos:
            xs = m[0::2]
            fac = []
            for k in range(t):
                idx = 0
                for a in xs:
                    idx = idx * 2 + (1 if k < a else 0)
                fac.append(idx)
            facts.append(tuple(fac))
        order = sorted(range(len(monos)), key=lambda k: monos[k])
        return RingDegreeBasis(t, tuple(monos[k] for k in order), tuple(facts[k] for k in order))
    monos = tuple(m for m in _compositions(t, ring.nvars) if not _in_ideal(ring, m))
    monos = tuple(sorted(monos))
    if t == 0:
        return RingDegreeBasis(0, monos, ((),) if monos else ())
    if t == 1:
        return RingDegreeBasis(1, monos, tuple((k,) for k in range(len(monos))))
    ones = degree_basis(ring, 1).monomials
    var_to_idx = {m.index(1): k for k, m in enumerate(ones)}
    facts = []
    for m in monos:
        fac = []
        for v, a in enumerate(m):
            fac.extend([var_to_idx[v]] * a)
        facts.append(tuple(fac))
    return RingDegreeBasis(t, monos, tuple(facts))


def basis_index(ring: GradedRingSpec, t: int) -> dict[tuple[int, ...], int]:
    return ring._memo(("index", t), lambda: {m: k for k, m in enumerate(degree_basis(ring, t).monomials)})


def monomial_index(ring: GradedRingSpec, exps: Sequence[int]) -> int:
    """Index of a monomial in its degree's basis, or -1 when it is zero in the ring."""
    exps = tuple(exps)
    if ring.kind == "segre":
        t = exps[0] + exps[1]
        if any(exps[2 * i] + exps[2 * i + 1] != t for i in range(ring.c)):
            raise InputError(f"{exps} is not of diagonal multidegree")
    else:
        t = sum(exps)
    return basis_index(ring, t).get(exps, -1)


def ring_hilbert_function(ring: GradedRingSpec, t: int) -> int:
    if t < 0:
        return 0
    ring.check_degree(t)
    if ring.kind == "segre":
        return (t + 1) ** ring.c
    return len(degree_basis(ring, t))


def _segre_index_array(c: int, t: int, xexps: np.ndarray) -> np.ndarray:
    # ascending lex on (a1, t-a1, a2, ...) is mixed radix in the x-exponents
    idx = np.zeros(xexps.shape[0], dtype=np.int64)
    for i in range(c):
        idx = idx * (t + 1) + xexps[:, i]
    return idx


def _segre_xexps(ring: GradedRingSpec, t: int) -> np.ndarray:
    def build():
        monos = degree_basis(ring, t).monomials
        if not monos:
            return np.zeros((0, ring.c), dtype=np.int64)
        return np.array([m[0::2] for m in monos], dtype=np.int64).reshape(len(monos), ring.c)
    return ring._memo(("xexps", t), build)


def shift_map(ring: GradedRingSpec, s: int, i: int, t: int, power: int = 1) -> np.ndarray:
    """For the i-th monomial u of A_s: index of u**power * m in A_{s*power+t} for each m in A_t (-1 if zero)."""
    target = s * power + t
    ring.check_degree(target)
    key = ("shift", s, i, t, power)

    def build():
        u = np.array(degree_basis(ring, s).monomials[i], dtype=np.int64) * power
        if ring.kind == "segre":
            xs = _segre_xexps(ring, t) + u[0::2][None, :]
            return _segre_index_array(ring.c, target, xs)
        idx = basis_index(ring, target)
        return np.array([idx.get(tuple(int(a + b) for a, b in zip(m, u)), -1)
                         for m in degree_basis(ring, t).monomials], dtype=np.int64)

    return ring._memo(key, build)


# ---------------------------------------------------------------------------
# elements


def element(ring: GradedRingSpec, degree: int, coeffs: Sequence[int]) -> RingElement:
    n = ring_hilbert_function(ring, degree)
    if len(coeffs) != n:
        raise InputError(f"degree-{degree} element needs {n} coefficients, got {len(coeffs)}")
    return RingElement(degree, tuple(int(x) for x in coeffs))


def zero(ring: GradedRingSpec, degree: int) -> RingElement:
    return RingElement(degree, (0,) * ring_hilbert_function(ring, degree))


def one(ring: GradedRingSpec) -> RingElement:
    return RingElement(0, (1,))


def monomial(ring: GradedRingSpec, exps: Sequence[int], coeff: int = 1) -> RingElement:
    exps = tuple(exps)
    t = exps[0] + exps[1] if ring.kind == "segre" else sum(exps)
    k = monomial_index(ring, exps)
    out = [0] * ring_hilbert_function(ring, t)
    if k >= 0:
        out[k] = coeff
    return RingElement(t, tuple(out))


def add(ring: GradedRingSpec, a: RingElement, b: RingElement) -> RingElement:
    if a.degree != b.degree:
        raise InputError("cannot add elements of different degrees")
    fadd = ring.field.add
    return RingElement(a.degree, tuple(fadd(x, y) for x, y in zip(a.coeffs, b.coeffs)))


def scale(ring: GradedRingSpec, c: int, a: RingElement) -> RingElement:
    mul = ring.field.mul
    return RingElement(a.degree, tuple(mul(c, x) for x in a.coeffs))


def neg(ring: GradedRingSpec, a: RingElement) -> RingElement:
    return RingElement(a.degree, tuple(ring.field.neg(x) for x in a.coeffs))


def multiply(ring: GradedRingSpec, a: RingElement, b: RingElement) -> RingElement:
    fld = ring.field
    t = a.degree + b.degree
    ring.check_degree(t)
    out = [0] * ring_hilbert_function(ring, t)
    bterms = b.terms()
    if not bterms:
        return RingElement(t, tuple(out))
    for i, x in a.terms():
        targets = shift_map(ring, a.degree, i, b.degree)
        for j, y in bterms:
            k = int(targets[j])
            if k >= 0:
                out[k] = fld.add(out[k], fld.mul(x, y))
    return RingElement(t, tuple(out))


def power(ring: GradedRingSpec, a: RingElement, k: int) -> RingElement:
    result = one(ring)
    for _ in range(k):
        result = multiply(ring, result, a)
    return result


def frobenius_power(ring: GradedRingSpec, a: RingElement, n: int) -> RingElement:
    """a -> a^(p^n), computed termwise by exponent scaling."""
    q = ring.p**n
    t = a.degree * q
    ring.check_degree(t)
    fld = ring.field
    out = [0] * ring_hilbert_function(ring, t)
    for i, x in a.terms():
        k = int(shift_map(ring, a.degree, i, 0, power=q)[0])
        if k >= 0:
            out[k] = fld.add(out[k], fld.frobenius(x, n))
    return RingElement(t, tuple(out))


def validate_dimension(ring: GradedRingSpec, window: int = 8, upto: int | None = None) -> int:
    """Check declared_dim against Hilbert-function growth; return the stabilized (d-1)-st difference."""
    d = ring.declared_dim
    top = upto if upto is not None else min(ring.degree_cap, 4 * window + max((sum(g) for g in ring.ideal), default=0))
    top = min(top, ring.degree_cap)
    values = [ring_hilbert_function(ring, t) for t in range(top + 1)]
    diffs = values
    for _ in range(max(d - 1, 0)):
        diffs = [y - x for x, y in zip(diffs, diffs[1:])]
    if d == 0:
        # Artinian: HF eventually zero, multiplicity is the total length
        if any(values[-window:]):
            raise InputError(f"{ring}: declared dimension 0 but HF does not vanish by degree {top}")
        return sum(values)
    tail = diffs[-window:]
    if len(tail) < window or len(set(tail)) != 1 or tail[0] <= 0:
        raise InputError(f"{ring}: declared dimension {d} inconsistent with Hilbert function {values[:12]}...")
    return tail[0]


# ---------------------------------------------------------------------------
# parsing and printing

_TERM = re.compile(r"^\s*(?:(\d+)\s*\*\s*)?(.*?)\s*$")


def parse_monomial(ring: GradedRingSpec, text: str) -> tuple[int, ...]:
    exps = [0] * ring.nvars
    text = text.strip()
    if text in ("", "1"):
        return tuple(exps)
    for factor in text.split("*"):
        factor = factor.strip()
        name, _, e = factor.partition("^")
        name = name.strip()
        if name not in ring.names:
            raise InputError(f"unknown variable {name!r} in {text!r}; ring has {', '.join(ring.names)}")
        try:
            k = int(e) if e else 1
        except ValueError:
            raise InputError(f"bad exponent in {factor!r}") from None
        exps[ring.names.index(name)] += k
    return tuple(exps)


def parse_element(ring: GradedRingSpec, text: str) -> RingElement:
    """Parse a homogeneous element like ``"x + y"`` or ``"x1*x2 + 2*y1*y2"``.

    Integer coefficients are field element codes.
    """
    text = text.replace("-", "+-")
    result: RingElement | None = None
    for chunk in text.split("+"):
        chunk = chunk.strip()
        if not chunk:
            continue
        sign = 1
        if chunk.startswith("-"):
            sign, chunk = -1, chunk[1:].strip()
        m = _TERM.match(chunk)
        coeff = int(m.group(1)) if m.group(1) else 1
        head = m.group(2)
        if head.isdigit() and m.group(1) is None:
            coeff, head = int(head), "1"
        coeff = coeff % ring.field.q
        if sign < 0:
            coeff = ring.field.neg(coeff)
        exps = parse_monomial(ring, head)
        if ring.kind == "segre":
            degs = {exps[2 * i] + exps[2 * i + 1] for i in range(ring.c)}
            if len(degs) != 1:
                raise InputError(f"{head!r} is not a Segre monomial")
        term = monomial(ring, exps, coeff)
        if result is None:
            result = term
        elif result.degree != term.degree:
            raise InputError(f"{text!r} is not homogeneous")
        else:
            result = add(ring, result, term)
    if result is None:
        raise InputError("empty ring element")
    return result


def format_element(ring: GradedRingSpec, a: RingElement) -> str:
    monos = degree_basis(ring, a.degree).monomials
    parts = []
    for i, c in a.terms():
        m = _mono_str(ring.names, monos[i])
        if c == 1:
            parts.append(m)
        elif m == "1":
            parts.append(str(c))
        else:
            parts.append(f"{c}*{m}")
    return " + ".join(parts) or "0"


def binomial(n: int, k: int) -> int:
    return math.comb(n, k) if 0 <= k <= n else 0
