"""Graded modules stored degreewise.

A module knows its dimension in each degree and how degree-one ring basis
elements act between consecutive degrees.  Many modules used here are
*monomial*: they have a basis on which every ring monomial acts by sending
basis vectors to basis vectors or to zero.  These expose ``monomial_map``,
an index array, which keeps the large lim Ulrich computations cheap.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import monoring as mr
from .errors import CapExceeded, GenerationNotDetected, InputError
from .exactlin import ExactMatrix, SparseMatrix, rref
from .monoring import GradedRingSpec, RingElement

DEFAULT_GEN_WINDOW = 8


class GradedModule:
    """Base class.  Subclasses set ``ring``, ``t_min``, ``t_max`` (None if unbounded), ``t_cap``."""

    ring: GradedRingSpec
    t_min: int
    t_max: int | None
    t_cap: int
    monomial: bool = False
    label: str = "M"

    def __init__(self):
        self._cache: dict = {}
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.label}>"

    def _memo(self, key, build):
        hit = self._cache.get(key)
        if hit is None:
            value = build()
            with self._lock:
                hit = self._cache.setdefault(key, value)
        return hit

    @property
    def field(self):
        return self.ring.field

    def is_finite(self) -> bool:
        return self.t_max is not None

    def in_support(self, t: int) -> bool:
        return t >= self.t_min and (self.t_max is None or t <= self.t_max)

    def dim(self, t: int) -> int:
        if not self.in_support(t):
            return 0
        if t > self.t_cap:
            raise CapExceeded(f"{self.label}: degree {t} beyond module cap {self.t_cap}")
        return self._memo(("dim", t), lambda: self._dim(t))

    def _dim(self, t: int) -> int:
        raise NotImplementedError

    # monomial modules override this; indices into the target degree, -1 for zero
    def _monomial_map(self, s: int, k: int, t: int) -> np.ndarray:
        raise NotImplementedError

    def monomial_map(self, s: int, k: int, t: int) -> np.ndarray:
        """Action of the k-th monomial of A_s from degree t to t+s as an index array."""
        if not self.monomial:
            raise TypeError(f"{self.label} is not a monomial module")
        n = self.dim(t)
        if n == 0:
            return np.zeros(0, dtype=np.int64)
        if self.dim(t + s) == 0:
            return np.full(n, -1, dtype=np.int64)
        return self._memo(("mmap", s, k, t), lambda: self._monomial_map(s, k, t))

    def _act(self, u: int, t: int) -> SparseMatrix:
        raise NotImplementedError

    def act(self, u: int, t: int) -> SparseMatrix:
        """Degree-one basis element u as a map M_t -> M_{t+1}."""
        return self.act_monomial(1, u, t)

    def act_monomial(self, s: int, k: int, t: int) -> SparseMatrix:
        src, tgt = self.dim(t), self.dim(t + s)
        if src == 0 or tgt == 0:
            return SparseMatrix.zero(self.field, tgt, src)
        if self.monomial:
            return SparseMatrix.from_map(self.field, tgt, self.monomial_map(s, k, t))
        if s == 0:
            return SparseMatrix.identity(self.field, src)
        if s == 1:
            return self._memo(("act", k, t), lambda: self._act(k, t))

        def build():
            fac = mr.degree_basis(self.ring, s).factorizations[k]
            out = self.act(fac[0], t)
            for step, u in enumerate(fac[1:], start=1):
                out = self.act(u, t + step) @ out
            return out

        return self._memo(("amono", s, k, t), build)

    def scalar(self, c: int) -> int:
        """How a field scalar acts; Frobenius-twisted modules override this."""
        return c

    def act_element(self, e: RingElement, t: int) -> SparseMatrix:
        src, tgt = self.dim(t), self.dim(t + e.degree)
        out = SparseMatrix.zero(self.field, tgt, src)
        if src == 0 or tgt == 0:
            return out
        for k, c in e.terms():
            out = out.add(self.act_monomial(e.degree, k, t), self.scalar(c))
        return out


# ---------------------------------------------------------------------------
# free modules


class FreeModule(GradedModule):
    """The module (+)_j A(-a_j)."""

    monomial = True

    def __init__(self, ring: GradedRingSpec, degrees: Sequence[int]):
        super().__init__()
        self.ring = ring
        # generator order is kept: complexes index their matrices by it
        self.degrees = tuple(int(a) for a in degrees)
        self.t_min = min(self.degrees) if self.degrees else 0
        self.t_max = None if self.degrees else -1
        self.t_cap = ring.degree_cap + (min(self.degrees) if self.degrees else 0)
        self.label = "+".join(f"A({-a})" for a in self.degrees) or "0"

    @property
    def rank(self) -> int:
        return len(self.degrees)

    def block_offsets(self, t: int) -> list[int]:
        """Start offset of each summand's degree-t block; the last entry is the total."""
        def build():
            offs = [0]
            for a in self.degrees:
                offs.append(offs[-1] + mr.ring_hilbert_function(self.ring, t - a))
            return offs
        if t > self.t_cap:
            raise CapExceeded(f"{self.label}: degree {t} beyond module cap {self.t_cap}")
        return self._memo(("offs", t), build)

    def _dim(self, t: int) -> int:
        return self.block_offsets(t)[-1]

    def _monomial_map(self, s: int, k: int, t: int) -> np.ndarray:
        src, tgt = self.block_offsets(t), self.block_offsets(t + s)
        parts = []
        for j, a in enumerate(self.degrees):
            if src[j + 1] == src[j]:
                continue
            idx = mr.shift_map(self.ring, s, k, t - a)
            parts.append(np.where(idx >= 0, idx + tgt[j], -1))
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def basis_vector(self, j: int, t: int, mono_index: int) -> int:
        """Position of (summand j, monomial index) inside degree t."""
        return self.block_offsets(t)[j] + mono_index


def realize_free(ring: GradedRingSpec, degrees: Sequence[int]) -> FreeModule:
    """(+)_j A(-a_j) realized degreewise; generator degrees must be >= 0."""
    if any(a < 0 for a in degrees):
        raise InputError("generator degrees of a free module spec must be >= 0")
    return FreeModule(ring, sorted(degrees))


def ring_module(ring: GradedRingSpec) -> FreeModule:
    return FreeModule(ring, (0,))


def hilbert_function(M: GradedModule, t: int) -> int:
    return M.dim(t)


# ---------------------------------------------------------------------------
# Gamma-type modules over the Segre ring


class GammaSegreModule(GradedModule):
    """Degree t piece: Cox monomials of multidegree q*t*(1..1) + w, with s acting as s**q."""

    monomial = True

    def __init__(self, ring: GradedRingSpec, n: int, w: Sequence[int]):
        super().__init__()
        if ring.kind != "segre":
            raise InputError("gamma modules live over a Segre ring")
        if len(w) != ring.c:
            raise InputError(f"weight vector must have length c = {ring.c}")
        if n < 0:
            raise InputError("Frobenius exponent must be >= 0")
        self.ring = ring
        self.n = n
        self.q = ring.p**n
        self.w = tuple(int(x) for x in w)
        self.t_min = max(-(x // self.q) for x in self.w)  # smallest t with q*t + w_i >= 0 for all i
        self.t_max = None
        self.t_cap = ring.degree_cap
        self.label = f"Gamma(n={n}, w={self.w})"

    def multidegree(self, t: int) -> tuple[int, ...]:
        return tuple(self.q * t + x for x in self.w)

    def _dim(self, t: int) -> int:
        return math.prod(D + 1 for D in self.multidegree(t))

    def _xexps(self, t: int) -> np.ndarray:
        def build():
            D = self.multidegree(t)
            grids = np.meshgrid(*[np.arange(d + 1) for d in D], indexing="ij")
            return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)
        return self._memo(("xexps", t), build)

    def _monomial_map(self, s: int, k: int, t: int) -> np.ndarray:
        alpha = np.array(mr.degree_basis(self.ring, s).monomials[k][0::2], dtype=np.int64)
        xs = self._xexps(t) + self.q * alpha[None, :]
        D = self.multidegree(t + s)
        idx = np.zeros(xs.shape[0], dtype=np.int64)
        for i in range(self.ring.c):
            idx = idx * (D[i] + 1) + xs[:, i]
        return idx

    def scalar(self, c: int) -> int:
        return self.field.frobenius(c, self.n)

    def basis_monomials(self, t: int) -> list[tuple[int, ...]]:
        """Cox exponent vectors (x1, y1, ...) of the degree-t basis."""
        D = self.multidegree(t)
        return [tuple(v for a, d in zip(row, D) for v in (int(a), d - int(a))) for row in self._xexps(t)]


def gamma_module_on_segre(c: int, p: int, n: int, w: Sequence[int],
                          ring: GradedRingSpec | None = None) -> GammaSegreModule:
    if ring is None:
        from .exactlin import FieldSpec
        ring = mr.segre_ring(FieldSpec(p), c)
    elif ring.kind != "segre" or ring.c != c or ring.p != p:
        raise InputError("ring does not match (c, p)")
    return GammaSegreModule(ring, n, w)


# ---------------------------------------------------------------------------
# constructions on modules


class Twist(GradedModule):
    """M(s): degree t piece is M_{t+s}."""

    def __init__(self, M: GradedModule, s: int):
        super().__init__()
        self.base = M
        self.shift = s
        self.ring = M.ring
        self.monomial = M.monomial
        self.t_min = M.t_min - s
        self.t_max = None if M.t_max is None else M.t_max - s
        self.t_cap = M.t_cap - s
        self.label = f"{M.label}({s})"

    def _dim(self, t):
        return self.base.dim(t + self.shift)

    def _monomial_map(self, s, k, t):
        return self.base.monomial_map(s, k, t + self.shift)

    def _act(self, u, t):
        return self.base.act(u, t + self.shift)

    def act_monomial(self, s, k, t):
        return self.base.act_monomial(s, k, t + self.shift)

    def scalar(self, c):
        return self.base.scalar(c)


def twist(M: GradedModule, s: int) -> GradedModule:
    if isinstance(M, FreeModule):
        return FreeModule(M.ring, [a - s for a in M.degrees])
    if isinstance(M, Twist):
        return M.base if M.shift + s == 0 else Twist(M.base, M.shift + s)
    return Twist(M, s) if s else M


class DirectSum(GradedModule):
    def __init__(self, parts: Sequence[GradedModule]):
        super().__init__()
        if not parts:
            raise InputError("empty direct sum")
        ring = parts[0].ring
        if any(P.ring is not ring for P in parts):
            raise InputError("summands live over different rings")
        self.parts = tuple(parts)
        self.ring = ring
        self.monomial = all(P.monomial for P in parts)
        self.t_min = min(P.t_min for P in parts)
        self.t_max = None if any(P.t_max is None for P in parts) else max(P.t_max for P in parts)
        self.t_cap = min(P.t_cap for P in parts)
        self.label = " + ".join(P.label for P in parts)

    def offsets(self, t: int) -> list[int]:
        offs = [0]
        for P in self.parts:
            offs.append(offs[-1] + P.dim(t))
        return offs

    def _dim(self, t):
        return self.offsets(t)[-1]

    def _monomial_map(self, s, k, t):
        tgt = self.offsets(t + s)
        out = []
        for j, P in enumerate(self.parts):
            if P.dim(t):
                idx = P.monomial_map(s, k, t)
                out.append(np.where(idx >= 0, idx + tgt[j], -1))
        return np.concatenate(out)

    def act_monomial(self, s, k, t):
        if self.monomial:
            return super().act_monomial(s, k, t)
        fld = self.field
        blocks = {(j, j): P.act_monomial(s, k, t) for j, P in enumerate(self.parts)}
        return SparseMatrix.block(fld, [P.dim(t + s) for P in self.parts],
                                  [P.dim(t) for P in self.parts], blocks)

    def act_element(self, e, t):
        fld = self.field
        blocks = {(j, j): P.act_element(e, t) for j, P in enumerate(self.parts)}
        return SparseMatrix.block(fld, [P.dim(t + e.degree) for P in self.parts],
                                  [P.dim(t) for P in self.parts], blocks)


def direct_sum(*parts: GradedModule) -> GradedModule:
    return parts[0] if len(parts) == 1 else DirectSum(parts)


class PushforwardComponent(GradedModule):
    """Residue class i of phi_*^n M: degree t piece M_{q t + i}, u acting as u^q."""

    def __init__(self, M: GradedModule, n: int, i: int):
        super().__init__()
        q = M.ring.p**n
        if not 0 <= i < q:
            raise InputError("residue class out of range")
        self.base, self.n, self.q, self.i = M, n, q, i
        self.ring = M.ring
        self.monomial = M.monomial
        self.t_min = -((i - M.t_min) // q)  # ceil((t_min - i)/q)
        self.t_max = None if M.t_max is None else (M.t_max - i) // q
        self.t_cap = (M.t_cap - i) // q
        self.label = f"phi^{n}_*({M.label})[{i}]"

    def _dim(self, t):
        return self.base.dim(self.q * t + self.i)

    def _raised(self, s: int, k: int) -> int:
        self.ring.check_degree(s * self.q)
        return int(mr.shift_map(self.ring, s, k, 0, power=self.q)[0])

    def _monomial_map(self, s, k, t):
        kk = self._raised(s, k)
        if kk < 0:
            return np.full(self.dim(t), -1, dtype=np.int64)
        return self.base.monomial_map(s * self.q, kk, self.q * t + self.i)

    def act_monomial(self, s, k, t):
        if self.monomial:
            return super().act_monomial(s, k, t)
        src, tgt = self.dim(t), self.dim(t + s)
        kk = self._raised(s, k)
        if kk < 0 or src == 0 or tgt == 0:
            return SparseMatrix.zero(self.field, tgt, src)
        return self.base.act_monomial(s * self.q, kk, self.q * t + self.i)

    def scalar(self, c):
        return self.base.scalar(self.field.frobenius(c, self.n))


def frobenius_pushforward(M: GradedModule, n: int) -> GradedModule:
    """phi_*^n M as the direct sum of its q = p^n residue-class strands."""
    if n < 0:
        raise InputError("Frobenius exponent must be >= 0")
    if n == 0:
        return M
    q = M.ring.p**n
    return DirectSum([PushforwardComponent(M, n, i) for i in range(q)])


class MonomialQuotient(GradedModule):
    """M / (r_1 M + ... + r_k M) for a monomial module M and monomial elements r_j.

    With ``require_regular`` the first element must act injectively on M in every
    degree that gets materialized; a failure raises ``NotRegular``.
    """

    monomial = True

    def __init__(self, M: GradedModule, elements: Sequence[tuple[int, int]], require_regular: bool = False):
        super().__init__()
        if not M.monomial:
            raise InputError("monomial quotients need a monomial module")
        self.base = M
        self.elements = tuple(elements)  # (degree, monomial index)
        self.require_regular = require_regular
        self.ring = M.ring
        self.t_min, self.t_max, self.t_cap = M.t_min, M.t_max, M.t_cap
        self.label = f"{M.label}/({len(self.elements)} monomials)"
        self._checked_upto = M.t_min - 1

    def _check_regular(self, upto: int) -> None:
        s, k = self.elements[0]
        for t in range(self._checked_upto + 1, upto + 1):
            if self.base.dim(t) == 0:
                continue
            idx = self.base.monomial_map(s, k, t)
            if (idx < 0).any() or np.unique(idx).size != idx.size:
                raise NotRegular(self, f"element is a zero divisor on {self.base.label} in degree {t}")
            self._checked_upto = t
        self._checked_upto = max(self._checked_upto, upto)

    def _survivors(self, t: int) -> np.ndarray:
        def build():
            n = self.base.dim(t)
            alive = np.ones(n, dtype=bool)
            if self.require_regular:
                self._check_regular(t - self.elements[0][0])
            for s, k in self.elements:
                if self.base.dim(t - s):
                    img = self.base.monomial_map(s, k, t - s)
                    alive[img[img >= 0]] = False
            relabel = np.full(n, -1, dtype=np.int64)
            relabel[alive] = np.arange(int(alive.sum()))
            return relabel
        return self._memo(("surv", t), build)

    def _dim(self, t):
        return int((self._survivors(t) >= 0).sum())

    def _monomial_map(self, s, k, t):
        keep = self._survivors(t) >= 0
        idx = self.base.monomial_map(s, k, t)[keep]
        relabel = self._survivors(t + s)
        return np.where(idx >= 0, relabel[np.maximum(idx, 0)], -1)

    def scalar(self, c):
        return self.base.scalar(c)


class NotRegular(Exception):
    """Internal signal: an element peeled off a Koszul complex is not a nonzerodivisor."""

    def __init__(self, source: "MonomialQuotient", message: str):
        super().__init__(message)
        self.source = source


class DegreewiseModule(GradedModule):
    """Finite module given by explicit dims and degree-one action matrices."""

    def __init__(self, ring: GradedRingSpec, dims: dict[int, int],
                 actions: dict[tuple[int, int], SparseMatrix] | None = None, label: str = "M"):
        super().__init__()
        self.ring = ring
        self.dims = {t: d for t, d in dims.items() if d}
        self.actions = dict(actions or {})
        self.t_min = min(self.dims, default=0)
        self.t_max = max(self.dims, default=-1)
        self.t_cap = max(self.t_max, 0) + ring.degree_cap
        self.label = label
        n1 = mr.ring_hilbert_function(ring, 1)
        for (u, t), m in self.actions.items():
            if not 0 <= u < n1 or (m.nrows, m.ncols) != (self.dim(t + 1), self.dim(t)):
                raise InputError(f"action matrix for (u={u}, t={t}) has wrong shape")

    def _dim(self, t):
        return self.dims.get(t, 0)

    def _act(self, u, t):
        m = self.actions.get((u, t))
        return m if m is not None else SparseMatrix.zero(self.field, self.dim(t + 1), self.dim(t))


def residue_field(ring: GradedRingSpec, degree: int = 0) -> DegreewiseModule:
    """k = A/A_{>=1}, placed in the given degree."""
    return DegreewiseModule(ring, {degree: 1}, label="k" if degree == 0 else f"k({-degree})")


# ---------------------------------------------------------------------------
# cokernels of maps between free modules


def free_map_block(F: FreeModule, G: FreeModule, entries: Sequence[Sequence[RingElement | None]],
                   t: int) -> SparseMatrix:
    """Degree-t piece of the map F -> G with ``entries[r][c]`` from summand c of F to summand r of G."""
    fld = F.ring.field
    ring = F.ring
    src_off, tgt_off = F.block_offsets(t), G.block_offsets(t)
    cols: list[dict] = [{} for _ in range(src_off[-1])]
    add, mul = fld.add, fld.mul
    for c, a in enumerate(F.degrees):
        width = src_off[c + 1] - src_off[c]
        if not width:
            continue
        for r, b in enumerate(G.degrees):
            e = entries[r][c]
            if e is None or e.is_zero():
                continue
            if e.degree != a - b:
                raise InputError(f"entry ({r},{c}) has degree {e.degree}, expected {a - b}")
            for k, coeff in e.terms():
                idx = mr.shift_map(ring, e.degree, k, t - a)
                for m in range(width):
                    tgt = int(idx[m])
                    if tgt < 0:
                        continue
                    col = cols[src_off[c] + m]
                    key = tgt_off[r] + tgt
                    v = add(col.get(key, 0), coeff)
                    if v:
                        col[key] = v
                    else:
                        col.pop(key, None)
    return SparseMatrix(fld, tgt_off[-1], src_off[-1], cols)


class CokernelModule(GradedModule):
    """coker(F1 -> F0) for a matrix of homogeneous ring elements."""

    def __init__(self, target: FreeModule, source: FreeModule,
                 entries: Sequence[Sequence[RingElement | None]], label: str = "coker"):
        super().__init__()
        if len(entries) != target.rank or any(len(r) != source.rank for r in entries):
            raise InputError("matrix shape does not match the free modules")
        self.target, self.source, self.entries = target, source, entries
        self.ring = target.ring
        self.t_min, self.t_max = target.t_min, target.t_max
        self.t_cap = min(target.t_cap, source.t_cap)
        self.label = label

    def _echelon(self, t: int):
        """(pivot columns, reduced image rows, non-pivot coordinates) in F0_t."""
        def build():
            n0 = self.target.dim(t)
            img = free_map_block(self.source, self.target, self.entries, t)
            fld = self.field
            if img.ncols == 0 or img.is_zero():
                return [], None, list(range(n0))
            rows = ExactMatrix(fld, img.ncols, n0, tuple(tuple(r) for r in img.transpose().to_dense()))
            rk, piv, red = rref(rows)
            free = [j for j in range(n0) if j not in set(piv)]
            return piv, red.entries[:rk], free
        return self._memo(("ech", t), build)

    def _dim(self, t):
        return len(self._echelon(t)[2])

    def reduce_basis_vector(self, t: int, j: int) -> dict[int, int]:
        """Coordinates in M_t of the image of the j-th basis vector of F0_t."""
        piv, rows, free = self._echelon(t)
        pos = self._memo(("pos", t), lambda: {c: i for i, c in enumerate(free)})
        if j in pos:
            return {pos[j]: 1}
        row = rows[piv.index(j)]
        fld = self.field
        return {pos[c]: fld.neg(row[c]) for c in free if row[c]}

    def _act(self, u, t):
        free = self._echelon(t)[2]
        idx = self.target.monomial_map(1, u, t)
        cols = []
        for j in free:
            tgt = int(idx[j])
            cols.append(self.reduce_basis_vector(t + 1, tgt) if tgt >= 0 else {})
        return SparseMatrix(self.field, self.dim(t + 1), len(free), cols)


def cokernel(ring: GradedRingSpec, target_degrees: Sequence[int], source_degrees: Sequence[int],
             entries: Sequence[Sequence[RingElement | None]], label: str = "coker") -> CokernelModule:
    return CokernelModule(FreeModule(ring, target_degrees), FreeModule(ring, source_degrees), entries, label)


# ---------------------------------------------------------------------------
# generators and well-definedness


@dataclass(frozen=True)
class Generators:
    by_degree: tuple[tuple[int, int], ...]

    @property
    def total(self) -> int:
        return sum(n for _, n in self.by_degree)

    @property
    def degrees(self) -> list[int]:
        return [t for t, n in self.by_degree for _ in range(n)]


def _image_rank(M: GradedModule, t: int) -> int:
    """rank of (+)_u act(u, t-1): (+) M_{t-1} -> M_t."""
    if M.dim(t - 1) == 0:
        return 0
    n1 = mr.ring_hilbert_function(M.ring, 1)
    if M.monomial:
        hit = np.zeros(M.dim(t), dtype=bool)
        for u in range(n1):
            idx = M.monomial_map(1, u, t - 1)
            hit[idx[idx >= 0]] = True
        return int(hit.sum())
    mats = [M.act(u, t - 1) for u in range(n1)]
    return SparseMatrix.hstack(M.field, M.dim(t), mats).rank()


def minimal_generators(M: GradedModule, window: int = DEFAULT_GEN_WINDOW) -> Generators:
    """Number of minimal generators per degree, nu_t = dim coker(A_1 (x) M_{t-1} -> M_t)."""
    found: list[tuple[int, int]] = []
    quiet = 0
    t = M.t_min
    while True:
        if M.t_max is not None and t > M.t_max:
            break
        try:
            d = M.dim(t)
        except CapExceeded:
            raise GenerationNotDetected(
                f"{M.label}: generators still possible at degree {t}, beyond the cap") from None
        nu = d - _image_rank(M, t) if d else 0
        if nu:
            found.append((t, nu))
            quiet = 0
        else:
            quiet += 1
            if quiet >= window:
                break
        t += 1
    return Generators(tuple(found))


def verify_relations(M: GradedModule, t: int) -> bool:
    """The induced A_2-action from degree t is well defined (commutativity and ring relations)."""
    ring = M.ring
    n1 = mr.ring_hilbert_function(ring, 1)
    if M.dim(t) == 0:
        return True
    groups: dict[int, list[SparseMatrix]] = {}
    for u in range(n1):
        prod_idx = mr.shift_map(ring, 1, u, 1)
        for v in range(n1):
            comp = M.act(v, t + 1) @ M.act(u, t)
            key = int(prod_idx[v])
            if key < 0:
                if not comp.is_zero():
                    return False
            else:
                groups.setdefault(key, []).append(comp)
    return all(all(m == ms[0] for m in ms[1:]) for ms in groups.values())

