"""Finite free graded complexes and their homology against degreewise modules.

A complex is F_n -> ... -> F_1 -> F_0 with F_i = (+)_j A(-a_ij).  The
differential d_i : F_i -> F_{i-1} is a matrix of homogeneous ring elements,
entry (r, c) of degree a_ic - a_(i-1)r.

Homology lengths of F (x) M are computed degree by degree.  Koszul complexes
over monomial modules take a shortcut: a monomial element r that is a
nonzerodivisor on M is removed, using H(K(r, r'; M)) = H(K(r'; M / rM)).
Regularity is verified in every degree that gets used.  If it fails, the
element stays in the complex.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from . import monoring as mr
from .errors import CapExceeded, HomologyNotFinite, InputError, NotShortComplex, ResolutionTooLong
from .exactlin import ExactMatrix, SparseMatrix, kernel_basis
from .grmod import (DEFAULT_GEN_WINDOW, FreeModule, GradedModule, MonomialQuotient, NotRegular,
                    free_map_block, minimal_generators, ring_module)
from .monoring import GradedRingSpec, RingElement

Matrix = tuple[tuple[RingElement | None, ...], ...]


def _is_zero(e: RingElement | None) -> bool:
    return e is None or e.is_zero()


def ring_matmul(ring: GradedRingSpec, a: Sequence[Sequence[RingElement | None]],
                b: Sequence[Sequence[RingElement | None]]) -> list[list[RingElement | None]]:
    rows = len(a)
    inner = len(b)
    cols = len(b[0]) if b else 0
    out: list[list[RingElement | None]] = [[None] * cols for _ in range(rows)]
    for r in range(rows):
        for c in range(cols):
            acc = None
            for k in range(inner):
                x, y = a[r][k], b[k][c]
                if _is_zero(x) or _is_zero(y):
                    continue
                prod = mr.multiply(ring, x, y)
                acc = prod if acc is None else mr.add(ring, acc, prod)
            out[r][c] = None if acc is None or acc.is_zero() else acc
    return out


@dataclass(eq=False)
class FreeComplex:
    """F_0 <- F_1 <- ... <- F_n; ``diffs[i-1]`` is d_i as rows indexed by F_{i-1}."""

    ring: GradedRingSpec
    terms: tuple[tuple[int, ...], ...]
    diffs: tuple[Matrix, ...]
    koszul_elements: tuple[RingElement, ...] | None = None
    label: str = "F"
    _free: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        self.terms = tuple(tuple(int(a) for a in t) for t in self.terms)
        self.diffs = tuple(tuple(tuple(row) for row in d) for d in self.diffs)
        if len(self.diffs) != max(len(self.terms) - 1, 0):
            raise InputError("need one differential per homological index >= 1")
        for i, d in enumerate(self.diffs, start=1):
            src, tgt = self.terms[i], self.terms[i - 1]
            if len(d) != len(tgt) or any(len(row) != len(src) for row in d):
                raise InputError(f"d_{i} has the wrong shape")
            for r, row in enumerate(d):
                for c, e in enumerate(row):
                    if not _is_zero(e) and e.degree != src[c] - tgt[r]:
                        raise InputError(f"d_{i}[{r},{c}] has degree {e.degree}, expected {src[c] - tgt[r]}")
        for i in range(1, len(self.diffs)):
            prod = ring_matmul(self.ring, self.diffs[i - 1], self.diffs[i])
            if any(not _is_zero(e) for row in prod for e in row):
                raise InputError(f"d_{i} o d_{i + 1} is not zero")

    @property
    def length(self) -> int:
        """Largest index with a nonzero term (-1 for the zero complex)."""
        nz = [i for i, t in enumerate(self.terms) if t]
        return max(nz) if nz else -1

    def ranks(self) -> list[int]:
        return [len(t) for t in self.terms]

    def free(self, i: int) -> FreeModule:
        if i not in self._free:
            self._free[i] = FreeModule(self.ring, self.terms[i] if 0 <= i < len(self.terms) else ())
        return self._free[i]

    def generator_degrees(self) -> list[int]:
        return [a for t in self.terms for a in t]

    def spread(self) -> int:
        degs = self.generator_degrees()
        return max(degs) - min(degs) if degs else 0


def koszul_complex(ring: GradedRingSpec, elems: Sequence[RingElement]) -> FreeComplex:
    """Koszul complex on homogeneous elements of positive degree."""
    elems = tuple(elems)
    for e in elems:
        if e.degree < 1:
            raise InputError("Koszul elements must have positive degree")
    k = len(elems)
    subsets = [list(itertools.combinations(range(k), i)) for i in range(k + 1)]
    terms = [tuple(sum(elems[j].degree for j in S) for S in subsets[i]) for i in range(k + 1)]
    diffs = []
    for i in range(1, k + 1):
        pos = {S: r for r, S in enumerate(subsets[i - 1])}
        d = [[None] * len(subsets[i]) for _ in subsets[i - 1]]
        for c, S in enumerate(subsets[i]):
            for slot, j in enumerate(S):
                rest = S[:slot] + S[slot + 1:]
                e = elems[j] if slot % 2 == 0 else mr.neg(ring, elems[j])
                d[pos[rest]][c] = e
        diffs.append(d)
    return FreeComplex(ring, tuple(terms), tuple(diffs), koszul_elements=elems,
                       label=f"K({', '.join(mr.format_element(ring, e) for e in elems)})")


# ---------------------------------------------------------------------------
# homology


@dataclass
class HomologyTable:
    lengths: tuple[int, ...]
    per_degree: dict[tuple[int, int], int]
    degree_range: tuple[int, int]

    @property
    def chi(self) -> int:
        return sum((-1) ** i * h for i, h in enumerate(self.lengths))

    @property
    def chi1(self) -> int:
        return sum((-1) ** (i - 1) * h for i, h in enumerate(self.lengths) if i >= 1)

    @property
    def total(self) -> int:
        return sum(self.lengths)


def default_window(F: FreeComplex) -> int:
    return 2 * (F.spread() + 4)


def tensor_differential(F: FreeComplex, i: int, M: GradedModule, t: int) -> SparseMatrix:
    """Degree-t piece of d_i (x) M : F_i (x) M -> F_{i-1} (x) M."""
    src_deg, tgt_deg = F.terms[i], F.terms[i - 1]
    src_dims = [M.dim(t - a) for a in src_deg]
    tgt_dims = [M.dim(t - b) for b in tgt_deg]
    blocks = {}
    d = F.diffs[i - 1]
    for r in range(len(tgt_deg)):
        if not tgt_dims[r]:
            continue
        for c in range(len(src_deg)):
            e = d[r][c]
            if _is_zero(e) or not src_dims[c]:
                continue
            blocks[(r, c)] = M.act_element(e, t - src_deg[c])
    return SparseMatrix.block(M.field, tgt_dims, src_dims, blocks)


def degree_homology(F: FreeComplex, M: GradedModule, t: int) -> list[int]:
    n = len(F.terms)
    dims = [sum(M.dim(t - a) for a in F.terms[i]) for i in range(n)]
    ranks = [0] * (n + 1)
    for i in range(1, n):
        if dims[i] and dims[i - 1]:
            ranks[i] = tensor_differential(F, i, M, t).rank()
    return [dims[i] - ranks[i] - ranks[i + 1] for i in range(n)]


def _scan(F: FreeComplex, M: GradedModule, window: int, nterms: int) -> HomologyTable:
    degs = F.generator_degrees()
    if not degs:
        return HomologyTable((0,) * nterms, {}, (0, -1))
    lo = min(degs) + M.t_min
    hi_exact = None if M.t_max is None else M.t_max + max(degs)
    per: dict[tuple[int, int], int] = {}
    totals = [0] * nterms
    quiet = 0
    t = lo
    while True:
        if hi_exact is not None and t > hi_exact:
            break
        try:
            hs = degree_homology(F, M, t)
        except CapExceeded as exc:
            raise HomologyNotFinite(f"homology not finite within cap ({exc})") from None
        if any(hs):
            quiet = 0
            for i, h in enumerate(hs):
                if h:
                    per[(i, t)] = h
                    totals[i] += h
        else:
            quiet += 1
            if quiet >= window:
                break
        t += 1
    return HomologyTable(tuple(totals), per, (lo, t))


def _single_monomial(e: RingElement) -> int | None:
    terms = e.terms()
    return terms[0][0] if len(terms) == 1 else None


def homology_lengths(F: FreeComplex, M: GradedModule, window: int | None = None,
                     peel: bool = True) -> HomologyTable:
    """Lengths of H_i(F (x) M) with a per-degree breakdown."""
    if F.ring is not M.ring:
        raise InputError("complex and module live over different rings")
    nterms = len(F.terms)
    if not (peel and F.koszul_elements and M.monomial):
        return _scan(F, M, window if window is not None else default_window(F), nterms)
    elems = list(F.koszul_elements)
    blocked: set[int] = set()
    while True:
        cur = M
        rest = []
        peeled_map = {}
        for j, e in enumerate(elems):
            k = _single_monomial(e)
            if k is not None and j not in blocked:
                cur = MonomialQuotient(cur, [(e.degree, k)], require_regular=True)
                peeled_map[id(cur)] = j
            else:
                rest.append(e)
        if not peeled_map:
            return _scan(F, M, window if window is not None else default_window(F), nterms)
        G = koszul_complex(F.ring, rest) if rest else FreeComplex(F.ring, ((0,),), ())
        # the window follows the complex actually scanned
        try:
            table = _scan(G, cur, window if window is not None else default_window(G), len(G.terms))
        except NotRegular as exc:
            blocked.add(peeled_map[id(exc.source)])
            continue
        lengths = list(table.lengths) + [0] * (nterms - len(table.lengths))
        return HomologyTable(tuple(lengths), table.per_degree, table.degree_range)


def euler_characteristic(F: FreeComplex, M: GradedModule, window: int | None = None) -> int:
    return homology_lengths(F, M, window).chi


def chi_1(F: FreeComplex, M: GradedModule, window: int | None = None) -> int:
    return homology_lengths(F, M, window).chi1


# ---------------------------------------------------------------------------
# minimalization and Betti numbers


def _unit_coeff(e: RingElement | None) -> int:
    if _is_zero(e) or e.degree != 0:
        return 0
    return e.coeffs[0]


def minimalize(F: FreeComplex) -> FreeComplex:
    """Cancel unit entries until none remain (first unit in row-major scan, lowest i first)."""
    ring = F.ring
    fld = ring.field
    terms = [list(t) for t in F.terms]
    diffs = [[list(row) for row in d] for d in F.diffs]
    while True:
        hit = None
        for i, d in enumerate(diffs, start=1):
            for r, row in enumerate(d):
                for c, e in enumerate(row):
                    if _unit_coeff(e):
                        hit = (i, r, c)
                        break
                if hit:
                    break
            if hit:
                break
        if hit is None:
            break
        i, r, c = hit
        d = diffs[i - 1]
        uinv = fld.inv(_unit_coeff(d[r][c]))
        new = []
        for rr, row in enumerate(d):
            if rr == r:
                continue
            gamma = row[c]
            out_row = []
            for cc, e in enumerate(row):
                if cc == c:
                    continue
                beta = d[r][cc]
                if not _is_zero(gamma) and not _is_zero(beta):
                    corr = mr.scale(ring, uinv, mr.multiply(ring, gamma, beta))
                    e = mr.neg(ring, corr) if _is_zero(e) else mr.add(ring, e, mr.neg(ring, corr))
                out_row.append(None if _is_zero(e) else e)
            new.append(out_row)
        diffs[i - 1] = new
        if i < len(diffs):
            diffs[i] = [row for rr, row in enumerate(diffs[i]) if rr != c]
        if i >= 2:
            diffs[i - 2] = [[e for cc, e in enumerate(row) if cc != r] for row in diffs[i - 2]]
        del terms[i][c]
        del terms[i - 1][r]
    # drop trailing zero terms
    while len(terms) > 1 and not terms[-1]:
        terms.pop()
        diffs.pop()
    return FreeComplex(ring, tuple(tuple(t) for t in terms), tuple(tuple(tuple(r) for r in d) for d in diffs),
                       koszul_elements=F.koszul_elements if terms == [list(t) for t in F.terms] else None,
                       label=f"min({F.label})")


def betti_numbers(F: FreeComplex) -> list[int]:
    return minimalize(F).ranks()


def is_minimal(F: FreeComplex) -> bool:
    return not any(_unit_coeff(e) for d in F.diffs for row in d for e in row)


# ---------------------------------------------------------------------------
# resolutions


class _Span:
    """Incremental echelon basis of a subspace of F_q^n."""

    def __init__(self, fld, n: int):
        self.fld, self.n = fld, n
        self.rows: dict[int, list[int]] = {}

    def reduce(self, v: list[int]) -> list[int]:
        fld = self.fld
        v = list(v)
        for p, row in self.rows.items():
            if v[p]:
                f = v[p]
                v = [fld.sub(x, fld.mul(f, y)) if y else x for x, y in zip(v, row)]
        return v

    def add(self, v: list[int]) -> bool:
        v = self.reduce(v)
        piv = next((j for j, x in enumerate(v) if x), None)
        if piv is None:
            return False
        fld = self.fld
        inv = fld.inv(v[piv])
        v = [fld.mul(x, inv) for x in v]
        for p, row in self.rows.items():
            if row[piv]:
                f = row[piv]
                self.rows[p] = [fld.sub(x, fld.mul(f, y)) if y else x for x, y in zip(row, v)]
        self.rows[piv] = v
        return True

    def __len__(self) -> int:
        return len(self.rows)


def _kernel_generators(F: FreeModule, map_at, t_lo: int, t_hi: int, window: int):
    """Minimal generators (degree, vector in F_t) of the kernel of a degreewise map out of F."""
    fld = F.field
    n1 = mr.ring_hilbert_function(F.ring, 1)
    gens: list[tuple[int, list[int]]] = []
    prev_basis: list[list[int]] = []
    quiet = 0
    t = t_lo
    while True:
        if t > t_hi:
            raise CapExceeded(f"kernel generators still appearing at degree {t_hi}")
        n = F.dim(t)
        if n:
            mat = map_at(t)
            ker = kernel_basis(mat) if mat.rows else ExactMatrix.identity(fld, n)
            kvecs = [list(col) for col in ker.columns()]
        else:
            kvecs = []
        span = _Span(fld, n)
        for v in prev_basis:
            for u in range(n1):
                idx = F.monomial_map(1, u, t - 1)
                w = [0] * n
                for j, x in enumerate(v):
                    if x and idx[j] >= 0:
                        w[idx[j]] = fld.add(w[idx[j]], x)
                span.add(w)
        new = 0
        for v in kvecs:
            if span.add(v):
                gens.append((t, v))
                new += 1
        prev_basis = kvecs
        if new:
            quiet = 0
        else:
            quiet += 1
            if quiet >= window:
                break
        t += 1
    return gens


def _vector_to_column(F: FreeModule, t: int, v: list[int]) -> list[RingElement | None]:
    offs = F.block_offsets(t)
    col = []
    for j, a in enumerate(F.degrees):
        chunk = v[offs[j]:offs[j + 1]]
        col.append(RingElement(t - a, tuple(chunk)) if any(chunk) else None)
    return col


def minimal_free_resolution(ring: GradedRingSpec, M: GradedModule, length_cap: int = 10,
                            degree_cap: int | None = None, window: int = DEFAULT_GEN_WINDOW) -> FreeComplex:
    """Minimal graded free resolution, built one kernel at a time."""
    if M.ring is not ring:
        raise InputError("module lives over a different ring")
    fld = ring.field
    cap = degree_cap if degree_cap is not None else ring.degree_cap
    gens = minimal_generators(M, window)
    if gens.total == 0:
        return FreeComplex(ring, ((),), (), label="0")
    # generator vectors: complements of A_1 M_{t-1} in M_t
    gen_vecs: list[tuple[int, list[int]]] = []
    n1 = mr.ring_hilbert_function(ring, 1)
    for t, _count in gens.by_degree:
        n = M.dim(t)
        span = _Span(fld, n)
        if M.dim(t - 1):
            for u in range(n1):
                act = M.act(u, t - 1)
                for j in range(act.ncols):
                    span.add(act.column_vector(j))
        for j in range(n):
            e = [0] * n
            e[j] = 1
            if span.add(e):
                gen_vecs.append((t, e))
    F0 = FreeModule(ring, [t for t, _ in gen_vecs])

    def eps_at(t: int) -> ExactMatrix:
        m = M.dim(t)
        cols = []
        for j, (g, v) in enumerate(gen_vecs):
            s = t - g
            if s < 0:
                continue
            for k in range(mr.ring_hilbert_function(ring, s)):
                cols.append(M.act_monomial(s, k, g).apply(v) if m else [])
        if not m:
            return ExactMatrix(fld, 0, F0.dim(t), ())
        rows = tuple(tuple(c[i] for c in cols) for i in range(m))
        return ExactMatrix(fld, m, len(cols), rows)

    terms = [tuple(F0.degrees)]
    diffs = []
    src, map_at = F0, eps_at
    while True:
        kgens = _kernel_generators(src, map_at, min(src.degrees), min(cap, src.t_cap), window)
        if not kgens:
            break
        if len(terms) > length_cap:
            raise ResolutionTooLong(f"projective dimension exceeds cap {length_cap} (possibly infinite)")
        new = FreeModule(ring, [t for t, _ in kgens])
        cols = [_vector_to_column(src, t, v) for t, v in kgens]
        d = [[cols[c][r] for c in range(len(cols))] for r in range(src.rank)]
        diffs.append(d)
        terms.append(tuple(new.degrees))

        def map_at(t, _src=src, _new=new, _d=d):
            return free_map_block(_new, _src, _d, t).to_exact()

        src = new
    return FreeComplex(ring, tuple(terms), tuple(diffs), label=f"res({M.label})")


# ---------------------------------------------------------------------------
# Frobenius and shortness


def frobenius_pullback(F: FreeComplex, n: int) -> FreeComplex:
    """Apply Frobenius to every entry; generator degrees scale by p^n."""
    ring = F.ring
    q = ring.p**n
    terms = tuple(tuple(a * q for a in t) for t in F.terms)
    diffs = tuple(tuple(tuple(None if _is_zero(e) else mr.frobenius_power(ring, e, n) for e in row)
                        for row in d) for d in F.diffs)
    kz = None
    if F.koszul_elements is not None:
        kz = tuple(mr.frobenius_power(ring, e, n) for e in F.koszul_elements)
    return FreeComplex(ring, terms, diffs, koszul_elements=kz, label=f"phi^{n}*({F.label})")


@dataclass
class ShortReport:
    short: bool
    length: int
    dimension: int
    homology: tuple[int, ...] | None
    reason: str

    def __bool__(self) -> bool:
        return self.short


def is_short_complex(F: FreeComplex, window: int | None = None) -> ShortReport:
    d = F.ring.declared_dim
    G = minimalize(F)
    length = G.length
    if length != d:
        return ShortReport(False, length, d, None, f"length {length} differs from dimension {d}")
    try:
        table = homology_lengths(F, ring_module(F.ring), window)
    except HomologyNotFinite as exc:
        return ShortReport(False, length, d, None, f"homology not of finite length: {exc}")
    if table.total == 0:
        return ShortReport(False, length, d, table.lengths, "homology is zero")
    return ShortReport(True, length, d, table.lengths, "ok")


def require_short(F: FreeComplex, window: int | None = None) -> ShortReport:
    rep = is_short_complex(F, window)
    if not rep:
        raise NotShortComplex(f"{F.label} is not short: {rep.reason}")
    return rep
