"""Exact linear algebra over finite fields F_{p^e} (e <= 4) and over the rationals.

Field elements of F_{p^e} are encoded as integers ``0 <= a < p**e`` whose
base-p digits are the coefficients (low degree first) of a polynomial
reduced modulo the field's minimal polynomial.  Rationals are
``fractions.Fraction``.

Two matrix types live here:

* ``ExactMatrix`` -- an immutable dense matrix, the public workhorse for
  rank / echelon / kernel computations.
* ``SparseMatrix`` -- a column-major dictionary matrix used for degreewise
  module actions, whose rank is computed block by block after splitting the
  matrix into connected components of its nonzero pattern.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

MAX_EXTENSION_DEGREE = 4
# numpy kernels need log/exp tables for extension fields; beyond this we stay in Python
_TABLE_LIMIT = 1 << 20


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


# ---------------------------------------------------------------------------
# polynomials over F_p, coefficient lists low degree first


def _ptrim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _ptrim(out)


def _pdivmod(a: Sequence[int], b: Sequence[int], p: int) -> tuple[list[int], list[int]]:
    a = _ptrim(list(a))
    b = _ptrim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = pow(b[-1], p - 2, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        coef = a[-1] * inv_lead % p
        q[shift] = coef
        for i, y in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * y) % p
        _ptrim(a)
    return _ptrim(q), a


def _psub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _ptrim(out)


def _monic_polys(p: int, degree: int) -> Iterable[list[int]]:
    for code in range(p**degree):
        coeffs = []
        for _ in range(degree):
            coeffs.append(code % p)
            code //= p
        yield coeffs + [1]


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Exhaustive factor search; fine for the degrees (<= 4) supported here."""
    poly = _ptrim(list(poly))
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for cand in _monic_polys(p, d):
            if not _pdivmod(poly, cand, p)[1]:
                return False
    return True


def first_irreducible(p: int, e: int) -> tuple[int, ...]:
    """The first monic irreducible polynomial of degree e in base-p counting order."""
    for cand in _monic_polys(p, e):
        if is_irreducible(cand, p):
            return tuple(cand)
    raise InputError(f"no irreducible polynomial of degree {e} over F_{p}")  # pragma: no cover


# ---------------------------------------------------------------------------
# fields


@dataclass(frozen=True)
class FieldSpec:
    """The finite field F_q, q = p**e, presented as F_p[z]/(min_poly)."""

    p: int
    e: int = 1
    min_poly: tuple[int, ...] | None = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise InputError(f"characteristic {self.p} is not prime")
        if not 1 <= self.e <= MAX_EXTENSION_DEGREE:
            raise InputError(f"extension degree must be in 1..{MAX_EXTENSION_DEGREE}, got {self.e}")
        if self.e == 1:
            if self.min_poly is not None and len(_ptrim([c % self.p for c in self.min_poly])) != 2:
                raise InputError("min_poly of a prime field must be linear")
            object.__setattr__(self, "min_poly", None)
            return
        if self.min_poly is None:
            raise InputError("min_poly is required when e > 1 (use FieldSpec.gf for a default)")
        poly = tuple(c % self.p for c in self.min_poly)
        if len(_ptrim(list(poly))) != self.e + 1 or poly[-1] != 1:
            raise InputError(f"min_poly must be monic of degree {self.e}")
        if not is_irreducible(poly, self.p):
            raise InputError(f"min_poly {poly} is reducible over F_{self.p}")
        object.__setattr__(self, "min_poly", poly)

    @classmethod
    def gf(cls, p: int, e: int = 1) -> "FieldSpec":
        if e == 1:
            return cls(p)
        if not is_prime(p):
            raise InputError(f"characteristic {p} is not prime")
        return cls(p, e, first_irreducible(p, e))

    @property
    def q(self) -> int:
        return self.p**self.e

    @property
    def is_prime_field(self) -> bool:
        return self.e == 1

    zero = 0
    one = 1

    def __str__(self) -> str:
        return f"F_{self.q}"

    def elements(self) -> range:
        return range(self.q)

    def from_int(self, n: int) -> int:
        return n % self.p

    # digit vectors <-> codes
    def _vec(self, a: int) -> list[int]:
        out = []
        for _ in range(self.e):
            out.append(a % self.p)
            a //= self.p
        return out

    def _code(self, v: Sequence[int]) -> int:
        a = 0
        for c in reversed(list(v) + [0] * (self.e - len(v))):
            a = a * self.p + c
        return a

    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        p = self.p
        out, pw = 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * pw
            a //= p
            b //= p
            pw *= p
        return out

    def neg(self, a: int) -> int:
        if self.e == 1:
            return -a % self.p
        if self.p == 2:
            return a
        return self._code([-c % self.p for c in self._vec(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        tables = self._tables
        if tables is not None:
            log, exp = tables
            return int(exp[(log[a] + log[b]) % (self.q - 1)])
        return self._mul_poly(a, b)

    @functools.lru_cache(maxsize=None)
    def _mul_poly(self, a: int, b: int) -> int:
        prod = _pmul(self._vec(a), self._vec(b), self.p)
        return self._code(_pdivmod(prod, self.min_poly, self.p)[1])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.e == 1:
            return pow(a, self.p - 2, self.p)
        return self._inv_euclid(a)

    @functools.lru_cache(maxsize=None)
    def _inv_euclid(self, a: int) -> int:
        # extended Euclid in F_p[z]: s*a + t*m = 1
        p = self.p
        r0, r1 = list(self.min_poly), _ptrim(self._vec(a))
        s0, s1 = [], [1]
        while r1:
            quo, rem = _pdivmod(r0, r1, p)
            r0, r1 = r1, rem
            s0, s1 = s1, _psub(s0, _pmul(quo, s1, p), p)
        # r0 is a nonzero constant
        c = pow(r0[0], p - 2, p)
        return self._code([x * c % p for x in s0])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, k: int) -> int:
        if k < 0:
            return self.pow(self.inv(a), -k)
        result, base = 1, a
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def frobenius(self, a: int, n: int = 1) -> int:
        """a -> a^(p^n)."""
        if self.e == 1:
            return a
        return self.pow(a, self.p ** (n % self.e))

    def random_element(self, rng: random.Random, nonzero: bool = False) -> int:
        lo = 1 if nonzero else 0
        return rng.randrange(lo, self.q)

    @functools.cached_property
    def _tables(self):
        if self.e == 1 or self.q > _TABLE_LIMIT:
            return None
        q = self.q
        order = q - 1
        primes = [f for f in range(2, order + 1) if order % f == 0 and is_prime(f)]
        for g in range(2, q):
            if all(self._pow_poly(g, order // f) != 1 for f in primes):
                break
        exp = np.zeros(order, dtype=np.int64)
        log = np.zeros(q, dtype=np.int64)
        x = 1
        for k in range(order):
            exp[k] = x
            log[x] = k
            x = self._mul_poly(x, g)
        return log, exp

    def _pow_poly(self, a: int, k: int) -> int:
        result, base = 1, a
        while k:
            if k & 1:
                result = self._mul_poly(result, base)
            base = self._mul_poly(base, base)
            k >>= 1
        return result

    # vectorised helpers used by the numpy kernels
    @property
    def vectorizable(self) -> bool:
        return self.e == 1 or self._tables is not None

    def np_sub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.e == 1:
            return (a - b) % self.p
        if self.p == 2:
            return a ^ b
        p = self.p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        pw = 1
        for _ in range(self.e):
            out += ((a // pw % p - b // pw % p) % p) * pw
            pw *= p
        return out

    def np_mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.e == 1:
            return a * b % self.p
        log, exp = self._tables
        a, b = np.broadcast_arrays(a, b)
        out = exp[(log[a] + log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, out)


class RationalField:
    """The rationals, with the same arithmetic interface as FieldSpec."""

    zero = Fraction(0)
    one = Fraction(1)
    is_prime_field = False
    vectorizable = False
    p = 0

    def __repr__(self) -> str:
        return "QQ"

    def from_int(self, n) -> Fraction:
        return Fraction(n)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def inv(a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    @staticmethod
    def div(a, b):
        return Fraction(a) / b


QQ = RationalField()


# ---------------------------------------------------------------------------
# dense matrices


@dataclass(frozen=True)
class ExactMatrix:
    field: FieldSpec | RationalField
    rows: int
    cols: int
    entries: tuple[tuple, ...] = field(repr=False)

    def __post_init__(self):
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise InputError("entry count must equal rows x cols")

    @classmethod
    def from_rows(cls, fld, rows: Sequence[Sequence], cols: int | None = None) -> "ExactMatrix":
        rows = [tuple(fld.from_int(x) if isinstance(fld, RationalField) else x % fld.q
                      if fld.e == 1 else x for x in r) for r in rows]
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        return cls(fld, len(rows), ncols, tuple(rows))

    @classmethod
    def zeros(cls, fld, rows: int, cols: int) -> "ExactMatrix":
        z = fld.zero
        return cls(fld, rows, cols, tuple((z,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, fld, n: int) -> "ExactMatrix":
        z, o = fld.zero, fld.one
        return cls(fld, n, n, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.field, self.cols, self.rows,
                           tuple(zip(*self.entries)) if self.rows else tuple(() for _ in range(self.cols)))

    def is_zero(self) -> bool:
        z = self.field.zero
        return all(x == z for r in self.entries for x in r)

    def rank(self) -> int:
        return rref(self)[0]

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        return compose(self, other)


def compose(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    """Exact product a*b."""
    if a.cols != b.rows:
        raise InputError(f"dimension mismatch: {a.rows}x{a.cols} times {b.rows}x{b.cols}")
    fld = a.field
    if isinstance(fld, FieldSpec) and fld.is_prime_field:
        if a.rows == 0 or b.cols == 0:
            return ExactMatrix.zeros(fld, a.rows, b.cols)
        A = np.array(a.entries, dtype=object).reshape(a.rows, a.cols)
        B = np.array(b.entries, dtype=object).reshape(b.rows, b.cols)
        C = (A.dot(B)) % fld.p if a.cols else np.zeros((a.rows, b.cols), dtype=object)
        return ExactMatrix(fld, a.rows, b.cols, tuple(tuple(int(x) for x in r) for r in C))
    add, mul, z = fld.add, fld.mul, fld.zero
    bcols = b.columns()
    out = []
    for r in a.entries:
        row = []
        for col in bcols:
            s = z
            for x, y in zip(r, col):
                if x != z and y != z:
                    s = add(s, mul(x, y))
            row.append(s)
        out.append(tuple(row))
    return ExactMatrix(fld, a.rows, b.cols, tuple(out))


def _rref_python(fld, rows: list[list]) -> tuple[int, list[int], list[list]]:
    z = fld.zero
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if m[i][c] != z), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = fld.inv(m[r][c])
        m[r] = [fld.mul(x, inv) for x in m[r]]
        prow = m[r]
        for i in range(nrows):
            if i != r and m[i][c] != z:
                f = m[i][c]
                m[i] = [fld.sub(x, fld.mul(f, y)) if y != z else x for x, y in zip(m[i], prow)]
        pivots.append(c)
        r += 1
    return r, pivots, m


def _rref_numpy(fld: FieldSpec, arr: np.ndarray, rank_only: bool = False):
    A = np.array(arr, dtype=np.int64, copy=True)
    nrows, ncols = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(A[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        lead = int(A[r, c])
        if lead != 1:
            A[r] = fld.np_mul(A[r], np.int64(fld.inv(lead)))
        colv = A[:, c].copy()
        colv[r] = 0
        if rank_only:
            colv[:r] = 0
        targets = np.flatnonzero(colv)
        if targets.size:
            A[targets] = fld.np_sub(A[targets], fld.np_mul(colv[targets, None], A[r][None, :]))
        pivots.append(c)
        r += 1
    return r, pivots, A


def rref(m: ExactMatrix) -> tuple[int, list[int], ExactMatrix]:
    """Reduced row echelon form: (rank, pivot columns, reduced matrix)."""
    fld = m.field
    if m.rows == 0 or m.cols == 0:
        return 0, [], m
    if fld.vectorizable:
        rank, pivots, A = _rref_numpy(fld, np.array(m.entries, dtype=np.int64))
        red = tuple(tuple(int(x) for x in row) for row in A)
    else:
        rank, pivots, rows = _rref_python(fld, [list(r) for r in m.entries])
        red = tuple(tuple(r) for r in rows)
    return rank, pivots, ExactMatrix(fld, m.rows, m.cols, red)


def rank(m: ExactMatrix) -> int:
    return rref(m)[0]


def kernel_basis(m: ExactMatrix) -> ExactMatrix:
    """Columns form a basis of the right nullspace {x : m x = 0}."""
    fld = m.field
    rk, pivots, red = rref(m)
    free = [c for c in range(m.cols) if c not in set(pivots)]
    z, one = fld.zero, fld.one
    vecs = []
    for f in free:
        v = [z] * m.cols
        v[f] = one
        for i, pc in enumerate(pivots):
            v[pc] = fld.neg(red.entries[i][f])
        vecs.append(v)
    if not vecs:
        return ExactMatrix(fld, m.cols, 0, tuple(() for _ in range(m.cols)))
    return ExactMatrix(fld, m.cols, len(vecs), tuple(zip(*vecs)))


def solve(m: ExactMatrix, b: Sequence) -> list | None:
    """One solution x of m x = b, or None when the system is inconsistent."""
    fld = m.field
    aug = ExactMatrix(fld, m.rows, m.cols + 1,
                      tuple(tuple(r) + (b[i],) for i, r in enumerate(m.entries)))
    rk, pivots, red = rref(aug)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [fld.zero] * m.cols
    for i, pc in enumerate(pivots):
        x[pc] = red.entries[i][m.cols]
    return x


def dense_rank(fld, rows: list[list[int]]) -> int:
    if not rows or not rows[0]:
        return 0
    if fld.vectorizable:
        arr = np.array(rows, dtype=np.int64)
        if arr.shape[0] > arr.shape[1]:
            arr = arr.T
        return _rref_numpy(fld, arr, rank_only=True)[0]
    return _rref_python(fld, rows)[0]


# ---------------------------------------------------------------------------
# sparse matrices


class SparseMatrix:
    """Column-major sparse matrix over a finite field; ``cols[j]`` maps row -> nonzero value."""

    __slots__ = ("field", "nrows", "ncols", "cols")

    def __init__(self, fld: FieldSpec, nrows: int, ncols: int, cols: list[dict] | None = None):
        self.field = fld
        self.nrows = nrows
        self.ncols = ncols
        self.cols = cols if cols is not None else [{} for _ in range(ncols)]

    def __repr__(self) -> str:
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"

    @classmethod
    def zero(cls, fld, nrows: int, ncols: int) -> "SparseMatrix":
        return cls(fld, nrows, ncols)

    @classmethod
    def identity(cls, fld, n: int) -> "SparseMatrix":
        return cls(fld, n, n, [{j: 1} for j in range(n)])

    @classmethod
    def from_map(cls, fld, nrows: int, targets: Sequence[int], coeff: int = 1) -> "SparseMatrix":
        """Column j has ``coeff`` in row ``targets[j]``; negative targets are zero columns."""
        if coeff == 0:
            return cls(fld, nrows, len(targets))
        cols = [{int(t): coeff} if t >= 0 else {} for t in targets]
        return cls(fld, nrows, len(targets), cols)

    @classmethod
    def from_dense(cls, fld, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "SparseMatrix":
        nrows = len(rows)
        ncols = ncols if ncols is not None else (len(rows[0]) if rows else 0)
        cols = [{} for _ in range(ncols)]
        for i, r in enumerate(rows):
            for j, x in enumerate(r):
                if x:
                    cols[j][i] = x
        return cls(fld, nrows, ncols, cols)

    @classmethod
    def from_columns(cls, fld, nrows: int, vectors: Sequence[Sequence[int]]) -> "SparseMatrix":
        return cls(fld, nrows, len(vectors), [{i: x for i, x in enumerate(v) if x} for v in vectors])

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self.cols)

    def is_zero(self) -> bool:
        return all(not c for c in self.cols)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, x in col.items():
                out[i][j] = x
        return out

    def to_exact(self) -> ExactMatrix:
        return ExactMatrix(self.field, self.nrows, self.ncols, tuple(tuple(r) for r in self.to_dense()))

    def column_vector(self, j: int) -> list[int]:
        v = [0] * self.nrows
        for i, x in self.cols[j].items():
            v[i] = x
        return v

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and self.cols == other.cols

    def scale(self, c: int) -> "SparseMatrix":
        fld = self.field
        if c == 0:
            return SparseMatrix(fld, self.nrows, self.ncols)
        if c == 1:
            return SparseMatrix(fld, self.nrows, self.ncols, [dict(col) for col in self.cols])
        mul = fld.mul
        return SparseMatrix(fld, self.nrows, self.ncols,
                            [{i: mul(c, x) for i, x in col.items()} for col in self.cols])

    def add(self, other: "SparseMatrix", coeff: int = 1) -> "SparseMatrix":
        """self + coeff * other."""
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise InputError("shape mismatch in sparse addition")
        fld = self.field
        add, mul = fld.add, fld.mul
        cols = []
        for a, b in zip(self.cols, other.cols):
            col = dict(a)
            for i, x in b.items():
                y = add(col.get(i, 0), mul(coeff, x) if coeff != 1 else x)
                if y:
                    col[i] = y
                else:
                    col.pop(i, None)
            cols.append(col)
        return SparseMatrix(fld, self.nrows, self.ncols, cols)

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        """self @ other."""
        if self.ncols != other.nrows:
            raise InputError(f"dimension mismatch: {self.nrows}x{self.ncols} @ {other.nrows}x{other.ncols}")
        fld = self.field
        add, mul = fld.add, fld.mul
        mine = self.cols
        cols = []
        for bcol in other.cols:
            acc: dict[int, int] = {}
            for k, y in bcol.items():
                for i, x in mine[k].items():
                    v = add(acc.get(i, 0), mul(x, y))
                    if v:
                        acc[i] = v
                    else:
                        acc.pop(i, None)
            cols.append(acc)
        return SparseMatrix(fld, self.nrows, other.ncols, cols)

    __matmul__ = matmul

    def apply(self, vec: Sequence[int]) -> list[int]:
        fld = self.field
        add, mul = fld.add, fld.mul
        out = [0] * self.nrows
        for j, y in enumerate(vec):
            if y:
                for i, x in self.cols[j].items():
                    out[i] = add(out[i], mul(x, y))
        return out

    def transpose(self) -> "SparseMatrix":
        cols = [{} for _ in range(self.nrows)]
        for j, col in enumerate(self.cols):
            for i, x in col.items():
                cols[i][j] = x
        return SparseMatrix(self.field, self.ncols, self.nrows, cols)

    @staticmethod
    def hstack(fld, nrows: int, mats: Sequence["SparseMatrix"]) -> "SparseMatrix":
        cols = []
        for m in mats:
            if m.nrows != nrows:
                raise InputError("row mismatch in hstack")
            cols.extend(m.cols)
        return SparseMatrix(fld, nrows, len(cols), cols)

    @staticmethod
    def block(fld, row_sizes: Sequence[int], col_sizes: Sequence[int],
              blocks: dict[tuple[int, int], "SparseMatrix"]) -> "SparseMatrix":
        """Assemble from blocks keyed by (block-row, block-col); missing blocks are zero."""
        roff = [0]
        for s in row_sizes:
            roff.append(roff[-1] + s)
        coff = [0]
        for s in col_sizes:
            coff.append(coff[-1] + s)
        cols: list[dict] = [{} for _ in range(coff[-1])]
        add = fld.add
        for (bi, bj), m in blocks.items():
            if (m.nrows, m.ncols) != (row_sizes[bi], col_sizes[bj]):
                raise InputError("block shape mismatch")
            r0, c0 = roff[bi], coff[bj]
            for j, col in enumerate(m.cols):
                target = cols[c0 + j]
                for i, x in col.items():
                    key = r0 + i
                    if key in target:
                        v = add(target[key], x)
                        if v:
                            target[key] = v
                        else:
                            del target[key]
                    else:
                        target[key] = x
        return SparseMatrix(fld, roff[-1], coff[-1], cols)

    def components(self) -> list[tuple[list[int], list[int]]]:
        """Connected components (rows, cols) of the bipartite nonzero pattern."""
        nrows = self.nrows
        parent = list(range(nrows + self.ncols))

        def find(x: int) -> int:
            root = x
            while parent[root] != root:
                root = parent[root]
            while parent[x] != root:
                parent[x], x = root, parent[x]
            return root

        for j, col in enumerate(self.cols):
            if not col:
                continue
            rj = find(nrows + j)
            for i in col:
                ri = find(i)
                if ri != rj:
                    parent[ri] = rj
                    rj = find(rj)
        groups: dict[int, tuple[set, list]] = {}
        for j, col in enumerate(self.cols):
            if col:
                g = groups.setdefault(find(nrows + j), (set(), []))
                g[1].append(j)
                g[0].update(col)
        return [(sorted(rows), cols) for rows, cols in groups.values()]

    def rank(self) -> int:
        total = 0
        for rows, cols in self.components():
            if len(rows) == 1 or len(cols) == 1:
                total += 1
                continue
            ridx = {r: k for k, r in enumerate(rows)}
            dense = [[0] * len(rows) for _ in cols]
            for k, j in enumerate(cols):
                for i, x in self.cols[j].items():
                    dense[k][ridx[i]] = x
            total += dense_rank(self.field, dense)
        return total


def sparse_rank(m: SparseMatrix) -> int:
    return m.rank()
