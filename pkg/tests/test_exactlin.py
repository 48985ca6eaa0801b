import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limulrich.errors import InputError
from limulrich.exactlin import (QQ, ExactMatrix, FieldSpec, SparseMatrix, compose, first_irreducible,
                                is_irreducible, is_prime, kernel_basis, rank, rref, solve)

FIELDS = [FieldSpec(2), FieldSpec(3), FieldSpec(5), FieldSpec.gf(2, 2), FieldSpec.gf(3, 2), FieldSpec.gf(2, 4)]
field_st = st.sampled_from(FIELDS)


def test_primes():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_irreducible_quadratics_over_f2():
    # x^2 + x + 1 is the only irreducible quadratic over F_2
    quads = [(a, b, 1) for a in range(2) for b in range(2)]
    assert [f for f in quads if is_irreducible(f, 2)] == [(1, 1, 1)]
    assert first_irreducible(2, 2) == (1, 1, 1)


def test_field_rejects_bad_input():
    with pytest.raises(InputError):
        FieldSpec(4)
    with pytest.raises(InputError):
        FieldSpec(2, 2, (1, 0, 1))  # x^2 + 1 = (x + 1)^2
    with pytest.raises(InputError):
        FieldSpec(2, 2)


def test_f4_multiplication_table():
    # F_4 = F_2[a]/(a^2 + a + 1), encoded 0, 1, a = 2, a + 1 = 3
    f = FieldSpec.gf(2, 2)
    assert f.mul(2, 2) == 3
    assert f.mul(2, 3) == 1
    assert f.mul(3, 3) == 2
    assert f.inv(2) == 3


def test_rref_examples():
    f = FieldSpec(2)
    r, piv, _ = rref(ExactMatrix.identity(f, 3))
    assert (r, piv) == (3, [0, 1, 2])
    r, piv, _ = rref(ExactMatrix.zeros(f, 2, 2))
    assert (r, piv) == (0, [])
    assert rank(ExactMatrix.from_rows(f, [[1, 1], [1, 1]])) == 1


def test_kernel_examples():
    f2, f3 = FieldSpec(2), FieldSpec(3)
    assert kernel_basis(ExactMatrix.identity(f2, 3)).cols == 0
    assert kernel_basis(ExactMatrix.zeros(f2, 3, 3)).rank() == 3
    k = kernel_basis(ExactMatrix.from_rows(f3, [[1, 1]]))
    assert k.cols == 1
    x, y = k.column(0)
    assert (x + y) % 3 == 0 and (x, y) != (0, 0)


def test_compose_examples():
    f = FieldSpec(2)
    a = ExactMatrix.from_rows(f, [[1, 1], [0, 1]])
    i2 = ExactMatrix.identity(f, 2)
    assert compose(a, i2) == a and compose(i2, a) == a
    assert compose(a, a) == i2


def test_rationals():
    m = ExactMatrix.from_rows(QQ, [[1, 2], [3, 4]])
    assert rank(m) == 2
    assert solve(m, [Fraction(5), Fraction(6)]) == [Fraction(-4), Fraction(9, 2)]
    assert solve(ExactMatrix.from_rows(QQ, [[1, 1], [1, 1]]), [Fraction(0), Fraction(1)]) is None


@st.composite
def matrices(draw, max_dim=6):
    f = draw(field_st)
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    rows = [[draw(st.integers(0, f.q - 1)) for _ in range(c)] for _ in range(r)]
    return ExactMatrix(f, r, c, tuple(tuple(row) for row in rows))


@given(field_st, st.data())
def test_field_axioms(f, data):
    el = st.integers(0, f.q - 1)
    a, b, c = data.draw(el), data.draw(el), data.draw(el)
    assert f.add(a, b) == f.add(b, a)
    assert f.mul(a, b) == f.mul(b, a)
    assert f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c)
    assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    assert f.add(a, f.neg(a)) == f.zero
    if a != f.zero:
        assert f.mul(a, f.inv(a)) == f.one


@given(field_st, st.data())
def test_frobenius_is_additive(f, data):
    el = st.integers(0, f.q - 1)
    a, b = data.draw(el), data.draw(el)
    assert f.frobenius(f.add(a, b), 1) == f.add(f.frobenius(a, 1), f.frobenius(b, 1))
    assert f.frobenius(a, 1) == f.pow(a, f.p)
    assert f.frobenius(a, f.e) == a


@given(matrices())
@settings(max_examples=60)
def test_rank_of_transpose(m):
    assert rank(m) == rank(m.transpose())


@given(matrices())
@settings(max_examples=60)
def test_kernel_is_annihilated(m):
    k = kernel_basis(m)
    assert k.cols + rank(m) == m.cols
    if k.cols and m.rows:
        assert compose(m, k).is_zero()
    assert rank(k) == k.cols


@given(st.data())
@settings(max_examples=40)
def test_rank_of_product(data):
    f = data.draw(field_st)
    n, k, l = (data.draw(st.integers(1, 5)) for _ in range(3))
    el = st.integers(0, f.q - 1)
    a = ExactMatrix(f, n, k, tuple(tuple(data.draw(el) for _ in range(k)) for _ in range(n)))
    b = ExactMatrix(f, k, l, tuple(tuple(data.draw(el) for _ in range(l)) for _ in range(k)))
    assert rank(compose(a, b)) <= min(rank(a), rank(b))


@given(matrices())
@settings(max_examples=60)
def test_sparse_agrees_with_dense(m):
    sm = SparseMatrix.from_dense(m.field, [list(r) for r in m.entries], m.cols) if m.rows else None
    if sm is None:
        return
    assert sm.rank() == rank(m)
    assert sm.to_exact() == m
    assert sm.transpose().to_exact() == m.transpose()


def _brute_rank_f2(rows):
    # row space size over F_2 is 2^rank
    span = {tuple(0 for _ in rows[0])} if rows else {()}
    for r in rows:
        span |= {tuple((a + b) % 2 for a, b in zip(s, r)) for s in span}
    return len(span).bit_length() - 1


def test_rank_against_span_count():
    f = FieldSpec(2)
    for rows in itertools.product([(0, 0, 1), (1, 1, 0), (1, 1, 1), (0, 1, 1)], repeat=3):
        assert rank(ExactMatrix.from_rows(f, rows)) == _brute_rank_f2(list(rows))
