from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limulrich import grcomplex as gc
from limulrich import grmod as gm
from limulrich import monoring as mr
from limulrich import mult
from limulrich.errors import InputError, NotSystemOfParameters
from limulrich.exactlin import FieldSpec

from conftest import F2

F4_SOP = ["y1*y2 + 2*x1*y2 + 3*x1*x2", "2*y1*y2 + 3*y1*x2 + 2*x1*y2", "3*y1*x2 + x1*y2 + 2*x1*x2"]


def el(ring, text):
    return mr.parse_element(ring, text)


def test_hilbert_polynomial_examples(segre, double_line):
    hp = mult.hilbert_polynomial(gm.ring_module(segre))
    assert hp.coeffs == (1, 2, 1) and hp.t0 == 0
    hp = mult.hilbert_polynomial(gm.ring_module(double_line))
    assert hp.coeffs == (2,) and hp.t0 == 1
    line = mr.poly_ring(F2, 1)
    hp = mult.hilbert_polynomial(gm.realize_free(line, [3]))
    assert hp.coeffs == (1,) and hp.t0 == 3


def test_hilbert_polynomial_agrees_beyond_t0(segre):
    U1 = gm.gamma_module_on_segre(2, 2, 1, (2, 4), segre)
    hp = mult.hilbert_polynomial(U1)
    for t in range(hp.t0, hp.t0 + 10):
        assert hp(t) == U1.dim(t)


def test_e_d_examples(segre, double_line, plane):
    assert mult.e_d(gm.ring_module(segre)) == 2
    assert mult.e_d(gm.ring_module(double_line)) == 2
    assert mult.e_d(gm.cokernel(plane, [0], [1], [[el(plane, "x")]])) == 0
    assert mult.ring_multiplicity(mr.poly_ring(F2, 3, [(1, 1, 0)], declared_dim=2)) == 2


def test_e_d_additive(segre, plane):
    U0 = gm.gamma_module_on_segre(2, 2, 0, (1, 2), segre)
    A = gm.ring_module(segre)
    assert mult.e_d(gm.direct_sum(U0, A)) == mult.e_d(U0) + mult.e_d(A) == 4
    M = gm.cokernel(plane, [0], [2], [[el(plane, "x*y")]])
    assert mult.e_d(gm.direct_sum(M, gm.ring_module(plane))) == mult.e_d(M) + 1


@pytest.mark.parametrize("n", [1, 2])
def test_frobenius_scaling(plane, segre, double_line, n):
    mods = [gm.ring_module(plane), gm.ring_module(double_line), gm.gamma_module_on_segre(2, 2, 0, (1, 2), segre)]
    if n == 1:
        mods.append(gm.ring_module(segre))
    for M in mods:
        d = M.ring.declared_dim
        assert mult.e_d(gm.frobenius_pushforward(M, n)) == 2 ** (n * d) * mult.e_d(M)


def test_e_via_koszul(plane, double_line, segre, segre_sop):
    assert mult.e_via_koszul(plane, [el(plane, "x"), el(plane, "y")]) == 1
    assert mult.e_via_koszul(segre, segre_sop) == 2
    assert mult.e_via_koszul(double_line, [el(double_line, "y")]) == 2
    with pytest.raises(NotSystemOfParameters):
        mult.e_via_koszul(plane, [el(plane, "x")])
    with pytest.raises(NotSystemOfParameters):
        mult.e_via_koszul(double_line, [el(double_line, "x")])


def test_e_via_generic_forms_over_f4():
    ring = mr.segre_ring(FieldSpec.gf(2, 2), 2)
    sop = [el(ring, s) for s in F4_SOP]
    assert mult.verify_sop(ring, sop) == 2
    assert mult.e_via_koszul(ring, sop) == mult.e_d(gm.ring_module(ring)) == 2


def test_determinant(double_line, plane):
    y = el(double_line, "y")
    assert mult.determinant(double_line, [[y, None], [None, y]]) == el(double_line, "y^2")
    x, yy = el(plane, "x"), el(plane, "y")
    # det [[x, y], [y, x]] = x^2 - y^2 = x^2 + y^2 in characteristic 2
    assert mult.determinant(plane, [[x, yy], [yy, x]]) == el(plane, "x^2 + y^2")
    assert mult.determinant(plane, [[x, x], [x, x]]) is None


def test_dim1_examples(double_line):
    axy = mr.poly_ring(F2, 2, [(1, 1)], declared_dim=1)
    F = gc.FreeComplex(axy, [(0,), (1,)], [[[el(axy, "x + y")]]])
    r = mult.dim1_det_check(F)
    assert (r.chi_F, r.chi_det, r.e_R, r.a) == (2, 2, 2, 1) and r.passed
    y = el(double_line, "y")
    r = mult.dim1_det_check(gc.FreeComplex(double_line, [(0,), (1,)], [[[y]]]))
    assert (r.chi_F, r.chi_det) == (2, 2) and r.passed
    r = mult.dim1_det_check(gc.FreeComplex(double_line, [(0, 0), (1, 1)], [[[y, None], [None, y]]]))
    assert (r.chi_F, r.chi_det, r.a * r.e_R, r.det) == (4, 4, 4, "y^2") and r.passed


def test_dim1_rejects_bad_shapes(plane, double_line):
    with pytest.raises(InputError):
        mult.dim1_det_check(gc.koszul_complex(plane, [el(plane, "x"), el(plane, "y")]))
    y = el(double_line, "y")
    with pytest.raises(InputError):
        mult.dim1_det_check(gc.FreeComplex(double_line, [(0,), (1, 1)], [[[y, y]]]))


def test_dutta_examples(plane, segre, segre_sop):
    r = mult.dutta_multiplicity(gc.koszul_complex(plane, [el(plane, "x"), el(plane, "y")]), 2)
    assert r.terms == [1, 1, 1] and r.stable and r.matches_chi
    r = mult.dutta_multiplicity(gc.koszul_complex(segre, segre_sop), 2)
    assert r.terms == [2, 2, 2] and r.chi == 2 and r.stable


def test_dutta_truncates_at_cap():
    ring = mr.poly_ring(F2, 2, degree_cap=12)
    K = gc.koszul_complex(ring, [el(ring, "x"), el(ring, "y")])
    r = mult.dutta_multiplicity(K, 4)
    assert r.truncated and r.terms[0] == 1 and len(r.terms) < 5


# --- monomial ideals in two variables --------------------------------------


def brute_colength(gens, m):
    """Lattice points outside J^m, with membership tested by divisibility."""
    prods = {(0, 0)}
    for _ in range(m):
        prods = {(a + c, b + d) for a, b in prods for c, d in gens}
    box = max(a for a, _ in prods) + max(b for _, b in prods) + 1
    return sum(1 for a in range(box) for b in range(box)
               if not any(a >= c and b >= d for c, d in prods))


def newton_multiplicity(gens):
    """2 * area below the Newton polygon boundary of a monomial ideal in k[x, y]."""
    pts = sorted(set(gens))  # minimal generators only
    hull = []
    for p in pts:  # lower convex hull
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    # the hull runs from the pure y-power to the pure x-power; sum trapezoids
    area2 = Fraction(0)
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        area2 += (x2 - x1) * (y1 + y2)
    return area2


LECH_IDEALS = {"(x,y)": [(1, 0), (0, 1)], "(x,y)^2": [(2, 0), (1, 1), (0, 2)],
               "(x^2,y^3)": [(2, 0), (0, 3)], "(x^2,y^2)": [(2, 0), (0, 2)]}


def test_lech_examples():
    assert mult.lech_check(mult.MonomialIdeal2D(((1, 0), (0, 1))), 2).colength == 3
    r = mult.lech_check(mult.MonomialIdeal2D(((2, 0), (1, 1), (0, 2))), 1)
    assert (r.colength, r.bound) == (3, 2)
    r = mult.lech_check(mult.MonomialIdeal2D(((2, 0), (0, 2))), 1)
    assert (r.colength, r.bound) == (4, 2)


@pytest.mark.parametrize("name,e", [("(x,y)", 1), ("(x,y)^2", 4), ("(x^2,y^3)", 6), ("(x^2,y^2)", 4)])
def test_monomial_multiplicity_values(name, e):
    gens = LECH_IDEALS[name]
    J = mult.parse_monomial_ideal(gens)
    assert mult.monomial_multiplicity(J) == e == newton_multiplicity(gens)
    for m in (1, 2, 3):
        assert mult.monomial_colength(J, m) == brute_colength(gens, m)


def test_ideal_must_be_primary():
    with pytest.raises(InputError):
        mult.MonomialIdeal2D(((1, 1), (0, 3)))


@st.composite
def primary_ideals(draw):
    a = draw(st.integers(1, 5))
    b = draw(st.integers(1, 5))
    extra = draw(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), max_size=3))
    return [(a, 0), (0, b)] + extra


@given(primary_ideals())
@settings(max_examples=40, deadline=None)
def test_multiplicity_matches_newton_area(gens):
    J = mult.parse_monomial_ideal(gens)
    e = mult.monomial_multiplicity(J)
    assert e == newton_multiplicity(list(J.gens))
    assert mult.monomial_colength(J, 1) == brute_colength(list(J.gens), 1)
    # Lech at m = 1
    assert 2 * mult.monomial_colength(J, 1) >= e
