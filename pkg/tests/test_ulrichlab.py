from fractions import Fraction

import pytest

from limulrich import grcomplex as gc
from limulrich import grmod as gm
from limulrich import monoring as mr
from limulrich import p1c, ulrichlab
from limulrich.errors import InputError, NotShortComplex

from conftest import F2, F3


def el(ring, text):
    return mr.parse_element(ring, text)


def test_ulrich_module_examples(segre, segre_sop):
    U0 = gm.gamma_module_on_segre(2, 2, 0, (1, 2), segre)
    r = ulrichlab.is_ulrich_module(U0, segre_sop)
    assert r and (r.nu, r.e_d) == (2, 2)
    r = ulrichlab.is_ulrich_module(gm.ring_module(segre), segre_sop)
    assert not r and r.mcm and (r.e_d, r.nu) == (2, 1)
    line = mr.poly_ring(F2, 1)
    assert ulrichlab.is_ulrich_module(gm.ring_module(line), [el(line, "x")])
    with pytest.raises(InputError):
        ulrichlab.is_ulrich_module(U0, segre_sop[:2])


def test_euler_inequality_examples(double_line, segre, segre_sop):
    M = gm.cokernel(double_line, [0], [1], [[el(double_line, "y")]])
    rep = ulrichlab.check_euler_inequality(gc.minimal_free_resolution(double_line, M))
    assert (rep.chi, rep.betti, rep.e) == (2, [1, 1], 2)
    assert rep.margins == (0, 0) and rep.passed
    U0 = gm.gamma_module_on_segre(2, 2, 0, (1, 2), segre)
    rep = ulrichlab.check_euler_inequality(gc.koszul_complex(segre, segre_sop), U0)
    assert rep.chi == 2 and rep.rows[0].margin == 0 and rep.passed
    line = mr.poly_ring(F2, 1)
    rep = ulrichlab.check_euler_inequality(gc.koszul_complex(line, [el(line, "x")]))
    assert rep.margins == (0, 0)


def test_euler_inequality_refuses_non_short(plane):
    with pytest.raises(NotShortComplex):
        ulrichlab.check_euler_inequality(gc.koszul_complex(plane, [el(plane, "x")]))


def test_ulrich_good_on_short_grid(segre, segre_sop):
    # Ulrich modules satisfy the inequality for every short complex
    U0 = gm.gamma_module_on_segre(2, 2, 0, (1, 2), segre)
    second = [el(segre, s) for s in ("x1*y2", "y1*x2", "x1*x2 + y1*y2")]
    complexes = [gc.koszul_complex(segre, segre_sop), gc.koszul_complex(segre, second),
                 gc.frobenius_pullback(gc.koszul_complex(segre, segre_sop), 1)]
    for F in complexes:
        rep = ulrichlab.check_euler_inequality(F, U0)
        assert rep.passed
        h = gc.homology_lengths(F, U0)
        assert h.chi == h.lengths[0]


def test_walker_examples(plane, double_line):
    r = ulrichlab.check_walker(gc.koszul_complex(plane, [el(plane, "x"), el(plane, "y")]))
    assert (r.beta, r.bound) == (4, 4) and r.passed and not r.guaranteed
    M = gm.cokernel(double_line, [0], [1], [[el(double_line, "y")]])
    r = ulrichlab.check_walker(gc.minimal_free_resolution(double_line, M))
    assert (r.beta, r.chi, r.total_length, r.bound) == (2, 2, 2, 2) and r.passed
    exact = gc.FreeComplex(plane, [(0,), (0,)], [[[mr.one(plane)]]])
    with pytest.raises(InputError):
        ulrichlab.check_walker(exact)


def test_walker_in_odd_characteristic():
    ring = mr.poly_ring(F3, 2)
    r = ulrichlab.check_walker(gc.koszul_complex(ring, [el(ring, "x^2"), el(ring, "x + y")]))
    assert r.guaranteed and r.passed and r.bound == 4 * 2 // 2


def test_build_lim_ulrich_segre():
    U = ulrichlab.build_lim_ulrich_segre(2, 2, 1)
    assert U.dim(0) == 15
    assert gm.minimal_generators(ulrichlab.build_lim_ulrich_segre(2, 2, 0)).total == 2
    for p, n in [(2, 2), (3, 1), (5, 1)]:
        U = ulrichlab.build_lim_ulrich_segre(1, p, n)
        for t in range(0, 5):
            assert U.dim(t) == (t + 1) * p**n + 1


@pytest.mark.parametrize("n", range(5))
def test_lim_ulrich_closed_forms(segre, n):
    U = ulrichlab.build_lim_ulrich_segre(2, 2, n, segre)
    for t in range(-4, 6):
        assert U.dim(t) == p1c.gamma_hilbert_function(2, 2, n, t)
    from limulrich.mult import e_d
    assert e_d(U) == 2 * 2 ** (2 * n)


def test_lim_diagnostics_constant_ulrich(segre, segre_sop):
    U0 = gm.gamma_module_on_segre(2, 2, 0, (1, 2), segre)
    d = ulrichlab.lim_sequence_diagnostics(lambda n: U0, segre_sop, range(3))
    assert d.tails == [0, 0, 0] and all(r.ratio == 1 for r in d.rows)
    assert d.lim_cm_trend and d.lim_ulrich_trend


def test_lim_diagnostics_free_module_fails_ulrich_trend(segre, segre_sop):
    A = gm.ring_module(segre)
    d = ulrichlab.lim_sequence_diagnostics(lambda n: A, segre_sop, range(3))
    assert all(r.ratio == 2 for r in d.rows)
    assert d.lim_cm_trend and not d.lim_ulrich_trend


def test_lim_diagnostics_segre_sequence(segre, segre_sop):
    d = ulrichlab.lim_sequence_diagnostics(lambda n: ulrichlab.build_lim_ulrich_segre(2, 2, n, segre),
                                           segre_sop, range(4))
    # Koszul H_1 of U_n is h^1(O(-q, 0)) = q - 1, the only obstruction to depth 3
    for r in d.rows:
        q = 2**r.n
        assert r.koszul == (2 * q * q + q - 1, q - 1, 0, 0)
        assert r.nu == r.e_d == 2 * q * q
    assert d.tails == [Fraction(2**n - 1, 2 ** (2 * n + 1)) for n in range(4)]
    assert d.lim_ulrich_trend


def test_projection_formula(plane, segre, segre_sop):
    K = gc.koszul_complex(plane, [el(plane, "x"), el(plane, "y")])
    A = gm.ring_module(plane)
    r = ulrichlab.check_projection_formula(K, A, 1)
    assert (r.left, r.right) == (4, 4)
    r = ulrichlab.check_projection_formula(K, A, 0)
    assert r.left == r.right == 1
    r = ulrichlab.check_projection_formula(gc.koszul_complex(segre, segre_sop), gm.ring_module(segre), 1)
    assert r.left == r.right == 16


def test_frobenius_scaling(segre):
    r = ulrichlab.check_frobenius_scaling(gm.ring_module(segre), 1)
    assert r.passed and r.e_push == 16


def test_sci_suite():
    A3 = mr.poly_ring(F2, 2, [(3, 0)], declared_dim=1)
    y, y2 = el(A3, "y"), el(A3, "y^2")
    mods = [gm.cokernel(A3, [0], [1], [[y]], "A/(y)"), gm.cokernel(A3, [0], [2], [[y2]], "A/(y^2)"),
            gm.cokernel(A3, [0, 0], [1, 1], [[y, None], [None, y]], "diag")]
    s = ulrichlab.sci_suite(A3, mods)
    assert s.e == 3 and s.passed
    got = [(r.length, r.report.betti, r.report.margins) for r in s.results]
    assert got == [(3, [1, 1], (0, 0)), (6, [1, 1], (3, 3)), (6, [2, 2], (0, 0))]


def test_sci_suite_needs_complete_intersection(segre):
    with pytest.raises(InputError):
        ulrichlab.sci_suite(segre, [])
    bad = mr.poly_ring(F2, 2, [(1, 1)], declared_dim=1)
    assert not ulrichlab.is_monomial_complete_intersection(bad)
