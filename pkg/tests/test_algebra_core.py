import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deformed_cs.algebra_core import (
    AlgebraSpec,
    CasimirShift,
    LowestWeightRep,
    StructurePolynomial,
    bg_algebra,
    build_lowest_weight_rep,
    casimir_value,
    difference_of_g,
    generator_matrices,
    higgs_algebra,
    horner,
    quadratic_algebra,
    quadratic_eps_algebra,
    solve_g,
    su11_algebra,
    verify_closure,
)
from deformed_cs.errors import NonUnitary

coeff = st.floats(min_value=-5, max_value=5, allow_nan=False)


def poly_close(p, q, tol=1e-14):
    a, b = np.array(p.coeffs), np.array(q.coeffs)
    n = max(a.size, b.size)
    a, b = np.pad(a, (0, n - a.size)), np.pad(b, (0, n - b.size))
    return np.abs(a - b).max() <= tol


# -- difference_of_g / solve_g ---------------------------------------------

def test_su11_difference():
    assert difference_of_g(CasimirShift((0, -1, -1))).coeffs == (0.0, -2.0)


def test_zero_g_gives_zero_f():
    assert difference_of_g(CasimirShift((0.0,))).coeffs == (0.0,)


@pytest.mark.parametrize("c,h", [(1.0, 0.1), (-0.7, 2.5)])
def test_higgs_difference(c, h):
    g = CasimirShift((0.0, c, c + h, 2 * h, h))  # c x(x+1) + h x^2 (x+1)^2
    assert poly_close(difference_of_g(g), StructurePolynomial((0.0, 2 * c, 0.0, 4 * h)))


def test_solve_g_su11():
    g = solve_g(StructurePolynomial((0, -2)), 0.0)
    assert poly_close(g, CasimirShift((0, -1, -1)))


def test_solve_g_constant():
    assert solve_g(StructurePolynomial((0.0,)), 5.0).coeffs == (5.0,)


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("a", [0.3, -1.2])
def test_solve_g_quadratic(sign, a):
    # sign x(x+1) + (a/3) x(x+1)(x+1/2), expanded by numpy
    P = np.polynomial.Polynomial
    x_x1 = P([0, 1]) * P([1, 1])
    expected = sign * x_x1 + (a / 3) * x_x1 * P([0.5, 1])
    g = solve_g(StructurePolynomial((0, 2 * sign, a)), 0.0)
    assert np.allclose(g.coeffs, expected.coef, atol=1e-14, rtol=0)
    assert poly_close(quadratic_algebra(sign, a).g, g)


@settings(max_examples=60, deadline=None)
@given(st.lists(coeff, min_size=1, max_size=6), coeff)
def test_roundtrip_f(fc, anchor):
    f = StructurePolynomial(tuple(fc))
    g = solve_g(f, anchor)
    scale = max(1.0, max(abs(c) for c in g.coeffs))
    assert poly_close(difference_of_g(g), f, 1e-14 * scale * 10)
    assert g(0.0) == pytest.approx(anchor, abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.lists(coeff, min_size=1, max_size=6), st.floats(-3, 3))
def test_difference_matches_evaluation(gc, x):
    g = CasimirShift(tuple(gc))
    f = difference_of_g(g)
    assert f(x) == pytest.approx(g(x) - g(x - 1.0), abs=1e-9)


def test_quadratic_eps_difference():
    eps = 0.2
    f = quadratic_eps_algebra(eps).f
    # [N+, N-] = -3 N0^2 + 4 eps N0 - eps^2
    assert poly_close(f, StructurePolynomial((-eps**2, 4 * eps, -3.0)), 1e-14)


def test_horner_array_and_scalar():
    assert horner((1, 2, 3), 2.0) == 17.0
    assert np.array_equal(horner((1, 2, 3), np.array([0.0, 1.0])), [1.0, 6.0])


# -- casimir_value ---------------------------------------------------------

def test_casimir_bg_j1():
    assert casimir_value(CasimirShift((0, -0.5, -0.5)), 1.0) == 0.0


def test_casimir_is_g_at_j_minus_one():
    g = CasimirShift((0.3, -1.1, 0.7, 0.25))
    assert casimir_value(g, 2.3) == horner(g.coeffs, 2.3 - 1.0)


def test_casimir_one_oscillator():
    # K0|0> = 1/4, C = K- K+ - K0 (K0 + 1) evaluated on the lowest weight
    assert casimir_value(su11_algebra().g, 0.25) == pytest.approx(3 / 16, abs=1e-15)


# -- build_lowest_weight_rep ----------------------------------------------

def test_bg_ladder_elements():
    rep = build_lowest_weight_rep(bg_algebra(), 1.0, 8)
    assert np.allclose(rep.e[:3], [1.0, math.sqrt(3), math.sqrt(6)], rtol=1e-15)
    phi = -1.0
    m = np.arange(1, 8)
    assert np.allclose(rep.e, np.sqrt(m * (-2 * phi + m - 1) / 2), rtol=1e-14)


def test_quadratic_eps_ladder():
    rep = build_lowest_weight_rep(quadratic_eps_algebra(-0.5), 0.5, 6)
    n = np.arange(1, 6)
    eps = -0.5
    assert rep.e[0] == pytest.approx(math.sqrt(2), rel=1e-15)
    assert np.allclose(rep.e, np.sqrt((n - 0.5 - eps) * n * (n + 0.5 - eps)), rtol=1e-14)


def test_terminating_rep_raises_nonunitary_at_1():
    # C(j) - g(j) = 0: g(-1) = g(0) for g = x(x+1)
    with pytest.raises(NonUnitary) as exc:
        build_lowest_weight_rep(AlgebraSpec("t", CasimirShift((0, 1, 1))), 0.0, 4)
    assert exc.value.m == 1


def test_su2_terminates_at_2s_plus_1():
    s = 1.5
    g = CasimirShift((0, 1, 1))  # compact su(2), f = 2x
    build_lowest_weight_rep(g, -s, int(2 * s + 1))
    with pytest.raises(NonUnitary) as exc:
        build_lowest_weight_rep(g, -s, int(2 * s + 2))
    assert exc.value.m == int(2 * s + 1)


def test_dim_must_be_at_least_two():
    with pytest.raises(ValueError):
        build_lowest_weight_rep(bg_algebra(), 1.0, 1)


def test_compact_higgs_has_no_infinite_ladder():
    with pytest.raises(NonUnitary):
        build_lowest_weight_rep(higgs_algebra(1.0, 0.1, compact=True), 1.0, 4)


def test_rep_arrays_are_read_only():
    rep = build_lowest_weight_rep(bg_algebra(), 1.0, 4)
    with pytest.raises(ValueError):
        rep.e[0] = 2.0


def test_ladder_extends_through_g():
    rep = build_lowest_weight_rep(bg_algebra(), 1.0, 4)
    big = build_lowest_weight_rep(bg_algebra(), 1.0, 10)
    assert rep.ladder(7) == pytest.approx(big.e[6], rel=1e-15)
    assert np.allclose(rep.resized(10).e, big.e, rtol=1e-15)


# -- generator_matrices ----------------------------------------------------

def test_generators_dim2():
    rep = build_lowest_weight_rep(bg_algebra(), 1.0, 2)
    n0, p, m = generator_matrices(rep)
    assert np.array_equal(p, [[0, 0], [1, 0]])
    assert np.array_equal(m, [[0, 1], [0, 0]])
    assert np.array_equal(n0, np.diag([1.0, 2.0]))


def test_lowering_annihilates_lowest_state():
    rep = build_lowest_weight_rep(higgs_algebra(1.0, 0.1), 1.0, 8)
    _, _, m = generator_matrices(rep)
    assert np.all(m[:, 0] == 0)


def test_commutator_diagonal_dim8():
    # brute force: N- N+ - N+ N- = -[N+, N-] = -f(N0) on the interior
    rep = build_lowest_weight_rep(bg_algebra(), 1.0, 8)
    n0, p, m = generator_matrices(rep)
    d = np.diag(m @ p - p @ m).real[:-1]
    f = difference_of_g(rep.g)
    assert np.allclose(d, -f(rep.n0_diag[:-1]), atol=1e-13)


# -- verify_closure --------------------------------------------------------

def test_closure_bg16():
    rep = build_lowest_weight_rep(bg_algebra(), 1.0, 16)
    assert verify_closure(rep, difference_of_g(rep.g)).max_residual <= 1e-12


def test_closure_higgs16():
    rep = build_lowest_weight_rep(higgs_algebra(1.0, 0.1), 1.0, 16)
    assert verify_closure(rep, difference_of_g(rep.g)).max_residual <= 1e-12


def test_closure_abelian_is_exact():
    # constant g: every ladder element vanishes, so the builder refuses it,
    # but the zero-ladder module itself satisfies [N+, N-] = 0 exactly
    g = CasimirShift((2.0,))
    assert difference_of_g(g).coeffs == (0.0,)
    with pytest.raises(NonUnitary):
        build_lowest_weight_rep(g, 0.0, 4)
    rep = LowestWeightRep(0.0, 2.0, 5, np.arange(5.0), np.zeros(4), g)
    assert verify_closure(rep, difference_of_g(g)).max_residual == 0.0


def test_edge_locality():
    rep = build_lowest_weight_rep(bg_algebra(), 1.0, 12)
    rpt = verify_closure(rep, difference_of_g(rep.g), include_edge=True)
    assert np.all(rpt.column_residuals[:-1] <= 1e-12)
    assert rpt.column_residuals[-1] > 1.0


@pytest.mark.parametrize(
    "spec,j",
    [(bg_algebra(), 1.0), (su11_algebra(), 0.25), (quadratic_eps_algebra(0.0), 0.5), (higgs_algebra(1.0, 0.1), 1.0)],
)
def test_telescoping_and_casimir_consistency(spec, j):
    rep = build_lowest_weight_rep(spec, j, 20)
    e2 = rep.e**2
    f = spec.f
    scale = max(1.0, e2.max())
    assert np.abs(np.diff(e2) + f(rep.n0_diag[1:-1])).max() <= 1e-12 * scale
    assert np.abs(e2 + rep.g(rep.n0_diag[:-1]) - rep.casimir).max() <= 1e-12 * scale


@settings(max_examples=40, deadline=None)
@given(st.floats(-3.0, -0.05), st.integers(3, 40))
def test_bg_closure_property(phi, dim):
    rep = build_lowest_weight_rep(bg_algebra(), -phi, dim)
    assert verify_closure(rep, bg_algebra().f).max_residual <= 1e-12 * max(1.0, dim)
