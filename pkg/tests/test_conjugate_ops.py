import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deformed_cs.algebra_core import (
    CasimirShift,
    bg_algebra,
    build_lowest_weight_rep,
    generator_matrices,
    higgs_algebra,
    quadratic_eps_algebra,
    su11_algebra,
)
from deformed_cs.conjugate_ops import (
    canonical_conjugate_matrix,
    ccr_residual,
    conjugate_shift,
    dual_ccr_residual,
    lie_mapping,
    mapping_residual,
)
from deformed_cs.errors import DivergentConjugate

PRESETS = {
    "su11-bg": (bg_algebra(), 1.0),
    "su11-even": (su11_algebra(), 0.25),
    "su11-odd": (su11_algebra(), 0.75),
    "quadratic-eps0": (quadratic_eps_algebra(0.0), 0.5),
    "quadratic-eps-half": (quadratic_eps_algebra(-0.5), 0.5),
    "higgs": (higgs_algebra(1.0, 0.1), 1.0),
}


@pytest.mark.parametrize("j,alpha", [(0.25, 0.75), (0.75, 0.25), (1.0, 0.0)])
def test_conjugate_shift(j, alpha):
    rep = build_lowest_weight_rep(su11_algebra(), j, 4)
    assert conjugate_shift(rep) == alpha


def test_bg_first_element():
    rep = build_lowest_weight_rep(bg_algebra(), 1.0, 4)
    pair = canonical_conjugate_matrix(rep, 0.0)
    assert pair.matrix[1, 0] == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("name", list(PRESETS))
def test_first_element_is_inverse_e1(name):
    spec, j = PRESETS[name]
    rep = build_lowest_weight_rep(spec, j, 6)
    pair = canonical_conjugate_matrix(rep)
    assert pair.matrix[1, 0] == pytest.approx(1.0 / rep.e[0], rel=1e-15)


def test_su2_terminating_rep_diverges():
    s = 2.0
    rep = build_lowest_weight_rep(CasimirShift((0, 1, 1)), -s, int(2 * s + 1))
    with pytest.raises(DivergentConjugate) as exc:
        canonical_conjugate_matrix(rep)
    assert exc.value.m == rep.dim - 1


@pytest.mark.parametrize("name", list(PRESETS))
def test_ccr_and_dual_ccr_dim32(name):
    spec, j = PRESETS[name]
    rep = build_lowest_weight_rep(spec, j, 32)
    pair = canonical_conjugate_matrix(rep)
    assert ccr_residual(pair) <= 1e-12
    assert dual_ccr_residual(pair) <= 1e-12


def test_ccr_shifted_alpha_only_hits_vacuum():
    rep = build_lowest_weight_rep(bg_algebra(), 1.0, 32)
    per = ccr_residual(canonical_conjugate_matrix(rep, conjugate_shift(rep) + 0.5), per_state=True)
    assert per[0] == pytest.approx(0.5, abs=1e-14)
    assert np.all(per[1:] <= 1e-12)


def test_ccr_dim3():
    rep = build_lowest_weight_rep(bg_algebra(), 1.0, 3)
    assert ccr_residual(canonical_conjugate_matrix(rep)) <= 1e-12


@pytest.mark.parametrize("alpha", [-1.0, 0.0, 0.37, 2.0])
@pytest.mark.parametrize("name", ["su11-even", "quadratic-eps0", "higgs"])
def test_alpha_cancellation_off_vacuum(alpha, name):
    spec, j = PRESETS[name]
    rep = build_lowest_weight_rep(spec, j, 24)
    per = ccr_residual(canonical_conjugate_matrix(rep, alpha), per_state=True)
    assert np.all(per[1:] <= 1e-12)
    assert per[0] == pytest.approx(abs(alpha - conjugate_shift(rep)), abs=1e-13)


@pytest.mark.parametrize("j", [0.25, 0.75])
def test_su11_specialization(j):
    # F = (K0 + alpha)/(K- K+) on the source state, elementwise to 1e-14
    rep = build_lowest_weight_rep(su11_algebra(), j, 20)
    n0, kp, km = generator_matrices(rep)
    pair = canonical_conjugate_matrix(rep)
    kmkp = np.diag(km @ kp).real[:-1]
    F = (rep.n0_diag[:-1] + conjugate_shift(rep)) / kmkp
    expected = np.diag(kp, -1).real * F
    assert np.allclose(np.diag(pair.matrix, -1).real, expected, rtol=1e-14, atol=0)


# -- Lie mappings ---------------------------------------------------------

def test_su11_mapping_dim16():
    rep = build_lowest_weight_rep(su11_algebra(), 0.25, 16)
    mp = lie_mapping(rep, 1)
    assert mapping_residual(mp, rep) <= 1e-12
    # undeformed case: N-bar equals N- off the lowest column (h(x)/e^2 = 1 there)
    _, _, nminus = generator_matrices(rep)
    assert np.allclose(mp.matrix[:, 1:], nminus[:, 1:], atol=1e-14)


def test_epsilon_vanishes_at_j1():
    rep = build_lowest_weight_rep(bg_algebra(), 1.0, 8)
    assert lie_mapping(rep, 1).offset == 0.0


@pytest.mark.parametrize("name,dim", [("quadratic-eps0", 32), ("quadratic-eps-half", 32), ("higgs", 24)])
def test_mapping_residual_presets(name, dim):
    spec, j = PRESETS[name]
    rep = build_lowest_weight_rep(spec, j, dim)
    assert mapping_residual(lie_mapping(rep, 1), rep) <= 1e-12


@pytest.mark.parametrize("name", ["su11-even", "quadratic-eps0", "higgs"])
@pytest.mark.parametrize("delta", [1.0, -0.3, 7.5])
def test_epsilon_cancellation(name, delta):
    spec, j = PRESETS[name]
    rep = build_lowest_weight_rep(spec, j, 20)
    eps = 1.0 * j * (1 - j) + delta
    per = mapping_residual(lie_mapping(rep, 1, eps), rep, per_state=True)
    assert per[0] > 0.1 * abs(delta)
    assert np.all(per[1:] <= 1e-12)


def test_flipped_target_detected():
    rep = build_lowest_weight_rep(higgs_algebra(1.0, 0.1), 1.0, 16)
    mp = lie_mapping(rep, 1)
    r = mapping_residual(mp, rep, b=-1)
    # flipping b changes the target by 4 N0, so the residual is 4 |n0| on the interior
    assert r == pytest.approx(4 * rep.n0_diag[:-1].max(), rel=1e-12)


def test_su2_target_mapping():
    rep = build_lowest_weight_rep(quadratic_eps_algebra(0.0), 0.5, 20)
    assert mapping_residual(lie_mapping(rep, -1), rep) <= 1e-12


def test_mapping_lowest_column_zero():
    rep = build_lowest_weight_rep(higgs_algebra(1.0, 0.1), 1.0, 10)
    assert np.all(lie_mapping(rep, 1).matrix[:, 0] == 0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 3.0), st.floats(-3.0, 3.0), st.integers(3, 30))
def test_ccr_property_bg(j, alpha, dim):
    rep = build_lowest_weight_rep(bg_algebra(), j, dim)
    per = ccr_residual(canonical_conjugate_matrix(rep, alpha), per_state=True)
    assert np.all(per[1:] <= 1e-12 * dim)
