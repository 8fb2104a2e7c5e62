import math

import mpmath
import numpy as np
import pytest
import scipy.special as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from deformed_cs.errors import DomainError, NonConvergent, PoleError
from deformed_cs.specfun import (
    bessel_k,
    gamma_ratio,
    integrate_halfline,
    kummer_phi,
    kummer_phi_direct,
    kummer_phi_transformed,
    ln_gamma,
)


# -- ln_gamma --------------------------------------------------------------

def test_ln_gamma_examples():
    assert ln_gamma(1.0) == (0.0, 1)
    v, s = ln_gamma(5.0)
    assert v == pytest.approx(math.log(24.0), rel=1e-15) and s == 1


def test_ln_gamma_negative_half():
    # Gamma(-1.5) = Gamma(0.5) / ((-1.5)(-0.5)), from the recursion
    v, s = ln_gamma(-1.5)
    assert s == 1
    assert v == pytest.approx(math.log(4 * math.sqrt(math.pi) / 3), rel=1e-14)


@pytest.mark.parametrize("x", [-0.5, -2.5, -3.7, -10.1])
def test_ln_gamma_sign(x):
    v, s = ln_gamma(x)
    g = math.gamma(x)
    assert s == (1 if g > 0 else -1)
    assert v == pytest.approx(math.log(abs(g)), rel=1e-13)


@pytest.mark.parametrize("x", [0.0, -1.0, -7.0])
def test_ln_gamma_poles(x):
    with pytest.raises(PoleError):
        ln_gamma(x)


@settings(max_examples=100, deadline=None)
@given(st.floats(-50, 50).filter(lambda x: not (x <= 0 and abs(x - round(x)) < 1e-6)))
def test_ln_gamma_vs_mpmath(x):
    v, s = ln_gamma(x)
    ref = mpmath.gamma(x)
    assert s == (1 if ref > 0 else -1)
    assert abs(v - float(mpmath.log(abs(ref)))) <= 1e-13 * max(1.0, abs(v))


def test_gamma_ratio():
    assert gamma_ratio([5, 3], [4]) == pytest.approx(8.0, rel=1e-14)
    assert gamma_ratio([-0.5], []) == pytest.approx(-2 * math.sqrt(math.pi), rel=1e-14)


# -- Bessel K --------------------------------------------------------------

@pytest.mark.parametrize("x", [1.0, 2.0])
def test_bessel_half_order(x):
    assert bessel_k(0.5, x) == pytest.approx(math.sqrt(math.pi / (2 * x)) * math.exp(-x), rel=1e-13)


def test_bessel_even_in_order():
    assert bessel_k(0.7, 1.3) == bessel_k(-0.7, 1.3)


@pytest.mark.parametrize("nu,x", [(0.3, 0.5), (1.7, 2.0), (3.2, 10.0), (-2.4, 0.1)])
def test_bessel_recurrence(nu, x):
    lhs = bessel_k(nu + 1, x)
    rhs = bessel_k(nu - 1, x) + 2 * nu / x * bessel_k(nu, x)
    assert abs(lhs - rhs) <= 1e-9 * abs(lhs)


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5), st.floats(0.05, 30))
def test_bessel_vs_scipy(nu, x):
    assert bessel_k(nu, x) == pytest.approx(sp.kv(nu, x), rel=1e-10)


def test_bessel_domain():
    with pytest.raises(DomainError):
        bessel_k(0.5, 0.0)


# -- Kummer --------------------------------------------------------------------

def test_kummer_at_zero():
    assert kummer_phi(2.3, 1.1, 0.0) == 1.0


@pytest.mark.parametrize("r", [0.5, 1.0, 5.0, 40.0])
def test_kummer_elementary(r):
    assert kummer_phi(1.0, 2.0, -r) == pytest.approx((1 - math.exp(-r)) / r, rel=1e-13)


@pytest.mark.parametrize("a,c", [(1.0, 2.0), (2.5, 0.7), (-3.5, 4.0), (7.0, 9.5)])
def test_kummer_paths_agree_at_5(a, c):
    d, t = kummer_phi_direct(a, c, 5.0), kummer_phi_transformed(a, c, 5.0)
    assert abs(d - t) <= 1e-10 * abs(t)


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.floats(0.1, 10), st.floats(0, 100))
def test_kummer_vs_mpmath(a, c, r):
    ref = float(mpmath.hyp1f1(a, c, -r))
    val = kummer_phi(a, c, -r)
    # near zeros of Phi only an absolute comparison against the term scale is meaningful
    scale = max(abs(ref), 1e-12 * float(mpmath.hyp1f1(abs(a), c, r)) * math.exp(-r), 1e-300)
    assert abs(val - ref) <= 1e-10 * scale


def test_kummer_pole():
    with pytest.raises(PoleError):
        kummer_phi(1.0, -2.0, -1.0)


def test_kummer_positive_argument_rejected():
    with pytest.raises(DomainError):
        kummer_phi(1.0, 2.0, 1.0)


# -- half-line quadrature ----------------------------------------------------

def test_integrate_exp():
    assert integrate_halfline(lambda r: math.exp(-r)) == pytest.approx(1.0, abs=1e-10)


def test_integrate_gamma():
    assert integrate_halfline(lambda r: r**3 * math.exp(-2 * r)) == pytest.approx(6 / 16, rel=1e-10)


def test_integrate_bessel_half():
    closed = lambda r: r * math.sqrt(math.pi / (4 * r)) * math.exp(-2 * r)
    a = integrate_halfline(lambda r: r * bessel_k(0.5, 2 * r) if r > 0 else 0.0)
    b = integrate_halfline(closed)
    assert a == pytest.approx(b, rel=1e-10)
    assert b == pytest.approx(math.sqrt(math.pi) / 2 * math.gamma(1.5) / 2**1.5, rel=1e-10)


def test_integrate_algebraic_tail():
    assert integrate_halfline(lambda r: 1 / (1 + r) ** 3) == pytest.approx(0.5, rel=1e-9)


def test_integrate_nonconvergent():
    with pytest.raises(NonConvergent):
        integrate_halfline(lambda r: 1 / (1 + r), r_max=1e4)
