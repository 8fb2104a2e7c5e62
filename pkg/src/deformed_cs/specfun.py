"""Special functions and half-line quadrature for the measure checks.

``ln_gamma`` wraps :func:`math.lgamma` with a sign channel.  ``bessel_k`` and
``kummer_phi`` are evaluated here directly (integral representation and
power series respectively) so that scipy/mpmath remain available as
independent oracles in the tests.
"""

from __future__ import annotations

import heapq
import math
from typing import Callable

import numpy as np

from .errors import DomainError, NonConvergent, PoleError

__all__ = ["ln_gamma", "gamma_ratio", "bessel_k", "kummer_phi", "integrate_halfline"]


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def ln_gamma(x: float) -> tuple[float, int]:
    """Return ``(log|Gamma(x)|, sign Gamma(x))``."""
    x = float(x)
    if _is_nonpositive_int(x):
        raise PoleError(f"Gamma has a pole at x={x:g}")
    if x > 0:
        return math.lgamma(x), 1
    # between -k-1 and -k the sign is (-1)**(k+1)
    sign = -1 if math.floor(x) % 2 else 1
    return math.lgamma(x), sign


def gamma_ratio(num, den) -> float:
    """``prod Gamma(num_i) / prod Gamma(den_i)`` evaluated in log space."""
    total, sign = 0.0, 1
    for x in num:
        v, s = ln_gamma(x)
        total, sign = total + v, sign * s
    for x in den:
        v, s = ln_gamma(x)
        total, sign = total - v, sign * s
    return sign * math.exp(total)


# -- Bessel K ---------------------------------------------------------------

def _bessel_k_integrand_log(nu: float, x: float, t: np.ndarray) -> np.ndarray:
    # log of e^{-x cosh t} e^{|nu| t}; the e^{-|nu| t} companion is folded in by the caller
    return -x * np.cosh(t) + abs(nu) * t


def bessel_k(nu: float, x: float) -> float:
    """Modified Bessel function ``K_nu(x)`` for real order and ``x > 0``.

    Evaluates ``int_0^inf exp(-x cosh t) cosh(nu t) dt`` with the trapezoidal
    rule, which converges geometrically for this analytic, doubly
    exponentially decaying integrand.  The step is halved until two
    successive sums agree to 1e-13 relative; by then the coarser sum has
    already converged, so the returned finer sum is accurate to rounding.
    """
    x = float(x)
    nu = abs(float(nu))
    if not x > 0:
        raise DomainError("bessel_k needs x > 0")
    # peak of -x cosh t + nu t sits at sinh t = nu / x
    t_peak = math.asinh(nu / x)
    peak = -x * math.cosh(t_peak) + nu * t_peak
    # extend until the integrand is e^-60 below its peak
    t_max = max(t_peak, 1.0)
    while -x * math.cosh(t_max) + nu * t_max > peak - 60.0:
        t_max *= 1.5
    h = min(0.5, t_max / 16.0)
    prev = None
    for _ in range(20):
        t = np.arange(0.0, t_max + h, h)
        lg = _bessel_k_integrand_log(nu, x, t) - peak
        vals = 0.5 * (np.exp(lg) + np.exp(lg - 2.0 * nu * t))
        total = h * (vals.sum() - 0.5 * vals[0])
        if prev is not None and abs(total - prev) <= 1e-13 * abs(total):
            return float(total * math.exp(peak))
        prev = total
        h *= 0.5
    raise NonConvergent(f"bessel_k({nu}, {x}) did not converge")


# -- Kummer's confluent hypergeometric function --------------------------------

def _series_1f1(a: float, c: float, z: float, max_terms: int = 20000) -> float:
    """Plain power series of 1F1(a; c; z), summed until terms are negligible."""
    term = 1.0
    total = 1.0
    for k in range(max_terms):
        if term == 0.0:
            return total
        term *= (a + k) / (c + k) * z / (k + 1)
        total += term
        # past the peak (k > |z|) the terms decay geometrically
        if k > abs(z) + abs(a) and abs(term) <= 1e-17 * abs(total):
            return total
    raise NonConvergent(f"1F1({a}, {c}, {z}) series did not converge")


def _asymptotic_1f1_negative(a: float, c: float, r: float) -> float:
    """Large-r algebraic expansion of 1F1(a; c; -r), optimally truncated."""
    lead = gamma_ratio([c], [c - a]) * r ** (-a)
    term, total, best = 1.0, 1.0, math.inf
    for s in range(200):
        nxt = term * (a + s) * (a - c + 1 + s) / ((s + 1) * r)
        if abs(nxt) >= best or nxt == 0.0:
            break
        best = abs(nxt)
        term = nxt
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
    return lead * total


DIRECT_SERIES_MAX_R = 1.0
ASYMPTOTIC_MIN_R = 100.0


def kummer_phi(a: float, c: float, x_neg: float) -> float:
    """Kummer's function ``Phi(a, c, -r)`` for ``-r <= 0`` (pass ``x_neg = -r``).

    * ``r <= 1``: direct power series (cancellation bounded by ``e**r``).
    * ``1 < r <= 100`` or ``c - a`` a non-positive integer: Kummer's
      transformation ``e**-r Phi(c - a, c, r)``, whose series has no
      alternating cancellation at positive argument.
    * ``r > 100``: algebraic asymptotic expansion; the exponentially small
      companion term is dropped.
    """
    if _is_nonpositive_int(c):
        raise PoleError(f"Phi(a, c, z) is undefined for c={c:g}")
    if x_neg > 0:
        raise DomainError("kummer_phi takes a non-positive argument -r")
    r = -float(x_neg)
    if r == 0.0:
        return 1.0
    if r <= DIRECT_SERIES_MAX_R or _is_nonpositive_int(a):
        return _series_1f1(a, c, -r)
    if r <= ASYMPTOTIC_MIN_R or _is_nonpositive_int(c - a):
        return math.exp(-r) * _series_1f1(c - a, c, r)
    return _asymptotic_1f1_negative(a, c, r)


def kummer_phi_direct(a: float, c: float, r: float) -> float:
    """Untransformed series of ``Phi(a, c, -r)``; reliable only for small r."""
    return _series_1f1(a, c, -r)


def kummer_phi_transformed(a: float, c: float, r: float) -> float:
    """``e**-r Phi(c - a, c, r)``, the Kummer-transformed evaluation."""
    return math.exp(-r) * _series_1f1(c - a, c, r)


# -- quadrature on [0, inf) ------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(10)
_GL2_NODES, _GL2_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _panel(f, a: float, b: float) -> tuple[float, float]:
    """Gauss-Legendre 20-point value and |G20 - G10| error estimate on [a, b]."""
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    lo = half * float(np.dot(_GL_WEIGHTS, f(mid + half * _GL_NODES)))
    hi = half * float(np.dot(_GL2_WEIGHTS, f(mid + half * _GL2_NODES)))
    return hi, abs(hi - lo)


def _adaptive(f, a: float, b: float, tol: float, max_panels: int, abs_floor: float = 0.0):
    """Globally adaptive bisection; returns (integral, error estimate).

    Stops once the summed error estimate is below ``tol * |integral|`` or
    ``abs_floor``, whichever is larger.
    """
    val, err = _panel(f, a, b)
    heap = [(-err, a, b, val)]
    total, total_err = val, err
    n = 1
    while total_err > max(tol * abs(total), abs_floor) and n < max_panels:
        neg_err, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        v1, e1 = _panel(f, lo, mid)
        v2, e2 = _panel(f, mid, hi)
        total += v1 + v2 - v
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        n += 1
    # re-sum to shed the running-update rounding
    total = sum(item[3] for item in heap)
    total_err = sum(-item[0] for item in heap)
    return total, total_err


def _tail_bound(f, R: float) -> float:
    """Bound on ``int_R^inf |f|`` from the local decay of ``|f|`` at R.

    Exponential bound ``|f(R)|/lam`` holds when the log-decay rate ``lam`` is
    positive and nondecreasing past R; the power bound ``|f(R)| R/(p-1)``
    when the log-log slope ``p`` exceeds 1 and is nondecreasing.  Both
    monotonicity conditions are checked on three sample points.
    """
    pts = np.array([R, 1.5 * R, 2.25 * R, 3.375 * R])
    vals = np.abs(np.asarray(f(pts), dtype=float))
    if vals[0] == 0.0 and np.all(vals == 0.0):
        return 0.0
    if np.any(vals <= 0.0) or not np.all(np.isfinite(vals)):
        return math.inf
    logs = np.log(vals)
    lam = -np.diff(logs) / np.diff(pts)
    slope = -np.diff(logs) / np.diff(np.log(pts))
    bounds = [math.inf]
    if lam[0] > 0 and np.all(np.diff(lam) >= -1e-12 * abs(lam[0])):
        bounds.append(vals[0] / lam[0])
    if slope[0] > 1 and np.all(np.diff(slope) >= -1e-9 * abs(slope[0])):
        bounds.append(vals[0] * R / (slope[0] - 1.0))
    return min(bounds)


def integrate_halfline(f: Callable, tol: float = 1e-10, r0: float = 1.0,
                       r_max: float = 1e7, max_panels: int = 4000) -> float:
    """``int_0^inf f(r) dr`` for integrands with exponential or algebraic decay.

    ``[0, R]`` is covered by adaptive Gauss-Legendre panels on the dyadic
    intervals ``[0, r0], [r0, 2 r0], ...``; R is doubled until the certified
    tail bound is below ``tol`` relative to the running integral.

    Raises
    ------
    NonConvergent
        If no tail bound can be certified before ``r_max``.
    """
    fv = np.vectorize(f, otypes=[float]) if not getattr(f, "vectorized", False) else f
    total, err = _adaptive(fv, 0.0, r0, 0.1 * tol, max_panels)
    R = r0
    while True:
        tail = _tail_bound(fv, R)
        if tail <= tol * max(abs(total), 1e-300) and err <= tol * max(abs(total), 1e-300):
            return total
        if R >= r_max:
            raise NonConvergent(
                f"tail beyond R={R:g} not certified (bound {tail:.3g}, integral {total:.6g})"
            )
        v, e = _adaptive(fv, R, 2.0 * R, 0.1 * tol, max_panels, 0.01 * tol * abs(total))
        total += v
        err += e
        R *= 2.0
