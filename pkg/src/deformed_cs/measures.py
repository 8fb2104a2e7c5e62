"""Resolution-of-identity measures as radial moment problems.

For states ``|a> = sum a**n / sqrt(rho(n)) |n>`` and a rotation-invariant
measure ``d sigma = sigma(r) r dr dtheta`` the resolution of identity reduces
to

    2 pi int_0^inf sigma(r) r**(2n+1) dr = rho(n),    n = 0, 1, ...

Every check normalizes both sides at n = 0, so overall constants never
enter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, NonConvergent
from .specfun import bessel_k, gamma_ratio, integrate_halfline, kummer_phi, ln_gamma

__all__ = [
    "MeasureSpec",
    "MomentSequence",
    "MomentReport",
    "bg_moments",
    "quadratic_moments",
    "bg_measure",
    "bg_measure_printed",
    "radial_moment",
    "verify_measure_moments",
    "kummer_mellin_check",
    "kummer_candidate_moments",
    "QuadraticMeasureFit",
    "fit_quadratic_measure",
    "is_log_convex",
]


@dataclass(frozen=True)
class MeasureSpec:
    density: Callable[[float], float]
    label: str
    params: dict = field(default_factory=dict)

    def check_positive(self, n_points: int = 1000, lo: float = 1e-3, hi: float = 30.0) -> bool:
        r = np.logspace(math.log10(lo), math.log10(hi), n_points)
        vals = np.array([self.density(x) for x in r])
        return bool(np.all(vals > 0.0))


@dataclass(frozen=True)
class MomentSequence:
    values: np.ndarray
    definition: str


@dataclass(frozen=True)
class MomentReport:
    n: list
    computed: list
    target: list
    rel_error: list

    @property
    def max_rel_error(self) -> float:
        return max(self.rel_error)

    def to_json(self) -> dict:
        return {"n": self.n, "computed": self.computed, "target": self.target, "rel_error": self.rel_error}


def bg_moments(phi: float, n_max: int) -> MomentSequence:
    """``Gamma(n+1) Gamma(n - 2 phi) / Gamma(-2 phi)`` for n = 0..n_max."""
    if phi >= 0:
        raise DomainError("Barut-Girardello moments need phi < 0")
    k = -2.0 * phi
    vals = np.array([gamma_ratio([n + 1, n + k], [k]) for n in range(n_max + 1)])
    return MomentSequence(vals, f"Gamma(n+1)Gamma(n{-2 * phi:+g})/Gamma({-2 * phi:g})")


def quadratic_moments(eps: float, n_max: int) -> MomentSequence:
    """``Gamma(n+1) Gamma(n+1/2-eps) Gamma(n+3/2-eps) / (Gamma(1/2-eps) Gamma(3/2-eps))``."""
    if eps >= 0.5:
        raise DomainError("quadratic moments need eps < 1/2")
    a, b = 0.5 - eps, 1.5 - eps
    vals = np.array([gamma_ratio([n + 1, n + a, n + b], [a, b]) for n in range(n_max + 1)])
    return MomentSequence(vals, f"Gamma(n+1)Gamma(n+{a:g})Gamma(n+{b:g})/(Gamma({a:g})Gamma({b:g}))")


def bg_measure(phi: float) -> MeasureSpec:
    """Radial density ``r**(-2 phi - 1) K_{2 phi + 1}(2 r)``.

    Its moments are ``Gamma(n+1) Gamma(n - 2 phi)/4``, which is what resolves
    the identity for the Barut-Girardello states.
    """
    if phi >= 0:
        raise DomainError("bg_measure needs phi < 0")
    p, order = -2.0 * phi - 1.0, 2.0 * phi + 1.0
    return MeasureSpec(lambda r: r**p * bessel_k(order, 2.0 * r), "bg", {"phi": phi})


def bg_measure_printed(phi: float) -> MeasureSpec:
    """Radial density ``r**(-2 phi + 1) K_{1/2 + phi}(2 r)``.

    An often quoted alternative that serves as a negative control: its
    moments are
    ``Gamma(n + 5/4 - 3 phi/2) Gamma(n + 7/4 - phi/2)/4``, which do not match
    ``Gamma(n+1) Gamma(n - 2 phi)``.
    """
    if phi >= 0:
        raise DomainError("bg_measure_printed needs phi < 0")
    p, order = -2.0 * phi + 1.0, 0.5 + phi
    return MeasureSpec(lambda r: r**p * bessel_k(order, 2.0 * r), "bg-printed", {"phi": phi})


def radial_moment(measure: MeasureSpec, n: int, tol: float = 1e-10) -> float:
    """``2 pi int_0^inf sigma(r) r**(2n+1) dr``."""
    dens = measure.density
    return 2.0 * math.pi * integrate_halfline(lambda r: dens(r) * r ** (2 * n + 1) if r > 0 else 0.0, tol)


def verify_measure_moments(measure: MeasureSpec, target: MomentSequence | Sequence[float],
                           tol: float = 1e-10) -> MomentReport:
    """Compare quadrature moments with ``target`` after normalizing both at n = 0."""
    values = np.asarray(getattr(target, "values", target), dtype=float)
    if values.size < 2:
        raise ValueError("need at least two target moments")
    computed = [radial_moment(measure, n, tol) for n in range(values.size)]
    c0, t0 = computed[0], values[0]
    rel = [abs(c / c0 - t / t0) / abs(t / t0) for c, t in zip(computed, values)]
    return MomentReport(list(range(values.size)), computed, values.tolist(), rel)


def kummer_mellin_check(a: float, b: float, c: float, tol: float = 1e-10) -> float:
    """Relative error of ``int r**(b-1) Phi(a, c, -r) dr`` against its Gamma form.

    The Gamma form is ``Gamma(b) Gamma(c) Gamma(a-b) / (Gamma(a) Gamma(c-b))``.
    """
    if not 0 < b < a:
        raise DomainError("Mellin transform of Phi(a, c, -r) needs 0 < b < a")
    if (c - b) <= 0 and float(c - b).is_integer():
        raise DomainError("c - b must not be a non-positive integer")
    rhs = gamma_ratio([b, c, a - b], [a, c - b])
    lhs = integrate_halfline(lambda r: r ** (b - 1.0) * kummer_phi(a, c, -r) if r > 0 else 0.0, tol)
    return abs(lhs - rhs) / abs(rhs)


def is_log_convex(values: Sequence[float]) -> bool:
    """``mu_n**2 <= mu_{n-1} mu_{n+1}`` for all interior n (Cauchy-Schwarz)."""
    v = np.log(np.asarray(values, dtype=float))
    return bool(np.all(v[:-2] + v[2:] - 2.0 * v[1:-1] >= -1e-12 * np.abs(v[1:-1]).max()))


# -- quadratic-case candidate family --------------------------------------------

def kummer_candidate_moments(p: float, a: float, c: float, s: float, n_max: int) -> np.ndarray:
    """Moments of ``r**p Phi(a, c, -s r**2)`` from the Kummer-Mellin formula.

    With ``u = s r**2`` the n-th moment is proportional to
    ``s**-(n+1+p/2) Gamma(b) Gamma(a-b) / Gamma(c-b)``, ``b = n + 1 + p/2``;
    it exists only while ``0 < b < a``.  Missing moments come back as nan.
    """
    out = np.full(n_max + 1, np.nan)
    for n in range(n_max + 1):
        b = n + 1.0 + 0.5 * p
        if not 0 < b < a:
            continue
        try:
            out[n] = math.pi * s ** (-b) * gamma_ratio([b, c, a - b], [a, c - b])
        except DomainError:
            continue
    return out


@dataclass(frozen=True)
class QuadraticMeasureFit:
    status: str
    params: dict
    fit_rel_errors: list
    validation_rel_errors: list
    target: list
    note: str = ""


def fit_quadratic_measure(eps: float, validate_tol: float = 1e-4, n_fit: int = 3,
                          n_validate: int = 8) -> QuadraticMeasureFit:
    """Fit ``r**p Phi(a, c, -s r**2)`` to the quadratic-algebra moments.

    Parameters are matched to the normalized moments n = 1..n_fit (n = 0 fixes
    the constant) and then validated on n_fit+1..n_validate.  The fit status
    is ``"resolved"`` only if every validation moment exists and agrees to
    ``validate_tol``; otherwise ``"unresolved"`` and the moment data are kept.
    """
    from scipy.optimize import least_squares

    target = quadratic_moments(eps, n_validate).values
    tnorm = target / target[0]
    log_t = np.log(tnorm)

    def unpack(theta):
        p, log_gap, log_cgap, log_s = theta
        # a stays above b_max of the fitted moments so they all exist, and
        # c > a keeps Phi(a, c, -x) and every moment positive
        a = n_fit + 1.0 + 0.5 * p + math.exp(log_gap)
        return p, a, a + math.exp(log_cgap), math.exp(log_s)

    def residual(theta):
        p, a, c, s = unpack(theta)
        m = kummer_candidate_moments(p, a, c, s, n_fit)
        if not np.all(np.isfinite(m)) or np.any(m <= 0):
            return np.full(n_fit, 1e3)
        return np.log(m[1:] / m[0]) - log_t[1 : n_fit + 1]

    best = None
    for start in ([0.0, 0.0, 0.0, 0.0], [1.0, 1.0, -1.0, -1.0], [2.0, 2.0, 1.0, 1.0], [0.5, 3.0, 0.5, -2.0]):
        try:
            sol = least_squares(residual, start, method="trf", max_nfev=4000)
        except (ValueError, OverflowError):  # pragma: no cover
            continue
        if best is None or sol.cost < best.cost:
            best = sol
    p, a, c, s = unpack(best.x)
    params = {"p": p, "a": a, "c": c, "s": s}
    model = kummer_candidate_moments(p, a, c, s, n_validate)
    rel = [abs(m / model[0] - t) / t if np.isfinite(m) else math.inf for m, t in zip(model, tnorm)]
    fit_err = rel[1 : n_fit + 1]
    val_err = rel[n_fit + 1 :]
    ok = all(e <= validate_tol for e in fit_err + val_err)
    missing = sum(1 for m in model[n_fit + 1 :] if not np.isfinite(m))
    note = ""
    if missing:
        note = f"{missing} validation moments do not exist for the fitted candidate (b >= a)"
    elif not ok:
        note = "candidate family cannot follow the three-Gamma moment growth"
    return QuadraticMeasureFit("resolved" if ok else "unresolved", params, fit_err, val_err, tnorm.tolist(), note)
