"""Coherent states of deformed algebras on lowest-weight modules.

Three families are built:

* annihilation-operator eigenstates ``N- |a> = a |a>`` (``annihilation_cs``),
  also obtained as ``exp(a Ñ+)|j,0>`` (``exp_conjugate_cs``);
* dual states ``exp(v N+)|j,0>``, eigenstates of ``Ñ+^dagger`` (``dual_cs``);
* displacement states ``exp(xi N+ - conj(xi) N-)|j,0>`` (``perelomov_cs``).

States are always returned with unit norm; the log of the norm of the
unnormalized expansion (with leading coefficient 1) is kept separately.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import scipy.linalg

from .algebra_core import LowestWeightRep, difference_of_g, generator_matrices
from .conjugate_ops import ConjugatePair, canonical_conjugate_matrix, conjugate_shift
from .errors import DomainError, NonNormalizable, NonUnitary, TailNotConvergent, TruncationError
from .specfun import ln_gamma

__all__ = [
    "CoherentState",
    "DualState",
    "PerelomovState",
    "Stats",
    "annihilation_cs",
    "closed_form_bg",
    "closed_form_quadratic",
    "dual_cs",
    "perelomov_cs",
    "exp_conjugate_cs",
    "state_statistics",
    "eigen_residual",
    "dual_eigen_residual",
    "write_coefficients_csv",
    "state_metadata",
]

DEFAULT_MAX_DIM = 4096
TAIL_MARGIN = 0.1
_RESCALE_AT = 1e250


@dataclass(frozen=True)
class CoherentState:
    eigenvalue: complex
    coeffs: np.ndarray
    log_norm: float
    truncation: int
    tail_bound: float
    algebra: str = ""
    j: float = 0.0

    @property
    def norm(self) -> float:
        """Norm of the unnormalized expansion (may overflow to inf)."""
        return math.exp(self.log_norm) if self.log_norm < 700 else math.inf


@dataclass(frozen=True)
class DualState:
    nu: complex
    coeffs: np.ndarray
    truncation: int
    log_norm: float = 0.0
    algebra: str = ""
    j: float = 0.0


@dataclass(frozen=True)
class PerelomovState:
    xi: complex
    coeffs: np.ndarray
    truncation: int
    algebra: str = ""
    j: float = 0.0


AnyState = Union[CoherentState, DualState, PerelomovState]


@dataclass(frozen=True)
class Stats:
    """Excitation-number statistics; ``mandel_q`` is None for a zero mean."""

    mean_excitation: float
    var_excitation: float
    mandel_q: Optional[float]
    mean_n0: float


# -- truncation control -----------------------------------------------------

class _TailCertifier:
    """Decides from which index the ladder elements are known to be nondecreasing.

    ``e_{k+1}**2 - e_k**2 = -f(j+k)``, so the ladder is nondecreasing past the
    largest real root of ``f`` once ``-f`` is nonnegative there.  Reps without
    ``g`` fall back to the tabulated elements and assume the trend persists
    past the truncation.
    """

    def __init__(self, rep: LowestWeightRep):
        self.rep = rep
        self.f = None if rep.g is None else difference_of_g(rep.g)
        if self.f is not None and self.f.degree > 0:
            roots = np.roots(self.f.coeffs[::-1])
            real = roots[np.abs(roots.imag) <= 1e-9 * (1.0 + np.abs(roots))].real
            self.x_crit = float(real.max()) if real.size else -math.inf
        else:
            self.x_crit = -math.inf

    def nondecreasing_from(self, n: int) -> bool:
        rep = self.rep
        if self.f is None:
            tail = rep.e[n - 1:]
            return tail.size == 0 or bool(np.all(np.diff(tail) >= 0.0))
        x0 = rep.j + n
        if x0 <= self.x_crit:
            return False
        return float(self.f(x0 + 1.0)) <= 0.0 or self.f.coeffs == (0.0,)


def _annihilation_series(rep: LowestWeightRep, alpha: complex, tol: float, max_dim: int):
    """Coefficients ``a**m / prod e_k`` with a certified truncation.

    Returns ``(coeffs, log_scale, tail_bound)`` where the true unnormalized
    coefficients are ``coeffs * exp(log_scale)``.
    """
    if alpha == 0:
        return np.array([1.0 + 0j]), 0.0, 0.0
    cert = _TailCertifier(rep)
    amp = abs(alpha)
    c = [1.0 + 0j]
    s = 1.0
    log_scale = 0.0
    while True:
        n = len(c)
        try:
            e_n = rep.ladder(n)
        except (IndexError, NonUnitary) as exc:
            raise TailNotConvergent(
                f"ladder ends at m={n} before |alpha|/e_m < {1 - TAIL_MARGIN}"
            ) from exc
        q = amp / e_n
        if q < 1.0 - TAIL_MARGIN and cert.nondecreasing_from(n):
            last2 = abs(c[-1]) ** 2
            tail = last2 * q * q / (1.0 - q * q) / s
            edge = amp * amp * last2 / s
            if tail <= tol and edge <= tol * tol:
                return np.array(c), log_scale, tail
        if n >= max_dim:
            raise TailNotConvergent(
                f"no certified tail within max_dim={max_dim} (|alpha|/e_N = {q:.3g})"
            )
        nxt = c[-1] * alpha / e_n
        c.append(nxt)
        s += abs(nxt) ** 2
        if s > _RESCALE_AT:
            r = math.sqrt(s)
            c = [v / r for v in c]
            log_scale += math.log(r)
            s = 1.0


def _finish(c: np.ndarray, log_scale: float):
    nrm = float(np.linalg.norm(c))
    return c / nrm, log_scale + math.log(nrm)


def annihilation_cs(rep: LowestWeightRep, alpha: complex, tol: float = 1e-12,
                    max_dim: int = DEFAULT_MAX_DIM) -> CoherentState:
    """Eigenstate of the lowering operator with eigenvalue ``alpha``.

    The expansion ``c_m = alpha**m / (e_1 ... e_m)`` is generated by the
    recursion ``c_{m+1} = c_m alpha / e_{m+1}`` and stopped at the first N for
    which a geometric bound certifies that the discarded weight is below
    ``tol`` and the edge term ``|alpha c_{N-1}|`` (the eigen-residual of the
    truncated vector) is below ``tol``.  The ladder is extended through the
    rep's ``g`` when N exceeds ``rep.dim``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    alpha = complex(alpha)
    c, log_scale, tail = _annihilation_series(rep, alpha, tol, max_dim)
    c, log_norm = _finish(c, log_scale)
    return CoherentState(alpha, c, log_norm, len(c), tail, rep.name, rep.j)


def exp_conjugate_cs(pair: ConjugatePair, alpha: complex, tol: float = 1e-12,
                     max_dim: int = DEFAULT_MAX_DIM) -> CoherentState:
    """``exp(alpha Ñ+)|j,0>`` summed as a Taylor series of matrix products.

    The truncation N is chosen by the same certificate as
    :func:`annihilation_cs`; the coefficients themselves come only from
    repeated application of the conjugate matrix.
    """
    rep = pair.rep
    if abs(pair.shift - conjugate_shift(rep)) > 1e-12:
        raise ValueError("exp_conjugate_cs needs the pair built with shift = 1 - j")
    alpha = complex(alpha)
    probe, _, tail = _annihilation_series(rep, alpha, tol, max_dim)
    n = len(probe)
    if n > rep.dim:
        pair = canonical_conjugate_matrix(rep.resized(n + 1), pair.shift)
    mat = pair.matrix[:n, :n]
    v = np.zeros(n, dtype=complex)
    v[0] = 1.0
    total = v.copy()
    log_scale = 0.0
    for k in range(1, n):
        v = (alpha / k) * (mat @ v)
        total += v
        big = float(np.abs(total).max())
        if big > _RESCALE_AT:
            v /= big
            total /= big
            log_scale += math.log(big)
    c, log_norm = _finish(total, log_scale)
    return CoherentState(alpha, c, log_norm, n, tail, rep.name, rep.j)


def _log_closed_form(n_terms: int, alpha: complex, gamma_shifts, pre_log: float):
    """``(pre * alpha)**n / sqrt(prod_i Gamma(n + s_i))`` normalized, in log space."""
    if n_terms < 1:
        raise ValueError("N must be >= 1")
    c = np.zeros(n_terms, dtype=complex)
    if alpha == 0:
        c[0] = 1.0
        return c, 0.0
    n = np.arange(n_terms)
    logmag = n * (math.log(abs(alpha)) + pre_log)
    for s in gamma_shifts:
        logmag -= 0.5 * np.array([ln_gamma(k + s)[0] for k in n])
    ref = float(logmag.max())
    phase = (alpha / abs(alpha)) ** n
    c = np.exp(logmag - ref) * phase
    nrm = float(np.linalg.norm(c))
    return c / nrm, ref + math.log(nrm)


def closed_form_bg(phi: float, alpha: complex, N: int) -> CoherentState:
    """Barut-Girardello state ``sum (sqrt2 a)**n / sqrt(Gamma(n+1) Gamma(n-2 phi)) |phi,n>``.

    Normalized over the first ``N`` terms; no tail bound is computed.
    """
    if phi >= 0:
        raise DomainError("Barut-Girardello states need phi < 0")
    alpha = complex(alpha)
    c, log_norm = _log_closed_form(N, alpha, (1.0, -2.0 * phi), 0.5 * math.log(2.0))
    return CoherentState(alpha, c, log_norm, N, math.nan, "su11-bg", -phi)


def closed_form_quadratic(eps: float, alpha: complex, N: int) -> CoherentState:
    """Closed-form annihilation state of the trilinear quadratic algebra."""
    if eps >= 0.5:
        raise DomainError("closed_form_quadratic needs eps < 1/2")
    alpha = complex(alpha)
    c, log_norm = _log_closed_form(N, alpha, (0.5 - eps, 1.0, 1.5 - eps), 0.0)
    return CoherentState(alpha, c, log_norm, N, math.nan, f"quadratic-eps({eps:g})", 0.5)


def dual_cs(rep: LowestWeightRep, nu: complex, N: int) -> DualState:
    """``exp(nu N+)|j,0>`` truncated to ``N`` terms, ``c_m = nu**m e_1...e_m / m!``.

    Raises
    ------
    NonNormalizable
        If the squared coefficients are still not decreasing at the end of the
        truncation, i.e. ``|nu|`` is at or past the convergence radius.
    """
    if N > rep.dim:
        raise ValueError(f"N={N} exceeds rep dim {rep.dim}")
    nu = complex(nu)
    c = np.zeros(N, dtype=complex)
    if nu == 0:
        c[0] = 1.0
        return DualState(nu, c, N, 0.0, rep.name, rep.j)
    m = np.arange(1, N)
    steps = math.log(abs(nu)) + np.log(rep.e[: N - 1]) - np.log(m)
    logmag = np.concatenate(([0.0], np.cumsum(steps)))
    if N >= 2 and steps[-1] >= 0.0:
        raise NonNormalizable(
            math.exp(2.0 * steps[-1]),
            f"|c_m|^2 still grows at m={N - 1} (ratio {math.exp(2.0 * steps[-1]):.4g}); "
            "|nu| is at or beyond the convergence radius",
        )
    ref = float(logmag.max())
    c = np.exp(logmag - ref) * (nu / abs(nu)) ** np.arange(N)
    nrm = float(np.linalg.norm(c))
    return DualState(nu, c / nrm, N, ref + math.log(nrm), rep.name, rep.j)


def perelomov_cs(rep: LowestWeightRep, xi: complex, leak_threshold: float = 1e-10) -> PerelomovState:
    """``exp(xi N+ - conj(xi) N-)|j,0>`` on the truncated rep.

    The exponential is taken with scipy's scaling-and-squaring ``expm``.

    Raises
    ------
    TruncationError
        If the last coefficient exceeds ``leak_threshold``.
    """
    xi = complex(xi)
    _, nplus, nminus = generator_matrices(rep)
    gen = xi * nplus - np.conj(xi) * nminus
    c = scipy.linalg.expm(gen)[:, 0]
    trailing = float(abs(c[-1]))
    if trailing >= leak_threshold:
        raise TruncationError(trailing, leak_threshold)
    return PerelomovState(xi, c, rep.dim, rep.name, rep.j)


# -- diagnostics ------------------------------------------------------------

def _padded(coeffs: np.ndarray, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[: len(coeffs)] = coeffs
    return v


def eigen_residual(state: CoherentState, rep: LowestWeightRep) -> float:
    """``|| N- psi - alpha psi ||`` with ``N-`` from ``rep`` (extended if needed)."""
    dim = max(rep.dim, state.truncation)
    if dim > rep.dim:
        rep = rep.resized(dim)
    _, _, nminus = generator_matrices(rep)
    psi = _padded(state.coeffs, dim)
    return float(np.linalg.norm(nminus @ psi - state.eigenvalue * psi))


def dual_eigen_residual(state: DualState, rep: LowestWeightRep) -> float:
    """``|| Ñ+^dagger psi - nu psi ||`` for a dual state."""
    pair = canonical_conjugate_matrix(rep)
    psi = _padded(state.coeffs, rep.dim)
    return float(np.linalg.norm(pair.matrix.conj().T @ psi - state.nu * psi))


def state_statistics(state: AnyState, rep: Optional[LowestWeightRep] = None) -> Stats:
    """Mean, variance and Mandel Q of the excitation number ``m = N0 - j``."""
    p = np.abs(state.coeffs) ** 2
    p = p / p.sum()
    m = np.arange(p.size)
    mean = float(p @ m)
    var = max(float(p @ (m * m)) - mean * mean, 0.0)
    q = (var - mean) / mean if mean > 1e-300 else None
    j = rep.j if rep is not None else state.j
    return Stats(mean, var, q, j + mean)


def write_coefficients_csv(state: AnyState, path) -> None:
    """Write ``m,re_c,im_c,abs2`` rows, floats with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "re_c", "im_c", "abs2"])
        for m, c in enumerate(state.coeffs):
            w.writerow([m, f"{c.real:.17g}", f"{c.imag:.17g}", f"{abs(c) ** 2:.17g}"])


def state_metadata(state: AnyState) -> dict:
    if isinstance(state, CoherentState):
        ev, tail, log_norm = state.eigenvalue, state.tail_bound, state.log_norm
    elif isinstance(state, DualState):
        ev, tail, log_norm = state.nu, math.nan, state.log_norm
    else:
        ev, tail, log_norm = state.xi, math.nan, 0.0
    return {
        "algebra": state.algebra,
        "j": state.j,
        "eigenvalue": [ev.real, ev.imag],
        "truncation": state.truncation,
        "tail_bound": tail,
        "norm_log": log_norm,
    }
