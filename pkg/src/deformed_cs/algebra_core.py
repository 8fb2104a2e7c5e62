"""Polynomially deformed su(1,1)/su(2) algebras and their lowest-weight reps.

A deformed algebra is fixed by the Casimir-shift polynomial ``g``:

    [N0, N+-] = +-N+-,    [N+, N-] = f(N0),    f(x) = g(x) - g(x - 1),

with Casimir ``C = N- N+ + g(N0)``.  On the lowest-weight module with lowest
``N0`` eigenvalue ``j`` the Casimir takes the value ``C(j) = g(j - 1)`` and the
ladder matrix elements are

    N+ |j, m-1> = e_m |j, m>,    e_m = sqrt(C(j) - g(j + m - 1)).

All polynomials are stored as ascending coefficient tuples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Optional, Sequence

import numpy as np

from .errors import NonUnitary

__all__ = [
    "StructurePolynomial",
    "CasimirShift",
    "AlgebraSpec",
    "LowestWeightRep",
    "ClosureReport",
    "horner",
    "difference_of_g",
    "solve_g",
    "casimir_value",
    "build_lowest_weight_rep",
    "generator_matrices",
    "verify_closure",
    "su11_algebra",
    "bg_algebra",
    "quadratic_algebra",
    "quadratic_eps_algebra",
    "higgs_algebra",
]


def horner(coeffs: Sequence[float], x):
    """Evaluate ``sum coeffs[k] * x**k`` by Horner's rule (scalar or array)."""
    acc = np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _trim(coeffs) -> tuple:
    c = [float(v) for v in coeffs]
    while len(c) > 1 and c[-1] == 0.0:
        c.pop()
    return tuple(c) if c else (0.0,)


@dataclass(frozen=True)
class StructurePolynomial:
    """The structure function ``f`` of ``[N+, N-] = f(N0)``."""

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return horner(self.coeffs, x)


@dataclass(frozen=True)
class CasimirShift:
    """The Casimir shift ``g`` with ``C = N- N+ + g(N0)``.

    The free additive constant of ``g`` is its constant coefficient.
    """

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    @property
    def anchor_constant(self) -> float:
        return self.coeffs[0]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return horner(self.coeffs, x)


@dataclass(frozen=True)
class AlgebraSpec:
    name: str
    g: CasimirShift
    description: str = ""

    @property
    def f(self) -> StructurePolynomial:
        return difference_of_g(self.g)


def difference_of_g(g: CasimirShift) -> StructurePolynomial:
    """Return ``f(x) = g(x) - g(x - 1)`` as an exact polynomial identity.

    Uses ``x**k - (x-1)**k = sum_{i<k} C(k,i) (-1)**(k-i+1) x**i`` so the
    leading term of ``g`` cancels identically instead of numerically.
    """
    gc = g.coeffs
    d = len(gc) - 1
    if d == 0:
        return StructurePolynomial((0.0,))
    f = [0.0] * d
    for k in range(1, d + 1):
        for i in range(k):
            f[i] += gc[k] * comb(k, i) * (-1) ** (k - i + 1)
    return StructurePolynomial(tuple(f))


def solve_g(f: StructurePolynomial, anchor: float = 0.0) -> CasimirShift:
    """Return the unique ``g`` with ``g(x) - g(x-1) = f(x)`` and ``g(0) = anchor``.

    The difference operator is upper triangular on the monomial basis
    ``x, x**2, ...`` so ``g`` follows by back substitution from the top degree.
    """
    fc = f.coeffs
    d = len(fc) - 1
    if d == 0 and fc[0] == 0.0:
        return CasimirShift((float(anchor),))
    g = [0.0] * (d + 2)
    g[0] = float(anchor)
    for i in range(d, -1, -1):
        # coefficient of x**i in Delta(sum_k g_k x**k) must equal f_i
        acc = fc[i]
        for k in range(i + 2, d + 2):
            acc -= g[k] * comb(k, i) * (-1) ** (k - i + 1)
        g[i + 1] = acc / comb(i + 1, i)
    return CasimirShift(tuple(g))


def casimir_value(g: CasimirShift, j: float) -> float:
    """Casimir eigenvalue ``C(j) = g(j - 1)`` on the lowest-weight module."""
    return float(g(j - 1.0))


@dataclass(frozen=True)
class LowestWeightRep:
    """Truncated lowest-weight representation.

    ``e[m-1]`` holds the ladder element e_m for m = 1..dim-1.  ``g`` is kept
    when known so that consumers can extend the ladder past ``dim``; reps
    extracted from concrete realizations may not have one.
    """

    j: float
    casimir: float
    dim: int
    n0_diag: np.ndarray
    e: np.ndarray
    g: Optional[CasimirShift] = None
    name: str = ""

    def __post_init__(self):
        for attr in ("n0_diag", "e"):
            arr = np.array(getattr(self, attr), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)

    def ladder(self, m: int) -> float:
        """e_m for m >= 1, extended through ``g`` beyond the truncation."""
        if m < 1:
            return 0.0
        if m < self.dim:
            return float(self.e[m - 1])
        if self.g is None:
            raise IndexError(f"e_{m} lies past dim={self.dim} and the rep has no g")
        radicand = self.casimir - float(self.g(self.j + m - 1))
        if radicand <= 0.0:
            raise NonUnitary(m, radicand)
        return float(np.sqrt(radicand))

    def resized(self, dim: int) -> "LowestWeightRep":
        if dim <= self.dim:
            return LowestWeightRep(
                self.j, self.casimir, dim, self.n0_diag[:dim], self.e[: dim - 1], self.g, self.name
            )
        if self.g is None:
            raise IndexError("cannot extend a rep without a Casimir shift")
        e = np.array([self.ladder(m) for m in range(1, dim)])
        return LowestWeightRep(
            self.j, self.casimir, dim, self.j + np.arange(dim), e, self.g, self.name
        )


def build_lowest_weight_rep(spec: AlgebraSpec | CasimirShift, j: float, dim: int) -> LowestWeightRep:
    """Build the unitary lowest-weight rep of dimension ``dim``.

    Raises
    ------
    NonUnitary
        At the first ``m < dim`` with ``C(j) - g(j+m-1) <= 0``.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    g = spec.g if isinstance(spec, AlgebraSpec) else spec
    name = spec.name if isinstance(spec, AlgebraSpec) else ""
    j = float(j)
    C = casimir_value(g, j)
    m = np.arange(1, dim)
    radicands = C - g(j + m - 1.0)
    bad = np.nonzero(radicands <= 0.0)[0]
    if bad.size:
        k = int(bad[0])
        raise NonUnitary(k + 1, float(radicands[k]))
    return LowestWeightRep(j, C, dim, j + np.arange(dim), np.sqrt(radicands), g, name)


def generator_matrices(rep: LowestWeightRep):
    """Dense ``(N0, N+, N-)`` for a rep; ``N-`` is the transpose of ``N+``."""
    n0 = np.diag(rep.n0_diag).astype(complex)
    nplus = np.diag(rep.e, -1).astype(complex)
    return n0, nplus, nplus.T.copy()


@dataclass(frozen=True)
class ClosureReport:
    """``max_residual`` is absolute; ``scale`` is the largest ``e_m**2`` involved.

    Since every ``e_m`` is a rounded square root, the commutator diagonal
    carries an unavoidable error of a few ulps of ``scale``;
    ``rounding_floor`` is that level (8 machine epsilons times ``scale``).
    """

    max_residual: float
    interior_dim: int
    column_residuals: np.ndarray = field(repr=False)
    scale: float = 1.0

    @property
    def rounding_floor(self) -> float:
        return 8.0 * float(np.finfo(float).eps) * self.scale


def _column_norms(m: np.ndarray) -> np.ndarray:
    return np.linalg.norm(m, axis=0)


def verify_closure(rep: LowestWeightRep, f: StructurePolynomial, include_edge: bool = False) -> ClosureReport:
    """Residual of ``[N+, N-] = f(N0)`` on the interior states ``0..dim-2``.

    With ``include_edge`` the last basis state is reported too; only its
    column is expected to be off.
    """
    if rep.dim < 3:
        raise ValueError("closure check needs dim >= 3")
    n0, p, m = generator_matrices(rep)
    comm = p @ m - m @ p
    target = np.diag(f(rep.n0_diag)).astype(complex)
    cols = _column_norms(comm - target)
    interior = rep.dim if include_edge else rep.dim - 1
    scale = float(np.max(rep.e**2, initial=1.0))
    return ClosureReport(float(cols[:interior].max()), interior, cols, scale)


# -- named algebras ---------------------------------------------------------

def su11_algebra() -> AlgebraSpec:
    """Undeformed su(1,1) with ``[K+, K-] = -2 K0``, ``g = -x(x+1)``."""
    return AlgebraSpec("su11", CasimirShift((0.0, -1.0, -1.0)), "[K+,K-] = -2K0")


def bg_algebra() -> AlgebraSpec:
    """su(1,1) in the Barut-Girardello normalization, ``g = -x(x+1)/2``.

    With ``j = -phi`` the ladder elements are sqrt(m(-2 phi + m - 1)/2).
    """
    return AlgebraSpec("su11-bg", CasimirShift((0.0, -0.5, -0.5)), "[K+,K-] = -K0")


def quadratic_algebra(sign: int, a: float) -> AlgebraSpec:
    """``[N+, N-] = sign*2 N0 + a N0**2``; ``sign=-1`` is the su(1,1)-type deformation."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    g = solve_g(StructurePolynomial((0.0, 2.0 * sign, float(a))), 0.0)
    return AlgebraSpec(f"quadratic({sign:+d},{a:g})", g, "quadratic deformation")


def quadratic_eps_algebra(eps: float) -> AlgebraSpec:
    """Trilinear-boson quadratic algebra, ``g = -(x - eps)(x + 1/2)(x + 1 - eps)``.

    The natural lowest weight is ``j = 1/2``, where ``C = 0``.
    """
    p = np.polynomial.Polynomial
    g = -(p([-eps, 1.0]) * p([0.5, 1.0]) * p([1.0 - eps, 1.0]))
    return AlgebraSpec(f"quadratic-eps({eps:g})", CasimirShift(tuple(g.coef)), "[N+,N-] = -3N0^2 + 4 eps N0 - eps^2")


def higgs_algebra(c: float, h: float, compact: bool = False) -> AlgebraSpec:
    """Cubic (Higgs) algebra.

    ``compact=True`` is the literal ``[M+, M-] = 2c M0 + 4h M0**3`` with
    ``g = c x(x+1) + h x**2 (x+1)**2``.  For ``c, h > 0`` that orientation only
    has finite lowest-weight modules, so the default flips the overall sign
    (``[M+, M-] = -(2c M0 + 4h M0**3)``), mirroring the +-2N0 choice of the
    quadratic algebra; ``j = 1`` then carries an infinite unitary ladder.
    """
    s = 1.0 if compact else -1.0
    g = (0.0, s * c, s * (c + h), s * 2.0 * h, s * h)
    kind = "compact" if compact else "noncompact"
    return AlgebraSpec(f"higgs({c:g},{h:g},{kind})", CasimirShift(g), "cubic deformation")
