"""Canonical conjugates of the lowering operator and maps onto su(1,1)/su(2).

Operator ordering: an operator-valued function of ``N0`` standing to the
right of a ladder operator is evaluated at the ``N0`` eigenvalue of the state
being acted on, so ``N+ F(C, N0)`` has element ``e_{m+1} F(j+m)`` in column m.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra_core import LowestWeightRep, generator_matrices
from .errors import DivergentConjugate, DivergentMapping

__all__ = [
    "ConjugatePair",
    "LieMapping",
    "conjugate_shift",
    "canonical_conjugate_matrix",
    "ccr_residual",
    "dual_ccr_residual",
    "lie_mapping",
    "mapping_residual",
]


@dataclass(frozen=True)
class ConjugatePair:
    """``Ñ+ = N+ F(C, N0)`` with ``F(C, x) = (x + shift)/(C - g(x))``."""

    shift: float
    matrix: np.ndarray
    rep: LowestWeightRep


@dataclass(frozen=True)
class LieMapping:
    """``N̄- = N- G(C, N0)`` with ``[N+, N̄-] = -2 sign N0``.

    ``sign=+1`` targets su(1,1), ``sign=-1`` su(2).
    """

    sign: int
    offset: float
    matrix: np.ndarray


def conjugate_shift(rep: LowestWeightRep) -> float:
    """The sector constant ``1 - j`` that makes ``[N-, Ñ+] = 1`` on the vacuum."""
    return 1.0 - rep.j


def _ladder_radicands(rep: LowestWeightRep) -> np.ndarray:
    """``C - g(j+m)`` for m = 0..dim-1, i.e. e_{m+1}**2 including the edge."""
    inner = rep.e**2
    if rep.g is not None:
        edge = rep.casimir - float(rep.g(rep.j + rep.dim - 1))
    else:
        # without g the edge value is unknown; assume the ladder continues
        edge = np.inf
    return np.append(inner, edge)


def canonical_conjugate_matrix(rep: LowestWeightRep, alpha: float | None = None) -> ConjugatePair:
    """Build ``Ñ+`` with ``<m+1|Ñ+|m> = (j + m + alpha)/e_{m+1}``.

    ``alpha`` defaults to :func:`conjugate_shift`.

    Raises
    ------
    DivergentConjugate
        If ``C - g(j+m)`` vanishes for some kept state, which happens on the
        top state of a finite (compact-type) module.
    """
    if alpha is None:
        alpha = conjugate_shift(rep)
    rad = _ladder_radicands(rep)
    scale = max(1.0, float(np.max(np.abs(rad[np.isfinite(rad)]), initial=1.0)))
    zero = np.nonzero(np.abs(rad) <= 1e-13 * scale)[0]
    if zero.size:
        raise DivergentConjugate(int(zero[0]))
    x = rep.n0_diag[:-1]
    # e_{m+1} * (x + alpha) / e_{m+1}**2
    sub = (x + alpha) / rep.e
    return ConjugatePair(float(alpha), np.diag(sub, -1).astype(complex), rep)


def _interior_max(mat: np.ndarray) -> float:
    return float(np.linalg.norm(mat[:, :-1], axis=0).max())


def ccr_residual(pair: ConjugatePair, per_state: bool = False):
    """Interior residual of ``[N-, Ñ+] = 1``.

    With ``per_state=True`` the column norms for states ``0..dim-2`` are
    returned instead of their maximum.
    """
    _, _, nminus = generator_matrices(pair.rep)
    t = pair.matrix
    defect = nminus @ t - t @ nminus - np.eye(pair.rep.dim)
    if per_state:
        return np.linalg.norm(defect[:, :-1], axis=0)
    return _interior_max(defect)


def dual_ccr_residual(pair: ConjugatePair) -> float:
    """Interior residual of the adjoint relation ``[Ñ+^dagger, N+] = 1``."""
    _, nplus, _ = generator_matrices(pair.rep)
    td = pair.matrix.conj().T
    return _interior_max(td @ nplus - nplus @ td - np.eye(pair.rep.dim))


def lie_mapping(rep: LowestWeightRep, b: int = 1, epsilon: float | None = None) -> LieMapping:
    """Map the deformed lowering operator onto an undeformed one.

    ``G(C, x) = ((x**2 - x) b + epsilon)/(C - g(x - 1))``.  ``epsilon``
    defaults to ``b j (1 - j)``, the only value for which the relation also
    holds on the lowest state; the m=0 column of ``N̄-`` is zero.
    """
    if b not in (1, -1):
        raise ValueError("b must be +1 or -1")
    if epsilon is None:
        epsilon = b * rep.j * (1.0 - rep.j)
    rad = rep.e**2
    zero = np.nonzero(rad == 0.0)[0]
    if zero.size:
        raise DivergentMapping(int(zero[0]) + 1)
    x = rep.n0_diag[1:]
    # column m: e_m * h(j+m) / e_m**2
    sup = ((x * x - x) * b + epsilon) / rep.e
    return LieMapping(b, float(epsilon), np.diag(sup, 1).astype(complex))


def mapping_residual(mapping: LieMapping, rep: LowestWeightRep, b: int | None = None, per_state: bool = False):
    """Interior residual of ``[N+, N̄-] + 2 b N0``.

    ``b`` defaults to the mapping's own target sign; passing the other sign
    is a sanity check that a wrong target is detected.
    """
    if b is None:
        b = mapping.sign
    n0, nplus, _ = generator_matrices(rep)
    nbar = mapping.matrix
    defect = nplus @ nbar - nbar @ nplus + 2.0 * b * n0
    if per_state:
        return np.linalg.norm(defect[:, :-1], axis=0)
    return _interior_max(defect)
