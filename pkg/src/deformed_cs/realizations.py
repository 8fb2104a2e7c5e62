"""Boson and spin-boson realizations of deformed algebras.

Every builder returns dense matrices on a truncated Fock space (optionally
tensored with two-level atoms).  Truncation corrupts only states whose
occupation lies within the operator's mode degree of a cutoff, so all
identities are checked on the *interior* mask carried by each
:class:`RealizedGenerators`.

Generator conventions that differ from a naive transcription:

* trilinear: ``N0 = (-n1 + n2 + n3)/3`` so that ``N+ = a1 a2+ a3+`` raises it
  by exactly one.
* anharmonic (1:2): ``N+ = a+ b**2`` is the operator that raises
  ``N0 = (n_a + 1/2) - (n_b + 1/2)/2``, by two units.
* multiphoton: ``N- = N+^dagger = (a0+)**m a1**n``.
* Dicke: ``N0 = sum sigma0`` (atomic inversion, sigma0 = diag(+1/2, -1/2)).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .algebra_core import CasimirShift, LowestWeightRep
from .errors import EmptySector, NoLowestWeight, NonLadder

__all__ = [
    "MultimodeFock",
    "SpinBosonSpace",
    "RealizedGenerators",
    "SectorRep",
    "SectorFit",
    "one_mode_su11",
    "trilinear_generators",
    "anharmonic_generators",
    "multiphoton_generators",
    "dicke_generators",
    "commutator",
    "interior_residual",
    "charge_sectors",
    "fit_commutator_polynomial",
    "fit_hamiltonian_decomposition",
    "sector_reduce",
]

LADDER_STOP = 1e-10
CHARGE_COMMUTE_TOL = 1e-10


# -- spaces --------------------------------------------------------------------

@dataclass(frozen=True)
class MultimodeFock:
    """Product of truncated Fock spaces, basis ordered lexicographically."""

    cutoffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "cutoffs", tuple(int(c) for c in self.cutoffs))
        if not self.cutoffs or min(self.cutoffs) < 0:
            raise ValueError("cutoffs must be non-negative")

    @property
    def dim(self) -> int:
        return int(np.prod([c + 1 for c in self.cutoffs]))

    def occupations(self) -> np.ndarray:
        """Array of shape (dim, modes) with the occupation tuple of each basis state."""
        return np.array(list(itertools.product(*[range(c + 1) for c in self.cutoffs])), dtype=int)

    def index(self, occ: Sequence[int]) -> int:
        idx = 0
        for n, c in zip(occ, self.cutoffs):
            if not 0 <= n <= c:
                raise IndexError(f"occupation {tuple(occ)} outside cutoffs {self.cutoffs}")
            idx = idx * (c + 1) + n
        return idx

    def annihilator(self, mode: int) -> np.ndarray:
        mats = [np.eye(c + 1) for c in self.cutoffs]
        c = self.cutoffs[mode]
        mats[mode] = np.diag(np.sqrt(np.arange(1, c + 1, dtype=float)), 1)
        return _kron_all(mats)

    def number(self, mode: int) -> np.ndarray:
        return np.diag(self.occupations()[:, mode].astype(float))


@dataclass(frozen=True)
class SpinBosonSpace:
    """``n_atoms`` two-level atoms tensored with one field mode (atoms first)."""

    n_atoms: int
    field_cutoff: int

    @property
    def dim(self) -> int:
        return 2**self.n_atoms * (self.field_cutoff + 1)

    def atom_op(self, op: np.ndarray, atom: int) -> np.ndarray:
        mats = [np.eye(2)] * self.n_atoms + [np.eye(self.field_cutoff + 1)]
        mats = list(mats)
        mats[atom] = op
        return _kron_all(mats)

    def field_annihilator(self) -> np.ndarray:
        a = np.diag(np.sqrt(np.arange(1, self.field_cutoff + 1, dtype=float)), 1)
        return np.kron(np.eye(2**self.n_atoms), a)

    def photon_numbers(self) -> np.ndarray:
        return np.tile(np.arange(self.field_cutoff + 1), 2**self.n_atoms)


def _kron_all(mats):
    out = np.array([[1.0]])
    for m in mats:
        out = np.kron(out, m)
    return out


# -- generators ------------------------------------------------------------------

@dataclass(frozen=True)
class RealizedGenerators:
    """Realized ``N0, N+, N-`` and Hamiltonian ``H`` on a concrete space.

    ``charges`` maps names to conserved-charge matrices, ``interior`` is the
    boolean mask of basis states unaffected by truncation and ``g`` is the
    Casimir shift when the realization has a single sector-independent one.
    """

    N0: np.ndarray
    Nplus: np.ndarray
    Nminus: np.ndarray
    H: np.ndarray
    space: object
    params: dict
    charges: dict
    interior: np.ndarray
    degree: int
    g: Optional[CasimirShift] = None
    name: str = ""

    def __post_init__(self):
        for attr in ("N0", "Nplus", "Nminus", "H", "interior"):
            arr = np.array(getattr(self, attr))
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)

    @property
    def dim(self) -> int:
        return self.N0.shape[0]


def _fock_interior(space: MultimodeFock, degree: int) -> np.ndarray:
    occ = space.occupations()
    return np.all(occ <= np.array(space.cutoffs) - degree, axis=1)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def interior_residual(mat: np.ndarray, interior: np.ndarray) -> float:
    """Largest column norm of ``mat`` over interior basis states."""
    if not np.any(interior):
        raise ValueError("no interior states at these cutoffs")
    return float(np.linalg.norm(mat[:, interior], axis=0).max())


def _mpow(m: np.ndarray, k: int) -> np.ndarray:
    return np.linalg.matrix_power(m, k)


def one_mode_su11(cutoff: int) -> RealizedGenerators:
    """``K0 = (a+a + 1/2)/2``, ``K+ = a+**2/2``, ``K- = a**2/2``.

    Closes onto ``[K+, K-] = -2 K0`` with ``g(x) = -x(x+1)``; the parity
    ``(-1)**(a+a)`` splits the space into the sectors ``j = 1/4`` and ``3/4``.
    """
    if cutoff < 3:
        raise ValueError("cutoff must be >= 3")
    sp = MultimodeFock((cutoff,))
    a = sp.annihilator(0)
    n = sp.number(0)
    k0 = (n + 0.5 * np.eye(sp.dim)) / 2.0
    kp = a.T @ a.T / 2.0
    km = a @ a / 2.0
    parity = np.diag((-1.0) ** np.arange(cutoff + 1))
    return RealizedGenerators(
        k0, kp, km, k0.copy(), sp, {"cutoff": cutoff}, {"parity": parity},
        _fock_interior(sp, 2), 2, CasimirShift((0.0, -1.0, -1.0)), "one-mode-su11",
    )


def trilinear_generators(cutoffs, w=(1.0, 1.0, 1.0), kappa: float = 1.0) -> RealizedGenerators:
    """Three-mode ``N+ = a1 a2+ a3+`` with Manley-Rowe charges ``K1 = n1 + n2``, ``K2 = n2 - n3``."""
    cutoffs = tuple(int(c) for c in cutoffs)
    if len(cutoffs) != 3 or min(cutoffs) < 2:
        raise ValueError("trilinear_generators needs three cutoffs >= 2")
    sp = MultimodeFock(cutoffs)
    a1, a2, a3 = (sp.annihilator(i) for i in range(3))
    n1, n2, n3 = (sp.number(i) for i in range(3))
    n0 = (-n1 + n2 + n3) / 3.0
    nplus = a1 @ a2.T @ a3.T
    nminus = nplus.T.copy()
    h = w[0] * n1 + w[1] * n2 + w[2] * n3 + kappa * (nplus + nminus)
    charges = {"K1": n1 + n2, "K2": n2 - n3}
    params = {"w": list(map(float, w)), "kappa": float(kappa), "cutoffs": list(cutoffs)}
    return RealizedGenerators(n0, nplus, nminus, h, sp, params, charges, _fock_interior(sp, 1), 1, None, "trilinear")


def anharmonic_generators(cutoff_a: int, cutoff_b: int) -> RealizedGenerators:
    """1:2 anisotropic oscillator, ``H = (n_a + 1/2) + (n_b + 1/2)/2``.

    ``N0 = (n_a + 1/2) - (n_b + 1/2)/2`` and ``N+ = a+ b**2``, which raises
    ``N0`` by two and commutes with ``H``.  Then
    ``[N+, N-] = -3 N0**2 + 2 H N0 + H**2 - 3/4``.
    """
    if min(cutoff_a, cutoff_b) < 4:
        raise ValueError("anharmonic_generators needs cutoffs >= 4")
    sp = MultimodeFock((cutoff_a, cutoff_b))
    a, b = sp.annihilator(0), sp.annihilator(1)
    na, nb = sp.number(0), sp.number(1)
    eye = np.eye(sp.dim)
    h = (na + 0.5 * eye) + 0.5 * (nb + 0.5 * eye)
    n0 = (na + 0.5 * eye) - 0.5 * (nb + 0.5 * eye)
    nplus = a.T @ b @ b
    nminus = nplus.T.copy()
    params = {"m": 1, "n": 2, "cutoffs": [cutoff_a, cutoff_b]}
    return RealizedGenerators(n0, nplus, nminus, h, sp, params, {"H": h.copy()}, _fock_interior(sp, 2), 2, None, "anharmonic")


def multiphoton_generators(m: int, n: int, cutoffs, w=(1.0, 1.0), kappa: float = 1.0) -> RealizedGenerators:
    """``N+ = a0**m a1+**n``, ``N0 = (n1 - n0)/(m+n)``; conserved ``n n0 + m n1``."""
    if m < 1 or n < 1:
        raise ValueError("m, n must be >= 1")
    cutoffs = tuple(int(c) for c in cutoffs)
    if len(cutoffs) != 2 or min(cutoffs) < m + n:
        raise ValueError("multiphoton_generators needs two cutoffs >= m+n")
    sp = MultimodeFock(cutoffs)
    a0, a1 = sp.annihilator(0), sp.annihilator(1)
    n0_, n1_ = sp.number(0), sp.number(1)
    nplus = _mpow(a0, m) @ _mpow(a1.T, n)
    nminus = nplus.T.copy()
    n0 = (n1_ - n0_) / (m + n)
    h = w[0] * n0_ + w[1] * n1_ + kappa * (nplus + nminus)
    params = {"m": m, "n": n, "w": list(map(float, w)), "kappa": float(kappa), "cutoffs": list(cutoffs)}
    charges = {"Q": n * n0_ + m * n1_}
    return RealizedGenerators(n0, nplus, nminus, h, sp, params, charges, _fock_interior(sp, max(m, n)), max(m, n), None, "multiphoton")


def dicke_generators(n_atoms: int, n_photon: int, field_cutoff: int, eps_atom: float = 1.0,
                     w1: float = 1.0, kappa: float = 1.0) -> RealizedGenerators:
    """n-photon Dicke model ``H = eps sum sigma0 + w1 a+a + kappa (N+ + N-)``.

    ``N+ = sum sigma+(i) a**n`` and ``N0 = sum sigma0``; the excitation charge
    is ``Q = n sum sigma0 + a+a``.
    """
    if n_atoms < 1 or n_photon < 1:
        raise ValueError("n_atoms and n_photon must be >= 1")
    if field_cutoff < n_photon + 1:
        raise ValueError("field_cutoff must be >= n_photon + 1")
    sp = SpinBosonSpace(n_atoms, field_cutoff)
    sig_p = np.array([[0.0, 1.0], [0.0, 0.0]])  # |e><g| with basis (e, g)
    sig_0 = np.diag([0.5, -0.5])
    a = sp.field_annihilator()
    an = _mpow(a, n_photon)
    s0 = sum(sp.atom_op(sig_0, i) for i in range(n_atoms))
    sp_tot = sum(sp.atom_op(sig_p, i) for i in range(n_atoms))
    nplus = sp_tot @ an
    nminus = nplus.T.copy()
    nphot = np.diag(sp.photon_numbers().astype(float))
    h = eps_atom * s0 + w1 * nphot + kappa * (nplus + nminus)
    interior = sp.photon_numbers() <= field_cutoff - n_photon
    params = {"n_atoms": n_atoms, "n_photon": n_photon, "field_cutoff": field_cutoff,
              "eps_atom": float(eps_atom), "w1": float(w1), "kappa": float(kappa)}
    charges = {"Q": n_photon * s0 + nphot}
    return RealizedGenerators(s0, nplus, nminus, h, sp, params, charges, interior, n_photon, None, "dicke")


# -- sector analysis -------------------------------------------------------------

def charge_sectors(gen: RealizedGenerators, charge_names: Sequence[str] | None = None,
                   interior_only: bool = True) -> dict:
    """Group basis indices by the joint eigenvalues of diagonal charges."""
    names = list(gen.charges) if charge_names is None else list(charge_names)
    diags = []
    for nm in names:
        c = gen.charges[nm]
        if np.abs(c - np.diag(np.diag(c))).max() > 0:
            raise ValueError(f"charge {nm} is not diagonal in the Fock basis")
        diags.append(np.round(np.diag(c).real, 9))
    sectors: dict = {}
    for i in range(gen.dim):
        if interior_only and not gen.interior[i]:
            continue
        key = tuple(float(d[i]) for d in diags)
        sectors.setdefault(key, []).append(i)
    return {k: np.array(v) for k, v in sectors.items()}


@dataclass(frozen=True)
class SectorFit:
    """Per-sector least-squares fit of an operator onto a set of basis operators."""

    coefficients: dict
    residuals: dict
    sizes: dict

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values()) if self.residuals else 0.0


def fit_commutator_polynomial(gen: RealizedGenerators, degree: int,
                              charge_names: Sequence[str] | None = None) -> SectorFit:
    """Fit ``[N+, N-]`` by ``sum_k c_k N0**k`` separately on each charge sector.

    Only interior rows and columns of each sector enter.  The fit is an
    operator least-squares problem over all matrix entries of the sector
    block, so off-diagonal structure not captured by ``N0`` shows up in the
    residual.  Residuals are Frobenius norms of the misfit.
    """
    comm = commutator(gen.Nplus, gen.Nminus)
    coeffs, res, sizes = {}, {}, {}
    for key, idx in charge_sectors(gen, charge_names).items():
        block = comm[np.ix_(idx, idx)]
        n0b = gen.N0[np.ix_(idx, idx)]
        basis = [np.linalg.matrix_power(n0b, k) for k in range(degree + 1)]
        A = np.stack([b.ravel() for b in basis], axis=1)
        sol, *_ = np.linalg.lstsq(A, block.ravel(), rcond=None)
        coeffs[key] = sol
        res[key] = float(np.linalg.norm(A @ sol - block.ravel()))
        sizes[key] = len(idx)
    return SectorFit(coeffs, res, sizes)


def fit_hamiltonian_decomposition(gen: RealizedGenerators, charge_names: Sequence[str] | None = None) -> SectorFit:
    """Fit ``H = a N0 + b N+ + c N- + d`` on each charge sector.

    Uses all basis states of the sector (not only interior ones): ``H`` is
    built from the same truncated matrices, so the decomposition holds up to
    the cutoff.
    """
    coeffs, res, sizes = {}, {}, {}
    for key, idx in charge_sectors(gen, charge_names, interior_only=False).items():
        sub = np.ix_(idx, idx)
        ops = [gen.N0[sub], gen.Nplus[sub], gen.Nminus[sub], np.eye(len(idx))]
        A = np.stack([o.ravel() for o in ops], axis=1)
        target = gen.H[sub].ravel()
        sol, *_ = np.linalg.lstsq(A, target, rcond=None)
        coeffs[key] = sol
        res[key] = float(np.linalg.norm(A @ sol - target))
        sizes[key] = len(idx)
    return SectorFit(coeffs, res, sizes)


@dataclass(frozen=True)
class SectorRep(LowestWeightRep):
    """Lowest-weight rep extracted from a realization.

    ``basis`` holds the orthonormal ladder vectors in the full space as
    columns; ``roundtrip_residual`` compares the abstract matrices with the
    realized ones restricted to that basis.
    """

    basis: np.ndarray = field(default=None, repr=False)
    roundtrip_residual: float = 0.0

    def embed(self, coeffs: np.ndarray) -> np.ndarray:
        """Map ladder-basis coefficients into the full realization space."""
        c = np.asarray(coeffs)
        if c.size > self.basis.shape[1]:
            raise ValueError("state longer than the extracted ladder")
        return self.basis[:, : c.size] @ c


def _joint_eigenspace(gen: RealizedGenerators, charges, eigtuple, tol: float = 1e-9) -> np.ndarray:
    Q = np.eye(gen.dim)
    for c, target in zip(charges, eigtuple):
        c = np.asarray(c)
        if np.abs(c - np.diag(np.diag(c))).max() == 0 and Q.shape[1] == gen.dim:
            # diagonal charge on the full space: exact index selection
            keep = np.abs(np.diag(c).real - target) <= tol
            Q = Q[:, keep]
            continue
        sub = Q.conj().T @ c @ Q
        w, v = np.linalg.eigh(0.5 * (sub + sub.conj().T))
        Q = Q @ v[:, np.abs(w - target) <= tol]
    return Q


def _check_charges(gen: RealizedGenerators, charges) -> None:
    for c in charges:
        for op, label in ((gen.N0, "N0"), (gen.Nplus, "N+"), (gen.Nminus, "N-")):
            r = interior_residual(commutator(np.asarray(c), op), gen.interior)
            if r > CHARGE_COMMUTE_TOL:
                raise ValueError(f"charge does not commute with {label} on the interior (residual {r:.3g})")


def sector_reduce(gen: RealizedGenerators, charges, eigtuple, g: Optional[CasimirShift] = None) -> SectorRep:
    """Extract the lowest-weight ladder inside a joint charge eigenspace.

    The lowest state is the ``N-`` kernel vector of the sector (the one with
    smallest ``N0`` if the kernel is degenerate).  The ladder ``N+**k`` of it
    is orthonormalized by modified Gram-Schmidt with one re-orthogonalization
    pass and stops at the first vector of norm below 1e-10.

    Raises
    ------
    EmptySector
        The joint eigenspace is empty.
    NoLowestWeight
        ``N-`` has no kernel in the sector.
    NonLadder
        The ladder does not exhaust the sector; ``defect`` is the number of
        missing dimensions.
    """
    charges = [np.asarray(c) for c in charges]
    eigtuple = [float(e) for e in np.atleast_1d(eigtuple)]
    if len(charges) != len(eigtuple):
        raise ValueError("one eigenvalue per charge is required")
    _check_charges(gen, charges)
    Q = _joint_eigenspace(gen, charges, eigtuple)
    if Q.shape[1] == 0:
        raise EmptySector(f"no states with charges {tuple(eigtuple)}")

    nm = Q.conj().T @ gen.Nminus @ Q
    nps = Q.conj().T @ gen.Nplus @ Q
    n0s = Q.conj().T @ gen.N0 @ Q
    u, s, vh = np.linalg.svd(nm)
    scale = max(1.0, float(s.max(initial=0.0)))
    null = vh.conj().T[:, s <= 1e-10 * scale]
    if null.shape[1] == 0:
        raise NoLowestWeight("N- has no kernel in this sector")
    kn = null.conj().T @ n0s @ null
    w, v = np.linalg.eigh(0.5 * (kn + kn.conj().T))

    # N+ maps the N0 eigenspace with eigenvalue x into the one with x + step;
    # projecting every ladder vector onto its eigenspace removes the rounding
    # noise that repeated application of N+ would otherwise amplify.
    w0, u0 = np.linalg.eigh(0.5 * (n0s + n0s.conj().T))

    def project(y):
        lam = float(np.real(y.conj() @ n0s @ y) / np.real(y.conj() @ y))
        cols = u0[:, np.abs(w0 - lam) <= 1e-8 * max(1.0, abs(lam))]
        return cols @ (cols.conj().T @ y)

    lowest = project(null @ v[:, 0])
    lowest = lowest / np.linalg.norm(lowest)
    # canonical phase: largest component real and positive
    k = int(np.argmax(np.abs(lowest)))
    lowest = lowest * (abs(lowest[k]) / lowest[k])

    ys = [lowest]
    e = []
    while len(ys) < Q.shape[1]:
        nxt = nps @ ys[-1]
        if float(np.linalg.norm(nxt)) < LADDER_STOP:
            break
        nxt = project(nxt)
        for _ in range(2):
            for yprev in ys:
                nxt = nxt - (yprev.conj() @ nxt) * yprev
        nrm = float(np.linalg.norm(nxt))
        if nrm < LADDER_STOP:
            break
        e.append(float(np.real(ys[-1].conj() @ nm @ (nxt / nrm))))
        ys.append(nxt / nrm)
    vecs = [Q @ y for y in ys]
    V = np.stack(vecs, axis=1)
    if V.shape[1] < Q.shape[1]:
        raise NonLadder(Q.shape[1] - V.shape[1], f"ladder spans {V.shape[1]} of {Q.shape[1]} sector states")

    n0_diag = np.real(np.einsum("ij,ik,kj->j", V.conj(), gen.N0, V))
    j = float(n0_diag[0])
    gg = g if g is not None else gen.g
    casimir = float(gg(j - 1.0)) if gg is not None else float("nan")
    dim = V.shape[1]
    e_arr = np.array(e)
    abs_p = np.diag(e_arr, -1) if dim > 1 else np.zeros((1, 1))
    rt = max(
        np.abs(V.conj().T @ gen.N0 @ V - np.diag(n0_diag)).max(),
        np.abs(V.conj().T @ gen.Nplus @ V - abs_p).max(),
        np.abs(V.conj().T @ gen.Nminus @ V - abs_p.T).max(),
    )
    return SectorRep(j, casimir, dim, n0_diag, e_arr, gg, gen.name, basis=V, roundtrip_residual=float(rt))
