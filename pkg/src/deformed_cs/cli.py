"""``deformed-cs`` command line front end.

Usage::

    deformed-cs <mode> [--spec FILE] [--preset NAME] [--out DIR] [--override key=value ...]

A problem spec is a JSON object ``{"mode": ..., "algebra": ..., "params": ...}``
where ``algebra`` is either ``{"name", "g_coeffs", "j", "dim"}`` or a
realization descriptor ``{"realization", "cutoffs", "params"}``.  Presets
supply a complete spec; ``--spec`` replaces it and ``--override`` edits single
fields (``params.tol=1e-10``, ``algebra.dim=32``; bare keys go to ``params``).

Exit status: 0 pass, 1 fail or unresolved, 2 spec error.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
import traceback
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import algebra_core as ac
from . import coherent_states as cs
from . import conjugate_ops as co
from . import measures as ms
from . import realizations as rz
from .errors import DeformedCSError, DomainError, ParseError, SpecError

__all__ = ["ProblemSpec", "Report", "PRESETS", "MODES", "load_problem_spec", "parse_problem_spec",
           "execute", "dumps", "main"]

MODES = ("algebra-verify", "cs-build", "cs-stats", "realize", "measure-check")
REALIZATIONS = ("trilinear", "anharmonic", "multiphoton", "dicke", "su11-oscillator")
CS_FAMILIES = ("annihilation", "exp-conjugate", "dual", "perelomov")

# minimum cutoffs per realization (per mode where relevant)
_MIN_CUTOFF = {"trilinear": 2, "anharmonic": 4, "su11-oscillator": 3}


# -- deterministic JSON -------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    s = format(x, ".17g")
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats written to 17 significant digits and sorted keys.

    Non-finite floats become ``null``; complex numbers become ``[re, im]``.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([obj.real, obj.imag], indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# -- problem specs ------------------------------------------------------------

@dataclass
class ProblemSpec:
    mode: str
    algebra: dict
    params: dict = field(default_factory=dict)

    @property
    def is_realization(self) -> bool:
        return "realization" in self.algebra

    def to_dict(self) -> dict:
        return {"mode": self.mode, "algebra": copy.deepcopy(self.algebra), "params": copy.deepcopy(self.params)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class Report:
    status: str
    metrics: dict
    artifacts: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"status": self.status, "metrics": self.metrics, "artifacts": self.artifacts}

    @property
    def exit_code(self) -> int:
        return 0 if self.status == "pass" else 1


def _require(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise ParseError(f"missing field '{where}{key}'")
    val = obj[key]
    if kind is float:
        ok = isinstance(val, (int, float)) and not isinstance(val, bool)
    elif kind is int:
        ok = isinstance(val, int) and not isinstance(val, bool)
    else:
        ok = isinstance(val, kind)
    if not ok:
        raise ParseError(f"field '{where}{key}' has wrong type ({type(val).__name__})")
    return val


def _complex_param(val, name: str) -> complex:
    if isinstance(val, (int, float)) and not isinstance(val, bool):
        return complex(val)
    if isinstance(val, list) and len(val) == 2 and all(isinstance(v, (int, float)) for v in val):
        return complex(val[0], val[1])
    raise ParseError(f"field 'params.{name}' must be a number or a [re, im] pair")


def _validate_algebra(alg: dict) -> None:
    if "realization" in alg:
        kind = alg["realization"]
        if kind not in REALIZATIONS:
            raise ParseError(f"field 'algebra.realization' must be one of {REALIZATIONS}")
        cutoffs = _require(alg, "cutoffs", list, "algebra.")
        if not all(isinstance(c, int) and not isinstance(c, bool) for c in cutoffs):
            raise ParseError("field 'algebra.cutoffs' must be a list of integers")
        rp = alg.get("params", {})
        if not isinstance(rp, dict):
            raise ParseError("field 'algebra.params' must be an object")
        n_expected = {"trilinear": 3, "anharmonic": 2, "multiphoton": 2, "dicke": 1, "su11-oscillator": 1}[kind]
        if len(cutoffs) != n_expected:
            raise ParseError(f"realization '{kind}' needs {n_expected} cutoffs")
        if kind in _MIN_CUTOFF and min(cutoffs) < _MIN_CUTOFF[kind]:
            raise DomainError(f"{kind} needs every cutoff >= {_MIN_CUTOFF[kind]}")
        if kind == "multiphoton":
            m, n = int(rp.get("m", 1)), int(rp.get("n", 1))
            if m < 1 or n < 1:
                raise DomainError("multiphoton needs m, n >= 1")
            if min(cutoffs) < m + n:
                raise DomainError("multiphoton needs every cutoff >= m + n")
        if kind == "dicke":
            n_ph = int(rp.get("n_photon", 1))
            if int(rp.get("n_atoms", 1)) < 1 or n_ph < 1:
                raise DomainError("dicke needs n_atoms >= 1 and n_photon >= 1")
            if cutoffs[0] < n_ph + 1:
                raise DomainError("dicke needs field cutoff >= n_photon + 1")
        return
    _require(alg, "name", str, "algebra.")
    g = _require(alg, "g_coeffs", list, "algebra.")
    if not g or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in g):
        raise ParseError("field 'algebra.g_coeffs' must be a non-empty list of numbers")
    _require(alg, "j", float, "algebra.")
    dim = _require(alg, "dim", int, "algebra.")
    if dim < 2:
        raise DomainError("algebra.dim must be >= 2")


def _validate_params(mode: str, alg: dict, params: dict) -> None:
    for key in ("alpha", "nu", "xi"):
        if key in params:
            _complex_param(params[key], key)
    if "tol" in params:
        t = params["tol"]
        if not isinstance(t, (int, float)) or t <= 0:
            raise DomainError("params.tol must be a positive number")
    if "family" in params and params["family"] not in CS_FAMILIES:
        raise ParseError(f"field 'params.family' must be one of {CS_FAMILIES}")
    if mode == "measure-check":
        measure = params.get("measure", "bg")
        if measure not in ("bg", "bg-printed", "quadratic", "kummer"):
            raise ParseError("field 'params.measure' must be bg, bg-printed, quadratic or kummer")
        if measure in ("bg", "bg-printed"):
            phi = _require(params, "phi", float, "params.")
            if phi >= 0:
                raise DomainError("params.phi must satisfy phi < 0")
        if measure == "quadratic":
            eps = _require(params, "eps", float, "params.")
            if eps >= 0.5:
                raise DomainError("params.eps must satisfy eps < 1/2")
        n_max = params.get("n_max", 8)
        if not isinstance(n_max, int) or n_max < 1:
            raise DomainError("params.n_max must be an integer >= 1")
        if measure == "kummer":
            triples = _require(params, "triples", list, "params.")
            for t in triples:
                if not (isinstance(t, list) and len(t) == 3):
                    raise ParseError("each entry of 'params.triples' must be [a, b, c]")
                a, b, c = t
                if not 0 < b < a:
                    raise DomainError("Kummer-Mellin triple needs 0 < b < a")
    elif "eps" in params and params["eps"] >= 0.5:
        raise DomainError("params.eps must satisfy eps < 1/2")


def parse_problem_spec(obj: Any) -> ProblemSpec:
    """Validate a decoded spec object.

    Raises
    ------
    ParseError
        On a missing or mistyped field (the field path is named).
    DomainError
        On a value outside its domain (the constraint is named).
    """
    if not isinstance(obj, dict):
        raise ParseError("spec must be a JSON object")
    mode = _require(obj, "mode", str, "")
    if mode not in MODES:
        raise ParseError(f"field 'mode' must be one of {MODES}")
    alg = _require(obj, "algebra", dict, "")
    params = obj.get("params", {})
    if not isinstance(params, dict):
        raise ParseError("field 'params' must be an object")
    _validate_algebra(alg)
    _validate_params(mode, alg, params)
    return ProblemSpec(mode, copy.deepcopy(alg), copy.deepcopy(params))


def load_problem_spec(path) -> ProblemSpec:
    """Read and validate a spec file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read spec file {path}: {exc.strerror}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return parse_problem_spec(obj)


# -- presets ------------------------------------------------------------------

def _g_list(spec: ac.AlgebraSpec) -> list:
    return [float(c) for c in spec.g.coeffs]


PRESETS = {
    "su11-bg": {
        "mode": "cs-build",
        "algebra": {"name": "su11-bg", "g_coeffs": _g_list(ac.bg_algebra()), "j": 1.0, "dim": 64},
        "params": {"alpha": [0.7, 0.0], "tol": 1e-12, "family": "annihilation", "nu": [0.5, 0.0],
                   "xi": [0.3, 0.0], "measure": "bg", "phi": -1.0, "n_max": 8, "b": 1},
    },
    "su11-oscillator": {
        "mode": "realize",
        "algebra": {"realization": "su11-oscillator", "cutoffs": [64], "params": {}},
        "params": {"alpha": [0.5, 0.0], "tol": 1e-12, "sector": {"charges": ["parity"], "eigenvalues": [1]}},
    },
    "quadratic-eps": {
        "mode": "cs-build",
        "algebra": {"name": "quadratic-eps", "g_coeffs": _g_list(ac.quadratic_eps_algebra(-0.5)), "j": 0.5, "dim": 64},
        "params": {"alpha": [0.7, 0.0], "tol": 1e-12, "family": "annihilation", "eps": -0.5,
                   "measure": "quadratic", "n_max": 8, "b": 1, "xi": [0.1, 0.0]},
    },
    "higgs": {
        "mode": "algebra-verify",
        "algebra": {"name": "higgs", "g_coeffs": _g_list(ac.higgs_algebra(1.0, 0.1)), "j": 1.0, "dim": 24},
        "params": {"alpha": [0.5, 0.0], "tol": 1e-12, "family": "annihilation", "b": 1},
    },
    "trilinear": {
        "mode": "realize",
        "algebra": {"realization": "trilinear", "cutoffs": [4, 4, 4], "params": {"w": [1.0, 1.0, 1.0], "kappa": 1.0}},
        "params": {},
    },
    "anharmonic": {
        "mode": "realize",
        "algebra": {"realization": "anharmonic", "cutoffs": [6, 12], "params": {}},
        "params": {},
    },
    "dicke": {
        "mode": "realize",
        "algebra": {"realization": "dicke", "cutoffs": [8],
                    "params": {"n_atoms": 2, "n_photon": 2, "eps_atom": 1.0, "w1": 1.0, "kappa": 1.0}},
        "params": {},
    },
}


def _apply_override(obj: dict, item: str) -> None:
    if "=" not in item:
        raise ParseError(f"override '{item}' is not key=value")
    key, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    path = key.split(".")
    if path[0] not in ("mode", "algebra", "params"):
        path = ["params"] + path
    target = obj
    for p in path[:-1]:
        target = target.setdefault(p, {})
        if not isinstance(target, dict):
            raise ParseError(f"override path '{key}' runs through a non-object")
    target[path[-1]] = value


# -- execution ----------------------------------------------------------------

def _check(metrics: dict, name: str, value: float, threshold: float) -> bool:
    ok = bool(np.isfinite(value) and value <= threshold)
    metrics[name] = {"value": float(value), "threshold": float(threshold), "pass": ok}
    return ok


def _rep_from_spec(alg: dict) -> ac.LowestWeightRep:
    spec = ac.AlgebraSpec(alg["name"], ac.CasimirShift(tuple(alg["g_coeffs"])))
    return ac.build_lowest_weight_rep(spec, alg["j"], alg["dim"])


def _build_realization(alg: dict) -> rz.RealizedGenerators:
    kind, cut, p = alg["realization"], alg["cutoffs"], alg.get("params", {})
    if kind == "trilinear":
        return rz.trilinear_generators(cut, p.get("w", (1.0, 1.0, 1.0)), p.get("kappa", 1.0))
    if kind == "anharmonic":
        return rz.anharmonic_generators(cut[0], cut[1])
    if kind == "multiphoton":
        return rz.multiphoton_generators(p.get("m", 1), p.get("n", 1), cut, p.get("w", (1.0, 1.0)), p.get("kappa", 1.0))
    if kind == "dicke":
        return rz.dicke_generators(p.get("n_atoms", 1), p.get("n_photon", 1), cut[0], p.get("eps_atom", 1.0),
                                   p.get("w1", 1.0), p.get("kappa", 1.0))
    return rz.one_mode_su11(cut[0])


def _sector_rep(spec: ProblemSpec):
    gen = _build_realization(spec.algebra)
    sec = spec.params.get("sector")
    if not sec:
        raise SpecError("a realization in this mode needs params.sector {charges, eigenvalues}")
    charges = [gen.charges[c] for c in sec["charges"]]
    return gen, rz.sector_reduce(gen, charges, sec["eigenvalues"])


def _build_state(rep, params: dict):
    family = params.get("family", "annihilation")
    tol = float(params.get("tol", 1e-12))
    if family == "annihilation":
        return cs.annihilation_cs(rep, _complex_param(params.get("alpha", 0.5), "alpha"), tol)
    if family == "exp-conjugate":
        return cs.exp_conjugate_cs(co.canonical_conjugate_matrix(rep), _complex_param(params.get("alpha", 0.5), "alpha"), tol)
    if family == "dual":
        return cs.dual_cs(rep, _complex_param(params.get("nu", 0.5), "nu"), int(params.get("N", rep.dim)))
    return cs.perelomov_cs(rep, _complex_param(params.get("xi", 0.3), "xi"))


def _run_algebra_verify(spec: ProblemSpec, metrics: dict) -> bool:
    rep = _rep_from_spec(spec.algebra)
    f = ac.difference_of_g(rep.g)
    closure = ac.verify_closure(rep, f)
    # 1e-12 absolute, unless the entries are so large that rounding alone exceeds it
    ok = _check(metrics, "closure_residual", closure.max_residual, max(1e-12, closure.rounding_floor))
    e2 = rep.e**2
    if rep.dim >= 3:
        tele = np.abs(np.diff(e2) + f(rep.n0_diag[1:-1])).max()
        ok &= _check(metrics, "telescoping_residual", tele, 1e-12 * max(1.0, float(e2.max())))
    cas = np.abs(e2 + rep.g(rep.n0_diag[:-1]) - rep.casimir).max()
    ok &= _check(metrics, "casimir_consistency", cas, 1e-12 * max(1.0, float(e2.max())))
    pair = co.canonical_conjugate_matrix(rep)
    metrics["conjugate_shift"] = pair.shift
    ok &= _check(metrics, "ccr_residual", co.ccr_residual(pair), 1e-12)
    ok &= _check(metrics, "dual_ccr_residual", co.dual_ccr_residual(pair), 1e-12)
    b = int(spec.params.get("b", 1))
    mapping = co.lie_mapping(rep, b)
    ok &= _check(metrics, "mapping_residual", co.mapping_residual(mapping, rep), 1e-12)
    metrics["casimir"] = rep.casimir
    metrics["dim"] = rep.dim
    return ok


def _state_artifacts(state, out: Path, artifacts: list) -> None:
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "coefficients.csv"
    cs.write_coefficients_csv(state, csv_path)
    meta_path = out / "state.json"
    meta_path.write_text(dumps(cs.state_metadata(state)) + "\n")
    artifacts += [str(csv_path), str(meta_path)]


def _run_cs(spec: ProblemSpec, metrics: dict, out: Path, artifacts: list, with_stats: bool) -> bool:
    ok = True
    if spec.is_realization:
        gen, rep = _sector_rep(spec)
        metrics["sector_j"] = rep.j
        metrics["sector_dim"] = rep.dim
    else:
        gen, rep = None, _rep_from_spec(spec.algebra)
    state = _build_state(rep, spec.params)
    family = spec.params.get("family", "annihilation")
    metrics["truncation"] = state.truncation
    if isinstance(state, cs.CoherentState):
        metrics["tail_bound"] = state.tail_bound
        ok &= _check(metrics, "eigen_residual", cs.eigen_residual(state, rep), 1e-10)
        if gen is not None:
            if state.truncation > rep.dim:
                ok &= _check(metrics, "embedded_eigen_residual", math.inf, 1e-8)
            else:
                psi = rep.embed(state.coeffs)
                res = np.linalg.norm(gen.Nminus @ psi - state.eigenvalue * psi)
                ok &= _check(metrics, "embedded_eigen_residual", res, 1e-8)
    elif isinstance(state, cs.DualState):
        ok &= _check(metrics, "dual_eigen_residual", cs.dual_eigen_residual(state, rep), 1e-8)
    else:
        ok &= _check(metrics, "norm_error", abs(np.linalg.norm(state.coeffs) - 1.0), 1e-12)
    metrics["family"] = family
    if with_stats:
        st = cs.state_statistics(state, rep)
        metrics["mean_excitation"] = st.mean_excitation
        metrics["var_excitation"] = st.var_excitation
        metrics["mandel_q"] = st.mandel_q
        metrics["mean_n0"] = st.mean_n0
    _state_artifacts(state, out, artifacts)
    return ok


def _run_realize(spec: ProblemSpec, metrics: dict) -> bool:
    alg = spec.algebra
    kind = alg["realization"]
    gen = _build_realization(alg)
    comm = rz.commutator
    inner = gen.interior
    ok = _check(metrics, "hermiticity_H", float(np.abs(gen.H - gen.H.conj().T).max()), 0.0)
    ok &= _check(metrics, "adjoint_Nminus", float(np.abs(gen.Nminus - gen.Nplus.conj().T).max()), 0.0)
    step = 2.0 if kind == "anharmonic" else 1.0
    ok &= _check(metrics, "n0_raise_residual", rz.interior_residual(comm(gen.N0, gen.Nplus) - step * gen.Nplus, inner), 1e-12)
    ok &= _check(metrics, "n0_lower_residual", rz.interior_residual(comm(gen.N0, gen.Nminus) + step * gen.Nminus, inner), 1e-12)
    for name, q in gen.charges.items():
        ok &= _check(metrics, f"charge_{name}_H_commutator", rz.interior_residual(comm(q, gen.H), inner), 1e-12)
    if kind == "trilinear":
        fit = rz.fit_commutator_polynomial(gen, 2)
        ok &= _check(metrics, "sector_fit_residual", fit.max_residual, 1e-10)
        metrics["n_sectors"] = len(fit.residuals)
    elif kind == "multiphoton":
        m, n = gen.params["m"], gen.params["n"]
        fit = rz.fit_commutator_polynomial(gen, m + n - 1)
        ok &= _check(metrics, "sector_fit_residual", fit.max_residual, 1e-10)
    elif kind == "anharmonic":
        h, n0 = gen.H, gen.N0
        eye = np.eye(gen.dim)
        fh = -3 * n0 @ n0 + 2 * h @ n0 + h @ h - 0.75 * eye
        ok &= _check(metrics, "f_H_residual", rz.interior_residual(comm(gen.Nplus, gen.Nminus) - fh, inner), 1e-12)
        j0 = n0 - h / 3.0
        jp, jm = gen.Nplus / math.sqrt(3.0), -gen.Nminus / math.sqrt(3.0)
        target = j0 @ j0 + 0.25 * eye - (4.0 / 9.0) * h @ h
        ok &= _check(metrics, "j_basis_residual", rz.interior_residual(comm(jp, jm) - target, inner), 1e-12)
    elif kind == "dicke":
        fit = rz.fit_hamiltonian_decomposition(gen)
        ok &= _check(metrics, "hamiltonian_fit_residual", fit.max_residual, 1e-10)
        metrics["n_sectors"] = len(fit.residuals)
    else:
        for label, parity, j_exp, a_exp in (("even", 1, 0.25, 0.75), ("odd", -1, 0.75, 0.25)):
            rep = rz.sector_reduce(gen, [gen.charges["parity"]], [parity])
            metrics[f"j_{label}"] = rep.j
            metrics[f"alpha_{label}"] = co.conjugate_shift(rep)
            ok &= _check(metrics, f"j_{label}_error", abs(rep.j - j_exp), 1e-12)
            ok &= _check(metrics, f"alpha_{label}_error", abs(co.conjugate_shift(rep) - a_exp), 1e-12)
            ok &= _check(metrics, f"roundtrip_{label}", rep.roundtrip_residual, 1e-10)
        casimir_op = gen.Nminus @ gen.Nplus - gen.N0 @ (gen.N0 + np.eye(gen.dim))
        vac = np.zeros(gen.dim)
        vac[0] = 1.0
        ok &= _check(metrics, "casimir_vacuum_residual", float(np.linalg.norm(casimir_op @ vac - 3.0 / 16.0 * vac)), 1e-12)
    return ok


def _run_measure(spec: ProblemSpec, metrics: dict, out: Path, artifacts: list) -> str:
    p = spec.params
    measure = p.get("measure", "bg")
    n_max = int(p.get("n_max", 8))
    out.mkdir(parents=True, exist_ok=True)
    if measure in ("bg", "bg-printed"):
        phi = float(p["phi"])
        dens = ms.bg_measure(phi) if measure == "bg" else ms.bg_measure_printed(phi)
        report = ms.verify_measure_moments(dens, ms.bg_moments(phi, n_max), float(p.get("quad_tol", 1e-10)))
        path = out / "moments.json"
        path.write_text(dumps(report.to_json()) + "\n")
        artifacts.append(str(path))
        ok = _check(metrics, "max_rel_error", report.max_rel_error, float(p.get("moment_tol", 1e-6)))
        ok &= _check(metrics, "positivity_violation", 0.0 if dens.check_positive() else 1.0, 0.0)
        return "pass" if ok else "fail"
    if measure == "kummer":
        ok = True
        for a, b, c in p["triples"]:
            ok &= _check(metrics, f"kummer_mellin_{a:g}_{b:g}_{c:g}", ms.kummer_mellin_check(a, b, c), float(p.get("moment_tol", 1e-6)))
        return "pass" if ok else "fail"
    eps = float(p["eps"])
    fit = ms.fit_quadratic_measure(eps, n_validate=n_max)
    path = out / "moments.json"
    path.write_text(dumps({"target": fit.target, "n": list(range(len(fit.target)))}) + "\n")
    artifacts.append(str(path))
    metrics["fit_params"] = fit.params
    metrics["fit_rel_errors"] = fit.fit_rel_errors
    metrics["validation_rel_errors"] = fit.validation_rel_errors
    metrics["note"] = fit.note
    metrics["log_convex"] = ms.is_log_convex(fit.target)
    return fit.status


def execute(spec: ProblemSpec, out_dir="out") -> Report:
    """Run the pipeline for ``spec`` and write ``report.json`` into ``out_dir``.

    Library errors become ``status = "fail"`` with the error class named in
    ``metrics["error"]``.
    """
    out = Path(out_dir)
    metrics: dict = {}
    artifacts: list = []
    try:
        if spec.mode == "realize":
            if not spec.is_realization:
                raise SpecError("realize mode needs a realization descriptor")
            status = "pass" if _run_realize(spec, metrics) else "fail"
        elif spec.mode == "algebra-verify":
            if spec.is_realization:
                raise SpecError("algebra-verify needs an abstract algebra (name, g_coeffs, j, dim)")
            status = "pass" if _run_algebra_verify(spec, metrics) else "fail"
        elif spec.mode in ("cs-build", "cs-stats"):
            status = "pass" if _run_cs(spec, metrics, out, artifacts, spec.mode == "cs-stats") else "fail"
        else:
            status = _run_measure(spec, metrics, out, artifacts)
    except SpecError:
        raise
    except (DeformedCSError, ValueError, IndexError, KeyError) as exc:
        metrics["error"] = type(exc).__name__
        metrics["error_message"] = str(exc)
        status = "fail"
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "report.json"
    artifacts.append(str(report_path))
    report = Report(status, metrics, artifacts)
    report_path.write_text(dumps(report.to_dict()) + "\n")
    return report


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="deformed-cs", description="Coherent states of polynomially deformed algebras")
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("--spec", help="problem spec JSON file")
    ap.add_argument("--preset", choices=sorted(PRESETS), help="built-in problem spec")
    ap.add_argument("--out", default="out", help="output directory (default: out)")
    ap.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                    help="edit one spec field; may be repeated")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.spec:
            obj = load_problem_spec(args.spec).to_dict()
        elif args.preset:
            obj = copy.deepcopy(PRESETS[args.preset])
        else:
            raise ParseError("one of --spec or --preset is required")
        obj["mode"] = args.mode
        for item in args.override:
            _apply_override(obj, item)
        spec = parse_problem_spec(obj)
        report = execute(spec, args.out)
    except (SpecError, DomainError) as exc:
        print(f"spec error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except Exception:  # pragma: no cover - last-resort guard
        traceback.print_exc()
        return 1
    print(dumps(report.to_dict()))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
