"""
Approximate majorization and factorization.

Distances are in trace-norm units (delta in [0, 2]).  The diamond norm of a
Hermitian-preserving map Delta with Choi matrix J is computed by the
general program

    max Re Tr(J X)  s.t.  [[rho0 (x) 1, X], [X^dagger, rho1 (x) 1]] >= 0,

with rho0, rho1 densities on the input, and for trace-annihilating maps
also through the sup form 2 max { Tr(J W) : 0 <= W <= omega (x) 1, Tr omega <= 1 }.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from . import conic
from .channel import Channel, apply_to_factor, repair_cptp
from .entropy import SolverError, check_density, lambda_selfadjoint
from .linalg import (
    check_dims,
    hermitian_part,
    operator_norm,
    partial_trace,
    psd_power,
    trace_norm,
)
from .majorize import lift_map

APRO_TOL = 1e-7


@dataclass(frozen=True)
class ApproxResult:
    """``delta_star`` is the optimal error, ``achieved`` the error of the
    returned (rounded) ``optimizer``, and ``certificate`` the dual data."""

    delta_star: float
    optimizer: Optional[Channel]
    certificate: Dict[str, object] = field(default_factory=dict)
    gap: float = np.nan
    achieved: float = np.nan


@dataclass(frozen=True)
class InequalityCheck:
    holds: bool
    lhs: float
    rhs: float

    def __bool__(self) -> bool:
        return self.holds


def _unpack_map(delta, d_in, d_out):
    J = delta.choi if isinstance(delta, Channel) else np.asarray(delta, dtype=complex)
    if J.shape != (d_in * d_out, d_in * d_out):
        raise ValueError(f"Choi matrix has shape {J.shape}, expected {(d_in * d_out,) * 2}")
    return hermitian_part(J)


def _psd_sqrt(X):
    return psd_power(X, 0.5)


def _density_part(X):
    w, V = np.linalg.eigh(hermitian_part(X))
    w = np.clip(w, 0.0, None)
    return (V * (w / max(float(np.sum(w)), 1e-300))) @ V.conj().T


def _usable(sol, tol) -> bool:
    # The diamond routines re-evaluate their value from the input states
    # alone, which is exact, so an iterate that stalled just short of the PSD
    # feasibility tolerance is still usable when the duality gap is tight.
    if sol.optimal:
        return True
    tol = conic.default_gap_tol() if tol is None else float(tol)
    return (sol.solver_status in ("Solved", "AlmostSolved") and bool(sol.primal_vars)
            and sol.gap <= tol * (1.0 + abs(sol.primal_value))
            and sol.residuals.get("psd", np.inf) <= 1e-6)


def diamond_norm(delta, d_in: int, d_out: int, tol: float | None = None) -> float:
    """Diamond norm of a Hermitian-preserving map given by its Choi matrix.

    :param delta: Choi matrix (input factor first) or a :class:`Channel`
    """
    J = _unpack_map(delta, d_in, d_out)
    n = d_in * d_out
    if np.linalg.norm(J) < 1e-14:
        return 0.0
    eye_out = np.eye(d_out)
    p = conic.SdpProblem("max")
    p.variable("Q", 2 * n, psd=True)
    p.variable("r0", d_in, psd=True)
    p.variable("r1", d_in, psd=True)
    C = np.zeros((2 * n, 2 * n), dtype=complex)
    C[:n, n:] = 0.5 * J
    C[n:, :n] = 0.5 * J
    p.add_objective("Q", C)
    p.add_eq("top", [("Q", lambda Q: Q[:n, :n]), ("r0", lambda r: -np.kron(r, eye_out))],
             np.zeros((n, n)))
    p.add_eq("bottom", [("Q", lambda Q: Q[n:, n:]), ("r1", lambda r: -np.kron(r, eye_out))],
             np.zeros((n, n)))
    p.add_eq("tr0", [("r0", lambda r: np.trace(r).reshape(1, 1))], np.ones((1, 1)))
    p.add_eq("tr1", [("r1", lambda r: np.trace(r).reshape(1, 1))], np.ones((1, 1)))
    sol = conic.solve(p, tol)
    if not _usable(sol, tol):
        raise SolverError(f"diamond norm solve ended with status {sol.status}",
                          (sol.primal_value, sol.dual_value))
    # With rho0, rho1 fixed the inner optimum is a trace norm; evaluating it
    # exactly removes the first-order effect of solver slack.
    r0, r1 = (_density_part(sol.primal_vars[k]) for k in ("r0", "r1"))
    s0 = np.kron(_psd_sqrt(r0), eye_out)
    s1 = np.kron(_psd_sqrt(r1), eye_out)
    return trace_norm(s1 @ J @ s0)


def diamond_norm_supform(delta, d_in: int, d_out: int, tol: float | None = None) -> float:
    """2 max { Tr(J W) : 0 <= W <= omega (x) 1, omega >= 0, Tr omega <= 1 }.

    Valid for trace-annihilating maps (differences of trace-preserving maps).
    """
    J = _unpack_map(delta, d_in, d_out)
    if np.linalg.norm(partial_trace(J, (d_in, d_out), "B")) > 1e-8 * max(1.0, np.linalg.norm(J)):
        raise ValueError("sup form requires a trace-annihilating map (Tr_out J = 0)")
    eye_out = np.eye(d_out)
    p = conic.SdpProblem("max")
    p.variable("W", d_in * d_out, psd=True)
    p.variable("omega", d_in, psd=True)
    p.add_objective("W", 2.0 * J)
    p.add_psd("dominate", [("omega", lambda w: np.kron(w, eye_out)), ("W", lambda W: -W)])
    p.add_psd("budget", [("omega", lambda w: -np.trace(w).reshape(1, 1))], const=np.ones((1, 1)))
    sol = conic.solve(p, tol)
    if not _usable(sol, tol):
        raise SolverError(f"sup-form solve ended with status {sol.status}",
                          (sol.primal_value, sol.dual_value))
    # for fixed omega the best W is the positive-part projector of the
    # congruence (sqrt(omega) (x) 1) J (sqrt(omega) (x) 1)
    s = np.kron(_psd_sqrt(_density_part(sol.primal_vars["omega"])), eye_out)
    w = np.linalg.eigvalsh(hermitian_part(s @ J @ s))
    return 2.0 * float(np.sum(w[w > 0]))


def min_conversion_error(rho, sigma, dims: Sequence[int], d_out: Optional[int] = None,
                         tol: float | None = None) -> ApproxResult:
    """min over CPTP Phi on B of ||sigma - (id (x) Phi)(rho)||_1.

    Epigraph form: min Tr P + Tr N with P - N = sigma - L(J), P, N >= 0.
    The multiplier W of that equation satisfies -1 <= W <= 1 and, when the
    optimum is positive, separates sigma from the reachable set:
    Tr(W sigma) - sup_Phi Tr(W (id (x) Phi)(rho)) >= delta_star.
    """
    rho = check_density(rho, name="rho")
    sigma = check_density(sigma, name="sigma")
    d_A, d_B = check_dims(rho, dims, "rho")
    d_out = d_B if d_out is None else int(d_out)
    n = d_A * d_out
    if sigma.shape[0] != n:
        raise ValueError(f"sigma has dimension {sigma.shape[0]}, expected {n}")
    L = lift_map(rho, (d_A, d_B), d_out)
    p = conic.SdpProblem("min")
    p.variable("J", d_B * d_out, psd=True)
    p.variable("P", n, psd=True)
    p.variable("N", n, psd=True)
    p.add_objective("P", np.eye(n))
    p.add_objective("N", np.eye(n))
    p.add_eq("tp", [("J", lambda J: partial_trace(J, (d_B, d_out), "B"))], np.eye(d_B))
    p.add_eq("diff", [("P", lambda X: X), ("N", lambda X: -X), ("J", L)], sigma)
    sol = conic.solve(p, tol)
    if not sol.primal_vars:
        raise SolverError(f"conversion-error solve ended with status {sol.status}")
    J = repair_cptp(sol.primal_vars["J"], (d_B, d_out))
    achieved = trace_norm(L(J) - sigma)
    cert = {"W": sol.dual_vars.get("diff"), "tp": sol.dual_vars.get("tp"),
            "lower": sol.dual_value, "status": sol.status}
    delta = max(0.0, float(sol.primal_value))
    return ApproxResult(delta, Channel(d_B, d_out, J), cert, sol.gap, achieved)


def min_post_factor_error(T: Channel, S: Channel, tol: float | None = None) -> ApproxResult:
    """min over CPTP Phi of ||S - Phi o T||_diamond in one program.

    Uses ||Delta||_diamond = 2 min { ||Tr_out Z||_inf : Z >= J_Delta, Z >= 0 }
    for trace-annihilating Delta, with Choi(Phi o T) linear in Choi(Phi).
    """
    if T.d_in != S.d_in:
        raise ValueError("T and S must share the input dimension")
    d_in, d_mid, d_out = T.d_in, T.d_out, S.d_out
    L = lift_map(T.choi, (d_in, d_mid), d_out)
    n = d_in * d_out
    p = conic.SdpProblem("min")
    p.variable("Phi", d_mid * d_out, psd=True)
    p.variable("Z", n, psd=True)
    p.variable("t", 1, psd=True)
    p.add_objective("t", 2.0 * np.eye(1))
    p.add_eq("tp", [("Phi", lambda J: partial_trace(J, (d_mid, d_out), "B"))], np.eye(d_mid))
    p.add_psd("cover", [("Z", lambda Z: Z), ("Phi", L)], const=-S.choi)
    p.add_psd("norm", [("t", lambda t: t[0, 0] * np.eye(d_in)),
                       ("Z", lambda Z: -partial_trace(Z, (d_in, d_out), "B"))])
    sol = conic.solve(p, tol)
    if not sol.primal_vars:
        raise SolverError(f"factor-error solve ended with status {sol.status}")
    Jphi = repair_cptp(sol.primal_vars["Phi"], (d_mid, d_out))
    phi = Channel(d_mid, d_out, Jphi)
    achieved = diamond_norm(S.choi - L(Jphi), d_in, d_out)
    cert = {"cover": sol.dual_vars.get("cover"), "lower": sol.dual_value, "status": sol.status}
    return ApproxResult(max(0.0, float(sol.primal_value)), phi, cert, sol.gap, achieved)


def trace_dist_variational(rho, sigma) -> float:
    """sup { Tr(x (rho - sigma)) : 0 <= x <= 1 } = Tr (rho - sigma)_+."""
    rho = check_density(rho, name="rho")
    sigma = check_density(sigma, name="sigma")
    if rho.shape != sigma.shape:
        raise ValueError("rho and sigma have different dimensions")
    w = np.linalg.eigvalsh(hermitian_part(rho - sigma))
    return float(np.sum(w[w > 0]))


def check_apro1(rho, sigma, psi: Channel, delta: float, dims: Sequence[int],
                tol: float = APRO_TOL) -> InequalityCheck:
    """lambda((Psi (x) id) sigma) <= lambda((Psi (x) id) rho) + delta/2 * ||J_Psi||_inf.

    Psi acts on A, the factor whose marginals must agree.  The constant
    ||J_Psi||_inf is the largest value of lambda on images of pure states,
    the smallest constant for which the inequality holds for all deltas.
    """
    rho = check_density(rho, dims, "rho")
    sigma = check_density(sigma, dims, "sigma")
    d_A, d_B = check_dims(rho, dims)
    if trace_norm(partial_trace(rho, dims, "B") - partial_trace(sigma, dims, "B")) > 1e-7:
        raise ValueError("rho and sigma must have equal marginals on the witness factor A")
    out_dims = (psi.d_out, d_B)
    lhs = lambda_selfadjoint(apply_to_factor(psi, sigma, dims, "A"), out_dims)
    base = lambda_selfadjoint(apply_to_factor(psi, rho, dims, "A"), out_dims)
    rhs = base + 0.5 * float(delta) * operator_norm(psi.choi)
    return InequalityCheck(bool(lhs <= rhs + tol * max(1.0, abs(rhs))), float(lhs), float(rhs))


def check_apro2(T: Channel, S: Channel, rho, delta: float, dims: Sequence[int],
                tol: float = APRO_TOL) -> InequalityCheck:
    """lambda((id (x) S) rho) <= lambda((id (x) T) rho) + delta/2 * lambda(rho).

    rho is a positive operator on R (x) In; the channels act on In and
    lambda conditions on the channel output.
    """
    rho = np.asarray(rho, dtype=complex)
    d_R, d_I = check_dims(rho, dims, "rho")
    if T.d_in != d_I or S.d_in != d_I:
        raise ValueError("channel input dimension does not match rho")
    lhs = lambda_selfadjoint(apply_to_factor(S, rho, dims, "B"), (d_R, S.d_out))
    base = lambda_selfadjoint(apply_to_factor(T, rho, dims, "B"), (d_R, T.d_out))
    rhs = base + 0.5 * float(delta) * lambda_selfadjoint(rho, dims)
    return InequalityCheck(bool(lhs <= rhs + tol * max(1.0, abs(rhs))), float(lhs), float(rhs))


__math__ = {
    "diamond (cb) norm": ["diamond_norm"],
    "variational sup form of the diamond norm": ["diamond_norm_supform"],
    "approximate majorization: least trace-norm conversion error": [
        "min_conversion_error", "check_apro1"],
    "approximate factorization: least diamond-norm error": [
        "min_post_factor_error", "check_apro2"],
    "variational formula for the trace distance": ["trace_dist_variational"],
}
__plumbing__: list = []
__all__ = ["ApproxResult", "InequalityCheck"] + [n for v in __math__.values() for n in v]
