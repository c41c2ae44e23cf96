"""
Conditional min-entropy and the related L1-type norms of bipartite operators.

For a positive operator rho on A (x) B (conditioning system B)

    lambda(rho) = min { Tr omega : 1_A (x) omega >= rho },
    H_min(A|B)  = -log2 lambda(rho),

with the dual program

    lambda(rho) = max { Tr(X rho) : X >= 0, Tr_A X = I_B }.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from . import conic
from .linalg import (
    as_hermitian,
    check_dims,
    hermitian_part,
    is_psd,
    partial_trace,
    psd_project,
)

DENSITY_TOL = 1e-8


class SolverError(RuntimeError):
    """A solve could not be certified.  ``bounds`` holds the best (lower, upper)."""

    def __init__(self, message: str, bounds: Tuple[float, float] = (np.nan, np.nan)):
        super().__init__(message)
        self.bounds = bounds


@dataclass(frozen=True)
class HminResult:
    value_bits: float
    lam: float
    optimal_omega: np.ndarray
    dual_X: np.ndarray
    gap: float


def check_density(rho, dims: Sequence[int] | None = None, name: str = "rho",
                  tol: float = DENSITY_TOL) -> np.ndarray:
    rho = as_hermitian(rho, name)
    if dims is not None:
        check_dims(rho, dims, name)
    if not is_psd(rho, tol):
        raise ValueError(f"{name} is not positive semidefinite")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise ValueError(f"{name} does not have unit trace")
    return rho


def _primal(x: np.ndarray, dims) -> conic.SdpProblem:
    d_A, d_B = dims
    p = conic.SdpProblem("min")
    p.variable("omega", d_B)
    p.add_objective("omega", np.eye(d_B))
    eye_A = np.eye(d_A)
    p.add_psd("dominate", [("omega", lambda w: np.kron(eye_A, w))], const=-x)
    return p


def lambda_selfadjoint(x, dims: Sequence[int], tol: float | None = None) -> float:
    """min { Tr omega : 1_A (x) omega >= x } for a Hermitian x.

    For positive x this is the projective-norm value; for general Hermitian
    x it is only a lower bound on that norm and may be negative.
    """
    x = as_hermitian(x, "x")
    dims = check_dims(x, dims, "x")
    sol = conic.solve(_primal(x, dims), tol)
    if not sol.optimal:
        raise SolverError(f"lambda solve ended with status {sol.status}",
                          (sol.dual_value, sol.primal_value))
    return sol.primal_value


def hmin(rho, dims: Sequence[int], tol: float | None = None) -> HminResult:
    """Conditional min-entropy H_min(A|B) in bits, with primal and dual certificates.

    Parameters
    ----------
    rho : (d_A*d_B, d_A*d_B) array
        Density matrix on A (x) B.
    dims : (d_A, d_B)

    Returns
    -------
    HminResult
        ``lam`` is the optimal Tr omega, ``optimal_omega`` the minimizer,
        ``dual_X`` the PSD multiplier (Tr_A X = I_B) and ``gap`` the
        primal-dual gap reported by the solve.
    """
    rho = check_density(rho, dims)
    dims = check_dims(rho, dims)
    sol = conic.solve(_primal(rho, dims), tol)
    if not sol.optimal:
        raise SolverError(f"H_min solve ended with status {sol.status}",
                          (sol.dual_value, sol.primal_value))
    lam = sol.primal_value
    if lam <= 0:
        raise SolverError("nonpositive lambda for a density matrix", (sol.dual_value, lam))
    return HminResult(value_bits=float(-np.log2(lam)), lam=float(lam),
                      optimal_omega=sol.primal_vars["omega"],
                      dual_X=sol.dual_vars["dominate"], gap=sol.gap)


def hmin_dual(rho, dims: Sequence[int], tol: float | None = None) -> Tuple[float, np.ndarray]:
    """max { Tr(X rho) : X >= 0, Tr_A X = I_B }, solved as its own program."""
    rho = check_density(rho, dims)
    d_A, d_B = check_dims(rho, dims)
    p = conic.SdpProblem("max")
    p.variable("X", d_A * d_B, psd=True)
    p.add_objective("X", rho)
    p.add_eq("marginal", [("X", lambda X: partial_trace(X, (d_A, d_B), "A"))], np.eye(d_B))
    sol = conic.solve(p, tol)
    if not sol.optimal:
        raise SolverError(f"dual H_min solve ended with status {sol.status}",
                          (sol.primal_value, sol.dual_value))
    return sol.primal_value, sol.primal_vars["X"]


def linfl1_norm(x, dims: Sequence[int]) -> float:
    """sup over Hilbert-Schmidt unit a of Tr((a^dagger a (x) 1) x), i.e. lambda_max(Tr_B x)."""
    x = as_hermitian(x, "x")
    dims = check_dims(x, dims, "x")
    if not is_psd(x, 1e-9):
        raise ValueError("x must be positive semidefinite")
    return float(np.linalg.eigvalsh(partial_trace(x, dims, "B"))[-1])


# ---------------------------------------------------------------------------
# Certified bounds
# ---------------------------------------------------------------------------


def upper_from_omega(x, omega, dims) -> float:
    """A guaranteed upper bound on lambda(x) from any Hermitian omega.

    omega is shifted by the smallest multiple of I_B making 1 (x) omega >= x.
    """
    d_A, d_B = dims
    omega = hermitian_part(omega)
    slack = np.kron(np.eye(d_A), omega) - x
    eps = max(0.0, -float(np.linalg.eigvalsh(hermitian_part(slack))[0]))
    return float(np.trace(omega).real + eps * d_B)


def lower_from_X(x, X, dims) -> float:
    """A guaranteed lower bound on lambda(x) from any near-feasible dual X.

    X is projected onto the PSD cone and congruence-normalized so that
    Tr_A X = I_B holds exactly before pairing with x.
    """
    d_A, d_B = dims
    Xp = psd_project(X)
    marg = partial_trace(Xp, dims, "A")
    w, V = np.linalg.eigh(hermitian_part(marg))
    if w[0] <= 1e-14 * max(1.0, w[-1]):
        # degenerate multiplier: fall back to the always-feasible X = I/d_A
        Xn = np.eye(d_A * d_B) / d_A
    else:
        M = (V * w ** -0.5) @ V.conj().T
        K = np.kron(np.eye(d_A), M)
        Xn = K @ Xp @ K.conj().T
    return float(np.real(np.vdot(Xn, x)))


def lambda_bounds(x, dims: Sequence[int], tol: float | None = None) -> Tuple[float, float]:
    """Rigorous (lower, upper) bounds on lambda(x) for PSD x.

    Both numbers come from exactly feasible points built from the solver
    output, so they bracket the true value up to eigensolver round-off.
    """
    x = as_hermitian(x, "x")
    dims = check_dims(x, dims, "x")
    sol = conic.solve(_primal(x, dims), tol)
    if sol.status not in ("Optimal", "Inaccurate") or not sol.primal_vars:
        raise SolverError(f"bound solve ended with status {sol.status}")
    hi = upper_from_omega(x, sol.primal_vars["omega"], dims)
    lo = lower_from_X(x, sol.dual_vars["dominate"], dims)
    if not (np.isfinite(lo) and np.isfinite(hi)):
        raise SolverError("non-finite bounds")
    return lo, hi


def hmin_bounds(rho, dims: Sequence[int], tol: float | None = None) -> Tuple[float, float]:
    """Rigorous (lower, upper) bounds on H_min(A|B) in bits."""
    lo, hi = lambda_bounds(rho, dims, tol)
    if lo <= 0:
        raise SolverError("dual bound is not positive", (lo, hi))
    return float(-np.log2(hi)), float(-np.log2(lo))


__math__ = {
    "conditional min-entropy as a semidefinite program": ["hmin"],
    "dual program: supremum of Tr(X rho) over X >= 0 with Tr_A X = 1": ["hmin_dual"],
    "lambda of a self-adjoint operator (lower bound on the projective norm)": [
        "lambda_selfadjoint"],
    "L_inf(L_1) norm of a positive operator": ["linfl1_norm"],
}
__plumbing__ = ["lambda_bounds", "hmin_bounds", "check_density", "upper_from_omega",
                "lower_from_X"]
__all__ = ["HminResult", "SolverError"] + [n for v in __math__.values() for n in v] + __plumbing__
