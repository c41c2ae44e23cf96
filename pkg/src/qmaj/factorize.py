"""
Channel factorization: S = Phi o T (post-processing) and S = T o Phi
(pre-processing) by a CPTP Phi, with certified negative answers.

Post-processing fails exactly when some separable state rho on R (x) In has
lambda((id (x) S) rho) > lambda((id (x) T) rho); pre-processing fails
exactly when some positive x has ||(S^dagger (x) id) x||_inf >
||(T^dagger (x) id) x||_inf.  Both witnesses are rebuilt from a separating
operator and verified before they are returned.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from . import conic
from .channel import Channel, adjoint, apply_to_factor, compose, repair_cptp
from .entropy import SolverError, lambda_bounds
from .linalg import (
    hermitian_part,
    operator_norm,
    operator_schmidt,
    partial_trace,
    positive_part,
    psd_power,
    swap_factors,
    trace_norm,
)
from .majorize import DECISION_TOL, WITNESS_MIN_GAP, is_majorized, lift_map

REG_START = 1e-9
REG_HALVINGS = 10


@dataclass(frozen=True)
class FactorWitness:
    """Certificate of a failed factorization.

    ``kind == "SeparableState"``: ``ensemble`` lists (weight, omega_j, sigma_j)
    with rho_sep = sum weight_j omega_j (x) sigma_j on R (x) In, ``lhs`` a
    certified lower bound on lambda((id (x) S) rho_sep) and ``rhs`` an upper
    bound on lambda((id (x) T) rho_sep).

    ``kind == "PositiveOperator"``: ``x`` is PSD on Out (x) R, ``lhs`` is
    ||(S^dagger (x) id) x||_inf and ``rhs`` is ||(T^dagger (x) id) x||_inf.

    In both cases lhs > rhs violates the factorization inequality.
    """

    kind: str
    lhs: float
    rhs: float
    ensemble: Tuple[Tuple[float, np.ndarray, np.ndarray], ...] = ()
    x: Optional[np.ndarray] = None
    raw_dual: Optional[np.ndarray] = None

    @property
    def gap(self) -> float:
        """log2(lhs / rhs), in bits."""
        return float(np.log2(self.lhs / self.rhs))

    def state(self) -> np.ndarray:
        return sum(w * np.kron(a, b) for w, a, b in self.ensemble)


@dataclass(frozen=True)
class FactorizationDecision:
    verdict: str
    middle: Optional[Channel] = None
    witness: Optional[FactorWitness] = None
    residual: float = np.nan
    margins: Dict[str, object] = field(default_factory=dict)

    @property
    def margin(self) -> float:
        if self.verdict == "Factors":
            return self.residual
        if self.verdict == "NoFactor":
            return self.witness.gap
        return float(self.margins.get("best_gap", np.nan))


@dataclass(frozen=True)
class EquivalenceCheck:
    agree: bool
    post_verdict: str
    majorization_verdict: str
    undecided: bool

    def __bool__(self) -> bool:
        return self.agree


# ---------------------------------------------------------------------------
# Shared programs
# ---------------------------------------------------------------------------


def _feasibility(lin, target, d_in: int, d_out: int):
    p = conic.SdpProblem("min")
    p.variable("J", d_in * d_out, psd=True)
    p.add_eq("tp", [("J", lambda J: partial_trace(J, (d_in, d_out), "B"))], np.eye(d_in))
    p.add_eq("target", [("J", lin)], target)
    return conic.solve(p)


def _residual_program(lin, target, d_in: int, d_out: int):
    """min ||target - lin(J)||_1 over CPTP J; returns (value, J, W) with W separating."""
    n = target.shape[0]
    p = conic.SdpProblem("min")
    p.variable("J", d_in * d_out, psd=True)
    p.variable("P", n, psd=True)
    p.variable("N", n, psd=True)
    p.add_objective("P", np.eye(n))
    p.add_objective("N", np.eye(n))
    p.add_eq("tp", [("J", lambda J: partial_trace(J, (d_in, d_out), "B"))], np.eye(d_in))
    p.add_eq("target", [("P", lambda X: X), ("N", lambda X: -X), ("J", lin)], target)
    sol = conic.solve(p)
    if not sol.primal_vars:
        raise SolverError(f"residual program ended with status {sol.status}")
    return max(0.0, sol.primal_value), sol.primal_vars["J"], sol.dual_vars.get("target")


def _input_shift_pairs(W, dims):
    """PSD pairs (c_k, d_k) with sum c_k (x) d_k = W + X (x) 1 for some X.

    Each Hermitian term a (x) b becomes a_+ (x) (|b| + b) + a_- (x) (|b| - b)
    after adding |a| (x) |b| 1, where |b| = ||b||_inf.  The added operator acts
    as the identity on the output factor, so its pairing with the Choi
    matrix of any trace-preserving map is the same constant.
    """
    d_in, d_out = dims
    I = np.eye(d_out)
    pairs = []
    for coeff, a, b in operator_schmidt(W, dims, hermitian=True):
        a = coeff * a
        nb = operator_norm(b)
        pairs.append((positive_part(a), positive_part(nb * I + b)))
        pairs.append((positive_part(-a), positive_part(nb * I - b)))
    return [(c, d) for c, d in pairs
            if np.trace(c).real > 1e-14 and np.trace(d).real > 1e-14]


# ---------------------------------------------------------------------------
# Post-processing: S = Phi o T
# ---------------------------------------------------------------------------


def separable_witness(W, T: Channel, S: Channel,
                      min_gap: float = WITNESS_MIN_GAP) -> Optional[FactorWitness]:
    """Separable state on R (x) In from an operator W on In (x) Out with
    Tr(W J_S) > sup_Phi Tr(W J_{Phi o T}).

    With W + X (x) 1 = sum c_k (x) d_k, the state proportional to
    sum_k d_k^T (x) c_k^T pairs with the maximally entangled operator on
    R (x) Out to give Tr(W' J_S), which bounds lambda((id (x) S) rho) from
    below, while lambda((id (x) T) rho) equals the supremum side.
    """
    d_in, d_out = S.d_in, S.d_out
    pairs = _input_shift_pairs(hermitian_part(W), (d_in, d_out))
    if not pairs:
        return None
    wts = np.array([np.trace(c).real * np.trace(d).real for c, d in pairs])
    Z = wts.sum()
    ens = tuple((float(w / Z), hermitian_part(d.T / np.trace(d).real),
                 hermitian_part(c.T / np.trace(c).real)) for w, (c, d) in zip(wts, pairs))
    rho = sum(w * np.kron(a, b) for w, a, b in ens)
    lo_s, _ = lambda_bounds(apply_to_factor(S, rho, (d_out, d_in), "B"), (d_out, S.d_out))
    _, hi_t = lambda_bounds(apply_to_factor(T, rho, (d_out, d_in), "B"), (d_out, T.d_out))
    if lo_s <= 0 or hi_t <= 0 or np.log2(lo_s / hi_t) < min_gap:
        return None
    return FactorWitness("SeparableState", float(lo_s), float(hi_t), ensemble=ens,
                         raw_dual=hermitian_part(W))


def verify_separable_witness(T: Channel, S: Channel, fw: FactorWitness) -> Tuple[float, float]:
    """Recompute certified (lower lambda_S, upper lambda_T) for a separable witness."""
    for w, a, b in fw.ensemble:
        for m in (a, b):
            if np.linalg.eigvalsh(hermitian_part(m))[0] < -1e-9 or abs(np.trace(m) - 1) > 1e-9:
                raise ValueError("ensemble component is not a density matrix")
        if w < 0:
            raise ValueError("negative ensemble weight")
    if abs(sum(w for w, _, _ in fw.ensemble) - 1.0) > 1e-9:
        raise ValueError("ensemble weights do not sum to one")
    rho = fw.state()
    d_r = fw.ensemble[0][1].shape[0]
    lo_s, _ = lambda_bounds(apply_to_factor(S, rho, (d_r, S.d_in), "B"), (d_r, S.d_out))
    _, hi_t = lambda_bounds(apply_to_factor(T, rho, (d_r, T.d_in), "B"), (d_r, T.d_out))
    return float(lo_s), float(hi_t)


def post_factor(T: Channel, S: Channel, tol: float = DECISION_TOL,
                min_gap: float = WITNESS_MIN_GAP) -> FactorizationDecision:
    """Decide whether S = Phi o T for a CPTP Phi on the output of T.

    Examples
    --------
    >>> from qmaj.channel import identity, depolarizing
    >>> post_factor(depolarizing(2, 1.0), identity(2)).verdict
    'NoFactor'
    """
    if T.d_in != S.d_in:
        raise ValueError("T and S must have the same input dimension")
    d_in, d_mid, d_out = T.d_in, T.d_out, S.d_out
    lin = lift_map(T.choi, (d_in, d_mid), d_out)
    sol = _feasibility(lin, S.choi, d_mid, d_out)
    margins: Dict[str, object] = {"feasibility_status": sol.status}
    residual = np.nan
    if sol.primal_vars:
        J = repair_cptp(sol.primal_vars["J"], (d_mid, d_out))
        phi = Channel(d_mid, d_out, J)
        residual = trace_norm(compose(phi, T).choi - S.choi)
        if residual <= tol:
            return FactorizationDecision("Factors", phi, residual=residual, margins=margins)
    cands = [sol.dual_vars["target"]] if sol.status == "Infeasible" else []
    best = -np.inf
    for attempt in range(2):
        for W in cands:
            try:
                fw = separable_witness(W, T, S, min_gap)
            except SolverError:
                fw = None
            if fw is not None:
                return FactorizationDecision("NoFactor", witness=fw, residual=residual,
                                             margins=margins)
        if attempt == 0:
            delta, J, W = _residual_program(lin, S.choi, d_mid, d_out)
            margins["delta_star"] = delta
            J = repair_cptp(J, (d_mid, d_out))
            res = trace_norm(lin(J) - S.choi)
            if res <= tol:
                return FactorizationDecision("Factors", Channel(d_mid, d_out, J), residual=res,
                                             margins=margins)
            cands = [W] if W is not None else []
    margins["best_gap"] = best
    return FactorizationDecision("Undecided", residual=residual, margins=margins)


# ---------------------------------------------------------------------------
# Pre-processing: S = T o Phi
# ---------------------------------------------------------------------------


def _adjoint_on_first(ch: Channel, x, d_ref: int) -> np.ndarray:
    """(ch^dagger (x) id)(x) for x on Out (x) R."""
    return apply_to_factor(adjoint(ch), x, (ch.d_out, d_ref), "A")


def positive_witness(W, T: Channel, S: Channel,
                     min_gap: float = WITNESS_MIN_GAP) -> Optional[FactorWitness]:
    """PSD x on Out (x) R with ||(S^dagger (x) id) x|| > ||(T^dagger (x) id) x||.

    W on S_in (x) Out separates J_S from {(id (x) T)(J_Phi)}.  After an input
    shift x2 = W + X (x) 1 >= 0, let omega attain min{Tr omega :
    omega (x) 1 >= (id (x) T^dagger)(x2)} and conjugate x2 by sigma^(-1/2)
    on the input, sigma = omega / Tr omega regularized by a shrinking
    multiple of the identity.
    """
    d_in, d_out = S.d_in, S.d_out
    t_in = T.d_in
    pairs = _input_shift_pairs(hermitian_part(W), (d_in, d_out))
    if not pairs:
        return None
    x2 = hermitian_part(sum(np.kron(c, d) for c, d in pairs))
    scale = operator_norm(x2)
    x2 = x2 / scale
    yT = apply_to_factor(adjoint(T), x2, (d_in, d_out), "B")
    # omega on the first factor: solve with factors swapped
    p = conic.SdpProblem("min")
    p.variable("omega", d_in)
    p.add_objective("omega", np.eye(d_in))
    eye_t = np.eye(t_in)
    p.add_psd("dominate", [("omega", lambda w: np.kron(w, eye_t))], const=-yT)
    sol = conic.solve(p)
    if not sol.primal_vars:
        return None
    omega = positive_part(sol.primal_vars["omega"])
    tr = np.trace(omega).real
    if tr <= 0:
        return None
    sigma = omega / tr
    delta = REG_START
    for _ in range(REG_HALVINGS + 1):
        reg = sigma + delta * np.eye(d_in)
        M = np.kron(psd_power(reg, -0.5), np.eye(d_out))
        x4 = hermitian_part(M @ x2 @ M.conj().T)
        x = swap_factors(x4, (d_in, d_out))
        x = x / operator_norm(x)
        lhs = operator_norm(_adjoint_on_first(S, x, d_in))
        rhs = operator_norm(_adjoint_on_first(T, x, d_in))
        if rhs > 0 and np.log2(lhs / rhs) >= min_gap:
            return FactorWitness("PositiveOperator", float(lhs), float(rhs), x=x,
                                 raw_dual=hermitian_part(W))
        delta /= 2.0
    return None


def verify_positive_witness(T: Channel, S: Channel, fw: FactorWitness) -> Tuple[float, float]:
    x = hermitian_part(fw.x)
    if np.linalg.eigvalsh(x)[0] < -1e-9 * max(1.0, operator_norm(x)):
        raise ValueError("witness operator is not PSD")
    d_ref = x.shape[0] // S.d_out
    return (operator_norm(_adjoint_on_first(S, x, d_ref)),
            operator_norm(_adjoint_on_first(T, x, d_ref)))


def pre_factor(T: Channel, S: Channel, tol: float = DECISION_TOL,
               min_gap: float = WITNESS_MIN_GAP) -> FactorizationDecision:
    """Decide whether S = T o Phi for a CPTP Phi into the input of T."""
    if T.d_out != S.d_out:
        raise ValueError("T and S must have the same output dimension")
    d_in, t_in = S.d_in, T.d_in

    def lin(J):
        return apply_to_factor(T, J, (d_in, t_in), "B")

    sol = _feasibility(lin, S.choi, d_in, t_in)
    margins: Dict[str, object] = {"feasibility_status": sol.status}
    residual = np.nan
    if sol.primal_vars:
        J = repair_cptp(sol.primal_vars["J"], (d_in, t_in))
        phi = Channel(d_in, t_in, J)
        residual = trace_norm(compose(T, phi).choi - S.choi)
        if residual <= tol:
            return FactorizationDecision("Factors", phi, residual=residual, margins=margins)
    cands = [sol.dual_vars["target"]] if sol.status == "Infeasible" else []
    for attempt in range(2):
        for W in cands:
            fw = positive_witness(W, T, S, min_gap)
            if fw is not None:
                return FactorizationDecision("NoFactor", witness=fw, residual=residual,
                                             margins=margins)
        if attempt == 0:
            delta, J, W = _residual_program(lin, S.choi, d_in, t_in)
            margins["delta_star"] = delta
            J = repair_cptp(J, (d_in, t_in))
            res = trace_norm(lin(J) - S.choi)
            if res <= tol:
                return FactorizationDecision("Factors", Channel(d_in, t_in, J), residual=res,
                                             margins=margins)
            cands = [W] if W is not None else []
    return FactorizationDecision("Undecided", residual=residual, margins=margins)


def choi_majorization_equiv(T: Channel, S: Channel,
                            tol: float = DECISION_TOL) -> EquivalenceCheck:
    """Compare post_factor(T, S) with majorization of the normalized Choi states."""
    if T.d_in != S.d_in:
        raise ValueError("T and S must have the same input dimension")
    d = T.d_in
    post = post_factor(T, S, tol)
    if T.d_out == S.d_out:
        maj = is_majorized(T.choi / d, S.choi / d, (d, T.d_out), tol).verdict
    else:
        from .majorize import _decide
        maj = _decide(T.choi / d, S.choi / d, (d, T.d_out), S.d_out, tol, WITNESS_MIN_GAP,
                      64).verdict
    mapping = {"Factors": "Majorized", "NoFactor": "NotMajorized", "Undecided": "Undecided"}
    undecided = post.verdict == "Undecided" or maj == "Undecided"
    agree = (not undecided) and mapping[post.verdict] == maj
    return EquivalenceCheck(agree, post.verdict, maj, undecided)


__math__ = {
    "post-processing factorization S = Phi o T (separable-state witness)": [
        "post_factor", "separable_witness", "verify_separable_witness"],
    "pre-processing factorization S = T o Phi (positive-operator witness)": [
        "pre_factor", "positive_witness", "verify_positive_witness"],
    "factorization as majorization of Choi states": ["choi_majorization_equiv"],
}
__plumbing__: list = []
__all__ = ["FactorWitness", "FactorizationDecision", "EquivalenceCheck"] + [
    n for v in __math__.values() for n in v]
