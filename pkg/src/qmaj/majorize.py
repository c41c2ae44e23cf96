"""
Quantum majorization of bipartite states and convertibility of state families.

sigma is majorized by rho when sigma = (id_A (x) Phi)(rho) for a CPTP map
Phi on the conditioning factor B.  Decisions are certified both ways: a
positive answer carries a channel that reproduces sigma, a negative one an
entanglement-breaking channel Psi on A with

    H_min(A'|B)_{(Psi (x) id) rho}  >  H_min(A'|B)_{(Psi (x) id) sigma}.

The witness is built from a separating operator W (any Hermitian W with
Tr(W sigma) > sup_Phi Tr(W (id (x) Phi) rho)) by turning W into a positive
sum of product operators and reading that sum as a measure-and-prepare map.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from . import conic
from .channel import Channel, apply_to_factor, eb_from_ensemble, repair_cptp
from .entropy import SolverError, check_density, lambda_bounds
from .linalg import (
    check_dims,
    hermitian_part,
    operator_norm,
    operator_schmidt,
    partial_trace,
    positive_part,
    support_projector,
    swap_factors,
    trace_norm,
)

DECISION_TOL = 1e-6
WITNESS_MIN_GAP = 1e-5
MAX_FLAGS = 64
MARGINAL_TOL = 1e-9


# ---------------------------------------------------------------------------
# Result types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """EB channel Psi on A whose image separates rho from sigma in H_min.

    ``hmin_rho`` is a certified lower bound on H_min of (Psi (x) id)(rho) and
    ``hmin_sigma`` a certified upper bound for sigma, both in bits.
    """

    eb_channel: Channel
    hmin_rho: float
    hmin_sigma: float
    raw_dual: np.ndarray
    branch: str = ""

    @property
    def gap(self) -> float:
        return self.hmin_rho - self.hmin_sigma


@dataclass(frozen=True)
class FamilyWitness:
    """Weights and states (lambda_i, omega_i) with
    H_min(sum_i lambda_i omega_i (x) rho_i) > H_min(sum_i lambda_i omega_i (x) sigma_i)."""

    weights: Tuple[float, ...]
    omegas: Tuple[np.ndarray, ...]
    hmin_rho: float
    hmin_sigma: float
    eb_channel: Channel
    raw_dual: np.ndarray

    @property
    def gap(self) -> float:
        return self.hmin_rho - self.hmin_sigma


@dataclass(frozen=True)
class MajorizationDecision:
    verdict: str
    channel: Optional[Channel] = None
    witness: Optional[object] = None
    feas_residual: float = np.nan
    witness_gap: float = np.nan
    margins: Dict[str, float] = field(default_factory=dict)
    factor: str = "B"

    @property
    def margin(self) -> float:
        if self.verdict == "Majorized":
            return self.feas_residual
        if self.verdict == "NotMajorized":
            return self.witness_gap
        return float(self.margins.get("delta_star", np.nan))


@dataclass(frozen=True)
class FamilyInstance:
    """Pairs (rho_i, sigma_i) with a common input and a common output dimension."""

    pairs: Tuple[Tuple[np.ndarray, np.ndarray], ...]
    weights: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("family must contain at least one pair")
        pairs = tuple((check_density(r, name="rho_i"), check_density(s, name="sigma_i"))
                      for r, s in self.pairs)
        d_in = {r.shape[0] for r, _ in pairs}
        d_out = {s.shape[0] for _, s in pairs}
        if len(d_in) != 1 or len(d_out) != 1:
            raise ValueError("all rho_i (and all sigma_i) must share one dimension")
        object.__setattr__(self, "pairs", pairs)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (len(pairs),) or np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
                raise ValueError("weights must be nonnegative, one per pair, summing to 1")
            object.__setattr__(self, "weights", tuple(float(v) for v in w))

    @property
    def d_in(self) -> int:
        return self.pairs[0][0].shape[0]

    @property
    def d_out(self) -> int:
        return self.pairs[0][1].shape[0]

    def __len__(self) -> int:
        return len(self.pairs)

    def subfamily(self, idx: Sequence[int]) -> "FamilyInstance":
        return FamilyInstance(tuple(self.pairs[i] for i in idx))


class WitnessError(RuntimeError):
    """No candidate witness passed verification."""

    def __init__(self, message: str, raw_dual: np.ndarray, best_gap: float):
        super().__init__(message)
        self.raw_dual = raw_dual
        self.best_gap = best_gap


# ---------------------------------------------------------------------------
# The linear map J -> (id (x) Phi_J)(rho) and its pairing with W
# ---------------------------------------------------------------------------


def lift_map(rho, dims: Sequence[int], d_out: Optional[int] = None):
    """Return J -> (id_A (x) Phi_J)(rho) for Choi matrices J of maps B -> B'."""
    d_A, d_B = dims
    d_out = d_B if d_out is None else d_out
    R = np.asarray(rho, dtype=complex).reshape(d_A, d_B, d_A, d_B)
    n = d_A * d_out

    def L(J):
        J4 = J.reshape(d_B, d_out, d_B, d_out)
        return np.einsum("abxy,bcyd->acxd", R, J4).reshape(n, n)

    return L


def contraction(W, rho, dims: Sequence[int], d_out: Optional[int] = None) -> np.ndarray:
    """M with Tr(J M) = Tr(W (id (x) Phi_J)(rho)) for every Choi matrix J."""
    d_A, d_B = dims
    d_out = d_B if d_out is None else d_out
    R = np.asarray(rho, dtype=complex).reshape(d_A, d_B, d_A, d_B)
    W4 = np.asarray(W, dtype=complex).reshape(d_A, d_out, d_A, d_out)
    M = np.einsum("abxy,xdac->ydbc", R, W4).reshape(d_B * d_out, d_B * d_out)
    return hermitian_part(M)


@dataclass(frozen=True)
class PairingResult:
    value: float
    channel: Channel
    upper: float
    status: str


def sup_pairing(W, rho, dims: Sequence[int], d_out: Optional[int] = None,
                cptni: bool = False, tol: float | None = None) -> PairingResult:
    """max over CPTP (or CPTNI) Phi on B of Tr(W (id (x) Phi)(rho)).

    ``value`` is attained by ``channel``; ``upper`` is the dual bound.
    """
    d_A, d_B = check_dims(np.asarray(rho), dims, "rho")
    d_out = d_B if d_out is None else d_out
    M = contraction(W, rho, (d_A, d_B), d_out)
    p = conic.SdpProblem("max")
    p.variable("J", d_B * d_out, psd=True)
    p.add_objective("J", M)
    marg = (lambda J: partial_trace(J, (d_B, d_out), "B"))
    if cptni:
        p.add_psd("tni", [("J", lambda J: -marg(J))], const=np.eye(d_B))
    else:
        p.add_eq("tp", [("J", marg)], np.eye(d_B))
    sol = conic.solve(p, tol)
    if not sol.primal_vars:
        raise SolverError(f"pairing solve ended with status {sol.status}")
    J = sol.primal_vars["J"]
    if not cptni:
        J = repair_cptp(J, (d_B, d_out))
    value = float(np.real(np.vdot(M, J)))
    return PairingResult(value, Channel(d_B, d_out, J), float(sol.dual_value), sol.status)


# ---------------------------------------------------------------------------
# Witness construction
# ---------------------------------------------------------------------------


def positive_split(W, dims: Sequence[int]):
    """Write W + K 1 (x) 1 as a sum of PSD (x) PSD products.

    Uses the Hermitian operator-Schmidt terms a_j (x) b_j of W and the identity
    a (x) b + |a||b| 1 = 1/2 (a + |a|)(x)(b + |b|) + 1/2 (|a| - a)(x)(|b| - b),
    where |a| = ||a||_inf.  Returns (K, [(c_k, d_k), ...]).
    """
    d_A, d_B = dims
    terms = operator_schmidt(W, dims, hermitian=True)
    if len(terms) == 1:
        c, a, b = terms[0]
        wa, wb = np.linalg.eigvalsh(a), np.linalg.eigvalsh(b)
        sa = 1 if wa[0] >= -1e-14 * abs(wa[-1]) else (-1 if wa[-1] <= 1e-14 * abs(wa[0]) else 0)
        sb = 1 if wb[0] >= -1e-14 * abs(wb[-1]) else (-1 if wb[-1] <= 1e-14 * abs(wb[0]) else 0)
        if sa * sb == 1:
            return 0.0, [(positive_part(sa * c * a), positive_part(sb * b))]
    Ia, Ib = np.eye(d_A), np.eye(d_B)
    K = 0.0
    pairs = []
    for coeff, a, b in terms:
        a = coeff * a
        na, nb = operator_norm(a), operator_norm(b)
        K += na * nb
        pairs.append((0.5 * (a + na * Ia), b + nb * Ib))
        pairs.append((0.5 * (na * Ia - a), nb * Ib - b))
    pairs = [(positive_part(c), positive_part(d)) for c, d in pairs]
    return K, pairs


def measure_prepare_ensemble(pairs, d_A: int):
    """Normalize x -> sum_k Tr(c_k x) d_k^T to a trace-non-increasing ensemble.

    Returns (povm, states, deficit) with sum(povm) + deficit = I.
    """
    pairs = [(c, d) for c, d in pairs
             if np.trace(c).real > 1e-14 and np.trace(d).real > 1e-14]
    if not pairs:
        raise ValueError("no nonzero terms")
    bound = sum(np.trace(d).real * c for c, d in pairs)
    s = float(np.linalg.eigvalsh(hermitian_part(bound))[-1])
    povm = [hermitian_part(c * (np.trace(d).real / s)) for c, d in pairs]
    states = [hermitian_part(d.T / np.trace(d).real) for _, d in pairs]
    deficit = positive_part(np.eye(d_A) - sum(povm))
    return povm, states, deficit


def _pad(state: np.ndarray, total: int) -> np.ndarray:
    out = np.zeros((total, total), dtype=complex)
    k = state.shape[0]
    out[:k, :k] = state
    return out


def _completed_channel(povm, states, deficit, n_flags: int) -> Channel:
    d_state = states[0].shape[0]
    total = d_state + n_flags
    sts = [_pad(w, total) for w in states]
    ps = list(povm)
    if np.trace(deficit).real > 1e-14:
        if n_flags == 0:
            dump = np.eye(d_state) / d_state
        else:
            dump = np.zeros((total, total), dtype=complex)
            dump[d_state:, d_state:] = np.eye(n_flags) / n_flags
        ps.append(deficit)
        sts.append(_pad(dump, total))
    # absorb round-off so that the POVM sums to I to machine precision
    d_A = ps[0].shape[0]
    ps[-1] = ps[-1] + hermitian_part(np.eye(d_A) - sum(ps))
    return eb_from_ensemble(ps, sts)


def marginal_channel(rho_A, sigma_A) -> Optional[Channel]:
    """Two-outcome witness for unequal A-marginals.

    Measures the support projection q of (sigma_A - rho_A)_+ and prepares
    |0><0| on q and the maximally mixed qubit otherwise, giving
    lambda = (1 + Tr(q marginal)) / 2 on both sides.
    """
    q1 = support_projector(positive_part(sigma_A - rho_A), 1e-10)
    if np.trace(q1).real < 0.5:
        return None
    q2 = np.eye(q1.shape[0]) - q1
    povm = [q1, q2] if np.trace(q2).real > 0.5 else [q1]
    states = [np.diag([1.0, 0.0]).astype(complex), np.eye(2) / 2][:len(povm)]
    return eb_from_ensemble(povm, states)


def witness_gap(psi: Channel, rho, sigma, dims: Sequence[int],
                sigma_dims: Optional[Sequence[int]] = None) -> Tuple[float, float]:
    """Certified (lower H_min of image of rho, upper H_min of image of sigma), in bits."""
    d_A, d_B = dims
    s_dims = dims if sigma_dims is None else sigma_dims
    r2 = apply_to_factor(psi, rho, (d_A, d_B), "A")
    s2 = apply_to_factor(psi, sigma, s_dims, "A")
    lo_r, _ = lambda_bounds(r2, (psi.d_out, d_B))
    _, hi_s = lambda_bounds(s2, (psi.d_out, s_dims[1]))
    # lambda upper bound of rho-image gives a lower bound on its entropy
    _, hi_r = lambda_bounds(r2, (psi.d_out, d_B))
    lo_s, _ = lambda_bounds(s2, (psi.d_out, s_dims[1]))
    if hi_r <= 0 or lo_s <= 0:
        raise SolverError("nonpositive lambda bound in witness check")
    return float(-np.log2(hi_r)), float(-np.log2(lo_s))


def extract_witness(W, rho, sigma, dims: Sequence[int], d_out: Optional[int] = None,
                    min_gap: float = WITNESS_MIN_GAP, max_flags: int = MAX_FLAGS,
                    pairs=None) -> Witness:
    """Turn a separating operator W into a verified entanglement-breaking witness.

    Parameters
    ----------
    W : Hermitian operator on A (x) B_out with
        Tr(W sigma) > sup_Phi Tr(W (id (x) Phi)(rho)).
    rho, sigma : densities on A (x) B and A (x) B_out.
    pairs : optional list of PSD pairs (c_k, d_k) with W = sum c_k (x) d_k;
        when given, the operator-Schmidt split and shift are skipped.

    Returns
    -------
    Witness
        The first candidate whose certified H_min gap reaches ``min_gap``.
        Candidates: the two-outcome marginal test when the A-marginals
        differ, then the measure-and-prepare map from W completed by dumping
        its deficit onto the maximally mixed state or onto an orthogonal
        block of ``n`` flag levels (n grows geometrically up to ``max_flags``).

    Raises
    ------
    WitnessError
        if no candidate verifies.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    d_A, d_B = dims
    d_out = d_B if d_out is None else d_out
    W = hermitian_part(np.asarray(W, dtype=complex))
    s_dims = (d_A, d_out)
    best = -np.inf

    def attempt(psi, branch):
        nonlocal best
        h_r, h_s = witness_gap(psi, rho, sigma, dims, s_dims)
        best = max(best, h_r - h_s)
        if h_r - h_s >= min_gap:
            return Witness(psi, h_r, h_s, W, branch)
        return None

    rho_A = partial_trace(rho, dims, "B")
    sigma_A = partial_trace(sigma, s_dims, "B")
    if trace_norm(rho_A - sigma_A) > MARGINAL_TOL:
        psi = marginal_channel(rho_A, sigma_A)
        if psi is not None:
            wit = attempt(psi, "marginal")
            if wit is not None:
                return wit

    if pairs is None:
        scale = operator_norm(W)
        if scale == 0:
            raise WitnessError("zero separating operator", W, best)
        _, pairs = positive_split(W / scale, s_dims)
    povm, states, deficit = measure_prepare_ensemble(pairs, d_A)

    flags = [0]
    if np.trace(deficit).real > 1e-14:
        flags += [n for n in (1, 2, 4, 8, 16, 32, 64, 128, 256) if n <= max_flags]
    for n in flags:
        wit = attempt(_completed_channel(povm, states, deficit, n), f"dump:{n}")
        if wit is not None:
            return wit
    raise WitnessError(f"no witness reached gap {min_gap:g} (best {best:.3g})", W, best)


# ---------------------------------------------------------------------------
# Decisions
# ---------------------------------------------------------------------------


def _feasibility(rho, sigma, dims, d_out, tol):
    d_A, d_B = dims
    p = conic.SdpProblem("min")
    p.variable("J", d_B * d_out, psd=True)
    p.add_eq("tp", [("J", lambda J: partial_trace(J, (d_B, d_out), "B"))], np.eye(d_B))
    p.add_eq("image", [("J", lift_map(rho, dims, d_out))], sigma)
    return conic.solve(p, tol)


def _decide(rho, sigma, dims, d_out, tol, min_gap, max_flags) -> MajorizationDecision:
    from .approx import min_conversion_error

    L = lift_map(rho, dims, d_out)
    margins: Dict[str, float] = {}
    sol = _feasibility(rho, sigma, dims, d_out, None)
    margins["feasibility_status"] = sol.status
    residual = np.nan
    if sol.primal_vars:
        J = repair_cptp(sol.primal_vars["J"], (dims[1], d_out))
        residual = trace_norm(L(J) - sigma)
        if residual <= tol:
            return MajorizationDecision("Majorized", Channel(dims[1], d_out, J),
                                        feas_residual=residual, margins=margins)
    margins["feas_residual"] = residual

    best_gap = -np.inf
    candidates = []
    if sol.status == "Infeasible":
        candidates.append(sol.dual_vars["image"])
    for k in range(2):
        for W in candidates:
            try:
                wit = extract_witness(W, rho, sigma, dims, d_out, min_gap, max_flags)
            except WitnessError as err:
                best_gap = max(best_gap, err.best_gap)
                continue
            except SolverError:
                continue
            return MajorizationDecision("NotMajorized", witness=wit, feas_residual=residual,
                                        witness_gap=wit.gap, margins=margins)
        if k == 1:
            break
        # second round: the optimally separating operator from the
        # trace-distance program, which also settles near-feasible cases
        approx = min_conversion_error(rho, sigma, dims, d_out=d_out)
        margins["delta_star"] = approx.delta_star
        if approx.optimizer is not None and approx.achieved <= tol:
            return MajorizationDecision("Majorized", approx.optimizer,
                                        feas_residual=approx.achieved, margins=margins)
        candidates = [approx.certificate["W"]] if approx.certificate.get("W") is not None else []
    margins["best_witness_gap"] = best_gap
    return MajorizationDecision("Undecided", feas_residual=residual, witness_gap=best_gap,
                                margins=margins)


def is_majorized(rho, sigma, dims: Sequence[int], tol: float = DECISION_TOL,
                 factor: str = "B", min_gap: float = WITNESS_MIN_GAP,
                 max_flags: int = MAX_FLAGS) -> MajorizationDecision:
    """Decide whether sigma = (id (x) Phi)(rho) for some CPTP Phi.

    :param factor: ``"B"`` (default) lets the channel act on the second
        factor and the witness on the first; ``"A"`` swaps the roles
    :param tol: trace-norm tolerance for accepting a channel
    """
    rho = check_density(rho, dims, "rho")
    sigma = check_density(sigma, dims, "sigma")
    dims = check_dims(rho, dims)
    if factor not in ("A", "B"):
        raise ValueError(f"factor must be 'A' or 'B', got {factor!r}")
    if factor == "A":
        sw = (dims[1], dims[0])
        dec = _decide(swap_factors(rho, dims), swap_factors(sigma, dims), sw, sw[1], tol,
                      min_gap, max_flags)
        return MajorizationDecision(dec.verdict, dec.channel, dec.witness, dec.feas_residual,
                                    dec.witness_gap, dec.margins, "A")
    return _decide(rho, sigma, dims, dims[1], tol, min_gap, max_flags)


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


def classical_embedding(inst: FamilyInstance, weights=None):
    """rho_cq = sum_i mu_i |i><i| (x) rho_i and the same for sigma."""
    n = len(inst)
    mu = np.full(n, 1.0 / n) if weights is None else np.asarray(weights, dtype=float)
    rho_cq = sum(mu[i] * np.kron(_unit(n, i), r) for i, (r, _) in enumerate(inst.pairs))
    sig_cq = sum(mu[i] * np.kron(_unit(n, i), s) for i, (_, s) in enumerate(inst.pairs))
    return rho_cq, sig_cq, mu


def _unit(n, i):
    e = np.zeros((n, n), dtype=complex)
    e[i, i] = 1.0
    return e


def _family_weights(inst):
    if inst.weights is not None and min(inst.weights) > 0:
        return np.asarray(inst.weights)
    return np.full(len(inst), 1.0 / len(inst))


def convert_family(inst: FamilyInstance, tol: float = DECISION_TOL,
                   min_gap: float = WITNESS_MIN_GAP,
                   max_flags: int = MAX_FLAGS) -> MajorizationDecision:
    """Decide whether one CPTP map sends every rho_i to sigma_i.

    Negative answers carry a :class:`FamilyWitness`: weights lambda_i and
    states omega_i (the images of the index states under an EB channel on
    the classical index register) with a certified H_min violation.
    """
    d_in, d_out = inst.d_in, inst.d_out
    p = conic.SdpProblem("min")
    p.variable("J", d_in * d_out, psd=True)
    p.add_eq("tp", [("J", lambda J: partial_trace(J, (d_in, d_out), "B"))], np.eye(d_in))
    for i, (r, s) in enumerate(inst.pairs):
        p.add_eq(f"image{i}", [("J", _apply_map(r, d_in, d_out))], s)
    sol = conic.solve(p)
    margins: Dict[str, float] = {"feasibility_status": sol.status}
    residual = np.nan
    if sol.primal_vars:
        J = repair_cptp(sol.primal_vars["J"], (d_in, d_out))
        ch = Channel(d_in, d_out, J)
        residual = max(trace_norm(_apply_map(r, d_in, d_out)(J) - s) for r, s in inst.pairs)
        if residual <= tol:
            return MajorizationDecision("Majorized", ch, feas_residual=residual, margins=margins)
    margins["feas_residual"] = residual

    n = len(inst)
    mu = _family_weights(inst)
    rho_cq, sig_cq, _ = classical_embedding(inst, mu)
    dims = (n, d_in)
    if sol.status == "Infeasible":
        W = sum(np.kron(_unit(n, i), sol.dual_vars[f"image{i}"] / mu[i]) for i in range(n))
        try:
            wit = extract_witness(W, rho_cq, sig_cq, dims, d_out, min_gap, max_flags)
            return _family_decision(wit, mu, residual, margins)
        except (WitnessError, SolverError):
            pass
    dec = _decide(rho_cq, sig_cq, dims, d_out, tol, min_gap, max_flags)
    if dec.verdict == "NotMajorized":
        return _family_decision(dec.witness, mu, residual, {**margins, **dec.margins})
    if dec.verdict == "Majorized":
        worst = max(trace_norm(dec.channel(r) - s) for r, s in inst.pairs)
        return MajorizationDecision("Majorized", dec.channel, feas_residual=worst,
                                    margins={**margins, **dec.margins})
    return MajorizationDecision("Undecided", feas_residual=residual,
                                witness_gap=dec.witness_gap, margins={**margins, **dec.margins})


def _apply_map(r, d_in, d_out):
    def f(J):
        return np.einsum("ki,kcid->cd", r, J.reshape(d_in, d_out, d_in, d_out))
    return f


def _family_decision(wit: Witness, mu, residual, margins) -> MajorizationDecision:
    n = len(mu)
    omegas = tuple(wit.eb_channel(_unit(n, i)) for i in range(n))
    fw = FamilyWitness(tuple(float(m) for m in mu), omegas, wit.hmin_rho, wit.hmin_sigma,
                       wit.eb_channel, wit.raw_dual)
    return MajorizationDecision("NotMajorized", witness=fw, feas_residual=residual,
                                witness_gap=fw.gap, margins=margins)


def verify_family_witness(inst: FamilyInstance, fw: FamilyWitness) -> Tuple[float, float]:
    """Recompute certified H_min values of sum_i lambda_i omega_i (x) rho_i (and sigma_i)."""
    k = fw.omegas[0].shape[0]
    x_r = sum(l * np.kron(w, r) for l, w, (r, _) in zip(fw.weights, fw.omegas, inst.pairs))
    x_s = sum(l * np.kron(w, s) for l, w, (_, s) in zip(fw.weights, fw.omegas, inst.pairs))
    _, hi_r = lambda_bounds(x_r, (k, inst.d_in))
    lo_s, _ = lambda_bounds(x_s, (k, inst.d_out))
    return float(-np.log2(hi_r)), float(-np.log2(lo_s))


def finite_subfamily_scan(inst: FamilyInstance, k_max: int, tol: float = DECISION_TOL
                          ) -> Dict[str, object]:
    """Run :func:`convert_family` on every subfamily of size <= k_max and on the whole family.

    Reports the first infeasible subfamily found in order of increasing size
    (a minimal obstruction among those scanned) and counts violations of
    the restriction property: a feasible full family must have only feasible
    subfamilies.
    """
    n = len(inst)
    k_max = max(1, min(int(k_max), n))
    full = convert_family(inst, tol)
    rows = []
    first = None
    for k in range(1, k_max + 1):
        for idx in itertools.combinations(range(n), k):
            if k == n:
                verdict = full.verdict
            else:
                verdict = convert_family(inst.subfamily(idx), tol).verdict
            rows.append({"indices": list(idx), "verdict": verdict})
            if verdict == "NotMajorized" and first is None:
                first = list(idx)
    if first is None and full.verdict == "NotMajorized":
        first = list(range(n))
    violations = sum(1 for r in rows if full.verdict == "Majorized"
                     and r["verdict"] == "NotMajorized")
    return {
        "n": n,
        "k_max": k_max,
        "full": full.verdict,
        "subfamilies": rows,
        "first_obstruction": first,
        "violations": violations,
        "consistent": violations == 0,
    }


def pairing_value(rho, dims: Sequence[int], cptni: bool = True) -> float:
    """sup over CPTNI maps Phi: B -> A of Tr(Omega (id (x) Phi)(rho)), Omega = sum e_ij (x) e_ij.

    Equals lambda(rho) of the min-entropy program (the norm coincidence).
    """
    d_A, d_B = check_dims(np.asarray(rho), dims, "rho")
    v = np.eye(d_A, dtype=complex).reshape(-1)
    Omega = np.outer(v, v)
    return sup_pairing(Omega, rho, (d_A, d_B), d_out=d_A, cptni=cptni).value


__math__ = {
    "quantum majorization of bipartite states (channel on the conditioning factor)": [
        "is_majorized"],
    "supremum of a pairing over channels": ["sup_pairing", "pairing_value"],
    "entanglement-breaking witness from a separating operator": [
        "extract_witness", "positive_split", "witness_gap"],
    "convertibility of a family of states by one channel": [
        "convert_family", "verify_family_witness", "classical_embedding"],
    "finite-subfamily reduction of family convertibility": ["finite_subfamily_scan"],
}
__plumbing__ = ["lift_map", "contraction", "measure_prepare_ensemble", "marginal_channel"]
__all__ = [
    "DECISION_TOL", "WITNESS_MIN_GAP", "Witness", "FamilyWitness", "MajorizationDecision",
    "FamilyInstance", "WitnessError", "PairingResult",
] + [n for v in __math__.values() for n in v] + __plumbing__
