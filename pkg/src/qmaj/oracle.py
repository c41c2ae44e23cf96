"""
Independent verifiers and reproducible instance generators.

Generators draw from ``numpy.random.Generator(PCG64(seed))`` so that a seed
alone reproduces an instance.  Each oracle avoids the routine it checks:
the grid search replaces the min-entropy program, Kraus sums replace Choi
contractions, random channels replace the conversion program.
"""

from __future__ import annotations

import json
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from . import __version__
from .channel import Channel, choi_from_kraus
from .linalg import (
    check_dims,
    hermitian_part,
    partial_trace,
    partial_transpose,
    trace_norm,
)

MAX_SEED = 2 ** 64 - 1


def rng_from_seed(seed: int) -> np.random.Generator:
    seed = int(seed)
    if not 0 <= seed <= MAX_SEED:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return np.random.Generator(np.random.PCG64(seed))


def _gaussian(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _rng(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return rng_from_seed(seed_or_rng)


def random_density(d: int, rank: Optional[int] = None, seed=0) -> np.ndarray:
    """G G^dagger / Tr with G a d x rank complex Gaussian matrix."""
    rank = d if rank is None else int(rank)
    if not 1 <= rank <= d:
        raise ValueError(f"rank must lie in [1, {d}]")
    G = _gaussian(_rng(seed), (d, rank))
    R = G @ G.conj().T
    return hermitian_part(R / np.trace(R).real)


def random_unitary(d: int, seed=0) -> np.ndarray:
    Q, R = np.linalg.qr(_gaussian(_rng(seed), (d, d)))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_kraus(d_in: int, d_out: int, env: int = 2, seed=0) -> List[np.ndarray]:
    """Kraus operators of Tr_env V . V^dagger for a random isometry V: d_in -> d_out*env."""
    if env < 1:
        raise ValueError("env must be at least 1")
    if d_out * env < d_in:
        raise ValueError("d_out * env must be at least d_in for an isometry")
    Q, R = np.linalg.qr(_gaussian(_rng(seed), (d_out * env, d_in)))
    V = (Q * (np.diag(R) / np.abs(np.diag(R)))).reshape(d_out, env, d_in)
    return [V[:, e, :] for e in range(env)]


def random_cptp(d_in: int, d_out: int, env: int = 2, seed=0) -> Channel:
    return choi_from_kraus(random_kraus(d_in, d_out, env, seed))


def kraus_apply(kraus, rho) -> np.ndarray:
    return sum(K @ rho @ K.conj().T for K in kraus)


def kraus_apply_to_factor(kraus, rho, dims, which="B") -> np.ndarray:
    d_A, d_B = dims
    if which == "B":
        ks = [np.kron(np.eye(d_A), K) for K in kraus]
    else:
        ks = [np.kron(K, np.eye(d_B)) for K in kraus]
    return kraus_apply(ks, rho)


def random_entangled(d_A: int, d_B: int, rng, min_negativity: float = 0.05,
                     rank_max: int = 2) -> np.ndarray:
    """Random density whose partial transpose has an eigenvalue below -min_negativity."""
    n = d_A * d_B
    for _ in range(1000):
        s = random_density(n, int(rng.integers(1, rank_max + 1)), rng)
        if np.linalg.eigvalsh(partial_transpose(s, (d_A, d_B)))[0] < -min_negativity:
            return s
    raise RuntimeError("failed to sample an entangled state")


# ---------------------------------------------------------------------------
# Value oracles
# ---------------------------------------------------------------------------


_PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def _min_scale(rho, d_A, r):
    """Least t with 1 (x) t (I + r.sigma)/2 >= rho, for a stack of Bloch vectors |r| < 1."""
    M = 0.5 * (np.eye(2) + np.einsum("ki,ijl->kjl", r, _PAULI))
    w, V = np.linalg.eigh(M)
    Mi = np.einsum("kij,kj,klj->kil", V, w ** -0.5, V.conj())
    K = np.einsum("ab,kij->kaibj", np.eye(d_A), Mi).reshape(len(r), 2 * d_A, 2 * d_A)
    return np.linalg.eigvalsh(K @ rho[None] @ K)[:, -1]


def grid_hmin(rho, dims: Sequence[int], resolution: int = 10_000) -> float:
    """lambda(rho) by grid search over omega = t (I + r.sigma)/2 on a qubit B.

    For each Bloch vector the least feasible t is a generalized eigenvalue;
    the best grid point is refined by Nelder-Mead.  Returns lambda (not bits).
    """
    rho = np.asarray(rho, dtype=complex)
    d_A, d_B = check_dims(rho, dims)
    if d_B != 2:
        raise ValueError("grid_hmin supports d_B = 2 only")
    n_dir = max(8, int(round(resolution ** (2 / 3))))
    n_rad = max(2, resolution // n_dir)
    k = np.arange(n_dir) + 0.5
    phi = np.arccos(1 - 2 * k / n_dir)
    theta = np.pi * (1 + 5 ** 0.5) * k
    dirs = np.stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)], 1)
    radii = np.linspace(0.0, 0.999, n_rad)
    pts = (radii[:, None, None] * dirs[None]).reshape(-1, 3)
    vals = _min_scale(rho, d_A, pts)
    best = pts[int(np.argmin(vals))]

    def f(x):
        nx = np.linalg.norm(x)
        if nx >= 0.999999:
            return 1e6 * (1 + nx)
        return float(_min_scale(rho, d_A, x[None])[0])

    res = minimize(f, best, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
    return float(min(res.fun, vals.min()))


def search_pairing(W, rho, dims, n: int, seed=0, env: int = 2) -> float:
    """max of Tr(W (id (x) Phi)(rho)) over n random CPTP Phi (Kraus action)."""
    rng = _rng(seed)
    d_A, d_B = dims
    best = -np.inf
    for _ in range(n):
        ks = random_kraus(d_B, W.shape[0] // d_A, int(rng.integers(1, env + 1)), rng)
        best = max(best, float(np.real(np.trace(W @ kraus_apply_to_factor(ks, rho, dims)))))
    return best


def search_conversion(rho, sigma, dims, n: int, seed=0, env: int = 4) -> float:
    """Upper bound on min_Phi ||sigma - (id (x) Phi) rho||_1 from n random channels."""
    rng = _rng(seed)
    d_A, d_B = dims
    best = np.inf
    for _ in range(n):
        ks = random_kraus(d_B, d_B, int(rng.integers(1, env + 1)), rng)
        best = min(best, trace_norm(sigma - kraus_apply_to_factor(ks, rho, dims)))
    return best


def diamond_pure_search(kraus1, kraus2, n: int = 2000, seed=0) -> float:
    """Lower bound on the diamond norm of the difference of two Kraus channels.

    Random pure inputs on In (x) In followed by Nelder-Mead refinement of the best.
    """
    rng = _rng(seed)
    d = kraus1[0].shape[1]
    ks1 = [np.kron(K, np.eye(d)) for K in kraus1]
    ks2 = [np.kron(K, np.eye(d)) for K in kraus2]

    def value(v):
        v = v / np.linalg.norm(v)
        P = np.outer(v, v.conj())
        return trace_norm(kraus_apply(ks1, P) - kraus_apply(ks2, P))

    vs = _gaussian(rng, (n, d * d))
    vals = [value(v) for v in vs]
    v0 = vs[int(np.argmax(vals))]
    x0 = np.concatenate([v0.real, v0.imag])
    res = minimize(lambda x: -value(x[:d * d] + 1j * x[d * d:]), x0, method="Nelder-Mead",
                   options={"xatol": 1e-9, "fatol": 1e-12, "maxiter": 6000})
    return float(max(max(vals), -res.fun))


def minmax_conversion(rho, sigma, dims, rounds: int = 200, tol: float = 1e-6
                      ) -> Dict[str, float]:
    """Column generation for min_Phi max_{||W|| <= 1} Tr(W (sigma - (id (x) Phi) rho)).

    The restricted problem mixes the channels found so far (upper bound and a
    witness W); the pricing step finds the channel that best answers W
    (lower bound Tr(W sigma) - sup_Phi Tr(W (id (x) Phi) rho)).
    """
    from . import conic
    from .channel import apply_to_factor
    from .majorize import sup_pairing

    d_A, d_B = dims
    n = d_A * d_B
    chans = [random_cptp(d_B, d_B, 2, 0)]
    images = [apply_to_factor(chans[0], rho, dims, "B")]
    lower, upper = -np.inf, np.inf
    for _ in range(rounds):
        p = conic.SdpProblem("min")
        p.variable("P", n, psd=True)
        p.variable("N", n, psd=True)
        for i in range(len(images)):
            p.variable(f"mu{i}", 1, psd=True)
        p.add_objective("P", np.eye(n))
        p.add_objective("N", np.eye(n))
        p.add_eq("simplex", [(f"mu{i}", lambda m: m) for i in range(len(images))], np.eye(1))
        terms = [("P", lambda X: X), ("N", lambda X: -X)]
        terms += [(f"mu{i}", (lambda Y: (lambda m: m[0, 0] * Y))(Y)) for i, Y in enumerate(images)]
        p.add_eq("diff", terms, sigma)
        sol = conic.solve(p)
        upper = min(upper, sol.primal_value)
        W = sol.dual_vars["diff"]
        pr = sup_pairing(W, rho, dims)
        lower = max(lower, float(np.real(np.vdot(W, sigma))) - pr.upper)
        if upper - lower <= tol:
            break
        chans.append(pr.channel)
        images.append(apply_to_factor(pr.channel, rho, dims, "B"))
    return {"lower": float(lower), "upper": float(upper), "rounds": len(images)}


def apro2_lower_search(T: Channel, S: Channel, n: int = 50, seed=0,
                       maxfev: int = 400) -> float:
    """Lower bound on min_Phi ||S - Phi o T||_diamond from
    2 sup_rho (lambda((id (x) S) rho) - lambda((id (x) T) rho)) / lambda(rho)
    over pure rho on R (x) In, random samples plus Nelder-Mead refinement."""
    from .channel import apply_to_factor
    from .entropy import lambda_selfadjoint

    rng = _rng(seed)
    d = T.d_in
    dims = (d, d)

    def ratio(x):
        v = x[:d * d] + 1j * x[d * d:]
        nv = np.linalg.norm(v)
        if nv < 1e-12:
            return 0.0
        v = v / nv
        r = np.outer(v, v.conj())
        ls = lambda_selfadjoint(apply_to_factor(S, r, dims, "B"), (d, S.d_out))
        lt = lambda_selfadjoint(apply_to_factor(T, r, dims, "B"), (d, T.d_out))
        return 2.0 * (ls - lt) / lambda_selfadjoint(r, dims)

    xs = rng.standard_normal((n, 2 * d * d))
    vals = [ratio(x) for x in xs]
    x0 = xs[int(np.argmax(vals))]
    res = minimize(lambda x: -ratio(x), x0, method="Nelder-Mead",
                   options={"maxfev": maxfev, "xatol": 1e-8, "fatol": 1e-10})
    return float(max(max(vals), -res.fun))


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def _fmt(x) -> Optional[str]:
    if x is None or not np.isfinite(x):
        return None
    return f"{float(x):.9e}"


_DIMS = ((2, 2), (2, 3), (3, 2))


def monotonicity_suite(n: int, seed: int = 0, tol: float = 1e-6) -> Dict[str, object]:
    """Data processing on B: H_min((id (x) Phi) rho) >= H_min(rho) - tol."""
    from .channel import apply_to_factor
    from .entropy import hmin

    rng = rng_from_seed(seed)
    passed, failed, worst, bad = 0, 0, np.inf, []
    for _ in range(int(n)):
        sub = int(rng.integers(0, 2 ** 63))
        r = rng_from_seed(sub)
        dims = _DIMS[int(r.integers(len(_DIMS)))]
        rho = random_density(dims[0] * dims[1], int(r.integers(1, dims[0] * dims[1] + 1)), r)
        phi = random_cptp(dims[1], dims[1], int(r.integers(1, 4)), r)
        margin = hmin(apply_to_factor(phi, rho, dims, "B"), dims).value_bits - \
            hmin(rho, dims).value_bits
        worst = min(worst, margin)
        if margin >= -tol:
            passed += 1
        else:
            failed += 1
            bad.append(sub)
    return {"suite": "monotonicity", "n": int(n), "seed": int(seed), "passed": passed,
            "failed": failed, "worst_margin": _fmt(worst if n else None), "failed_seeds": bad}


def majorization_roundtrip_suite(n: int, seed: int = 0) -> Dict[str, object]:
    """Planted-feasible instances must never be NotMajorized; planted-infeasible
    (entangled sigma with the A-marginal of a product rho) never Majorized."""
    from .channel import apply_to_factor
    from .majorize import is_majorized

    rng = rng_from_seed(seed)
    counts = {"feasible": {"Majorized": 0, "NotMajorized": 0, "Undecided": 0},
              "infeasible": {"Majorized": 0, "NotMajorized": 0, "Undecided": 0}}
    worst_res, worst_gap, bad = 0.0, np.inf, []
    for i in range(int(n)):
        sub = int(rng.integers(0, 2 ** 63))
        r = rng_from_seed(sub)
        dims = (2, 2)
        if i % 2 == 0:
            rho = random_density(4, int(r.integers(1, 5)), r)
            sigma = apply_to_factor(random_cptp(2, 2, int(r.integers(1, 4)), r), rho, dims, "B")
            dec = is_majorized(rho, sigma, dims)
            counts["feasible"][dec.verdict] += 1
            if dec.verdict == "Majorized":
                worst_res = max(worst_res, dec.feas_residual)
            elif dec.verdict == "NotMajorized":
                bad.append(sub)
        else:
            sigma = random_entangled(2, 2, r)
            rho = np.kron(partial_trace(sigma, dims, "B"), random_density(2, 2, r))
            dec = is_majorized(rho, sigma, dims)
            counts["infeasible"][dec.verdict] += 1
            if dec.verdict == "NotMajorized":
                worst_gap = min(worst_gap, dec.witness_gap)
            elif dec.verdict == "Majorized":
                bad.append(sub)
    ok = counts["feasible"]["NotMajorized"] == 0 and counts["infeasible"]["Majorized"] == 0
    return {"suite": "majorization_roundtrip", "n": int(n), "seed": int(seed), "counts": counts,
            "worst_residual": _fmt(worst_res), "worst_witness_gap": _fmt(worst_gap),
            "failed_seeds": bad, "passed": bool(ok)}


def selftest_report(n: int = 10, seed: int = 0) -> str:
    """Run both suites and return a canonical JSON report (sorted keys, no timings)."""
    report = {
        "tool": "qmaj",
        "version": __version__,
        "seed": int(seed),
        "n": int(n),
        "suites": [monotonicity_suite(n, seed), majorization_roundtrip_suite(n, seed)],
    }
    return json.dumps(report, sort_keys=True, indent=2)


__math__ = {
    "data processing of the min-entropy under channels on the conditioning factor": [
        "monotonicity_suite"],
    "soundness and completeness of the majorization decision": [
        "majorization_roundtrip_suite"],
    "independent re-evaluation of the min-entropy program": ["grid_hmin"],
    "min-max exchange in the approximate programs": [
        "minmax_conversion", "apro2_lower_search"],
}
__plumbing__ = [
    "rng_from_seed", "random_density", "random_unitary", "random_kraus", "random_cptp",
    "kraus_apply", "kraus_apply_to_factor", "random_entangled", "search_pairing",
    "search_conversion", "diamond_pure_search", "selftest_report",
]
__all__ = [n for v in __math__.values() for n in v] + __plumbing__
