"""
Semidefinite programs over Hermitian matrix variables.

Problems are assembled into the real standard form used by the Clarabel
interior-point solver::

    minimize    q'x
    subject to  A x + s = b,   s in {0}^k x S_+ x ... x S_+

Each Hermitian variable X (n x n) contributes n^2 real coordinates in the
orthonormal basis of :func:`qmaj.linalg.hermitian_basis`.  A Hermitian PSD
constraint E >= 0 is imposed on the real symmetric embedding
[[Re E, -Im E], [Im E, Re E]].

Dual conventions.  Write the equality constraints as A_i(X) = b_i and the
PSD constraints as E_j(X) = C_j + M_j(X) >= 0.  For a minimization with
objective <C, X> the returned multipliers satisfy

    C = sum_i A_i^*(y_i) + sum_j M_j^*(Z_j),   Z_j >= 0,
    dual_value = sum_i <b_i, y_i> - sum_j <C_j, Z_j>   (<= primal_value),

and for a maximization

    C = sum_i A_i^*(y_i) - sum_j M_j^*(Z_j),   Z_j >= 0,
    dual_value = sum_i <b_i, y_i> + sum_j <C_j, Z_j>   (>= primal_value).

On infeasibility the dual variables hold a Farkas ray, independent of the
objective sense:

    sum_i A_i^*(y_i) + sum_j M_j^*(Z_j) = 0,   Z_j >= 0,
    sum_i <b_i, y_i> - sum_j <C_j, Z_j> = 1.

Every such ray is checked numerically before ``Infeasible`` is reported.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import clarabel
import numpy as np
import scipy.sparse as sp

from .linalg import as_hermitian, hermitian_basis, hermitian_part, herm_to_vec, vec_to_herm

FEAS_TOL = 1e-8
GAP_TOL = 1e-7
FARKAS_TOL = 1e-7

Map = Callable[[np.ndarray], np.ndarray]
Terms = Sequence[Tuple[str, Map]]


def default_gap_tol() -> float:
    """gap_tol, overridable through the QMAJ_SOLVER_TOL environment variable."""
    raw = os.environ.get("QMAJ_SOLVER_TOL")
    if raw:
        try:
            val = float(raw)
        except ValueError:
            raise ValueError(f"QMAJ_SOLVER_TOL is not a number: {raw!r}") from None
        if not (val > 0 and np.isfinite(val)):
            raise ValueError(f"QMAJ_SOLVER_TOL must be positive, got {raw!r}")
        return val
    return GAP_TOL


def embed_complex(H) -> np.ndarray:
    """Real symmetric embedding [[Re H, -Im H], [Im H, Re H]] of a Hermitian matrix."""
    H = np.asarray(H, dtype=complex)
    return np.block([[H.real, -H.imag], [H.imag, H.real]])


def unembed(S) -> np.ndarray:
    """Adjoint of :func:`embed_complex`: <S, embed(E)> = Re Tr(unembed(S) E)."""
    S = np.asarray(S, dtype=float)
    m = S.shape[0] // 2
    S11, S12, S21, S22 = S[:m, :m], S[:m, m:], S[m:, :m], S[m:, m:]
    return hermitian_part((S11 + S22) + 1j * (S21 - S12))


def _svec_index(n: int):
    rows, cols = np.triu_indices(n)
    order = np.lexsort((rows, cols))  # column-major upper triangle
    rows, cols = rows[order], cols[order]
    scale = np.where(rows == cols, 1.0, np.sqrt(2.0))
    return rows, cols, scale


def svec(S) -> np.ndarray:
    """Scaled upper-triangle vectorization (Clarabel's PSD triangle layout).

    Accepts a stack (..., n, n).
    """
    S = np.asarray(S, dtype=float)
    rows, cols, scale = _svec_index(S.shape[-1])
    return S[..., rows, cols] * scale


def smat(v, n: int) -> np.ndarray:
    rows, cols, scale = _svec_index(n)
    S = np.zeros((n, n))
    S[rows, cols] = v / scale
    S[cols, rows] = v / scale
    return S


def _embed_stack(H: np.ndarray) -> np.ndarray:
    return np.concatenate(
        [np.concatenate([H.real, -H.imag], axis=-1),
         np.concatenate([H.imag, H.real], axis=-1)], axis=-2)


@dataclass
class _Constraint:
    name: str
    terms: List[Tuple[str, Map]]
    const: np.ndarray
    dim: int


@dataclass
class SdpProblem:
    """Linear objective over Hermitian variables with equality and PSD constraints.

    Maps in constraint terms must be real-linear and send Hermitian matrices
    to Hermitian matrices.  They are sampled on a basis during assembly.
    """

    sense: str = "min"
    variables: Dict[str, int] = field(default_factory=dict)
    objective: List[Tuple[str, np.ndarray]] = field(default_factory=list)
    offset: float = 0.0
    eq_constraints: List[_Constraint] = field(default_factory=list)
    psd_constraints: List[_Constraint] = field(default_factory=list)

    def __post_init__(self):
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")

    def variable(self, name: str, dim: int, psd: bool = False) -> str:
        if name in self.variables:
            raise ValueError(f"duplicate variable {name!r}")
        if dim < 1:
            raise ValueError("variable dimension must be positive")
        self.variables[name] = int(dim)
        if psd:
            self.add_psd(f"{name}>=0", [(name, _identity_map)])
        return name

    def add_objective(self, var: str, C) -> None:
        """Add the term Re Tr(C X_var)."""
        self._check_var(var)
        C = as_hermitian(C, "objective coefficient")
        if C.shape[0] != self.variables[var]:
            raise ValueError(f"objective coefficient for {var!r} has wrong dimension")
        self.objective.append((var, C))

    def add_eq(self, name: str, terms: Terms, rhs) -> None:
        """sum_k map_k(X_{var_k}) = rhs."""
        rhs = as_hermitian(np.atleast_2d(rhs), f"rhs of {name}")
        self._check_terms(name, terms)
        self.eq_constraints.append(_Constraint(name, list(terms), rhs, rhs.shape[0]))

    def add_psd(self, name: str, terms: Terms, const=None, dim: Optional[int] = None) -> None:
        """const + sum_k map_k(X_{var_k}) >= 0."""
        self._check_terms(name, terms)
        if const is None:
            if dim is None:
                X0 = np.zeros((self.variables[terms[0][0]],) * 2, dtype=complex)
                dim = np.atleast_2d(terms[0][1](X0)).shape[0]
            const = np.zeros((dim, dim), dtype=complex)
        const = as_hermitian(np.atleast_2d(const), f"constant of {name}")
        self.psd_constraints.append(_Constraint(name, list(terms), const, const.shape[0]))

    def _check_var(self, var: str) -> None:
        if var not in self.variables:
            raise ValueError(f"undeclared variable {var!r}")

    def _check_terms(self, name: str, terms: Terms) -> None:
        if not terms:
            raise ValueError(f"constraint {name!r} has no terms")
        names = {c.name for c in self.eq_constraints + self.psd_constraints}
        if name in names:
            raise ValueError(f"duplicate constraint name {name!r}")
        for var, _ in terms:
            self._check_var(var)


def _identity_map(X):
    return X


@dataclass
class SdpSolution:
    status: str
    primal_value: float
    dual_value: float
    primal_vars: Dict[str, np.ndarray]
    dual_vars: Dict[str, np.ndarray]
    gap: float
    iterations: int = 0
    solve_time: float = 0.0
    solver_status: str = ""
    residuals: Dict[str, float] = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == "Optimal"


class _Assembly:
    def __init__(self, p: SdpProblem):
        self.p = p
        self.offsets: Dict[str, Tuple[int, int]] = {}
        col = 0
        for name, n in p.variables.items():
            self.offsets[name] = (col, n)
            col += n * n
        self.n_cols = col
        self._basis = {n: hermitian_basis(n) for n in set(p.variables.values())}

    def _map_columns(self, con: _Constraint, to_rows: Callable) -> np.ndarray:
        block = np.zeros((to_rows(np.zeros((1, con.dim, con.dim), complex)).shape[-1],
                          self.n_cols))
        for var, fn in con.terms:
            start, n = self.offsets[var]
            outs = np.stack([np.atleast_2d(fn(G)) for G in self._basis[n]])
            if outs.shape[1:] != (con.dim, con.dim):
                raise ValueError(f"map in {con.name!r} returns shape {outs.shape[1:]}, "
                                 f"expected {(con.dim, con.dim)}")
            block[:, start:start + n * n] += to_rows(outs).T
        return block

    def build(self):
        p = self.p
        q = np.zeros(self.n_cols)
        for var, C in p.objective:
            start, n = self.offsets[var]
            q[start:start + n * n] += herm_to_vec(C)
        if p.sense == "max":
            q = -q
        rows_A, rows_b, cones = [], [], []
        self.eq_slices, self.psd_slices = [], []
        r = 0
        eq_total = 0
        for con in p.eq_constraints:
            blk = self._map_columns(con, herm_to_vec)
            rows_A.append(blk)
            rows_b.append(herm_to_vec(con.const))
            self.eq_slices.append((r, r + blk.shape[0]))
            r += blk.shape[0]
            eq_total += blk.shape[0]
        if eq_total:
            cones.append(clarabel.ZeroConeT(eq_total))
        for con in p.psd_constraints:
            blk = -self._map_columns(con, lambda H: svec(_embed_stack(H)))
            rows_A.append(blk)
            rows_b.append(svec(embed_complex(con.const)))
            self.psd_slices.append((r, r + blk.shape[0]))
            r += blk.shape[0]
            cones.append(clarabel.PSDTriangleConeT(2 * con.dim))
        A = np.vstack(rows_A) if rows_A else np.zeros((0, self.n_cols))
        b = np.concatenate(rows_b) if rows_b else np.zeros(0)
        return q, A, b, cones

    def unpack_primal(self, x) -> Dict[str, np.ndarray]:
        out = {}
        for name, (start, n) in self.offsets.items():
            out[name] = vec_to_herm(x[start:start + n * n], n)
        return out

    def unpack_dual(self, z, sign_eq: float):
        duals = {}
        for con, (a, b) in zip(self.p.eq_constraints, self.eq_slices):
            duals[con.name] = sign_eq * vec_to_herm(z[a:b], con.dim)
        for con, (a, b) in zip(self.p.psd_constraints, self.psd_slices):
            duals[con.name] = unembed(smat(z[a:b], 2 * con.dim))
        return duals


def _eval(con: _Constraint, X: Dict[str, np.ndarray]) -> np.ndarray:
    out = np.zeros((con.dim, con.dim), dtype=complex)
    for var, fn in con.terms:
        out = out + np.atleast_2d(fn(X[var]))
    return out


def _solver_settings(tol: float, max_iter: int):
    s = clarabel.DefaultSettings()
    s.verbose = False
    s.max_iter = max_iter
    s.max_threads = 1
    inner = min(1e-9, 0.01 * tol)
    s.tol_gap_abs = inner
    s.tol_gap_rel = inner
    s.tol_feas = 1e-9
    s.tol_infeas_abs = 1e-9
    s.tol_infeas_rel = 1e-9
    s.tol_ktratio = 1e-7
    return s


def solve(p: SdpProblem, tol: Optional[float] = None, max_iter: int = 300) -> SdpSolution:
    """Solve an :class:`SdpProblem` and certify the result.

    Statuses: ``Optimal`` (primal feasible within FEAS_TOL, duality gap within
    ``tol * (1 + |primal|)``), ``Infeasible`` (verified Farkas ray in
    ``dual_vars``), ``Unbounded``, or ``Inaccurate`` (anything that could
    not be certified; best iterates are still returned).
    """
    tol = default_gap_tol() if tol is None else float(tol)
    if not p.variables:
        raise ValueError("problem has no variables")
    sol = _attempt(p, p, tol, max_iter)
    res = sol.residuals
    if (sol.status == "Inaccurate" and sol.primal_vars and res.get("eq", np.inf) <= FEAS_TOL
            and FEAS_TOL < res.get("psd", np.inf) <= 1e3 * FEAS_TOL):
        # Interior-point iterates sometimes stall just outside the cone.  Solve
        # again with every PSD constraint tightened by a small multiple of its
        # scale; the result is then judged against the original data.
        margin = 1.5 * res["psd"]
        tight = _tightened(p, sol.primal_vars, margin)
        retry = _attempt(tight, p, tol, max_iter)
        if retry.status == "Optimal":
            return retry
    return sol


def _tightened(p: SdpProblem, X: Dict[str, np.ndarray], margin: float) -> SdpProblem:
    out = SdpProblem(p.sense, dict(p.variables), list(p.objective), p.offset,
                     list(p.eq_constraints), [])
    for con in p.psd_constraints:
        w = np.linalg.eigvalsh(hermitian_part(_eval(con, X) + con.const))
        shift = margin * max(1.0, float(np.max(np.abs(w))))
        out.psd_constraints.append(
            _Constraint(con.name, con.terms, con.const - shift * np.eye(con.dim), con.dim))
    return out


def _attempt(p_solve: SdpProblem, p: SdpProblem, tol: float, max_iter: int) -> SdpSolution:
    """Run the solver on ``p_solve`` and certify the iterate against ``p``."""
    asm = _Assembly(p_solve)
    q, A, b, cones = asm.build()
    t0 = time.perf_counter()
    solver = clarabel.DefaultSolver(
        sp.csc_matrix((asm.n_cols, asm.n_cols)), q, sp.csc_matrix(A), b, cones,
        _solver_settings(tol, max_iter))
    res = solver.solve()
    elapsed = time.perf_counter() - t0
    raw = str(res.status)
    x = np.asarray(res.x, dtype=float)
    z = np.asarray(res.z, dtype=float)
    sign_eq = -1.0 if p.sense == "min" else 1.0

    if raw in ("PrimalInfeasible", "AlmostPrimalInfeasible"):
        return _farkas(p, asm, A, b, z, raw, res, elapsed)
    if raw in ("DualInfeasible", "AlmostDualInfeasible"):
        return SdpSolution("Unbounded", -np.inf if p.sense == "min" else np.inf, np.nan,
                           {}, {}, np.inf, res.iterations, elapsed, raw)

    X = asm.unpack_primal(np.nan_to_num(x))
    duals = asm.unpack_dual(np.nan_to_num(z), sign_eq)
    primal = p.offset + sum(float(np.real(np.vdot(C, X[v]))) for v, C in p.objective)
    dual = p.offset
    for con in p.eq_constraints:
        dual += float(np.real(np.vdot(con.const, duals[con.name])))
    psd_sign = -1.0 if p.sense == "min" else 1.0
    for con in p.psd_constraints:
        dual += psd_sign * float(np.real(np.vdot(con.const, duals[con.name])))
    gap = abs(primal - dual)

    eq_res = 0.0
    for con in p.eq_constraints:
        r = np.linalg.norm(_eval(con, X) - con.const)
        eq_res = max(eq_res, r / (1.0 + np.linalg.norm(con.const)))
    psd_res = 0.0
    for con in p.psd_constraints:
        w = np.linalg.eigvalsh(hermitian_part(_eval(con, X) + con.const))
        psd_res = max(psd_res, -w[0] / max(1.0, float(np.max(np.abs(w)))))
    residuals = {"eq": float(eq_res), "psd": float(psd_res)}

    ok = (raw in ("Solved", "AlmostSolved") and np.all(np.isfinite(x))
          and gap <= tol * (1.0 + abs(primal))
          and eq_res <= FEAS_TOL and psd_res <= FEAS_TOL)
    status = "Optimal" if ok else "Inaccurate"
    return SdpSolution(status, primal, dual, X, duals, gap, res.iterations, elapsed, raw,
                       residuals)


def _farkas(p, asm, A, b, z, raw, res, elapsed) -> SdpSolution:
    # Clarabel ray: A'z = 0, b'z < 0, z in the dual cone.  Our convention uses
    # y = -z on equality rows and Z = unembed(smat(z)) on PSD rows.
    pairing = -float(b @ z)
    residual = float(np.linalg.norm(A.T @ z))
    scale = float(np.linalg.norm(z))
    duals = asm.unpack_dual(z, -1.0)
    psd_viol = 0.0
    for con in p.psd_constraints:
        Z = duals[con.name]
        w = np.linalg.eigvalsh(Z)
        psd_viol = max(psd_viol, -w[0] / max(1e-300, scale))
    ok = (np.all(np.isfinite(z)) and pairing > 0
          and residual <= FARKAS_TOL * max(pairing, 1e-300) * 1e3
          and residual <= FARKAS_TOL * scale
          and psd_viol <= FARKAS_TOL)
    if ok:
        duals = {k: v / pairing for k, v in duals.items()}
    residuals = {"farkas_residual": residual / max(pairing, 1e-300),
                 "farkas_psd": psd_viol}
    return SdpSolution("Infeasible" if ok else "Inaccurate", np.inf if p.sense == "min"
                       else -np.inf, np.nan, {}, duals, np.inf, res.iterations, elapsed,
                       raw, residuals)


__math__ = {
    "semidefinite programming with Farkas certificates": ["solve"],
}
__plumbing__ = ["default_gap_tol", "embed_complex", "unembed", "svec", "smat"]
__all__ = ["SdpProblem", "SdpSolution"] + [n for v in __math__.values() for n in v] + __plumbing__
