"""
Quantum channels represented by Choi matrices.

The Choi matrix of a linear map Phi from d_in to d_out dimensional
operators is ``J = sum_ij e_ij (x) Phi(e_ij)`` with the input factor first.
The action is recovered as ``Phi(rho) = Tr_in[(rho^T (x) I) J]``, so that for
every X on the input and Y on the output

    Tr(Y Phi(X)) = Tr(J (X^T (x) Y)).

That single pairing identity fixes every transpose used elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .linalg import (
    as_hermitian,
    as_square,
    check_dims,
    hermitian_part,
    is_psd,
    partial_trace,
    partial_transpose,
)

TP_TOL = 1e-8
EB_EXACT_MAX = 6


@dataclass(frozen=True, eq=False)
class Channel:
    """A linear map given by its Choi matrix (input factor first).

    ``ensemble`` is set only by :func:`eb_from_ensemble` and records the
    measure-and-prepare form ``(povm, states)`` that certifies the map is
    entanglement breaking.
    """

    d_in: int
    d_out: int
    choi: np.ndarray
    ensemble: Optional[Tuple[Tuple[np.ndarray, ...], Tuple[np.ndarray, ...]]] = field(
        default=None, repr=False)

    def __post_init__(self):
        if self.d_in < 1 or self.d_out < 1:
            raise ValueError("channel dimensions must be positive")
        J = as_hermitian(self.choi, "choi")
        if J.shape[0] != self.d_in * self.d_out:
            raise ValueError(
                f"choi has dimension {J.shape[0]}, expected {self.d_in * self.d_out}")
        J.setflags(write=False)
        object.__setattr__(self, "choi", J)

    @property
    def dims(self) -> Tuple[int, int]:
        return (self.d_in, self.d_out)

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)


@dataclass(frozen=True)
class ChannelFlags:
    cp: bool
    tp: bool
    tni: bool
    unital: bool
    eb: Optional[bool]

    @property
    def cptp(self) -> bool:
        return self.cp and self.tp


def _blocks(ch: Channel) -> np.ndarray:
    return ch.choi.reshape(ch.d_in, ch.d_out, ch.d_in, ch.d_out)


def choi_from_kraus(kraus: Sequence) -> Channel:
    """Choi matrix of rho -> sum_k K_k rho K_k^dagger."""
    ks = [np.asarray(K, dtype=complex) for K in kraus]
    if not ks:
        raise ValueError("need at least one Kraus operator")
    d_out, d_in = ks[0].shape
    if any(K.shape != (d_out, d_in) for K in ks):
        raise ValueError("Kraus operators have inconsistent shapes")
    # sum_ij e_ij (x) K e_ij K^dag = sum_k vec(K^T) vec(K^T)^dag with A-major order
    V = np.stack([K.T.reshape(-1) for K in ks], axis=1)
    return Channel(d_in, d_out, V @ V.conj().T)


def apply(ch: Channel, rho) -> np.ndarray:
    """Phi(rho) = Tr_in[(rho^T (x) I) J]."""
    rho = as_square(rho, "rho")
    if rho.shape[0] != ch.d_in:
        raise ValueError(f"input has dimension {rho.shape[0]}, channel expects {ch.d_in}")
    return np.einsum("ki,kcid->cd", rho, _blocks(ch))


def apply_to_factor(ch: Channel, rho, dims: Sequence[int], which: str = "B") -> np.ndarray:
    """(id (x) Phi)(rho) for ``which="B"`` or (Phi (x) id)(rho) for ``"A"``.

    The output lives on A (x) B' (or A' (x) B) with the channel's output
    dimension in place of the factor it acted on.
    """
    rho = as_square(rho, "rho")
    d_A, d_B = check_dims(rho, dims, "rho")
    R = rho.reshape(d_A, d_B, d_A, d_B)
    J = _blocks(ch)
    if which == "B":
        if d_B != ch.d_in:
            raise ValueError(f"factor B has dimension {d_B}, channel expects {ch.d_in}")
        out = np.einsum("abxy,bcyd->acxd", R, J)
        n = d_A * ch.d_out
    elif which == "A":
        if d_A != ch.d_in:
            raise ValueError(f"factor A has dimension {d_A}, channel expects {ch.d_in}")
        out = np.einsum("abxy,acxd->cbdy", R, J)
        n = ch.d_out * d_B
    else:
        raise ValueError(f"which must be 'A' or 'B', got {which!r}")
    return out.reshape(n, n)


def adjoint(ch: Channel) -> Channel:
    """Frobenius adjoint: Tr(Y Phi(X)) = Tr(Phi^dagger(Y) X)."""
    K = _blocks(ch).transpose(3, 2, 1, 0).reshape(ch.d_in * ch.d_out, -1)
    return Channel(ch.d_out, ch.d_in, K)


def compose(ch2: Channel, ch1: Channel) -> Channel:
    """Choi matrix of ch2 o ch1 (ch1 acts first)."""
    if ch1.d_out != ch2.d_in:
        raise ValueError(f"cannot compose: {ch1.d_out} != {ch2.d_in}")
    J = apply_to_factor(ch2, ch1.choi, (ch1.d_in, ch1.d_out), "B")
    return Channel(ch1.d_in, ch2.d_out, J)


def validate(ch: Channel, tol: float = TP_TOL) -> ChannelFlags:
    """Classify a channel.

    ``eb`` is exact (PPT test) when ``d_in * d_out <= 6``, True for channels
    built from an explicit measure-and-prepare ensemble, and None otherwise.
    """
    J = ch.choi
    cp = is_psd(J, tol)
    marg = partial_trace(J, ch.dims, "B")
    eye_in = np.eye(ch.d_in)
    tp = bool(np.linalg.norm(marg - eye_in) <= tol)
    tni = is_psd(eye_in - marg, tol)
    unital = bool(np.linalg.norm(apply(ch, eye_in) - np.eye(ch.d_out)) <= tol)
    if ch.ensemble is not None:
        eb: Optional[bool] = cp
    elif ch.d_in * ch.d_out <= EB_EXACT_MAX:
        eb = cp and is_psd(partial_transpose(J, ch.dims, "A"), tol)
    else:
        eb = None
    return ChannelFlags(cp=cp, tp=tp, tni=tni, unital=unital, eb=eb)


def eb_from_ensemble(povm: Sequence, states: Sequence, tol: float = TP_TOL) -> Channel:
    """Measure-and-prepare channel rho -> sum_j Tr(x_j rho) omega_j.

    The Choi matrix is ``sum_j x_j^T (x) omega_j``.
    """
    if len(povm) != len(states) or not povm:
        raise ValueError("povm and states must be nonempty lists of equal length")
    xs = tuple(as_hermitian(x, "povm element") for x in povm)
    ws = tuple(as_hermitian(w, "state") for w in states)
    d_in, d_out = xs[0].shape[0], ws[0].shape[0]
    if any(x.shape[0] != d_in for x in xs) or any(w.shape[0] != d_out for w in ws):
        raise ValueError("inconsistent dimensions in ensemble")
    for x in xs:
        if not is_psd(x, tol):
            raise ValueError("povm element is not PSD")
    if np.linalg.norm(sum(xs) - np.eye(d_in)) > tol:
        raise ValueError("povm elements do not sum to the identity")
    for w in ws:
        if not is_psd(w, tol) or abs(np.trace(w).real - 1.0) > tol:
            raise ValueError("prepared states must be density matrices")
    J = sum(np.kron(x.T, w) for x, w in zip(xs, ws))
    return Channel(d_in, d_out, J, ensemble=(xs, ws))


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def identity(d: int) -> Channel:
    v = np.eye(d, dtype=complex).reshape(-1)
    return Channel(d, d, np.outer(v, v))


def unitary(U) -> Channel:
    return choi_from_kraus([np.asarray(U, dtype=complex)])


def replacement(omega, d_in: Optional[int] = None) -> Channel:
    """rho -> Tr(rho) omega.  Defaults to d_in = dim(omega)."""
    omega = as_hermitian(omega, "omega")
    d_in = omega.shape[0] if d_in is None else int(d_in)
    return Channel(d_in, omega.shape[0], np.kron(np.eye(d_in), omega))


def depolarizing(d: int, p: float) -> Channel:
    """rho -> (1 - p) rho + p Tr(rho) I/d."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    J = (1.0 - p) * identity(d).choi + p * np.eye(d * d) / d
    return Channel(d, d, J)


def dephasing(d: int) -> Channel:
    """Complete dephasing in the computational basis."""
    J = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        J[i * d + i, i * d + i] = 1.0
    return Channel(d, d, J)


def scaled(ch: Channel, c: float) -> Channel:
    return Channel(ch.d_in, ch.d_out, c * ch.choi)


def difference(ch1: Channel, ch2: Channel) -> np.ndarray:
    """Choi matrix of ch1 - ch2 (a Hermitian-preserving map)."""
    if ch1.dims != ch2.dims:
        raise ValueError("channels have different dimensions")
    return hermitian_part(ch1.choi - ch2.choi)


def repair_cptp(J, dims: Sequence[int]) -> np.ndarray:
    """Round a nearly CPTP Choi matrix onto the CPTP set.

    Negative eigenvalues are clipped, then the input marginal is restored
    exactly by the congruence (M (x) I) J (M (x) I)^dagger with
    M = (Tr_out J)^(-1/2).
    """
    d_in, d_out = int(dims[0]), int(dims[1])
    w, V = np.linalg.eigh(hermitian_part(J))
    J = (V * np.clip(w, 0.0, None)) @ V.conj().T
    marg = partial_trace(J, (d_in, d_out), "B")
    mw, mV = np.linalg.eigh(hermitian_part(marg))
    if mw[0] <= 0:
        # a whole input direction was lost; mix in the replacement channel there
        J = J + np.kron(np.eye(d_in), np.eye(d_out) / d_out) * 1e-14
        marg = partial_trace(J, (d_in, d_out), "B")
        mw, mV = np.linalg.eigh(hermitian_part(marg))
    M = (mV * mw ** -0.5) @ mV.conj().T
    K = np.kron(M, np.eye(d_out))
    return hermitian_part(K @ J @ K.conj().T)


__math__ = {
    "Choi correspondence between maps and bipartite operators": [
        "apply", "choi_from_kraus", "validate"],
    "channel acting on one tensor factor": ["apply_to_factor"],
    "adjoint of a channel (unital map in the Heisenberg picture)": ["adjoint"],
    "entanglement-breaking (measure-and-prepare) channels": ["eb_from_ensemble"],
    "composition of channels": ["compose"],
}
__plumbing__ = [
    "identity", "unitary", "replacement", "depolarizing", "dephasing", "scaled",
    "difference", "repair_cptp",
]
__all__ = ["Channel", "ChannelFlags"] + [n for v in __math__.values() for n in v] + __plumbing__
