"""
Dense complex-matrix kernel for operators on a bipartite space A (x) B.

All bipartite operators use the row-major, A-major index convention: the
basis vector |a>|b> has index ``a * d_B + b``.  Every function that needs a
tensor split takes ``dims = (d_A, d_B)`` explicitly.
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

HERM_TOL = 1e-10
SCHMIDT_DROP = 1e-12

Dims = Tuple[int, int]


def as_square(X, name: str = "X") -> np.ndarray:
    """Return ``X`` as a finite square complex array or raise ``ValueError``."""
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} has non-finite entries")
    return X


def check_dims(X: np.ndarray, dims: Sequence[int], name: str = "X") -> Dims:
    d_A, d_B = int(dims[0]), int(dims[1])
    if d_A < 1 or d_B < 1:
        raise ValueError(f"dimensions must be positive, got {dims}")
    if X.shape[0] != d_A * d_B:
        raise ValueError(
            f"{name} has dimension {X.shape[0]}, expected d_A*d_B = {d_A * d_B}"
        )
    return d_A, d_B


def hermitian_part(X) -> np.ndarray:
    """(X + X^dagger) / 2."""
    X = np.asarray(X, dtype=complex)
    return 0.5 * (X + X.conj().T)


def is_hermitian(X, tol: float = HERM_TOL) -> bool:
    X = np.asarray(X, dtype=complex)
    scale = np.linalg.norm(X)
    return bool(np.linalg.norm(X - X.conj().T) <= tol * max(scale, 1e-300))


def as_hermitian(X, name: str = "X", tol: float = HERM_TOL) -> np.ndarray:
    """Validate Hermiticity to relative tolerance ``tol``.

    Inputs outside the tolerance are rejected.  Inputs inside it are returned
    with the round-off skew part removed.
    """
    X = as_square(X, name)
    if not is_hermitian(X, tol):
        raise ValueError(f"{name} is not Hermitian within relative tolerance {tol:g}")
    return hermitian_part(X)


def tensor(A, B) -> np.ndarray:
    """Kronecker product with (A (x) B)[i*dB + k, j*dB + l] = A[i, j] * B[k, l]."""
    return np.kron(np.asarray(A, dtype=complex), np.asarray(B, dtype=complex))


def partial_trace(X, dims: Sequence[int], which: str = "B") -> np.ndarray:
    """Trace out one factor of an operator on A (x) B.

    :param X: operator of dimension d_A * d_B
    :param dims: (d_A, d_B)
    :param which: ``"A"`` returns Tr_A X (d_B x d_B), ``"B"`` returns Tr_B X
    """
    X = as_square(X)
    d_A, d_B = check_dims(X, dims)
    T = X.reshape(d_A, d_B, d_A, d_B)
    if which == "A":
        return np.einsum("abad->bd", T)
    if which == "B":
        return np.einsum("abcb->ac", T)
    raise ValueError(f"which must be 'A' or 'B', got {which!r}")


def partial_transpose(X, dims: Sequence[int], which: str = "A") -> np.ndarray:
    X = as_square(X)
    d_A, d_B = check_dims(X, dims)
    T = X.reshape(d_A, d_B, d_A, d_B)
    if which == "A":
        T = T.transpose(2, 1, 0, 3)
    elif which == "B":
        T = T.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"which must be 'A' or 'B', got {which!r}")
    return T.reshape(d_A * d_B, d_A * d_B)


def swap_factors(X, dims: Sequence[int]) -> np.ndarray:
    """Conjugate by the swap A (x) B -> B (x) A."""
    X = as_square(X)
    d_A, d_B = check_dims(X, dims)
    T = X.reshape(d_A, d_B, d_A, d_B).transpose(1, 0, 3, 2)
    return T.reshape(d_A * d_B, d_A * d_B)


def realign(X, dims: Sequence[int]) -> np.ndarray:
    """Realignment R[(i,j),(k,l)] = X[(i,k),(j,l)], a d_A^2 x d_B^2 matrix."""
    X = as_square(X)
    d_A, d_B = check_dims(X, dims)
    T = X.reshape(d_A, d_B, d_A, d_B).transpose(0, 2, 1, 3)
    return T.reshape(d_A * d_A, d_B * d_B)


# ---------------------------------------------------------------------------
# Hermitian coordinates
# ---------------------------------------------------------------------------


def hermitian_basis(d: int) -> np.ndarray:
    """Frobenius-orthonormal basis of d x d Hermitian matrices, shape (d^2, d, d).

    Order: diagonal units, then symmetric off-diagonal pairs, then
    antisymmetric (imaginary) pairs, both over the strict upper triangle in
    row-major order.  Matches :func:`herm_to_vec`.
    """
    basis = np.zeros((d * d, d, d), dtype=complex)
    for k in range(d):
        basis[k, k, k] = 1.0
    iu, ju = np.triu_indices(d, 1)
    m = len(iu)
    s = 1.0 / np.sqrt(2.0)
    for t, (i, j) in enumerate(zip(iu, ju)):
        basis[d + t, i, j] = s
        basis[d + t, j, i] = s
        basis[d + m + t, i, j] = 1j * s
        basis[d + m + t, j, i] = -1j * s
    return basis


def herm_to_vec(X) -> np.ndarray:
    """Real coordinates of a Hermitian matrix in :func:`hermitian_basis`.

    Works on stacks: input (..., d, d) gives output (..., d^2).  The map is
    an isometry, so <vec X, vec Y> = Re Tr(X Y) for Hermitian X, Y.
    """
    X = np.asarray(X, dtype=complex)
    d = X.shape[-1]
    iu, ju = np.triu_indices(d, 1)
    diag = np.real(np.diagonal(X, axis1=-2, axis2=-1))
    off = X[..., iu, ju]
    r2 = np.sqrt(2.0)
    return np.concatenate([diag, r2 * off.real, r2 * off.imag], axis=-1)


def vec_to_herm(v, d: int) -> np.ndarray:
    """Inverse of :func:`herm_to_vec`."""
    v = np.asarray(v, dtype=float)
    iu, ju = np.triu_indices(d, 1)
    m = len(iu)
    X = np.zeros(v.shape[:-1] + (d, d), dtype=complex)
    idx = np.arange(d)
    X[..., idx, idx] = v[..., :d]
    off = (v[..., d:d + m] + 1j * v[..., d + m:]) / np.sqrt(2.0)
    X[..., iu, ju] = off
    X[..., ju, iu] = off.conj()
    return X


# ---------------------------------------------------------------------------
# Operator-Schmidt decomposition
# ---------------------------------------------------------------------------


def operator_schmidt(X, dims: Sequence[int], hermitian: bool | None = None
                     ) -> List[Tuple[float, np.ndarray, np.ndarray]]:
    """Operator-Schmidt decomposition across the A|B cut.

    Returns a list of ``(coeff, A_j, B_j)`` with ``X = sum coeff_j A_j (x) B_j``,
    Frobenius-orthonormal families ``{A_j}`` and ``{B_j}``, and coefficients in
    nonincreasing order (the singular values of the realignment of X).

    For Hermitian X the factors are chosen Hermitian: X is expanded in
    Hermitian orthonormal bases of both factors, where its coefficient
    matrix is real, and the real SVD of that matrix gives the terms.
    Terms with coefficient below ``1e-12 * coeff_max`` are dropped.

    :param hermitian: force (True) or skip (False) the Hermitian branch;
        by default it is used when X passes the Hermiticity test
    """
    X = as_square(X)
    d_A, d_B = check_dims(X, dims)
    if hermitian is None:
        hermitian = is_hermitian(X)
    if hermitian:
        GA = hermitian_basis(d_A)
        GB = hermitian_basis(d_B)
        T = hermitian_part(X).reshape(d_A, d_B, d_A, d_B)
        # M[alpha, beta] = Tr((G_alpha (x) H_beta) X), real for Hermitian X
        M = np.einsum("xji,ylk,ikjl->xy", GA, GB, T).real
        U, s, Vt = np.linalg.svd(M, full_matrices=False)
        A_terms = np.einsum("xj,xab->jab", U, GA)
        B_terms = np.einsum("jy,yab->jab", Vt, GB)
    else:
        U, s, Vh = np.linalg.svd(realign(X, (d_A, d_B)), full_matrices=False)
        A_terms = U.T.reshape(-1, d_A, d_A)
        B_terms = Vh.reshape(-1, d_B, d_B)
    if s.size == 0 or s[0] == 0.0:
        return []
    keep = s >= SCHMIDT_DROP * s[0]
    return [(float(c), a, b) for c, a, b in zip(s[keep], A_terms[keep], B_terms[keep])]


# ---------------------------------------------------------------------------
# Norms and order
# ---------------------------------------------------------------------------


def trace_norm(X) -> float:
    """Sum of singular values."""
    X = np.asarray(X, dtype=complex)
    if X.size == 0:
        return 0.0
    if is_hermitian(X, 1e-14):
        return float(np.sum(np.abs(np.linalg.eigvalsh(hermitian_part(X)))))
    return float(np.sum(np.linalg.svd(X, compute_uv=False)))


def operator_norm(X) -> float:
    """Largest singular value."""
    X = np.asarray(X, dtype=complex)
    if X.size == 0:
        return 0.0
    return float(np.linalg.norm(X, 2))


def frobenius_inner(X, Y) -> complex:
    """<X, Y> = Tr(X^dagger Y)."""
    return complex(np.vdot(np.asarray(X, dtype=complex), np.asarray(Y, dtype=complex)))


def lambda_min(X) -> float:
    return float(np.linalg.eigvalsh(hermitian_part(X))[0])


def lambda_max(X) -> float:
    return float(np.linalg.eigvalsh(hermitian_part(X))[-1])


def is_psd(X, tol: float = 1e-9) -> bool:
    """True iff lambda_min(X) >= -tol * max(1, ||X||_inf)."""
    X = as_square(X)
    H = hermitian_part(X)
    w = np.linalg.eigvalsh(H)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
    return bool(w[0] >= -tol * scale)


def positive_part(X) -> np.ndarray:
    w, V = np.linalg.eigh(hermitian_part(X))
    return (V * np.clip(w, 0.0, None)) @ V.conj().T


def psd_project(X) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm (clip negative eigenvalues)."""
    return positive_part(X)


def psd_power(X, p: float, floor: float = 0.0) -> np.ndarray:
    """X^p for PSD X on its support, eigenvalues below ``floor`` discarded."""
    w, V = np.linalg.eigh(hermitian_part(X))
    keep = w > floor
    wp = np.zeros_like(w)
    wp[keep] = w[keep] ** p
    return (V * wp) @ V.conj().T


def support_projector(X, tol: float = 1e-12) -> np.ndarray:
    w, V = np.linalg.eigh(hermitian_part(X))
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
    Vk = V[:, w > tol * scale]
    return Vk @ Vk.conj().T


def max_entangled(d: int, normalized: bool = True) -> np.ndarray:
    """Projector onto sum_i |ii>, normalized to trace one unless told otherwise."""
    v = np.eye(d, dtype=complex).reshape(d * d)
    P = np.outer(v, v.conj())
    return P / d if normalized else P


__math__ = {
    "reduced state of a bipartite operator": ["partial_trace"],
    "finite sum of product operators (Hermitian operator-Schmidt form)": ["operator_schmidt"],
    "Schatten-1 norm": ["trace_norm"],
    "operator norm and real part": ["operator_norm", "hermitian_part"],
}
__plumbing__ = [
    "tensor", "partial_transpose", "swap_factors", "realign", "hermitian_basis",
    "herm_to_vec", "vec_to_herm", "is_psd", "frobenius_inner", "positive_part",
    "support_projector", "max_entangled", "psd_power", "psd_project", "check_dims",
    "as_square", "as_hermitian", "is_hermitian", "lambda_min", "lambda_max",
]
__all__ = [n for names in __math__.values() for n in names] + __plumbing__
