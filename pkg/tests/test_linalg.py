import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qmaj.linalg import (
    frobenius_inner, hermitian_part, is_psd, operator_norm, operator_schmidt, partial_trace,
    partial_transpose, realign, swap_factors, tensor, trace_norm,
)
from qmaj.oracle import random_density, random_unitary

from conftest import bell, random_herm


def test_tensor_identity_and_rank_one():
    assert np.allclose(tensor(np.eye(2), np.eye(2)), np.eye(4))
    assert np.allclose(tensor(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0]))


def test_tensor_index_formula(rng):
    A = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    B = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    T = tensor(A, B)
    for i, j, k, l in itertools.product(range(2), range(2), range(3), range(3)):
        assert np.isclose(T[i * 3 + k, j * 3 + l], A[i, j] * B[k, l], rtol=0, atol=1e-14)


def test_tensor_trace_and_associativity(rng):
    A, B, C = (random_herm(rng, d) for d in (2, 3, 2))
    assert np.isclose(np.trace(tensor(A, B)), np.trace(A) * np.trace(B))
    assert np.allclose(tensor(tensor(A, B), C), tensor(A, tensor(B, C)))


def test_partial_trace_examples(rng):
    r, s = random_density(2, seed=rng), random_density(3, seed=rng)
    assert np.allclose(partial_trace(np.kron(r, s), (2, 3), "B"), r)
    assert np.allclose(partial_trace(np.kron(r, s), (2, 3), "A"), s)
    assert np.allclose(partial_trace(np.eye(4), (2, 2), "A"), 2 * np.eye(2))
    for which in "AB":
        assert np.allclose(partial_trace(bell(), (2, 2), which), np.eye(2) / 2)


def test_partial_trace_against_loop(rng):
    X = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    ref_B = np.zeros((2, 2), dtype=complex)
    ref_A = np.zeros((3, 3), dtype=complex)
    for a, a2, b in itertools.product(range(2), range(2), range(3)):
        ref_B[a, a2] += X[a * 3 + b, a2 * 3 + b]
    for b, b2, a in itertools.product(range(3), range(3), range(2)):
        ref_A[b, b2] += X[a * 3 + b, a * 3 + b2]
    assert np.allclose(partial_trace(X, (2, 3), "B"), ref_B)
    assert np.allclose(partial_trace(X, (2, 3), "A"), ref_A)
    assert np.isclose(np.trace(partial_trace(X, (2, 3), "A")), np.trace(X))


def test_partial_trace_product_precision(rng):
    A, B = random_herm(rng, 3), random_density(2, seed=rng)
    out = partial_trace(tensor(A, B), (3, 2), "B")
    assert np.linalg.norm(out - np.trace(B) * A) <= 1e-12 * np.linalg.norm(A)


def test_partial_trace_dim_mismatch():
    with pytest.raises(ValueError):
        partial_trace(np.eye(5), (2, 2))


def test_operator_schmidt_product(rng):
    r, s = random_density(2, seed=rng), random_density(2, seed=rng)
    terms = operator_schmidt(np.kron(r, s), (2, 2), hermitian=False)
    assert len(terms) == 1
    assert np.isclose(terms[0][0], np.linalg.norm(r) * np.linalg.norm(s))


def test_operator_schmidt_bell_is_four_halves():
    terms = operator_schmidt(bell(), (2, 2), hermitian=False)
    assert np.allclose([c for c, _, _ in terms], [0.5] * 4)
    # independent oracle: singular values of the realigned matrix
    sv = np.linalg.svd(realign(bell(), (2, 2)), compute_uv=False)
    assert np.allclose(sv[:4], 0.5)


def test_operator_schmidt_reconstruction_and_orthonormality(rng):
    X = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    terms = operator_schmidt(X, (2, 2), hermitian=False)
    rec = sum(c * np.kron(a, b) for c, a, b in terms)
    assert np.linalg.norm(rec - X) <= 1e-10
    coeffs = [c for c, _, _ in terms]
    assert all(x >= y for x, y in zip(coeffs, coeffs[1:]))
    assert np.isclose(sum(c * c for c in coeffs), np.linalg.norm(X) ** 2)
    G = np.array([[frobenius_inner(a, b) for _, b, _ in terms] for _, a, _ in terms])
    assert np.allclose(G, np.eye(len(terms)))


def test_operator_schmidt_hermitian_factors(rng):
    X = random_herm(rng, 6)
    terms = operator_schmidt(X, (2, 3))
    for _, a, b in terms:
        assert np.allclose(a, a.conj().T) and np.allclose(b, b.conj().T)
    rec = sum(c * np.kron(a, b) for c, a, b in terms)
    assert np.linalg.norm(rec - X) <= 1e-10


def test_trace_norm_examples(rng):
    assert np.isclose(trace_norm(np.diag([1.0, -2.0])), 3.0)
    assert np.isclose(trace_norm(random_density(3, seed=rng)), 1.0)
    X = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    U, V = random_unitary(3, rng), random_unitary(3, rng)
    assert np.isclose(trace_norm(U @ X @ V), trace_norm(X))
    assert trace_norm(X) >= abs(np.trace(X)) - 1e-12


def test_is_psd_examples(rng):
    assert is_psd(np.eye(3), 1e-9)
    assert not is_psd(np.diag([1.0, -1e-3]), 1e-9)
    M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert is_psd(M.conj().T @ M, 1e-9)


def test_norms_and_parts(rng):
    assert np.isclose(operator_norm(np.diag([3.0, -5.0])), 5.0)
    H = random_herm(rng, 3)
    assert np.allclose(hermitian_part(1j * H), 0)
    X = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    v = frobenius_inner(X, X)
    assert abs(v.imag) < 1e-12 and np.isclose(v.real, np.linalg.norm(X) ** 2)


def test_swap_and_partial_transpose(rng):
    A, B = random_herm(rng, 2), random_herm(rng, 3)
    assert np.allclose(swap_factors(np.kron(A, B), (2, 3)), np.kron(B, A))
    assert np.allclose(partial_transpose(np.kron(A, B), (2, 3), "A"), np.kron(A.T, B))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2 ** 32 - 1))
def test_partial_trace_preserves_trace(dA, dB, seed):
    X = random_density(dA * dB, seed=seed)
    for which in "AB":
        assert np.isclose(np.trace(partial_trace(X, (dA, dB), which)), 1.0)
