import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize

from qmaj.channel import apply_to_factor, unitary
from qmaj.entropy import (
    SolverError, hmin, hmin_bounds, hmin_dual, lambda_bounds, lambda_selfadjoint, linfl1_norm,
)
from qmaj.linalg import partial_trace
from qmaj.majorize import pairing_value
from qmaj.oracle import grid_hmin, random_cptp, random_density, random_unitary, rng_from_seed

from conftest import bell, random_herm


def test_product_state_one_bit(rng):
    sigma = random_density(2, seed=rng)
    res = hmin(np.kron(np.eye(2) / 2, sigma), (2, 2))
    assert abs(res.value_bits - 1.0) <= 1e-6
    assert abs(res.lam - 0.5) <= 1e-6
    assert np.allclose(res.optimal_omega, sigma / 2, atol=1e-6)


def test_bell_state_minus_one_bit():
    res = hmin(bell(), (2, 2))
    assert abs(res.value_bits + 1.0) <= 1e-6
    assert abs(grid_hmin(bell(), (2, 2)) - 2.0) <= 1e-3
    val, X = hmin_dual(bell(), (2, 2))
    assert abs(val - 2.0) <= 1e-6
    assert np.allclose(X, 2 * bell(), atol=1e-5)


def test_trivial_A_system(rng):
    res = hmin(random_density(3, seed=rng), (1, 3))
    assert abs(res.lam - 1.0) <= 1e-7 and abs(res.value_bits) <= 1e-7


def test_result_invariants(rng):
    for _ in range(5):
        rho = random_density(6, seed=rng)
        res = hmin(rho, (2, 3))
        assert abs(res.lam * 2.0 ** res.value_bits - 1.0) <= 1e-9
        slack = np.kron(np.eye(2), res.optimal_omega) - rho
        assert np.linalg.eigvalsh(slack)[0] >= -1e-8
        assert np.real(np.trace(res.dual_X @ rho)) >= res.lam - res.gap - 1e-8
        assert np.allclose(partial_trace(res.dual_X, (2, 3), "A"), np.eye(3), atol=1e-7)


def test_dual_product_and_duality(rng):
    sigma = random_density(3, seed=rng)
    val, X = hmin_dual(np.kron(np.eye(3) / 3, sigma), (3, 3))
    assert abs(val - 1 / 3) <= 1e-6
    for _ in range(10):
        dA, dB = int(rng.integers(1, 4)), int(rng.integers(1, 4))
        rho = random_density(dA * dB, seed=rng)
        assert abs(hmin(rho, (dA, dB)).lam - hmin_dual(rho, (dA, dB))[0]) <= 1e-6


def test_grid_oracle_is_a_relaxation(rng):
    for _ in range(3):
        rho = random_density(4, seed=rng)
        g = grid_hmin(rho, (2, 2))
        assert g >= hmin(rho, (2, 2)).lam - 1e-3
        assert abs(g - hmin(rho, (2, 2)).lam) <= 1e-3
    assert abs(grid_hmin(np.kron(np.eye(3) / 3, random_density(2, seed=rng)), (3, 2)) - 1 / 3) <= 1e-3


def test_lambda_selfadjoint_examples(rng):
    assert abs(lambda_selfadjoint(-np.eye(6), (2, 3)) + 3.0) <= 1e-6
    x = 3.7 * random_density(4, seed=rng)
    assert abs(lambda_selfadjoint(x, (2, 2)) - 3.7 * hmin(x / 3.7, (2, 2)).lam) <= 1e-6
    a = random_herm(rng, 2)
    # closed form: 1 (x) omega >= a (x) 1 forces omega >= lambda_max(a) I
    val = lambda_selfadjoint(np.kron(a, np.eye(2)), (2, 2))
    assert abs(val - 2 * np.linalg.eigvalsh(a)[-1]) <= 1e-6


def test_lambda_subadditive(rng):
    for _ in range(10):
        x, y = random_herm(rng, 4), random_herm(rng, 4)
        lx, ly = lambda_selfadjoint(x, (2, 2)), lambda_selfadjoint(y, (2, 2))
        assert lambda_selfadjoint(x + y, (2, 2)) <= lx + ly + 1e-8


def test_linfl1_norm(rng):
    sigma = random_density(3, seed=rng)
    assert abs(linfl1_norm(np.kron(np.eye(2), sigma), (2, 3)) - 1.0) <= 1e-12
    assert abs(linfl1_norm(bell(), (2, 2)) - 0.5) <= 1e-12
    x = 2 * random_density(4, seed=rng)

    def value(p):
        a = (p[:4] + 1j * p[4:]).reshape(2, 2)
        a = a / np.linalg.norm(a)
        return np.real(np.trace(np.kron(a.conj().T @ a, np.eye(2)) @ x))

    starts = rng.standard_normal((2000, 8))
    vals = [value(p) for p in starts]
    res = minimize(lambda p: -value(p), starts[int(np.argmax(vals))], method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 5000})
    best = max(max(vals), -res.fun)
    v = linfl1_norm(x, (2, 2))
    assert best <= v + 1e-12 and v - best <= 1e-3
    with pytest.raises(ValueError):
        linfl1_norm(-np.eye(4), (2, 2))


def test_data_processing_and_unitary_equality(rng):
    for _ in range(10):
        rho = random_density(4, seed=rng)
        phi = random_cptp(2, 2, int(rng.integers(1, 4)), rng)
        before = hmin(rho, (2, 2)).value_bits
        assert hmin(apply_to_factor(phi, rho, (2, 2), "B"), (2, 2)).value_bits >= before - 1e-6
        U = unitary(random_unitary(2, rng))
        after = hmin(apply_to_factor(U, rho, (2, 2), "B"), (2, 2)).value_bits
        assert abs(after - before) <= 1e-6


def test_local_unitary_invariance(rng):
    rho = random_density(6, seed=rng)
    U = np.kron(random_unitary(2, rng), random_unitary(3, rng))
    a = hmin(rho, (2, 3)).value_bits
    b = hmin(U @ rho @ U.conj().T, (2, 3)).value_bits
    assert abs(a - b) <= 1e-7


def test_norm_coincidence_with_channel_pairing(rng):
    for _ in range(3):
        rho = random_density(4, seed=rng)
        assert abs(pairing_value(rho, (2, 2)) - hmin(rho, (2, 2)).lam) <= 2e-7


def test_bounds_bracket(rng):
    rho = random_density(6, seed=rng)
    lo, hi = lambda_bounds(rho, (3, 2))
    lam = hmin(rho, (3, 2)).lam
    assert lo <= lam + 1e-9 and lam <= hi + 1e-9 and hi - lo <= 1e-6
    hlo, hhi = hmin_bounds(rho, (3, 2))
    assert hlo <= hhi


def test_input_validation():
    with pytest.raises(ValueError):
        hmin(np.eye(4), (2, 2))
    with pytest.raises(ValueError):
        hmin(np.eye(4) / 4, (2, 3))
    assert issubclass(SolverError, RuntimeError)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_hmin_range(seed):
    rho = random_density(4, seed=rng_from_seed(seed))
    v = hmin(rho, (2, 2)).value_bits
    assert -1 - 1e-6 <= v <= 1 + 1e-6
