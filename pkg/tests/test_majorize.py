import numpy as np
import pytest

from qmaj.channel import apply, apply_to_factor, identity, replacement, validate
from qmaj.entropy import hmin
from qmaj.linalg import partial_trace, trace_norm
from qmaj.majorize import (
    DECISION_TOL, WITNESS_MIN_GAP, FamilyInstance, classical_embedding, contraction,
    convert_family, extract_witness, finite_subfamily_scan, is_majorized, lift_map,
    positive_split, sup_pairing, verify_family_witness, witness_gap,
)
from qmaj.oracle import (
    kraus_apply_to_factor, random_cptp, random_density, random_entangled, random_kraus,
    random_unitary, search_pairing,
)

from conftest import bell, ket, proj, random_herm

PI2 = np.eye(2) / 2


def _check_witness(dec, rho, sigma, dims):
    wit = dec.witness
    assert validate(wit.eb_channel).cptp and validate(wit.eb_channel).eb
    # independent recomputation through the plain hmin solver
    r2 = apply_to_factor(wit.eb_channel, rho, dims, "A")
    s2 = apply_to_factor(wit.eb_channel, sigma, dims, "A")
    k = wit.eb_channel.d_out
    gap = hmin(r2, (k, dims[1])).value_bits - hmin(s2, (k, dims[1])).value_bits
    assert gap >= WITNESS_MIN_GAP
    return gap


def test_identical_states_majorized(rng):
    rho = random_density(4, seed=rng)
    dec = is_majorized(rho, rho, (2, 2))
    assert dec.verdict == "Majorized" and dec.feas_residual <= 1e-8
    assert validate(dec.channel).cptp


def test_replacement_target_majorized(rng):
    rho = random_density(6, seed=rng)
    w = random_density(3, seed=rng)
    sigma = np.kron(partial_trace(rho, (2, 3), "B"), w)
    dec = is_majorized(rho, sigma, (2, 3))
    assert dec.verdict == "Majorized"
    assert trace_norm(apply_to_factor(dec.channel, rho, (2, 3), "B") - sigma) <= DECISION_TOL


def test_mixed_to_entangled_not_majorized():
    rho = np.eye(4) / 4
    dec = is_majorized(rho, bell(), (2, 2))
    assert dec.verdict == "NotMajorized" and dec.witness_gap > 0
    gap = _check_witness(dec, rho, bell(), (2, 2))
    assert abs(gap - dec.witness_gap) <= 1e-6


def test_planted_feasible_small_batch(rng):
    for _ in range(10):
        rho = random_density(4, int(rng.integers(1, 5)), rng)
        phi = random_cptp(2, 2, int(rng.integers(1, 4)), rng)
        sigma = apply_to_factor(phi, rho, (2, 2), "B")
        dec = is_majorized(rho, sigma, (2, 2))
        assert dec.verdict == "Majorized"
        assert trace_norm(apply_to_factor(dec.channel, rho, (2, 2), "B") - sigma) <= 1e-6


def test_equal_marginal_instance_uses_deficit_branch(rng):
    sigma = random_entangled(2, 2, rng)
    rho = np.kron(partial_trace(sigma, (2, 2), "B"), random_density(2, seed=rng))
    dec = is_majorized(rho, sigma, (2, 2))
    assert dec.verdict == "NotMajorized"
    assert dec.witness.branch.startswith("dump")
    _check_witness(dec, rho, sigma, (2, 2))


def test_unequal_marginals_use_marginal_branch(rng):
    rho = random_density(4, seed=rng)
    sigma = random_density(4, seed=rng)
    dec = is_majorized(rho, sigma, (2, 2))
    assert dec.verdict == "NotMajorized" and dec.witness.branch == "marginal"
    _check_witness(dec, rho, sigma, (2, 2))


def test_factor_A_flag(rng):
    rho = random_density(4, seed=rng)
    phi = random_cptp(2, 2, 2, rng)
    sigma = apply_to_factor(phi, rho, (2, 2), "A")
    dec = is_majorized(rho, sigma, (2, 2), factor="A")
    assert dec.verdict == "Majorized" and dec.factor == "A"
    assert trace_norm(apply_to_factor(dec.channel, rho, (2, 2), "A") - sigma) <= 1e-6
    with pytest.raises(ValueError):
        is_majorized(rho, sigma, (2, 2), factor="C")


def test_local_unitary_covariance(rng):
    for planted in (True, False):
        if planted:
            rho = random_density(4, seed=rng)
            sigma = apply_to_factor(random_cptp(2, 2, 2, rng), rho, (2, 2), "B")
        else:
            sigma = random_entangled(2, 2, rng)
            rho = np.kron(partial_trace(sigma, (2, 2), "B"), random_density(2, seed=rng))
        U, V, V2 = (random_unitary(2, rng) for _ in range(3))
        L1, L2 = np.kron(U, V), np.kron(U, V2)
        d1 = is_majorized(rho, sigma, (2, 2))
        d2 = is_majorized(L1 @ rho @ L1.conj().T, L2 @ sigma @ L2.conj().T, (2, 2))
        assert d1.verdict == d2.verdict
        if planted:
            # the rotated problem is solved by V2 Phi(V^dag . V) V2^dag
            out = apply_to_factor(d2.channel, L1 @ rho @ L1.conj().T, (2, 2), "B")
            assert trace_norm(out - L2 @ sigma @ L2.conj().T) <= 1e-6


def test_lift_map_and_contraction(rng):
    rho = random_density(6, seed=rng)
    ks = random_kraus(3, 2, 2, rng)
    phi = random_cptp(3, 2, 2, rng)
    L = lift_map(rho, (2, 3), 2)
    from qmaj.channel import choi_from_kraus
    J = choi_from_kraus(ks).choi
    assert np.allclose(L(J), kraus_apply_to_factor(ks, rho, (2, 3), "B"))
    W = random_herm(rng, 4)
    M = contraction(W, rho, (2, 3), 2)
    direct = np.trace(W @ apply_to_factor(phi, rho, (2, 3), "B"))
    assert abs(np.vdot(M, phi.choi) - direct) <= 1e-10


def test_sup_pairing_examples(rng):
    rho = random_density(4, seed=rng)
    assert abs(sup_pairing(np.eye(4), rho, (2, 2)).value - 1.0) <= 1e-7
    sigma = random_density(4, seed=rng)
    P = proj(np.linalg.eigh(sigma)[1][:, -1])
    assert sup_pairing(P, sigma, (2, 2)).value >= np.trace(P @ sigma).real - 1e-8
    W = random_herm(rng, 4)
    res = sup_pairing(W, rho, (2, 2))
    sampled = search_pairing(W, rho, (2, 2), 1000, seed=rng)
    assert sampled <= res.value + 1e-7
    assert res.value <= res.upper + 1e-6
    assert abs(np.trace(W @ apply_to_factor(res.channel, rho, (2, 2), "B")) - res.value) <= 1e-8


def test_shift_cancels_in_separation(rng):
    sigma = random_entangled(2, 2, rng)
    rho = np.kron(partial_trace(sigma, (2, 2), "B"), random_density(2, seed=rng))
    W = random_herm(rng, 4)
    K, pairs = positive_split(W, (2, 2))
    W4 = sum(np.kron(c, d) for c, d in pairs)
    assert np.linalg.norm(W4 - W - K * np.eye(4)) <= 1e-10
    s1 = np.trace(W @ sigma).real - sup_pairing(W, rho, (2, 2), tol=1e-10).value
    s4 = np.trace(W4 @ sigma).real - sup_pairing(W4, rho, (2, 2), tol=1e-10).value
    assert abs(s1 - s4) <= 1e-8 * max(1.0, K)


def test_positive_split_no_shift_for_positive_product(rng):
    a, b = random_density(2, seed=rng), random_density(2, seed=rng)
    K, pairs = positive_split(3 * np.kron(a, b), (2, 2))
    assert K == 0.0 and len(pairs) == 1
    assert np.allclose(np.kron(*pairs[0]), 3 * np.kron(a, b))


def test_extract_witness_from_dual(rng):
    rho = np.eye(4) / 4
    W = bell()  # Tr(W sigma) = 1 > sup over local channels = 1/2
    wit = extract_witness(W, rho, bell(), (2, 2))
    h_r, h_s = witness_gap(wit.eb_channel, rho, bell(), (2, 2))
    assert h_r - h_s >= WITNESS_MIN_GAP


def test_family_examples(rng):
    rhos = [random_density(2, seed=rng) for _ in range(3)]
    dec = convert_family(FamilyInstance(tuple((r, r) for r in rhos)))
    assert dec.verdict == "Majorized"
    e0, e1 = proj(ket(1, 0)), proj(ket(0, 1))
    target = proj(ket(1, 1j))
    assert convert_family(FamilyInstance(((e0, target), (e1, target)))).verdict == "Majorized"
    plus = proj(ket(1, 1))
    inst = FamilyInstance(((PI2, e0), (PI2, plus)))
    dec = convert_family(inst)
    assert dec.verdict == "NotMajorized"
    h_r, h_s = verify_family_witness(inst, dec.witness)
    assert h_r - h_s >= WITNESS_MIN_GAP
    assert abs(sum(dec.witness.weights) - 1.0) <= 1e-12


def test_single_pair_matches_classical_embedding(rng):
    for planted in (True, False):
        rho = random_density(2, seed=rng)
        sigma = apply(random_cptp(2, 2, 2, rng), rho) if planted else random_density(2, seed=rng)
        inst = FamilyInstance(((rho, sigma),))
        r_cq, s_cq, _ = classical_embedding(inst)
        assert r_cq.shape == (2, 2)
        # rho (x) |0><0| embedding with the channel on the quantum factor
        e0 = proj(ket(1, 0))
        direct = is_majorized(np.kron(e0, rho), np.kron(e0, sigma), (2, 2))
        assert convert_family(inst).verdict == direct.verdict


def test_family_validation():
    with pytest.raises(ValueError):
        FamilyInstance(())
    with pytest.raises(ValueError):
        FamilyInstance(((PI2, PI2),), weights=(0.5,))
    with pytest.raises(ValueError):
        FamilyInstance(((PI2, PI2), (np.eye(3) / 3, PI2)))


def test_subfamily_scan(rng):
    phi = random_cptp(2, 2, 2, rng)
    rhos = [random_density(2, seed=rng) for _ in range(3)]
    feas = FamilyInstance(tuple((r, apply(phi, r)) for r in rhos))
    rep = finite_subfamily_scan(feas, 2)
    assert rep["full"] == "Majorized" and rep["consistent"]
    assert all(r["verdict"] == "Majorized" for r in rep["subfamilies"])
    bad = FamilyInstance(((PI2, proj(ket(1, 0))), (PI2, proj(ket(1, 1))),
                          (rhos[0], apply(phi, rhos[0]))))
    rep = finite_subfamily_scan(bad, 2)
    assert rep["full"] == "NotMajorized"
    assert rep["first_obstruction"] is not None and len(rep["first_obstruction"]) <= 2
    one = FamilyInstance(((rhos[0], rhos[1]),))
    rep = finite_subfamily_scan(one, 3)
    assert rep["full"] == convert_family(one).verdict and len(rep["subfamilies"]) == 1


def test_input_validation(rng):
    with pytest.raises(ValueError):
        is_majorized(np.eye(4), np.eye(4) / 4, (2, 2))
    with pytest.raises(ValueError):
        is_majorized(np.eye(4) / 4, np.eye(4) / 4, (3, 2))
    assert identity(2).d_in == 2 and replacement(PI2).d_out == 2
