"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import json
import subprocess
import sys
import time

import numpy as np

from qmaj.approx import check_apro1, diamond_norm, diamond_norm_supform, min_conversion_error
from qmaj.channel import apply, apply_to_factor, compose, identity, unitary, validate
from qmaj.cli import (
    _ensemble_from_json, _load_family, load_state, main, read_json, state_to_json, write_json,
)
from qmaj.docs import fixture_path
from qmaj.entropy import hmin, hmin_dual
from qmaj.factorize import choi_majorization_equiv
from qmaj.linalg import partial_trace, trace_norm
from qmaj.majorize import FamilyInstance, convert_family, finite_subfamily_scan, is_majorized
from qmaj.oracle import (
    grid_hmin, random_cptp, random_density, random_entangled, rng_from_seed,
)

import conftest
from conftest import PAULI_Z, bell

SEED = 42


def report(n, ok, detail):
    line = f"CRITERION {n} {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    conftest.ACCEPTANCE_LINES.append(line)
    assert ok, line


def planted_infeasible(r):
    """Entangled sigma and a product rho with the same A-marginal."""
    sigma = random_entangled(2, 2, r)
    rho = np.kron(partial_trace(sigma, (2, 2), "B"), random_density(2, seed=r))
    return rho, sigma


def test_criterion_01_pinned_values():
    r = rng_from_seed(SEED)
    prod = np.kron(np.eye(2) / 2, random_density(2, seed=r))
    t0 = time.perf_counter()
    v1 = hmin(prod, (2, 2)).value_bits
    t1 = time.perf_counter() - t0
    t0 = time.perf_counter()
    v2 = hmin(bell(), (2, 2)).value_bits
    t2 = time.perf_counter() - t0
    g = -np.log2(grid_hmin(bell(), (2, 2), 10_000))
    ok = abs(v1 - 1) <= 1e-6 and abs(v2 + 1) <= 1e-6 and abs(g + 1) <= 1e-3 \
        and t1 < 1 and t2 < 1
    report(1, ok, f"product={v1:.9f} bell={v2:.9f} grid={g:.6f} "
                  f"times={t1:.3f}s,{t2:.3f}s")


def test_criterion_02_strong_duality():
    r = rng_from_seed(SEED + 2)
    worst = 0.0
    t0 = time.perf_counter()
    for _ in range(100):
        dA, dB = int(r.integers(1, 4)), int(r.integers(1, 4))
        rho = random_density(dA * dB, int(r.integers(1, dA * dB + 1)), r)
        worst = max(worst, abs(hmin(rho, (dA, dB)).lam - hmin_dual(rho, (dA, dB))[0]))
    dt = time.perf_counter() - t0
    report(2, worst <= 1e-6 and dt < 60, f"worst |primal-dual|={worst:.2e} time={dt:.1f}s")


def test_criterion_03_data_processing():
    r = rng_from_seed(SEED + 3)
    violations, worst = 0, np.inf
    for _ in range(100):
        dA, dB = int(r.integers(1, 4)), int(r.integers(2, 4))
        rho = random_density(dA * dB, int(r.integers(1, dA * dB + 1)), r)
        phi = random_cptp(dB, dB, int(r.integers(1, 4)), r)
        margin = hmin(apply_to_factor(phi, rho, (dA, dB), "B"), (dA, dB)).value_bits \
            - hmin(rho, (dA, dB)).value_bits
        worst = min(worst, margin)
        violations += margin < -1e-6
    report(3, violations == 0, f"violations={violations} worst margin={worst:.2e} bits")


def test_criterion_04_completeness():
    r = rng_from_seed(SEED + 4)
    counts = {"Majorized": 0, "NotMajorized": 0, "Undecided": 0}
    worst = 0.0
    t0 = time.perf_counter()
    for _ in range(200):
        rho = random_density(4, int(r.integers(1, 5)), r)
        sigma = apply_to_factor(random_cptp(2, 2, int(r.integers(1, 4)), r), rho, (2, 2), "B")
        dec = is_majorized(rho, sigma, (2, 2))
        counts[dec.verdict] += 1
        if dec.verdict == "Majorized":
            assert validate(dec.channel).cptp
            worst = max(worst, trace_norm(apply_to_factor(dec.channel, rho, (2, 2), "B") - sigma))
    dt = time.perf_counter() - t0
    ok = counts["NotMajorized"] == 0 and counts["Undecided"] <= 4 and worst <= 1e-6 and dt < 300
    report(4, ok, f"counts={counts} worst residual={worst:.2e} time={dt:.1f}s")


def test_criterion_05_witness_soundness(tmp_path):
    r = rng_from_seed(SEED + 5)
    instances = [(np.eye(4) / 4, bell())] + [planted_infeasible(r) for _ in range(50)]
    n_not, n_verified, worst = 0, 0, np.inf
    for i, (rho, sigma) in enumerate(instances):
        rp, sp, cert = (str(tmp_path / f"{k}{i}.json") for k in ("rho", "sigma", "cert"))
        write_json(rp, state_to_json(rho, (2, 2)))
        write_json(sp, state_to_json(sigma, (2, 2)))
        if main(["majorize", rp, sp, "--cert", cert]) != 1:
            continue
        n_not += 1
        doc = read_json(cert)
        psi = _ensemble_from_json(doc["witness"])
        flags = validate(psi)
        # independent H_min recomputation with the plain solver on the file inputs
        rho_f, _ = load_state(read_json(rp))
        sig_f, _ = load_state(read_json(sp))
        k = psi.d_out
        gap = hmin(apply_to_factor(psi, rho_f, (2, 2), "A"), (k, 2)).value_bits \
            - hmin(apply_to_factor(psi, sig_f, (2, 2), "A"), (k, 2)).value_bits
        worst = min(worst, gap)
        if flags.cptp and flags.eb and gap >= 1e-5 and main(["verify", cert, rp, sp]) == 0:
            n_verified += 1
    ok = n_not == len(instances) and n_verified == n_not
    report(5, ok, f"NotMajorized={n_not}/{len(instances)} verified={n_verified} "
                  f"min gap={worst:.4f} bits")


def test_criterion_06_choi_equivalence():
    r = rng_from_seed(SEED + 6)
    agree, decided, positives = 0, 0, 0
    for i in range(100):
        T = random_cptp(2, 2, int(r.integers(1, 4)), r)
        if i % 2 == 0:
            S = compose(random_cptp(2, 2, int(r.integers(1, 4)), r), T)
        else:
            S = random_cptp(2, 2, int(r.integers(1, 4)), r)
        eq = choi_majorization_equiv(T, S)
        if not eq.undecided:
            decided += 1
            agree += eq.agree
            positives += eq.post_verdict == "Factors"
    ok = decided > 0 and agree == decided
    report(6, ok, f"agree={agree}/{decided} decided (positive={positives}, "
                  f"undecided={100 - decided})")


def test_criterion_07_diamond():
    val = diamond_norm(identity(2).choi - unitary(PAULI_Z).choi, 2, 2)
    r = rng_from_seed(SEED + 7)
    worst = 0.0
    for _ in range(50):
        a = random_cptp(2, 2, int(r.integers(1, 4)), r)
        b = random_cptp(2, 2, int(r.integers(1, 4)), r)
        J = a.choi - b.choi
        worst = max(worst, abs(diamond_norm(J, 2, 2) - diamond_norm_supform(J, 2, 2)))
    ok = abs(val - 2) <= 1e-5 and worst <= 1e-6
    report(7, ok, f"||id - Z||={val:.9f} worst primal/sup-form disagreement={worst:.2e}")


def test_criterion_08_approximate_consistency():
    r = rng_from_seed(SEED + 8)
    mismatches, min_delta, n_psi, n_hold = 0, np.inf, 0, 0
    for i in range(40):
        if i % 2 == 0:
            rho = random_density(4, int(r.integers(1, 5)), r)
            sigma = apply_to_factor(random_cptp(2, 2, 2, r), rho, (2, 2), "B")
        else:
            rho, sigma = planted_infeasible(r)
        dec = is_majorized(rho, sigma, (2, 2))
        delta = min_conversion_error(rho, sigma, (2, 2)).delta_star
        if dec.verdict == "Majorized":
            mismatches += delta > 1e-6
        elif dec.verdict == "NotMajorized":
            min_delta = min(min_delta, delta)
            mismatches += delta < 1e-3
            for _ in range(5):
                psi = random_cptp(2, int(r.integers(2, 4)), int(r.integers(1, 4)), r)
                n_psi += 1
                n_hold += check_apro1(rho, sigma, psi, delta, (2, 2)).holds
    ok = mismatches == 0 and n_psi == 100 and n_hold == n_psi
    report(8, ok, f"verdict/delta mismatches={mismatches} min infeasible delta={min_delta:.4f} "
                  f"apro1 holds {n_hold}/{n_psi}")


def test_criterion_09_families():
    functional = convert_family(_load_family(fixture_path("family_functional.json")))
    r = rng_from_seed(SEED + 9)
    planted_ok = 0
    for _ in range(10):
        phi = random_cptp(2, 2, int(r.integers(1, 4)), r)
        rhos = [random_density(2, seed=r) for _ in range(3)]
        planted_ok += convert_family(
            FamilyInstance(tuple((x, apply(phi, x)) for x in rhos))).verdict == "Majorized"
    violations, full_feasible, full_infeasible = 0, 0, 0
    pi = np.eye(2) / 2
    for i in range(50):
        phi = random_cptp(2, 2, int(r.integers(1, 4)), r)
        rhos = [random_density(2, seed=r) for _ in range(3)]
        pairs = [(x, apply(phi, x)) for x in rhos]
        if i % 2 == 1:
            # pi cannot be sent to a pure state by the same channel that fixes the rest
            pairs[int(r.integers(3))] = (pi, random_density(2, 1, r))
        rep = finite_subfamily_scan(FamilyInstance(tuple(pairs)), 2)
        violations += rep["violations"]
        full_feasible += rep["full"] == "Majorized"
        full_infeasible += rep["full"] == "NotMajorized"
    ok = functional.verdict == "NotMajorized" and planted_ok == 10 and violations == 0
    report(9, ok, f"functional={functional.verdict} planted 3-families Majorized "
                  f"{planted_ok}/10 scans violations={violations} "
                  f"(full feasible={full_feasible}, infeasible={full_infeasible})")


def test_criterion_10_determinism():
    cmd = [sys.executable, "-m", "qmaj.cli", "selftest", "--seed", "42"]
    a = subprocess.run(cmd, capture_output=True, check=False)
    b = subprocess.run(cmd, capture_output=True, check=False)
    ok = a.returncode == 0 and a.stdout == b.stdout and len(a.stdout) > 0
    json.loads(a.stdout)
    report(10, ok, f"exit={a.returncode},{b.returncode} bytes={len(a.stdout)} "
                   f"identical={a.stdout == b.stdout}")
