"""Acceptance criteria, one test each, with stated tolerances and runtime budgets.

Each test appends one ``PASS``/``FAIL`` line to the terminal summary before
asserting, so a failure is still reported in the summary section.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from densitycompat import oracle
from densitycompat.compat import contradiction_witness, peierls_first, peierls_second
from densitycompat.qcore import DensityMatrix, Ket, frobenius, kernel_projector, qubit_from_bloch
from densitycompat.sampling import Stream, stream
from densitycompat.scenario import (
    ScenarioConfig,
    blind_direction,
    closed_form_commutator,
    commutator,
    hadamard,
    identity,
    random_unitary,
    run_scenario,
)

PI = math.pi
THETA_GRID = [PI / 32, PI / 16, PI / 8, 3 * PI / 16, 7 * PI / 32]
OPEN_GRID = np.linspace(0.01, PI / 4 - 0.01, 201)[1:-1]

# product norm of the pi/8 Hadamard pair, sqrt(cos^6 + sin^6) = sqrt(5/8),
# computed by direct multiplication before the implementation existed
PRODUCT_NORM_PI8 = 0.7905694150420949

# Monte Carlo seeds: the primary run, and the one rerun allowed on a 4 sigma miss
MC_SEED = 20260816
MC_RERUN_SEED = 20260817


def record(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_01_commutator_closed_form():
    worst = 0.0
    for theta in THETA_GRID:
        for k in (0, 1):
            rec = run_scenario(ScenarioConfig(theta, hadamard()), k)
            diff = commutator(rec.bob_state, rec.alice_state) - closed_form_commutator(theta, k)
            worst = max(worst, frobenius(diff))
    record(1, worst <= 1e-10, f"max residual {worst:.2e} <= 1e-10")


def test_02_first_condition_counterexample():
    had = [peierls_first(r.bob_state, r.alice_state)[0] for t in OPEN_GRID for r in _both(t, hadamard())]
    ident = [peierls_first(r.bob_state, r.alice_state)[0] for t in OPEN_GRID for r in _both(t, identity())]
    ok = not any(had) and all(ident)
    record(2, ok, f"hadamard commute on {sum(had)}/{len(had)}, identity commute on {sum(ident)}/{len(ident)}")


def _both(theta, u):
    return [run_scenario(ScenarioConfig(theta, u), k) for k in (0, 1)]


def test_03_second_condition_survives():
    verdicts = [peierls_second(r.alice_state, r.bob_state)[0] for t in THETA_GRID for r in _both(t, hadamard())]
    norms = [peierls_second(r.alice_state, r.bob_state)[1] for r in _both(PI / 8, hadamard())]
    fixture_ok = all(abs(n - PRODUCT_NORM_PI8) <= 1e-12 for n in norms)
    ok = all(verdicts) and fixture_ok and min(norms) >= 0.05
    record(3, ok, f"non-zero on {sum(verdicts)}/{len(verdicts)}, ||ab|| at pi/8 = {min(norms):.6f} (fixture {PRODUCT_NORM_PI8:.6f})")


def test_04_forward_witness():
    start = time.perf_counter()
    worst_a, worst_b, missing = 0.0, 1.0, 0
    for i in range(500):
        dim = 2 + i % 7
        a, b = oracle.orthogonal_support_pair(dim, 4000 + i)
        w = contradiction_witness(a, b)
        if w is None:
            missing += 1
            continue
        p = w.effects[0]
        worst_a = max(worst_a, p.probability(a))
        worst_b = min(worst_b, p.probability(b))
    elapsed = time.perf_counter() - start
    ok = missing == 0 and worst_a <= 1e-8 and worst_b >= 1 - 1e-8 and elapsed < 5
    record(4, ok, f"500 pairs, max Tr(aP) {worst_a:.1e}, min Tr(bP) 1-{1 - worst_b:.1e}, {elapsed:.2f}s < 5s")


def test_05_backward_sampled():
    start = time.perf_counter()
    pairs, index, hits, min_norm = 0, 0, 0, math.inf
    while pairs < 10_000:
        a, b = oracle.random_pair(55, index)
        index += 1
        norm = peierls_second(a, b)[1]
        if norm <= 0.01:
            continue
        pairs += 1
        min_norm = min(min_norm, norm)
        if oracle.search_contradiction(a, b, trials=1000, seed=100_000 + index) is not None:
            hits += 1
    elapsed = time.perf_counter() - start
    ok = hits == 0 and elapsed < 60
    record(5, ok, f"{pairs} pairs (min ||ab|| {min_norm:.3f}), {hits} contradictions, {elapsed:.1f}s < 60s")


def test_06_square_root_lemma():
    start = time.perf_counter()
    worst = 0.0
    for i in range(1000):
        rng = stream(66, i)
        u = rng.uniform(2)
        dim = 2 + int(u[0] * 7)
        rank = 1 + int(u[1] * (dim - 1))
        rho = oracle.random_density(oracle.RandomSpec(dim, rank, 660_000 + i))
        psi = Ket.normalized(kernel_projector(rho) @ rng.complex_normal(dim))
        worst = max(worst, float(np.linalg.norm(rho.matrix @ psi.amplitudes)))
    elapsed = time.perf_counter() - start
    record(6, worst <= 1e-10 and elapsed < 5, f"max ||rho psi|| {worst:.2e} <= 1e-10, {elapsed:.2f}s < 5s")


@pytest.fixture(scope="module")
def bloch_sample():
    start = time.perf_counter()
    thetas = np.linspace(0.05, PI / 4 - 0.05, 10)
    rows = []
    for i in range(200):
        u = random_unitary(stream(77, i))
        for theta in thetas:
            cfg = ScenarioConfig(float(theta), u)
            rows.append((cfg, blind_direction(cfg)))
    return rows, time.perf_counter() - start


def test_07_bloch_constraint(bloch_sample):
    rows, elapsed = bloch_sample
    resid = max(rep.constraint_residual for _, rep in rows)
    tilt = max(abs(rep.blind.z) for _, rep in rows)
    ok = resid <= 1e-10 and tilt <= 1e-10 and elapsed < 5
    record(7, ok, f"{len(rows)} cases, max residual {resid:.2e}, max |blind.z| {tilt:.2e}, {elapsed:.2f}s < 5s")


def test_08_blind_direction_statistics():
    start = time.perf_counter()
    shots = 100_000
    runs = []
    for seed in (MC_SEED, MC_RERUN_SEED):
        cfg = ScenarioConfig(PI / 8, hadamard(), seed=seed)
        freq, expected = oracle.simulate_frequencies(cfg, blind_direction(cfg).blind, shots)
        runs.append((seed, freq))
        if abs(freq - 0.5) <= oracle.binomial_band(0.5, shots):
            break
    band = oracle.binomial_band(0.5, shots)
    seed, freq = runs[-1]
    elapsed = time.perf_counter() - start
    ok = abs(freq - 0.5) <= band and abs(expected - 0.5) <= 1e-12 and elapsed < 10
    record(8, ok, f"freq {freq:.5f}, |freq - 1/2| {abs(freq - 0.5):.5f} <= {band:.5f} (seed {seed}, {len(runs)} run(s)), {elapsed:.2f}s < 10s")


def test_09_ensemble_marginal(bloch_sample):
    rows, _ = bloch_sample
    worst = 0.0
    for cfg, rep in rows:
        mix = rep.p * qubit_from_bloch(rep.n_plus).matrix + rep.q * qubit_from_bloch(rep.n_minus).matrix
        worst = max(worst, frobenius(mix - oracle.bob_reduced_state(cfg.theta)))
    record(9, worst <= 1e-10, f"{len(rows)} cases, max ||p rho(n) + q rho(m) - rho_b|| {worst:.2e} <= 1e-10")


def test_10_determinism():
    start = time.perf_counter()
    commands = [
        ["simulate", "--seed", "31", "--shots", "5000", "--format", "json"],
        ["counterexample", "--seed", "31", "--outcome", "sample", "--format", "json"],
    ]
    same = []
    for cmd in commands:
        outs = [
            subprocess.run([sys.executable, "-m", "densitycompat", *cmd], capture_output=True, check=True).stdout
            for _ in range(2)
        ]
        json.loads(outs[0])
        same.append(outs[0] == outs[1] and len(outs[0]) > 0)
    elapsed = time.perf_counter() - start
    record(10, all(same), f"simulate identical: {same[0]}, counterexample identical: {same[1]}, {elapsed:.2f}s")
