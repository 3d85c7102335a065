"""Acceptance gate: one PASS/FAIL line per criterion at its stated tolerance."""

import math
import statistics
import time

import numpy as np
import pytest

from neurocactus.control import (
    CARE_TOL,
    controllability_matrix,
    numerical_rank,
    rank_report,
    solve_care,
    stability_certificate,
    state_matrix,
    structural_controllability_test,
)
from neurocactus.dynamics import (
    Impulse,
    InputSignal,
    NetworkParams,
    NetworkState,
    equilibrium,
    input_bound,
    integrate_slot,
    simulate,
    x_max_bound,
)
from neurocactus.errors import IllConditioned
from neurocactus.graph import generate_generalized
from neurocactus.scenario import load_scenario, run_scenario

from cases import admissible_case
from conftest import A_NEW, A_PRIME, ACCEPTANCE_LINES, B_EXAMPLE
from oracles import exact_rank, zero_input_flow


def report(number, title, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def impulse_run(g14):
    p = NetworkParams()
    u = InputSignal((Impulse(2.0), Impulse(2.0)))
    start = time.perf_counter()
    traj = simulate(g14, p, u, np.ones(14), 40.0)
    return traj, time.perf_counter() - start, p, u


def test_criterion_1_example_ranks():
    def ranks():
        return (
            numerical_rank(controllability_matrix(A_PRIME, B_EXAMPLE)).rank,
            numerical_rank(controllability_matrix(A_NEW, B_EXAMPLE)).rank,
        )

    ranks()
    timings = []
    for _ in range(50):
        t0 = time.perf_counter()
        r = ranks()
        timings.append((time.perf_counter() - t0) / 2)
    per_call = statistics.median(timings)
    report(1, "example controllability matrices have rank 5", r == (5, 5) and per_call < 1e-3,
           f"ranks {r}, median {per_call * 1e6:.0f} us per matrix")


def test_criterion_2_boundedness(g14, impulse_run):
    traj, elapsed, p, u = impulse_run
    x_max = x_max_bound(g14, p, input_bound(g14, u))
    peak = float(np.abs(traj.x).max())
    ok = x_max == 20.0 and peak <= 20.0 and elapsed < 2.0
    report(2, "x_max = 20 exactly and the impulse run stays inside", ok,
           f"x_max {x_max!r}, peak |x| {peak:.4f}, {elapsed:.3f} s")


def test_criterion_3_equilibrium(g14, impulse_run):
    traj, elapsed, p, _ = impulse_run
    _, A_eq = equilibrium(g14, p.bounds)
    x_end = float(np.abs(traj.x[-1]).max())
    gap = float(np.abs(traj.weight_matrix(g14) - A_eq).max())
    ok = x_end < 1e-3 and gap < 1e-2 and elapsed < 2.0
    report(3, "impulse run converges to the unique equilibrium", ok,
           f"|x(40)| {x_end:.2e}, weight gap {gap:.2e}, {elapsed:.3f} s")


def test_criterion_4_gershgorin(g14):
    p = NetworkParams()
    rng = np.random.default_rng(2024)
    bad = 0
    worst = -np.inf
    for _ in range(500):
        w = [rng.uniform(*p.bounds.interval(e.sign)) for e in g14.edges]
        cert = stability_certificate(g14.weight_matrix(w), p.c_n)
        worst = max(worst, cert.max_real_eigenvalue)
        if not (cert.diagonally_dominant and cert.max_real_eigenvalue < -0.05):
            bad += 1
    report(4, "500 admissible draws are dominant with eigenvalues below -0.05", bad == 0,
           f"{bad} counterexamples, largest eigenvalue {worst:.4f}")


def test_criterion_5_invariance():
    start = time.perf_counter()
    escapes = 0
    sizes = []
    for seed in range(60):
        g, p, u, rng = admissible_case(1000 + seed)
        sizes.append(g.n)
        x_max = x_max_bound(g, p, input_bound(g, u))
        x0 = rng.uniform(-x_max, x_max, g.n)
        x0[rng.integers(g.n)] = x_max * rng.choice([-1, 1])
        traj = simulate(g, p, u, x0, 6.0)
        escapes += int(traj.flags.sum())
    elapsed = time.perf_counter() - start
    report(5, "no sample leaves the invariant box", escapes == 0 and elapsed < 30.0,
           f"60 graphs, N in [{min(sizes)}, {max(sizes)}], {escapes} escapes, {elapsed:.2f} s")


def test_criterion_6_structural(g14, impulse_run):
    p = NetworkParams()
    fractions = [structural_controllability_test(g14, p, samples=100, rng_seed=0).sample_fraction_full_rank]
    for seed in range(10):
        g, _ = generate_generalized(14, [1, 9], 100 + seed, extra_edges=2)
        fractions.append(structural_controllability_test(g, p, samples=100, rng_seed=seed).sample_fraction_full_rank)
    traj = impulse_run[0]
    B = g14.input_matrix()
    snap_ranks = [rank_report(traj.weight_matrix(g14, k), B, p.c_n).rank for k in range(len(traj.weights))]
    ok = min(fractions) >= 0.99 and min(snap_ranks) == 14
    report(6, "generated cacti are generically full rank and rank persists", ok,
           f"worst fraction {min(fractions):.2f} over {len(fractions)} graphs, "
           f"min snapshot rank {min(snap_ranks)}/14 over {len(snap_ranks)} snapshots")


def test_criterion_7_care(g14):
    scalar = solve_care(-1.0, 1.0, 1.0, 1.0).P[0, 0]
    scalar_err = abs(scalar - (math.sqrt(2) - 1))
    rng = np.random.default_rng(7)
    solved, worst_res, worst_eig, worst_cl = 0, 0.0, np.inf, -np.inf
    instances = [(state_matrix(A_NEW, 0.0), B_EXAMPLE, np.eye(5), np.eye(5))]
    for _ in range(40):
        w = [rng.uniform(*NetworkParams().bounds.interval(e.sign)) for e in g14.edges]
        instances.append((state_matrix(g14.weight_matrix(w), 4.1), g14.input_matrix(), np.eye(14), np.eye(2)))
    for H, B, Q, R in instances:
        try:
            sol = solve_care(H, B, Q, R)
        except IllConditioned:
            continue
        solved += 1
        worst_res = max(worst_res, sol.care_residual)
        worst_eig = min(worst_eig, float(np.linalg.eigvalsh(sol.P).min()))
        worst_cl = max(worst_cl, float(sol.closed_loop_spectrum.real.max()))
    result = run_scenario(load_scenario("lqr14.json"))
    target = next(c for c in result.checks if c.check == "target").measured
    ok = (
        scalar_err <= 1e-10
        and solved == len(instances)
        and worst_res <= CARE_TOL
        and worst_eig >= -1e-10
        and worst_cl < 0
        and target["target_residual"] is not None
        and math.isfinite(target["steady_state_gap"])
    )
    report(7, "CARE solutions are accurate, PSD and stabilising", ok,
           f"scalar error {scalar_err:.1e}, {solved}/{len(instances)} solved, residual <= {worst_res:.1e}, "
           f"min eig(P) {worst_eig:.2e}, max Re(closed loop) {worst_cl:.3f}; "
           f"LQR steady-state gap {target['steady_state_gap']:.3f}, target residual {target['target_residual']:.3f}")


def test_criterion_8_integrator_oracle():
    rng = np.random.default_rng(8)
    worst = 0.0
    for k in range(20):
        n = int(rng.integers(2, 15))
        g, _ = generate_generalized(n, [1], 500 + k, extra_edges=int(rng.integers(0, 3)))
        p = NetworkParams(c_n=4.1, dt=0.2 / 40)
        w = [rng.uniform(*p.bounds.interval(e.sign)) for e in g.edges]
        A = g.weight_matrix(w)
        x0 = rng.uniform(-1, 1, n)
        res = integrate_slot(NetworkState(0.0, x0, A), InputSignal.zero(g), p, g, p.tau)
        worst = max(worst, float(np.abs(res.state.x - zero_input_flow(A, p.c_n, x0, p.tau)).max()))
    report(8, "zero-input slot matches the matrix-exponential oracle", worst <= 1e-8,
           f"20 instances N <= 14, dt = tau/40, worst error {worst:.1e}")


def test_criterion_9_rank_oracle():
    rng = np.random.default_rng(9)
    mismatches = 0
    for _ in range(200):
        m = int(rng.integers(1, 7))
        n = int(rng.integers(1, 13))
        r = int(rng.integers(0, min(m, n) + 1))
        M = rng.integers(-5, 6, size=(m, r)) @ rng.integers(-5, 6, size=(r, n))
        if rng.random() < 0.3:
            M = rng.integers(-3, 4, size=(m, n))
        mismatches += numerical_rank(M).rank != exact_rank(M)
    report(9, "numerical rank equals exact rational rank", mismatches == 0,
           f"200 integer matrices up to 6x12, {mismatches} mismatches")
