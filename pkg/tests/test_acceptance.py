"""Acceptance criteria, each at its pinned tolerance.

Run alone with ``pytest tests/test_acceptance.py -v``; the terminal summary
ends with one PASS/FAIL line per criterion.  The Monte Carlo criteria use
master seed 0, fixed before any run.
"""

import math
import random
import time

import pytest

from gnpx.binomial import (
    BinomialParams,
    binom_tail,
    chernoff_tail_bound,
    deviation_threshold,
    tail_approx,
    two_sided_tail,
)
from gnpx.extremes import brute_force_top_m, top_m_common_neighbors
from gnpx.graph import sample_gnp
from gnpx.limits import max_degree_normalization, lambda_exact, normalization
from gnpx.montecarlo import ExperimentConfig, default_y_grid, run_experiment

MASTER_SEED = 0


def test_c1_oracle_equivalence(acceptance_report):
    rng = random.Random(MASTER_SEED)
    start = time.perf_counter()
    mismatches = 0
    for _ in range(200):
        k = rng.choice([1, 2, 3])
        m = rng.choice([1, 2, 3])
        p = rng.choice([0.2, 0.5, 0.8])
        n = rng.randint(k + 1, 12)
        g = sample_gnp(n, p, rng.getrandbits(64))
        if top_m_common_neighbors(g, k, m) != brute_force_top_m(g, k, m):
            mismatches += 1
    elapsed = time.perf_counter() - start
    acceptance_report(
        "C1 oracle equivalence",
        mismatches == 0 and elapsed < 10,
        f"{mismatches} mismatches over 200 configs in {elapsed:.2f}s (limit 10s)",
    )


def test_c2_max_degree_identity(acceptance_report):
    worst = 0.0
    for n in (10**2, 10**3, 10**4, 10**5, 10**6):
        for p in (0.1, 0.5, 0.9):
            ours, ref = normalization(n, p, 1), max_degree_normalization(n, p)
            worst = max(worst, abs(ours.a - ref.a) / ref.a, abs(ours.sigma - ref.sigma) / ref.sigma)
    acceptance_report("C2 analytic identity", worst <= 1e-12, f"max relative error {worst:.2e} (limit 1e-12)")


def test_c3_tail_asymptotics(acceptance_report):
    start = time.perf_counter()
    x = math.sqrt(2)
    errors = []
    for n in (10**4, 10**5, 10**6):
        bp = BinomialParams(n, 0.5)
        exact = binom_tail(bp, deviation_threshold(bp, x, n))
        errors.append(abs(tail_approx(bp, x, n) - exact) / exact)
    decreasing = errors[0] > errors[1] > errors[2]
    bp = BinomialParams(100, 0.5)
    dominated = all(two_sided_tail(bp, t) <= chernoff_tail_bound(bp, t) for t in range(5, 55, 5))
    elapsed = time.perf_counter() - start
    acceptance_report(
        "C3 exact-vs-asymptotic tails",
        errors[2] < 0.2 and decreasing and dominated and elapsed < 30,
        f"rel errors {[round(e, 4) for e in errors]} at n=1e4,1e5,1e6 "
        f"(need <0.2 at 1e6 and strictly decreasing: {decreasing}); "
        f"Chernoff dominates on t=5..50: {dominated}; {elapsed:.1f}s",
    )


def test_c4_lambda_convergence(acceptance_report):
    start = time.perf_counter()
    details, ok = [], True
    for y in (-1.0, 0.0, 1.0):
        gaps = [abs(lambda_exact(n, 0.3, 2, y).lam - math.exp(-y)) for n in (10**3, 10**4, 10**5)]
        good = gaps[0] > gaps[1] > gaps[2] and gaps[2] < 0.15
        ok &= good
        details.append(f"y={y:g}: {[round(g, 4) for g in gaps]}")
    elapsed = time.perf_counter() - start
    acceptance_report(
        "C4 lambda convergence",
        ok and elapsed < 60,
        "; ".join(details) + f" (need decreasing and <0.15 at n=1e5); {elapsed:.1f}s",
    )


@pytest.fixture(scope="module")
def desk_scale_runs():
    start = time.perf_counter()
    runs = {
        m: run_experiment(
            ExperimentConfig(
                n=1000, p=0.3, k=2, m=m, trials=1000, y_grid=default_y_grid(), master_seed=MASTER_SEED, threads="auto"
            )
        )
        for m in (1, 2)
    }
    return runs, time.perf_counter() - start


def test_c5_distributional_convergence(acceptance_report, desk_scale_runs):
    runs, elapsed = desk_scale_runs
    s1, s2 = runs[1], runs[2]
    loc, scale = s1.gumbel_fit
    checks = {
        "ks_vs_janson<=0.10": s1.ks_vs_janson <= 0.10,
        "ks_vs_gumbel<=0.20": s1.ks_vs_gumbel <= 0.20,
        "location in [-0.5,0.5]": -0.5 <= loc <= 0.5,
        "scale in [0.7,1.3]": 0.7 <= scale <= 1.3,
        "ks_vs_gumbel(m=2)<=0.25": s2.ks_vs_gumbel <= 0.25,
        "runtime<=600s": elapsed <= 600,
    }
    acceptance_report(
        "C5 distributional convergence",
        all(checks.values()),
        f"ks_vs_janson={s1.ks_vs_janson:.4f} ks_vs_gumbel={s1.ks_vs_gumbel:.4f} "
        f"fit=({loc:.3f}, {scale:.3f}) ks_vs_gumbel(m=2)={s2.ks_vs_gumbel:.4f} {elapsed:.0f}s; "
        f"failed: {[k for k, v in checks.items() if not v] or 'none'}",
    )


def test_c6_gamma_cutoff(acceptance_report):
    start = time.perf_counter()
    rates = []
    for n in (200, 500, 1000):
        cfg = ExperimentConfig(n=n, p=0.5, k=2, m=1, trials=200, master_seed=MASTER_SEED, threads="auto")
        rates.append(run_experiment(cfg).gamma_exceedance_rate)
    elapsed = time.perf_counter() - start
    decreasing = rates[0] > rates[1] > rates[2]
    acceptance_report(
        "C6 gamma cutoff exceedances",
        decreasing and rates[2] <= 0.25 and elapsed < 120,
        f"rates {rates} at n=200,500,1000 (need decreasing and <=0.25 at 1000); {elapsed:.0f}s",
    )


def test_c7_reproducibility(acceptance_report):
    start = time.perf_counter()
    outputs = []
    for threads in (1, 1, 4):
        cfg = ExperimentConfig(n=150, p=0.4, k=2, m=2, trials=40, master_seed=MASTER_SEED, threads=threads)
        s = run_experiment(cfg)
        outputs.append((s.to_json(), s.cdf_csv()))
    elapsed = time.perf_counter() - start
    acceptance_report(
        "C7 reproducibility",
        outputs[0] == outputs[1] == outputs[2] and elapsed < 60,
        f"identical across reruns: {outputs[0] == outputs[1]}, across threads 1/4: {outputs[0] == outputs[2]}; "
        f"{elapsed:.1f}s",
    )


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
