"""Acceptance gate: one test and one PASS/FAIL report line per criterion.

Run with ``pytest tests/test_acceptance.py -v``; the summary lines are
printed at the end of the session by ``conftest.pytest_terminal_summary``.
"""
import itertools
import math
import time
from fractions import Fraction
from math import comb

import numpy as np
import pytest

from anticonc.exact_dist import (
    concentration_probability,
    direction_distribution,
    interval_probability,
    pair_distribution,
    smoothness_gap,
)
from anticonc.fourier import (
    lemma_tech_check,
    sin_gap_lower_bound_batch,
    solve_parameters,
    star_bound,
    tech_census,
)
from anticonc.halasz import (
    HalaszParams,
    _phi_array,
    count_solutions_r,
    default_nu_grid,
    mean_D,
    mian_chowla,
    moment_check,
    mu_C,
    nu_average_bound,
    nu_product_bound,
    sidon_check,
    strict_convexity_phi,
)
from anticonc.protocols import (
    default_rounds,
    estimate_success,
    lift_instance,
    mod4_decider,
    mod4_protocol,
    sampling_decider,
)
from anticonc.vertex_sets import (
    Cube,
    Mod4Class,
    TwoCube,
    decode,
    random_subset,
    random_subspace,
)

REPORT: dict[int, str] = {}


def record(num: int, ok: bool, detail: str) -> None:
    line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    REPORT[num] = line
    print(line)
    assert ok, line


def test_criterion_01_exact_concentration():
    t0 = time.perf_counter()
    got = {n: concentration_probability(pair_distribution(Cube(n), Cube(n))) for n in (4, 8, 12, 16)}
    elapsed = time.perf_counter() - t0
    ok = all(got[n] == Fraction(comb(n, n // 2), 2 ** n) for n in got) and elapsed < 5
    record(1, ok, f"n=16 -> {got[16]} (12870/65536 = {Fraction(12870, 65536)}), {elapsed:.2f}s")


def test_criterion_02_smoothness_scaling():
    t0 = time.perf_counter()
    scaled = {n: float(smoothness_gap(pair_distribution(Cube(n), Cube(n)), 4)) * n for n in (8, 12, 16, 20)}
    spread = max(scaled.values()) / min(scaled.values())
    mod4_ok = True
    for n in (8, 12, 16):
        for r, s in itertools.product((0, 1), repeat=2):
            d = pair_distribution(Mod4Class(n, r), Mod4Class(n, s))
            conc = concentration_probability(d)
            mod4_ok &= all(smoothness_gap(d, step) == conc for step in (1, 2, 3))
    elapsed = time.perf_counter() - t0
    ok = spread <= 3 and mod4_ok and elapsed < 120
    shown = ", ".join(f"{n}:{v:.4f}" for n, v in scaled.items())
    record(2, ok, f"g(n)*n = {{{shown}}}, C/c = {spread:.3f}, mod4 obstruction {mod4_ok}, {elapsed:.1f}s")


def test_criterion_03_star_inequality():
    violations = 0
    worst_eps = 0.0
    for s in range(200):
        rng = np.random.default_rng(s)
        B = random_subset(12, 2 ** 6 if s % 2 == 0 else 2 ** 9, s)
        x = rng.integers(-3, 4, 12)
        d = direction_distribution(x, B)
        r = star_bound(x, d, nodes=1 << 16)
        violations += r.value + r.eps_quad < float(concentration_probability(d))
        worst_eps = max(worst_eps, r.eps_quad)
    record(3, violations == 0 and worst_eps <= 1e-5,
           f"violations {violations}/200, max eps_quad {worst_eps:.2e}")


def test_criterion_04_census():
    n, delta = 14, 0.3
    t0 = time.perf_counter()
    params = solve_parameters(delta / 6)
    B = random_subspace(n, math.ceil(0.6 * n), seed=0)
    res = tech_census(B, 1 / 8, params)
    elapsed = time.perf_counter() - t0
    bound = 2 ** (n * (1 - 0.6 + delta))
    ok = res.tested == 2 ** n and res.violations <= bound and elapsed < 300
    record(4, ok, f"violations {res.violations}/{res.tested} <= {bound:.1f} "
                  f"(c = {params.c:.3g}), {elapsed:.1f}s")


def test_criterion_05_property_sweeps():
    rng = np.random.default_rng(35)
    eta = rng.uniform(0, 2 * np.pi, 10 ** 5)
    u = rng.integers(-50, 51, 10 ** 5)
    v = rng.integers(-50, 51, 10 ** 5)
    m, rhs = sin_gap_lower_bound_batch(eta, u, v)
    claim = int(np.sum(m < rhs - 1e-9))

    rng = np.random.default_rng(32)
    tech = 0
    for _ in range(100):
        n = int(rng.integers(1, 8))
        B = random_subset(n, int(rng.integers(1, (1 << n) + 1)), int(rng.integers(1 << 30)))
        lhs, rhs_ = lemma_tech_check(rng.integers(-5, 6, n), B, float(rng.uniform(0, 2 * np.pi)))
        tech += lhs > rhs_ + 1e-9

    rng = np.random.default_rng(51)
    prod = 0
    for _ in range(100):
        n = int(rng.integers(1, 6))
        B = random_subset(n, int(rng.integers(1, (1 << n) + 1)), int(rng.integers(1 << 30)))
        r = nu_product_bound(rng.integers(-4, 5, n), B, float(rng.uniform(0, 2 * np.pi)),
                             float(rng.uniform(0.01, 1)), kappa=0.1)
        prod += r.lhs > r.rhs + 1e-12

    rng = np.random.default_rng(52)
    avg = 0
    for _ in range(100):
        n = int(rng.integers(1, 5))
        A = TwoCube.from_differences(rng.integers(1, 12, n) * rng.choice([-1, 1], n))
        B = random_subset(n, int(rng.integers(1, (1 << n) + 1)), int(rng.integers(1 << 30)))
        y = decode(int(B.members()[0]), n)
        r = nu_average_bound(A, B, y, float(rng.uniform(0, 2 * np.pi)), float(rng.uniform(0.01, 1)),
                             kappa=0.1)
        avg += r.lhs > r.rhs + 1e-12

    ok = claim == tech == prod == avg == 0
    record(5, ok, f"violations: sin-gap {claim}/100000, lemma {tech}/100, "
                  f"nu-product {prod}/100, nu-average {avg}/100")


def test_criterion_06_structure():
    r1 = True
    for n in range(1, 9):
        distinct = tuple(range(1, n + 1))
        r1 &= count_solutions_r(distinct, 1, method="brute") == 2 * n
        r1 &= count_solutions_r((3,) * n, 1, method="brute") == 2 * n * n
    sidon = True
    for n in range(1, 21):
        ok, quads = sidon_check(mian_chowla(n))
        sidon &= ok and quads == 4 * comb(n, 2) + n
    G = mian_chowla(12)
    mean_err = abs(mean_D(G) - len(G) / 2)
    lhs, _ = moment_check(G, 1)
    moment_err = abs(lhs - len(G) / 2)
    ok = r1 and sidon and mean_err <= 1e-9 and moment_err <= 1e-9
    record(6, ok, f"r1 forms {r1}, Sidon counts {sidon}, |E D - |G|/2| {mean_err:.1e}, "
                  f"|moment - n/2| {moment_err:.1e}")


def test_criterion_07_sidon_directions_statistical():
    n = 16
    B = random_subset(n, 2 ** 13, seed=7)
    A = TwoCube.from_differences(mian_chowla(n))
    rng = np.random.default_rng(7)
    values = np.array([star_bound(A.sample(rng), B).value for _ in range(200)])
    case1 = math.sqrt(math.log(n) / n)
    threshold = 10 * math.sqrt(math.log(n) / n) * case1
    frac = float(np.mean(values <= threshold))
    q50, q90 = np.quantile(values, [0.5, 0.9])
    mu = mu_C(A.differences, HalaszParams()).mu
    case3 = math.sqrt(math.log(n) / n ** 5)
    record(7, frac >= 0.9,
           f"{frac:.0%} of 200 below {threshold:.3f}; q50 {q50:.4f}, q90 {q90:.4f}, "
           f"mu_C {mu:.3f}, case-3 rate {case3:.2e}")


def test_criterion_08_protocols():
    residue_bad = 0
    for n in range(1, 11):
        cube = [np.array(v) for v in itertools.product((1, -1), repeat=n)]
        for x in cube:
            for y in cube:
                residue_bad += mod4_protocol(x, y)[0] != int(x @ y) % 4
    rng = np.random.default_rng(8)
    lift_bad = 0
    for seed in range(10 ** 5):
        n = int(rng.integers(1, 9))
        t = int(rng.integers(1, 5))
        x, y = rng.choice([-1, 1], n), rng.choice([-1, 1], n)
        x3, y3 = lift_instance(x, y, t, seed)
        lift_bad += int(x3 @ y3) != t * int(x @ y)
    exact = estimate_success(mod4_decider, 5, 1, exhaustive=True).rate
    est = estimate_success(sampling_decider(m=default_rounds(100, 40)), 100, 40, trials=10 ** 4, seed=0)
    ok = residue_bad == 0 and lift_bad == 0 and exact == 1.0 and est.rate >= 2 / 3
    record(8, ok, f"mod4 exceptions {residue_bad}, lift exceptions {lift_bad}, "
                  f"mod4(5,1) = {exact}, randomized rate {est.rate:.4f} +- {est.ci_halfwidth:.4f}")


def test_criterion_09_strict_convexity():
    nus = np.array(default_nu_grid())
    worst_gap = math.inf
    for kappa in (0.05, 0.1, 0.2):
        c1 = float((_phi_array(0.5, kappa, nus) / nus).min())
        xi, p, nu = np.meshgrid(np.linspace(0, 0.5, 51), np.linspace(kappa, 1 - kappa, 51), nus,
                                indexing="ij")
        worst_gap = min(worst_gap, float((_phi_array(xi, p, nu) - c1 * nu).min()))
    lower_ok = worst_gap >= 0

    h = 1e-6
    rng = np.random.default_rng(9)
    xi = rng.uniform(h, 0.5 - h, 1000)
    p = rng.uniform(0.05 + h, 0.95 - h, 1000)
    nu = rng.uniform(0.05, 1, 1000)
    dp = _phi_array(xi, p + h, nu) - _phi_array(xi, p - h, nu)
    dxi = _phi_array(xi + h, p, nu) - _phi_array(xi - h, p, nu)
    dp_bad = int(np.sum(dp <= 0))
    dxi_bad = int(np.sum(dxi >= 0))

    exact = strict_convexity_phi(Fraction(1, 2), Fraction(1, 10), 1) == Fraction(225, 10000)
    ok = lower_ok and dp_bad == 0 and dxi_bad == 0 and exact
    record(9, ok, f"min(Phi - c1 nu) {worst_gap:.2e}; dPhi/dp <= 0 at {dp_bad}/1000; "
                  f"dPhi/dxi >= 0 at {dxi_bad}/1000; Phi(1/2,1/10,1) = 9/400 {exact}")


def test_criterion_10_interval():
    n = 16
    radius = math.ceil(0.1 * math.sqrt(n))
    probs = []
    for s in range(50):
        A = random_subset(n, 2 ** 10, seed=2 * s)
        B = random_subset(n, 2 ** 10, seed=2 * s + 1)
        assert A.size * B.size >= 2 ** (1.2 * n)
        probs.append(float(interval_probability(pair_distribution(A, B), radius)))
    record(10, max(probs) <= 0.9, f"radius {radius}, max Pr[|<X,Y>| <= r] {max(probs):.4f} over 50 seeds")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
