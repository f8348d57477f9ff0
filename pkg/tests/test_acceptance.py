"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line (visible even
under output capture) before asserting.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from autocrn.classify import AutocatalyticProfile, classify_autocatalytic, random_autocatalytic_network
from autocrn.condensation import appendix_bound_scan, condensation_curve, lln_diagnostic, partition_asymptotics
from autocrn.errors import FugacityOutsideRadius
from autocrn.library import bundled_network, combined_example_log_factors, simulation_config
from autocrn.network import structural_summary
from autocrn.oracle import complex_partition, exact_stationary, generalized_balance_residual, reaction_vector_partition
from autocrn.productform import (
    CondensationQuery,
    build_table,
    classify_factor,
    factor_ratio,
    generating_function_check,
    prob_all_on,
    product_form_distribution,
    stationary_distribution,
)
from autocrn.simulate import empirical_stationary
from autocrn.states import total_variation

P = AutocatalyticProfile.from_parameters
TRI = P((1.0, 1.0), ((0.0, 2.0), ()))


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {n:>2} {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail

    return emit


def test_01_oracle_equivalence(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240611)
    nets = [bundled_network(f"example{c}") for c in "ABCD"]
    nets += [random_autocatalytic_network(rng, int(rng.integers(2, 4))) for _ in range(20)]
    worst = 0.0
    for net in nets:
        prof = classify_autocatalytic(net)
        for N in range(4, 11):
            worst = max(worst, total_variation(stationary_distribution(prof, N), exact_stationary(net, N)))
    elapsed = time.perf_counter() - t0
    report(1, worst <= 1e-9 and elapsed <= 30, f"24 networks x N=4..10, worst TV {worst:.2e}, {elapsed:.1f}s")


def test_02_structural_values(report):
    got = {}
    for c in "ABC":
        s = structural_summary(bundled_network(f"example{c}"))
        got[c] = (s.deficiency, s.weakly_reversible, s.reversible)
    ok = got == {"A": (0, True, True), "B": (1, False, False), "C": (2, False, False)}
    report(2, ok, f"(deficiency, weakly reversible, reversible): {got}")


def test_03_worked_case(report, worked):
    pi = stationary_distribution(classify_autocatalytic(worked), 2)
    expect = np.array([3 / 7, 2 / 7, 2 / 7])
    err = float(np.max(np.abs(pi.probs - expect)))
    ok = pi.states.tolist() == [[0, 2], [1, 1], [2, 0]] and err <= 1e-12
    report(3, ok, f"pi on lexicographic Gamma_2 = {pi.probs.tolist()}, max error {err:.1e}")


def test_04_generating_functions(report):
    errs = []
    for lam in (0.5, 1.0, 2.5):
        num, closed = generating_function_check(P((lam,), ((),)), 0, 1.3, truncation=120)
        errs.append(abs(num - closed) / closed)
    poisson_err = max(errs)
    geo_errs = []
    for lam, b2 in ((1.0, 0.5), (2.0, 3.0), (0.7, 1.0)):
        prof = P((lam,), ((b2,),))
        phi = 0.5 / (lam * b2)
        num, closed = generating_function_check(prof, 0, phi, truncation=400)
        geo_errs.append(abs(num - closed) / closed)
    geo_err = max(geo_errs)
    raised = 0
    for phi in (1e-9, 0.1, 1.0):
        try:
            generating_function_check(TRI, 0, phi)
        except FugacityOutsideRadius:
            raised += 1
    ok = poisson_err <= 1e-12 and geo_err <= 1e-8 and raised == 3
    report(4, ok, f"Poisson rel err {poisson_err:.1e}, geometric rel err {geo_err:.1e}, super-exp raised {raised}/3")


def test_05_factor_classification(report):
    pois = P((1.5,), ((),))
    geo = P((2.0,), ((0.75,),))
    sup = P((1.0,), ((0.0, 2.0),))
    kinds = [classify_factor(p, 0).kind for p in (pois, geo, sup)]
    radii = [classify_factor(p, 0).radius for p in (pois, geo, sup)]
    # ratio f(m+1)/f(m) tends to 1/radius
    probe_p = factor_ratio(pois, 0, 10**6)
    probe_g = 1 / factor_ratio(geo, 0, 10**6)
    probe_s = factor_ratio(sup, 0, 10**6)
    ok = (
        kinds == ["poisson", "geometric_type", "super_exponential"]
        and radii[0] == math.inf
        and abs(radii[1] - 1 / 1.5) <= 0.01 / 1.5
        and radii[2] == 0
        and probe_p < 1e-5
        and abs(probe_g - radii[1]) <= 0.01 * radii[1]
        and probe_s > 1e5
    )
    report(5, ok, f"radii {radii}, ratio probes at m=1e6: {probe_p:.2e}, 1/{1 / probe_g:.4f}, {probe_s:.2e}")


def test_06_c1_trend(report):
    Ns = np.arange(10, 2001)
    table = build_table(TRI, 2000)
    at4 = prob_all_on(build_table(TRI, 4), 4)[0]
    p1 = np.array([prob_all_on(table, int(N))[0] for N in Ns])
    min_step = float(np.min(np.diff(p1)))
    p1000 = p1[1000 - 10]
    gap = partition_asymptotics(TRI, [1000])[0] - 1
    ok = (
        Fraction(at4).limit_denominator(10**4) == Fraction(65, 96)
        and abs(at4 - 65 / 96) <= 1e-14
        and min_step >= -1e-6
        and p1000 > 0.99
        and 0 <= gap < 5e-3
    )
    report(6, ok, f"P(X_1=4)={at4:.15f} (65/96), min step {min_step:.2e}, P at 1000 {p1000:.6f}, Z gap {gap:.2e}")


def test_07_no_condensation(report):
    pois = P((1.0, 1.0), ((), ()))
    q = CondensationQuery(theta=0.9)
    at20 = condensation_curve(pois, [20], q).rows[0].p_theta
    tail = condensation_curve(pois, [50, 100, 200, 400], q).column("p_theta")
    ok = abs(at20 - 422 / 2**20) <= 1e-15 and bool(np.all(np.diff(tail) < 0))
    report(7, ok, f"P(M>=0.9N) at N=20 = {at20!r} vs {422 / 2**20!r}; tail {tail.tolist()}")


def test_08_c3_condensation(report):
    prof = P((1.0, 2.0), ((3.0,), (0.5,)))
    rows = lln_diagnostic(prof, [200, 500], 0, theta=0.1)
    ok = rows[0].p_upper > 0.999 and rows[1].mean_fraction > 0.99
    report(8, ok, f"P(X_1>=0.9N) at 200 = {rows[0].p_upper:.10f}, E[X_1]/N at 500 = {rows[1].mean_fraction:.6f}")


def test_09_generalized_balance(report):
    net = bundled_network("combined")
    pi = product_form_distribution(combined_example_log_factors(8), 8)
    upper = [r for r, rx in enumerate(net.reactions) if rx.reactant[2] == 0 and rx.product[2] == 0]
    lower = [r for r in range(net.n_reactions) if r not in upper]
    part = reaction_vector_partition(net, upper) + complex_partition(net, lower)
    resid = generalized_balance_residual(net, part, pi)
    tv = total_variation(pi, exact_stationary(net, 8))
    report(9, resid <= 1e-12 and tv <= 1e-10, f"residual {resid:.1e}, TV to oracle {tv:.1e}")


def test_10_simulation(report):
    cfg = simulation_config()
    net = bundled_network(cfg["network"])
    ref = stationary_distribution(classify_autocatalytic(net), cfg["total"])
    tvs = [
        total_variation(empirical_stationary(net, cfg["init"], cfg["t_max"], cfg["burn_in"], s), ref)
        for s in cfg["seeds"]
    ]
    ok = len(tvs) == 10 and max(tvs) <= 0.05
    report(10, ok, f"{cfg['network']} N={cfg['total']} t_max={cfg['t_max']}, worst TV over 10 seeds {max(tvs):.4f}")


def test_11_appendix_bounds(report):
    scan = appendix_bound_scan(TRI, 0, range(10, 10**4 + 1))
    consts = scan.constants
    bounded = all(math.isfinite(c) for c in consts) and all(
        float(np.max(q)) <= c for q, c in zip((scan.q1, scan.q2, scan.q3), consts)
    )
    pair = appendix_bound_scan(TRI, 0, range(100, 1001, 100), partner=1)
    at1000 = float(pair.pair_sum[-1])
    ok = bounded and bool(scan.unimodal.all()) and at1000 < 1e-2 and pair.pair_sum_decreasing
    report(11, ok, f"constants {tuple(round(c, 4) for c in consts)}, unimodal everywhere {bool(scan.unimodal.all())}, "
                   f"pair sum at 1000 {at1000:.1e}, decreasing {pair.pair_sum_decreasing}")
