import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import comb, gammaln

from autocrn.classify import AutocatalyticProfile, classify_autocatalytic, random_autocatalytic_network
from autocrn.condensation import (
    appendix_bound_scan,
    classify_condensation,
    condensation_curve,
    domination_probe,
    factor_decomposition,
    lln_diagnostic,
    partition_asymptotics,
)
from autocrn.errors import WrongFactorType, WrongRegime
from autocrn.productform import CondensationQuery, build_table, log_factor_table

P = AutocatalyticProfile.from_parameters
TRI = P((1.0, 1.0), ((0.0, 2.0), ()))
C3 = P((1.0, 2.0), ((3.0,), (0.5,)))
POIS = P((1.0, 1.0), ((), ()))


def test_classify_examples():
    assert classify_condensation(P((1.0, 2.0, 0.5), ((), (), ()))).regime == "none"
    r = classify_condensation(C3)
    assert r.regime == "C3_weak" and r.maximal_set == (0,)
    with pytest.warns(UserWarning, match="factors differ"):
        tie = classify_condensation(P((1.0, 2.0), ((0.0, 2.0), (0.5, 1.0))))
    assert tie.regime == "C1_strong" and tie.k == 2 and tie.maximal_set == (0, 1)
    assert classify_condensation(P((1.0, 1.0), ((2.0,), (2.0,)))).regime == "unclassified"
    assert classify_condensation(TRI).maximal_set == (0,)


def test_near_tie_warns():
    with pytest.warns(UserWarning):
        r = classify_condensation(P((1.0, 1.0), ((0.0, 2.0), (0.0, 2.0 * (1 + 1e-12)))))
    assert r.near_tie and r.k == 2
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert not classify_condensation(P((1.0, 1.0), ((0.0, 2.0), (0.0, 2.0)))).near_tie


@given(st.integers(0, 10**6), st.integers(2, 4), st.floats(0.01, 100))
def test_regime_invariant_under_rate_scaling(seed, n, c):
    net = random_autocatalytic_network(np.random.default_rng(seed), n)
    a = classify_condensation(classify_autocatalytic(net))
    b = classify_condensation(classify_autocatalytic(net.with_rates(net.rates * c)))
    assert (a.regime, a.maximal_set) == (b.regime, b.maximal_set)


def test_curve_examples():
    r = condensation_curve(POIS, [20], CondensationQuery(theta=0.9))
    assert r.rows[0].p_theta == pytest.approx(422 / 2**20, rel=1e-12)
    r = condensation_curve(TRI, [4])
    assert r.rows[0].p_exact_max >= 65 / 96
    single = condensation_curve(P((1.3,), ((0.5, 0.2),)), [1, 5, 9], CondensationQuery(0.6, 1))
    for row in single.rows:
        assert row.p_exact_max == row.p_within_K == row.p_theta == 1.0
        assert row.mean_fraction == 1.0


@given(st.integers(0, 10**6), st.integers(2, 3), st.floats(0.05, 0.95), st.integers(0, 3))
def test_curve_invariants(seed, n, theta, K):
    prof = classify_autocatalytic(random_autocatalytic_network(np.random.default_rng(seed), n))
    Ns = [6, 9, 14, 20]
    rep = condensation_curve(prof, Ns, CondensationQuery(theta, K))
    t = build_table(prof, Ns[-1])
    for row in rep.rows:
        N = row.N
        for v in (row.p_exact_max, row.p_within_K, row.p_theta):
            assert 0 <= v <= 1
        assert row.p_exact_max <= row.p_within_K + 1e-12
        if math.ceil(theta * N) <= N - K:
            assert row.p_within_K <= row.p_theta + 1e-12
        # disjoint-singleton identity
        assert row.p_exact_max == pytest.approx(np.exp(t.log_f[:, N] - t.log_Z_prefix[N]).sum(), rel=1e-12)
    if rep.regime.regime != "C1_strong":
        assert np.all(np.isnan(rep.column("zn_over_kf")))


def test_poisson_no_condensation_decreasing():
    for n, theta in ((2, 0.9), (3, 0.5), (4, 0.3)):
        prof = P((1.0,) * n, ((),) * n)
        p = condensation_curve(prof, [50, 100, 200, 400], CondensationQuery(theta)).column("p_theta")
        assert np.all(np.diff(p) < 0)


def test_c1_trend():
    Ns = list(range(10, 2001))
    rep = condensation_curve(TRI, Ns)
    t = build_table(TRI, 2000)
    p1 = np.exp(t.log_f[0, Ns] - t.log_Z_prefix[Ns])
    assert np.all(np.diff(p1) >= -1e-6)
    assert p1[Ns.index(1000)] > 0.99
    gap = rep.column("zn_over_kf")
    assert np.all(gap >= 1) and gap[Ns.index(1000)] - 1 < 5e-3


def test_partition_asymptotics_examples():
    z = partition_asymptotics(TRI, [4, 500, 1000, 2000])
    assert z[0] == pytest.approx(96 / 65, rel=1e-13)
    assert np.all(np.diff(z) < 0) and np.all(z > 1)
    # gap close to 1/(2N)
    assert (z[-1] - 1) * 2 * 2000 == pytest.approx(1.0, rel=0.05)
    twin = P((1.0, 1.0), ((0.0, 2.0), (0.0, 2.0)))
    zt = partition_asymptotics(twin, [10, 100, 1000])
    assert np.all(np.diff(zt) < 0) and zt[-1] - 1 < 1e-2
    with pytest.raises(WrongRegime):
        partition_asymptotics(C3, [10])


def test_lln_examples():
    rows = lln_diagnostic(C3, [100, 200, 500], 0, theta=0.1)
    assert rows[1].p_upper > 0.999
    assert rows[2].mean_fraction > 0.99
    tri = lln_diagnostic(TRI, [100, 200, 400, 800], 0)
    deficit = np.array([1 - r.mean_fraction for r in tri]) * np.array([100, 200, 400, 800])
    assert np.all(deficit < 2.0)
    for r in lln_diagnostic(POIS, [10, 33, 60], 0):
        assert r.mean_fraction == pytest.approx(0.5, abs=1e-14)


def test_appendix_scan():
    s = appendix_bound_scan(TRI, 0, range(10, 10001))
    assert all(np.isfinite(c) for c in s.constants)
    assert s.unimodal.all()
    pair = appendix_bound_scan(TRI, 0, [100, 200, 500, 1000], partner=1)
    assert pair.pair_sum_decreasing and pair.pair_sum[-1] < 1e-2
    with pytest.raises(WrongFactorType):
        appendix_bound_scan(C3, 0, [10])


def test_factor_decomposition():
    dec = factor_decomposition(C3)
    assert dec.mu == (3.0, 1.0)
    m = np.arange(0, 400, 7)
    for i in range(2):
        direct = log_factor_table(C3, i, 399)[m]
        assert np.allclose(dec.log_f(i, m), direct, rtol=1e-12, atol=1e-12)
    # independent closed form for beta^2 = 0.5: w(m) = Gamma(m + 2)/(Gamma(2) m!) = m + 1
    assert np.allclose(np.exp(dec.log_w(1, m)), m + 1, rtol=1e-12)
    mixed = factor_decomposition(P((1.0, 2.0), ((0.5,), ())))
    assert np.allclose(mixed.log_w(1, m), -gammaln(m + 1))
    with pytest.raises(WrongFactorType):
        factor_decomposition(TRI)


def test_domination_probe():
    probe = domination_probe(C3, m_max=2000)
    assert set(probe) == {1} and np.isfinite(probe[1])
    with pytest.raises(WrongRegime):
        domination_probe(TRI)


def test_report_csv():
    rep = condensation_curve(TRI, [4, 6], CondensationQuery(0.75, 1))
    text = rep.to_csv()
    lines = text.splitlines()
    assert lines[0].startswith("# {") and '"regime": "C1_strong"' in lines[0]
    assert lines[1] == "N,p_exact_max,p_within_K,p_theta,mean_fraction,zn_over_kf"
    assert float(lines[2].split(",")[1]) == rep.rows[0].p_exact_max


def test_binomial_tail_row():
    N = 30
    rep = condensation_curve(POIS, [N], CondensationQuery(0.7, 2))
    tail = sum(comb(N, k, exact=True) for k in range(21, N + 1)) * 2 / 2**N
    assert rep.rows[0].p_theta == pytest.approx(tail, rel=1e-12)
