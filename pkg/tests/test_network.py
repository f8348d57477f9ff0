import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import bisect

from autocrn import bundled_network, parse_network, serialize_network, structural_summary
from autocrn.classify import random_autocatalytic_network
from autocrn.errors import (
    DuplicateReaction,
    NegativeConcentration,
    NetworkFormatError,
    NonPositiveRate,
    NotReversible,
    SelfLoop,
    UnknownSpecies,
)
from autocrn.network import (
    Reaction,
    ReactionNetwork,
    complex_balance_residual,
    detailed_balance_residual,
    find_equilibrium,
    ode_rhs,
    propensities,
    propensity,
)

from conftest import exchange_net, net_from


def doc(reactions, species=("S1", "S2")):
    return json.dumps({"species": list(species), "reactions": reactions})


CYCLE = (("S1", "S3"), [({"S1": 2}, {"S3": 2}, 1.0), ({"S3": 2}, {"S1": 1, "S3": 1}, 1.0), ({"S1": 1, "S3": 1}, {"S1": 2}, 1.0)])


# ------------------------------------------------------------------ parsing


def test_parse_example_a():
    net = parse_network(doc([
        {"reactant": {"S1": 1}, "product": {"S2": 1}, "rate": 1},
        {"reactant": {"S2": 1}, "product": {"S1": 1}, "rate": 1},
    ]))
    assert net.n_species == 2 and net.n_reactions == 2
    assert net == bundled_network("exampleA")


@pytest.mark.parametrize(
    "reactions, err",
    [
        ([{"reactant": {"S1": 1}, "product": {"S2": 1}, "rate": -1}], NonPositiveRate),
        ([{"reactant": {"S1": 1}, "product": {"S2": 1}, "rate": 0}], NonPositiveRate),
        ([{"reactant": {"S1": 1}, "product": {"S1": 1}, "rate": 1}], SelfLoop),
        ([{"reactant": {"S9": 1}, "product": {"S1": 1}, "rate": 1}], UnknownSpecies),
        ([{"reactant": {"S1": 1}, "product": {"S2": 1}, "rate": 1}] * 2, DuplicateReaction),
    ],
)
def test_parse_rejects(reactions, err):
    with pytest.raises(err):
        parse_network(doc(reactions))


def test_parse_rejects_malformed_json():
    with pytest.raises(NetworkFormatError):
        parse_network("{not json")
    with pytest.raises(NetworkFormatError):
        parse_network(json.dumps({"species": ["A", "A"], "reactions": []}))


def test_serialize_examples():
    text = serialize_network(bundled_network("exampleC"))
    assert len(json.loads(text)["reactions"]) == 4
    empty = ReactionNetwork(["A", "B"])
    assert json.loads(serialize_network(empty))["reactions"] == []
    d = bundled_network("exampleD")
    assert parse_network(serialize_network(d)) == d


@given(st.integers(0, 10**6), st.integers(2, 4))
def test_round_trip_random(seed, n):
    net = random_autocatalytic_network(np.random.default_rng(seed), n)
    assert parse_network(serialize_network(net)) == net


# --------------------------------------------------------------- structure


@pytest.mark.parametrize("name, deficiency, weak", [("exampleA", 0, True), ("exampleB", 1, False), ("exampleC", 2, False)])
def test_structural_examples(name, deficiency, weak):
    rep = structural_summary(bundled_network(name))
    assert rep.deficiency == deficiency
    assert rep.weakly_reversible is weak


def test_structural_report_fields():
    rep = structural_summary(bundled_network("combined"))
    # S1, S2, S1+S2, 2S2, 2S1, 2S3, S1+S3
    assert rep.num_complexes == 7
    assert len(rep.linkage_classes) == 3
    assert rep.stoich_dim == 2
    assert rep.deficiency == 2
    assert rep.mass_preserving and not rep.reversible


@given(st.integers(0, 10**6), st.integers(2, 4))
def test_structure_invariants_random(seed, n):
    rng = np.random.default_rng(seed)
    net = random_autocatalytic_network(rng, n)
    rep = structural_summary(net)
    assert rep.deficiency >= 0
    assert rep.deficiency == rep.num_complexes - len(rep.linkage_classes) - rep.stoich_dim
    assert not rep.reversible or rep.weakly_reversible
    # reaction order
    perm = rng.permutation(net.n_reactions)
    shuffled = ReactionNetwork(net.species, [net.reactions[k] for k in perm])
    rep2 = structural_summary(shuffled)
    assert (rep2.deficiency, rep2.stoich_dim, rep2.num_complexes, len(rep2.linkage_classes)) == (
        rep.deficiency, rep.stoich_dim, rep.num_complexes, len(rep.linkage_classes))
    assert rep2.weakly_reversible == rep.weakly_reversible
    # species relabelling
    sp = rng.permutation(n)
    relabel = ReactionNetwork(
        [net.species[i] for i in sp],
        [Reaction(tuple(r.reactant[i] for i in sp), tuple(r.product[i] for i in sp), r.rate) for r in net.reactions],
    )
    rep3 = structural_summary(relabel)
    assert (rep3.deficiency, rep3.stoich_dim, rep3.weakly_reversible) == (rep.deficiency, rep.stoich_dim, rep.weakly_reversible)


def test_inert_species_is_allowed():
    net = net_from(("A", "B", "C"), [({"A": 1}, {"B": 1}, 1.0)])
    rep = structural_summary(net)
    assert rep.stoich_dim == 1 and rep.deficiency == 0


# ---------------------------------------------------------------- kinetics


def test_propensity_examples():
    net = net_from(("S1", "S2"), [({"S1": 1, "S2": 1}, {"S2": 2}, 1.0), ({"S1": 1}, {"S2": 1}, 3.0), ({"S1": 2, "S2": 1}, {"S1": 3}, 2.0)])
    assert propensity(net, (2, 1), 0) == 2
    assert propensity(net, (0, 5), 1) == 0
    assert propensity(net, (4, 2), 2) == 48
    with pytest.raises(IndexError):
        propensity(net, (1, 1), 3)


def _naive(x, nu, k):
    if any(a < b for a, b in zip(x, nu)):
        return 0.0
    return k * math.prod(math.factorial(a) // math.factorial(a - b) for a, b in zip(x, nu))


@given(st.integers(0, 10**6), st.integers(1, 3))
def test_propensity_matches_factorial_oracle(seed, n):
    rng = np.random.default_rng(seed)
    rx = []
    seen = set()
    for _ in range(4):
        a = tuple(int(v) for v in rng.integers(0, 4, n))
        b = tuple(int(v) for v in rng.integers(0, 4, n))
        if sum(a) == 0 or sum(b) == 0 or a == b or (a, b) in seen:
            continue
        seen.add((a, b))
        rx.append(Reaction(a, b, float(rng.uniform(0.1, 5))))
    net = ReactionNetwork([f"X{i}" for i in range(n)], rx)
    states = [x for x in itertools.product(range(9), repeat=n) if sum(x) <= 8]
    batch = propensities(net, np.array(states))
    for s, x in enumerate(states):
        for j, r in enumerate(net.reactions):
            want = _naive(x, r.reactant, r.rate)
            assert propensity(net, x, j) == pytest.approx(want, rel=1e-14)
            assert batch[s, j] == pytest.approx(want, rel=1e-14)


def test_ode_rhs_examples():
    a, b = 0.3, 1.7
    assert np.allclose(ode_rhs(bundled_network("exampleA"), [a, b]), [b - a, a - b])
    net = bundled_network("birth_death")
    for y in np.linspace(0, 1, 11):
        dy = ode_rhs(net, [1 - y, y])[1]
        assert dy == pytest.approx((1 - y) - y - y * (1 - y) ** 2, abs=1e-15)
    with pytest.raises(NegativeConcentration):
        ode_rhs(net, [-0.1, 1.0])


def test_ode_rhs_zero_power_convention():
    net = net_from(("A", "B"), [({"A": 1}, {"B": 1}, 2.0)])
    assert np.array_equal(ode_rhs(net, [0.0, 0.0]), [0.0, 0.0])
    assert np.array_equal(ode_rhs(net, [1.0, 0.0]), [-2.0, 2.0])


@given(st.integers(0, 10**6), st.integers(2, 4))
def test_ode_rhs_conserves_mass(seed, n):
    rng = np.random.default_rng(seed)
    net = random_autocatalytic_network(rng, n)
    c = rng.uniform(0, 5, n)
    rhs = ode_rhs(net, c)
    scale = np.sum(np.abs(net.rates * np.prod(c ** net.reactant_matrix, axis=1)))
    assert abs(rhs.sum()) <= 1e-14 * max(scale, 1.0) * n


def test_find_equilibrium_examples():
    assert np.allclose(find_equilibrium(bundled_network("exampleA"), [0.2, 0.8]), [0.5, 0.5], atol=1e-9)
    y_star = bisect(lambda y: (1 - y) - y - y * (1 - y) ** 2, 0.0, 1.0, xtol=1e-15)
    c = find_equilibrium(bundled_network("birth_death"), [0.5, 0.5])
    assert c[1] == pytest.approx(y_star, abs=1e-8)
    assert c.sum() == pytest.approx(1.0, abs=1e-9)
    cyc = net_from(*CYCLE)
    assert np.allclose(find_equilibrium(cyc, [1.5, 0.5]), [1.0, 1.0], atol=1e-8)


def test_detailed_balance_examples():
    assert detailed_balance_residual(exchange_net(1, 1), [1, 1]) == 0
    assert detailed_balance_residual(exchange_net(2, 1), [1, 2]) == 0
    with pytest.raises(NotReversible):
        detailed_balance_residual(bundled_network("exampleC"), [1, 1])


def test_complex_balance_examples():
    cyc = net_from(*CYCLE)
    assert complex_balance_residual(cyc, [1, 1]) == 0
    assert complex_balance_residual(cyc.with_rates([2, 1, 1]), [1, 1]) > 0
    assert complex_balance_residual(exchange_net(1, 1), [1, 1]) == 0


@given(st.integers(0, 10**6))
def test_detailed_implies_complex_balance(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 4))
    a = rng.uniform(0.2, 3.0, n)
    rx = {}
    for _ in range(5):
        nu = tuple(int(v) for v in rng.integers(0, 3, n))
        nu2 = tuple(int(v) for v in rng.integers(0, 3, n))
        if sum(nu) == 0 or sum(nu2) == 0 or nu == nu2 or (nu, nu2) in rx or (nu2, nu) in rx:
            continue
        k = float(rng.uniform(0.1, 5))
        rx[(nu, nu2)] = k
        rx[(nu2, nu)] = k * np.prod(a ** np.array(nu)) / np.prod(a ** np.array(nu2))
    net = ReactionNetwork([f"X{i}" for i in range(n)], [Reaction(p, q, k) for (p, q), k in rx.items()])
    assert detailed_balance_residual(net, a) <= 1e-12
    assert complex_balance_residual(net, a) <= 1e-12
