import numpy as np
import pytest
from hypothesis import settings

from autocrn import ReactionNetwork, bundled_network
from autocrn.network import Reaction

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


def net_from(species, reactions):
    """``reactions`` as ``(reactant, product, rate)`` with dict complexes."""
    idx = {s: i for i, s in enumerate(species)}

    def vec(d):
        v = [0] * len(species)
        for s, k in d.items():
            v[idx[s]] = k
        return tuple(v)

    return ReactionNetwork(species, [Reaction(vec(a), vec(b), k) for a, b, k in reactions])


def exchange_net(a12, a21, extra=()):
    """Two-species exchange ``S1 <-> S2`` plus extra ``(i, j, m, rate)`` autocatalytic steps."""
    rx = [({"S1": 1}, {"S2": 1}, a12), ({"S2": 1}, {"S1": 1}, a21)]
    names = ("S1", "S2")
    for i, j, m, k in extra:
        src, dst = names[i], names[j]
        rx.append(({src: 1, dst: m - 1} if m > 1 else {src: 1}, {dst: m}, k))
    return net_from(names, rx)


@pytest.fixture
def example():
    return bundled_network


@pytest.fixture
def worked():
    """alpha^1_12 = 2, alpha^1_21 = 1, alpha^2_21 = 3, alpha^2_12 = 1."""
    return exchange_net(2.0, 1.0, [(1, 0, 2, 3.0), (0, 1, 2, 1.0)])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
