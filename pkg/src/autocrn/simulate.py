"""Exact stochastic simulation (direct method) and time-averaged occupation."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import NotIrreducible, NotMassPreserving
from .network import ReactionNetwork
from .oracle import check_irreducible
from .states import ExactDistribution, StateIndex, enumerate_states

__all__ = [
    "Trajectory",
    "simulate",
    "empirical_stationary",
    "empirical_stationary_batch",
    "trajectory_seed",
]

_CHUNK = 4096


@dataclass(eq=False)
class Trajectory:
    """Event times and the states entered at those times.

    ``times[0] == 0`` and ``states[0]`` is the initial state; the state is
    constant between consecutive times and the last state persists to
    ``t_max``.
    """

    times: np.ndarray
    states: np.ndarray
    t_max: float
    seed: object


def trajectory_seed(master: int, index: int) -> np.random.SeedSequence:
    """Independent stream for trajectory ``index`` of a batch."""
    return np.random.SeedSequence(master, spawn_key=(index,))


class _Stream:
    """Buffered exponential and uniform draws from one generator."""

    def __init__(self, seed):
        self.rng = np.random.default_rng(seed)
        self._refill()

    def _refill(self):
        self.exp = self.rng.standard_exponential(_CHUNK).tolist()
        self.uni = self.rng.random(_CHUNK).tolist()
        self.k = 0

    def draw(self):
        if self.k == _CHUNK:
            self._refill()
        k = self.k
        self.k += 1
        return self.exp[k], self.uni[k]


def _run(net: ReactionNetwork, x0, t_max: float, seed, visit):
    """Drive the direct method; ``visit(x, t, hold)`` is called for every sojourn."""
    reactants = [[(i, c) for i, c in enumerate(r.reactant) if c] for r in net.reactions]
    deltas = [[(i, d) for i, d in enumerate(r.net_change) if d] for r in net.reactions]
    rates = [r.rate for r in net.reactions]
    nr = len(rates)
    stream = _Stream(seed)
    x = [int(v) for v in x0]
    t = 0.0
    props = [0.0] * nr
    while True:
        total = 0.0
        for j in range(nr):
            p = rates[j]
            for i, c in reactants[j]:
                xi = x[i]
                if xi < c:
                    p = 0.0
                    break
                for s in range(c):
                    p *= xi - s
            props[j] = p
            total += p
        if total == 0.0:
            visit(x, t, t_max - t)
            return
        e, u = stream.draw()
        tau = e / total
        if t + tau >= t_max:
            visit(x, t, t_max - t)
            return
        visit(x, t, tau)
        t += tau
        target = u * total
        acc = 0.0
        chosen = nr - 1
        for j in range(nr):
            acc += props[j]
            if target < acc:
                chosen = j
                break
        while props[chosen] == 0.0:
            chosen -= 1
        for i, d in deltas[chosen]:
            x[i] += d


def simulate(net: ReactionNetwork, x0: Sequence[int], t_max: float, seed) -> Trajectory:
    """Simulate the mass-action jump process from ``x0`` up to time ``t_max``.

    Holding times are exponential with rate equal to the total propensity,
    and the next reaction is chosen proportionally to its propensity. A
    state with zero total propensity is absorbing. Identical seeds give
    identical trajectories.
    """
    if len(x0) != net.n_species or any(v < 0 for v in x0):
        raise ValueError("x0 must hold one non-negative count per species")
    if not t_max > 0:
        raise ValueError("t_max must be positive")
    times, states = [], []

    def visit(x, t, _hold):
        times.append(t)
        states.append(tuple(x))

    _run(net, x0, t_max, seed, visit)
    return Trajectory(np.array(times), np.array(states, dtype=np.int64).reshape(-1, net.n_species), t_max, seed)


def _occupation(net: ReactionNetwork, x0, t_max: float, burn_in: float, seed) -> dict:
    occ: dict = {}

    def visit(x, t, hold):
        lo = max(t, burn_in)
        hi = t + hold
        if hi > lo:
            key = tuple(x)
            occ[key] = occ.get(key, 0.0) + (hi - lo)

    _run(net, x0, t_max, seed, visit)
    return occ


def _to_distribution(net: ReactionNetwork, N: int, occ: dict) -> ExactDistribution:
    states = enumerate_states(net.n_species, N)
    index = StateIndex(states)
    w = np.zeros(len(states))
    keys = sorted(occ)
    if keys:
        pos = index.find(np.array(keys, dtype=np.int64))
        for k, p in zip(keys, pos):
            w[p] += occ[k]
    return ExactDistribution(N, states, w / w.sum())


def _check(net, x0, t_max, burn_in):
    if not 0 <= burn_in < t_max:
        raise ValueError("need 0 <= burn_in < t_max")
    if not net.is_mass_preserving():
        raise NotMassPreserving("empirical stationary law needs a mass-preserving network")
    N = int(sum(x0))
    if not check_irreducible(net, N):
        raise NotIrreducible(f"fixed-total space N={N} is not irreducible")
    return N


def empirical_stationary(
    net: ReactionNetwork, x0: Sequence[int], t_max: float, burn_in: float, seed
) -> ExactDistribution:
    """Time-weighted occupation frequencies over ``(burn_in, t_max]``."""
    N = _check(net, x0, t_max, burn_in)
    return _to_distribution(net, N, _occupation(net, x0, t_max, burn_in, seed))


def empirical_stationary_batch(
    net: ReactionNetwork,
    x0: Sequence[int],
    t_max: float,
    burn_in: float,
    seed: int,
    n_runs: int,
    workers: int | None = 1,
) -> ExactDistribution:
    """Pool the occupation of ``n_runs`` independent trajectories.

    Trajectory ``k`` uses :func:`trajectory_seed` ``(seed, k)`` and partial
    results are combined in index order, so the output does not depend on
    ``workers``.
    """
    N = _check(net, x0, t_max, burn_in)
    seeds = [trajectory_seed(seed, k) for k in range(n_runs)]
    args = [(net, tuple(x0), t_max, burn_in, s) for s in seeds]
    if workers is not None and workers <= 1:
        parts = [_occupation(*a) for a in args]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_occupation_star, args))
    total: dict = {}
    for occ in parts:
        for k in sorted(occ):
            total[k] = total.get(k, 0.0) + occ[k]
    return _to_distribution(net, N, total)


def _occupation_star(args):
    return _occupation(*args)
