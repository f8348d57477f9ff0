"""Fixed-total state spaces and distributions over them."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["ExactDistribution", "enumerate_states", "count_states", "StateIndex", "total_variation"]


def count_states(n: int, N: int) -> int:
    """Number of compositions of ``N`` into ``n`` non-negative parts."""
    return math.comb(N + n - 1, n - 1)


def enumerate_states(n: int, N: int) -> np.ndarray:
    """All ``x >= 0`` with ``sum(x) == N``, in lexicographic order.

    Returns an integer array of shape ``(count_states(n, N), n)``.
    """
    if n < 1 or N < 0:
        raise ValueError("need n >= 1 and N >= 0")
    if n == 1:
        return np.array([[N]], dtype=np.int64)
    # Stars and bars: bar positions in lexicographic order give states in
    # lexicographic order.
    bars = np.array(list(itertools.combinations(range(N + n - 1), n - 1)), dtype=np.int64)
    bars = bars.reshape(-1, n - 1)
    padded = np.hstack([np.full((len(bars), 1), -1), bars, np.full((len(bars), 1), N + n - 1)])
    return np.diff(padded, axis=1) - 1


class StateIndex:
    """Map count vectors of a fixed-total space to their lexicographic rank."""

    def __init__(self, states: np.ndarray):
        self.states = np.asarray(states, dtype=np.int64)
        n = self.states.shape[1]
        N = int(self.states[0].sum()) if len(self.states) else 0
        self.base = N + 1
        self._use_keys = (N + 1) ** n < 2**62
        if self._use_keys:
            self._weights = np.array([self.base ** (n - 1 - i) for i in range(n)], dtype=np.int64)
            self._keys = self.states @ self._weights
        else:
            self._lookup = {tuple(s): k for k, s in enumerate(self.states.tolist())}

    def __len__(self):
        return len(self.states)

    def find(self, targets: np.ndarray) -> np.ndarray:
        """Ranks of ``targets``; ``-1`` for vectors outside the space."""
        targets = np.asarray(targets, dtype=np.int64)
        out = np.full(len(targets), -1, dtype=np.int64)
        valid = np.all(targets >= 0, axis=1) & np.all(targets < self.base, axis=1)
        if self._use_keys:
            keys = targets[valid] @ self._weights
            pos = np.searchsorted(self._keys, keys)
            pos = np.minimum(pos, len(self._keys) - 1)
            hit = self._keys[pos] == keys
            idx = np.flatnonzero(valid)
            out[idx[hit]] = pos[hit]
        else:
            for k in np.flatnonzero(valid):
                out[k] = self._lookup.get(tuple(targets[k].tolist()), -1)
        return out


@dataclass(eq=False)
class ExactDistribution:
    """Probabilities on the lexicographically ordered space of total ``N``."""

    N: int
    states: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=np.int64)
        self.probs = np.asarray(self.probs, dtype=float)
        if len(self.states) != len(self.probs):
            raise ValueError("one probability per state required")

    @property
    def n_species(self) -> int:
        return self.states.shape[1]

    def prob(self, x) -> float:
        k = StateIndex(self.states).find(np.atleast_2d(x))[0]
        return 0.0 if k < 0 else float(self.probs[k])

    def marginal(self, i: int) -> np.ndarray:
        return np.bincount(self.states[:, i], weights=self.probs, minlength=self.N + 1)


def total_variation(d1: ExactDistribution, d2: ExactDistribution) -> float:
    """Half the L1 distance between two distributions on the same ordered states."""
    if d1.states.shape != d2.states.shape or not np.array_equal(d1.states, d2.states):
        raise ValueError("distributions must share the same state ordering")
    return 0.5 * float(np.sum(np.abs(d1.probs - d2.probs)))
