"""Exact evaluation of the product-form stationary law of autocatalytic networks.

On the fixed-total space ``{x >= 0 : sum(x) == N}`` the stationary law is
``pi(x) = prod_i f_i(x_i) / Z_N`` with

    f_i(m) = lam_i^m / m! * prod_{l=1..m} (1 + sum_{k=2..n_i} beta_i^k (l-1)(l-2)...(l-k+1)).

All arithmetic is carried out on ``log f_i``; partition functions are
log-domain convolutions accumulated in ascending index order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .classify import AutocatalyticProfile
from .errors import FugacityOutsideRadius
from .states import ExactDistribution, count_states, enumerate_states

__all__ = [
    "ProductFormTable",
    "FactorClass",
    "CondensationQuery",
    "log_factor_table",
    "log_weight",
    "scaled_profile",
    "log_convolve",
    "partition_function",
    "partition_prefix",
    "build_table",
    "marginal",
    "max_tail",
    "capped_max_tail",
    "prob_all_on",
    "sample_state",
    "sample_states",
    "classify_factor",
    "factor_ratio",
    "generating_function_check",
    "product_form_distribution",
    "stationary_distribution",
]

NEG_INF = -np.inf


def _growth_factors(beta: tuple[float, ...], l: np.ndarray) -> np.ndarray:
    """``1 + sum_k beta^k (l-1)...(l-k+1)`` for an array of ``l >= 1``."""
    out = np.ones_like(l, dtype=float)
    falling = np.ones_like(l, dtype=float)
    for k, b in enumerate(beta, start=2):
        falling = falling * (l - (k - 1))
        if b:
            out += b * falling
    return out


def log_factor_table(profile: AutocatalyticProfile, i: int, N: int) -> np.ndarray:
    """``log f_i(m)`` for ``m = 0..N`` as a running sum in ascending ``m``."""
    if N < 0:
        raise ValueError("N must be non-negative")
    l = np.arange(1, N + 1, dtype=float)
    terms = math.log(profile.lam[i]) + np.log(_growth_factors(profile.beta[i], l)) - np.log(l)
    out = np.empty(N + 1)
    out[0] = 0.0
    np.cumsum(terms, out=out[1:])
    return out


def log_weight(profile: AutocatalyticProfile, i: int, m: int) -> float:
    """``log f_i(m)``; zero at ``m = 0``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    return float(log_factor_table(profile, i, m)[m])


def scaled_profile(profile: AutocatalyticProfile, V: float) -> AutocatalyticProfile:
    """Profile under volume scaling: ``beta_i^k -> beta_i^k / V^(k-1)``."""
    if not V > 0:
        raise ValueError("V must be positive")
    beta = tuple(tuple(b / V ** (k - 1) for k, b in enumerate(bs, start=2)) for bs in profile.beta)
    return replace(profile, beta=beta)


def _lse(v: np.ndarray) -> float:
    m = v.max()
    if m == NEG_INF:
        return NEG_INF
    return float(m + np.log(np.sum(np.exp(v - m))))


def log_convolve(a: np.ndarray, b: np.ndarray, N: int | None = None) -> np.ndarray:
    """``out[t] = log sum_{i<=t} exp(a[i] + b[t-i])`` for ``t = 0..N``."""
    if N is None:
        N = len(a) - 1
    out = np.empty(N + 1)
    for t in range(N + 1):
        lo = max(0, t - (len(b) - 1))
        hi = min(t, len(a) - 1)
        if lo > hi:
            out[t] = NEG_INF
            continue
        out[t] = _lse(a[lo : hi + 1] + b[t - hi : t - lo + 1][::-1])
    return out


def _delta(N: int) -> np.ndarray:
    out = np.full(N + 1, NEG_INF)
    out[0] = 0.0
    return out


def _convolve_all(log_f: np.ndarray, N: int, skip: int | None = None) -> np.ndarray:
    acc = _delta(N)
    for j in range(log_f.shape[0]):
        if j != skip:
            acc = log_convolve(acc, log_f[j], N)
    return acc


def _log_factors(profile: AutocatalyticProfile, N: int) -> np.ndarray:
    return np.vstack([log_factor_table(profile, i, N) for i in range(profile.n_species)])


def partition_prefix(profile: AutocatalyticProfile, N: int) -> np.ndarray:
    """``log Z_t`` for every total ``t = 0..N``."""
    return _convolve_all(_log_factors(profile, N), N)


def partition_function(profile: AutocatalyticProfile, N: int) -> float:
    """``log Z_N`` by species-by-species log-domain convolution."""
    if N < 0:
        raise ValueError("N must be non-negative")
    return float(partition_prefix(profile, N)[N])


@dataclass(eq=False)
class ProductFormTable:
    """Precomputed factor and partition tables for one profile and total ``N``.

    Attributes
    ----------
    log_f : ndarray, shape (n, N+1)
        ``log f_i(m)``.
    log_Z : float
        ``log Z_N``.
    log_Z_prefix : ndarray, shape (N+1,)
        ``log Z_t`` for ``t = 0..N``.
    loo_prefix : ndarray, shape (n, N+1)
        Row ``i`` holds the log partition functions of all species except
        ``i``, at totals ``0..N``.
    suffix : ndarray, shape (n+1, N+1)
        Row ``j`` holds log partition functions of species ``j..n-1``.
    """

    profile: AutocatalyticProfile
    N: int
    log_f: np.ndarray
    log_Z: float
    log_Z_prefix: np.ndarray
    loo_prefix: np.ndarray
    suffix: np.ndarray

    @property
    def n_species(self) -> int:
        return self.log_f.shape[0]


def build_table(profile: AutocatalyticProfile, N: int) -> ProductFormTable:
    if N < 0:
        raise ValueError("N must be non-negative")
    log_f = _log_factors(profile, N)
    n = log_f.shape[0]
    prefix = _convolve_all(log_f, N)
    loo = np.vstack([_convolve_all(log_f, N, skip=i) for i in range(n)])
    suffix = np.empty((n + 1, N + 1))
    suffix[n] = _delta(N)
    for j in range(n - 1, -1, -1):
        suffix[j] = log_convolve(log_f[j], suffix[j + 1], N)
    return ProductFormTable(profile, N, log_f, float(prefix[N]), prefix, loo, suffix)


def _total(table: ProductFormTable, N: int | None) -> int:
    if N is None:
        return table.N
    if not 0 <= N <= table.N:
        raise ValueError(f"total {N} outside the table range 0..{table.N}")
    return N


def marginal(table: ProductFormTable, i: int, N: int | None = None) -> np.ndarray:
    """``P(X_i = m)`` for ``m = 0..N``.

    ``N`` defaults to the table total; any smaller total reuses the same
    prefix tables.
    """
    N = _total(table, N)
    return np.exp(table.log_f[i, : N + 1] + table.loo_prefix[i, N::-1] - table.log_Z_prefix[N])


def prob_all_on(table: ProductFormTable, N: int | None = None) -> np.ndarray:
    """``P(X_j = N)`` for every species ``j``."""
    N = _total(table, N)
    return np.exp(table.log_f[:, N] - table.log_Z_prefix[N])


def max_tail(table: ProductFormTable, m: int, N: int | None = None) -> float:
    """``P(max_i X_i >= m)``.

    For ``2m > N`` at most one coordinate can reach ``m``, so the marginal
    tails are summed. Otherwise the complement is taken from the partition
    function with every factor's support capped to ``0..m-1``.
    """
    N = _total(table, N)
    if not 0 <= m <= N:
        raise ValueError("need 0 <= m <= N")
    if m == 0:
        return 1.0
    if 2 * m > N:
        return float(sum(math.fsum(marginal(table, i, N)[m:].tolist()) for i in range(table.n_species)))
    return capped_max_tail(table, m, N)


def capped_max_tail(table: ProductFormTable, m: int, N: int | None = None) -> float:
    """``P(max_i X_i >= m)`` as ``1 - Z_N^cap / Z_N``, valid for every ``m >= 1``."""
    N = _total(table, N)
    capped = table.log_f[:, : N + 1].copy()
    capped[:, m:] = NEG_INF
    log_cap = _convolve_all(capped, N)[N]
    return float(-np.expm1(log_cap - table.log_Z_prefix[N]))


def sample_states(table: ProductFormTable, size: int, seed: int) -> np.ndarray:
    """Draw ``size`` states by sequential conditional sampling.

    Species ``j`` is drawn given the mass left over by species ``0..j-1``
    with probability ``f_j(m) Z_{j+1..}(r-m) / Z_{j..}(r)``.
    """
    rng = np.random.default_rng(seed)
    n, N = table.n_species, table.N
    u = rng.random((size, max(n - 1, 1)))
    out = np.zeros((size, n), dtype=np.int64)
    remaining = np.full(size, N, dtype=np.int64)
    for j in range(n - 1):
        for r in np.unique(remaining):
            rows = np.flatnonzero(remaining == r)
            logp = table.log_f[j, : r + 1] + table.suffix[j + 1, r::-1] - table.suffix[j, r]
            cdf = np.cumsum(np.exp(logp))
            pick = np.searchsorted(cdf, u[rows, j] * cdf[-1], side="right")
            out[rows, j] = np.minimum(pick, r)
        remaining = remaining - out[:, j]
    out[:, n - 1] = remaining
    return out


def sample_state(table: ProductFormTable, seed: int) -> np.ndarray:
    return sample_states(table, 1, seed)[0]


@dataclass(frozen=True)
class FactorClass:
    kind: str  # "poisson" | "geometric_type" | "super_exponential"
    radius: float


@dataclass(frozen=True)
class CondensationQuery:
    """Thresholds for finite-N condensation probabilities.

    ``theta`` is the mass fraction for ``P(M >= theta N)``, ``K`` the slack
    for ``P(M >= N - K)``, ``target`` the species whose mean fraction is
    reported (defaults to the predicted condensate).
    """

    theta: float = 0.9
    K: int = 0
    target: int | None = None

    def __post_init__(self):
        if not 0 < self.theta < 1:
            raise ValueError("theta must lie in (0, 1)")
        if self.K < 0:
            raise ValueError("K must be non-negative")


def classify_factor(profile: AutocatalyticProfile, i: int) -> FactorClass:
    """Growth type of ``f_i`` and the radius of convergence of its power series."""
    n_i = profile.molecularity(i)
    if n_i == 1:
        return FactorClass("poisson", math.inf)
    if n_i == 2:
        return FactorClass("geometric_type", 1.0 / (profile.lam[i] * profile.beta[i][0]))
    return FactorClass("super_exponential", 0.0)


def factor_ratio(profile: AutocatalyticProfile, i: int, m: int) -> float:
    """``f_i(m+1) / f_i(m)``, the ratio-test probe."""
    g = _growth_factors(profile.beta[i], np.array([m + 1.0]))[0]
    return profile.lam[i] * g / (m + 1)


def generating_function_check(
    profile: AutocatalyticProfile, i: int, phi: float, truncation: int = 200
) -> tuple[float, float | None]:
    """Truncated ``sum_m phi^m f_i(m)`` and its closed form where one exists.

    Raises
    ------
    FugacityOutsideRadius
        If ``phi`` is not strictly inside the radius of convergence.
    """
    if not phi > 0:
        raise ValueError("phi must be positive")
    fc = classify_factor(profile, i)
    if not phi < fc.radius:
        raise FugacityOutsideRadius(
            f"phi={phi} outside radius {fc.radius} of the {fc.kind} factor of species {i}"
        )
    logs = log_factor_table(profile, i, truncation) + np.arange(truncation + 1) * math.log(phi)
    numeric = math.fsum(np.exp(logs).tolist())
    if fc.kind == "poisson":
        closed = math.exp(phi * profile.lam[i])
    else:
        b2 = profile.beta[i][0]
        closed = (1 - profile.lam[i] * b2 * phi) ** (-1 / b2)
    return numeric, closed


def product_form_distribution(log_f: np.ndarray, N: int, max_states: int = 10**6) -> ExactDistribution:
    """Joint law ``prod_i f_i(x_i) / Z`` on the lexicographic space of total ``N``.

    ``log_f`` has one row per species, holding ``log f_i(0..N)``; the factors
    need not come from an autocatalytic profile.
    """
    log_f = np.asarray(log_f, dtype=float)
    n = log_f.shape[0]
    if count_states(n, N) > max_states:
        raise ValueError("state space too large for a joint table")
    states = enumerate_states(n, N)
    logw = np.zeros(len(states))
    for i in range(n):
        logw += log_f[i, states[:, i]]
    logw -= _lse(logw)
    return ExactDistribution(N, states, np.exp(logw))


def stationary_distribution(profile: AutocatalyticProfile, N: int) -> ExactDistribution:
    """Joint product-form stationary law of an autocatalytic profile at total ``N``."""
    return product_form_distribution(_log_factors(profile, N), N)
