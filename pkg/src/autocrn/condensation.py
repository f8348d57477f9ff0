"""Condensation regimes and exact finite-N condensation statistics.

The regime is predicted from the profile alone: only the species of largest
molecularity ``n*`` can carry the bulk of the mass, and among those the
largest ``lam_i * beta_i^{n*}`` wins. Finite-N curves are computed exactly
from product-form tables.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .classify import AutocatalyticProfile
from .errors import WrongFactorType, WrongRegime
from .productform import (
    CondensationQuery,
    ProductFormTable,
    build_table,
    log_factor_table,
    marginal,
    max_tail,
    prob_all_on,
)

__all__ = [
    "CondensationRegime",
    "CondensationReport",
    "FactorDecomposition",
    "BoundScan",
    "classify_condensation",
    "condensation_curve",
    "partition_asymptotics",
    "appendix_bound_scan",
    "lln_diagnostic",
    "factor_decomposition",
    "domination_probe",
]

TIE_RTOL = 1e-9


@dataclass(frozen=True)
class CondensationRegime:
    """Predicted regime.

    ``maximal_set`` holds the candidate condensate species (empty for
    ``none``), ``scores`` the values ``lam_i beta_i^{n*}`` compared. A
    ``near_tie`` flags a grouped maximal set whose factors are not
    identical.
    """

    regime: str  # "none" | "C3_weak" | "C1_strong" | "unclassified"
    n_star: int
    maximal_set: tuple[int, ...]
    scores: tuple[float, ...]
    near_tie: bool = False

    @property
    def k(self) -> int:
        return len(self.maximal_set)

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "n_star": self.n_star,
            "maximal_set": list(self.maximal_set),
            "k": self.k,
            "near_tie": self.near_tie,
        }


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= TIE_RTOL * max(abs(a), abs(b))


def classify_condensation(profile: AutocatalyticProfile) -> CondensationRegime:
    n_star = max(profile.molecularity(i) for i in range(profile.n_species))
    if n_star == 1:
        return CondensationRegime("none", 1, (), ())
    top = [i for i in range(profile.n_species) if profile.molecularity(i) == n_star]
    scores = {i: profile.lam[i] * profile.beta[i][n_star - 2] for i in top}
    best = max(scores.values())
    group = tuple(i for i in top if _close(scores[i], best))
    score_tuple = tuple(scores.get(i, 0.0) for i in range(profile.n_species))
    if n_star == 2:
        if len(group) > 1:
            return CondensationRegime("unclassified", 2, group, score_tuple)
        return CondensationRegime("C3_weak", 2, group, score_tuple)
    ref = group[0]
    near = any(
        profile.lam[j] != profile.lam[ref] or profile.beta[j] != profile.beta[ref] for j in group[1:]
    )
    if near:
        warnings.warn(
            f"maximal set {group} is grouped within relative {TIE_RTOL} but the factors differ; "
            "the limit 1/k assumes identical factors",
            stacklevel=2,
        )
    return CondensationRegime("C1_strong", n_star, group, score_tuple, near)


@dataclass(frozen=True)
class CondensationRow:
    N: int
    p_exact_max: float
    p_within_K: float
    p_theta: float
    mean_fraction: float
    zn_over_kf: float


@dataclass
class CondensationReport:
    rows: list[CondensationRow]
    regime: CondensationRegime
    query: CondensationQuery
    target: int

    @property
    def maximal_set(self) -> tuple[int, ...]:
        return self.regime.maximal_set

    @property
    def k(self) -> int:
        return self.regime.k

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def header(self) -> dict:
        out = self.regime.to_dict()
        out.update(theta=self.query.theta, K=self.query.K, target=self.target)
        return out

    def to_csv(self) -> str:
        lines = ["# " + json.dumps(self.header(), sort_keys=True)]
        lines.append("N,p_exact_max,p_within_K,p_theta,mean_fraction,zn_over_kf")
        for r in self.rows:
            vals = [r.p_exact_max, r.p_within_K, r.p_theta, r.mean_fraction, r.zn_over_kf]
            lines.append(",".join([str(r.N)] + [format(v, ".17g") for v in vals]))
        return "\n".join(lines) + "\n"


def _ceil_frac(theta: float, N: int) -> int:
    # guard against 0.9 * 20 = 18.000000000000004
    return math.ceil(round(theta * N, 9))


def _check_increasing(N_values) -> list[int]:
    Ns = [int(n) for n in N_values]
    if not Ns or any(b <= a for a, b in zip(Ns, Ns[1:])) or Ns[0] < 0:
        raise ValueError("N_values must be a non-empty increasing list of non-negative integers")
    return Ns


def _log_gap(table: ProductFormTable, group: tuple[int, ...], N: int) -> float:
    """``log Z_N - log sum_{j in group} f_j(N)``; equals ``log(Z_N / (k f(N)))`` for identical factors."""
    lf = table.log_f[list(group), N]
    m = lf.max()
    return float(table.log_Z_prefix[N] - (m + np.log(np.sum(np.exp(lf - m)))))


def condensation_curve(profile: AutocatalyticProfile, N_values, query: CondensationQuery | None = None) -> CondensationReport:
    """Exact ``P(M = N)``, ``P(M >= N - K)``, ``P(M >= ceil(theta N))`` and ``E[X_target]/N`` per ``N``.

    ``M`` is the largest coordinate. A single table at the largest ``N`` serves
    every row. The ``zn_over_kf`` column is ``nan`` unless the regime is
    ``C1_strong``.
    """
    query = query or CondensationQuery()
    Ns = _check_increasing(N_values)
    if Ns[0] < query.K:
        raise ValueError("K exceeds the smallest N")
    regime = classify_condensation(profile)
    target = query.target if query.target is not None else (regime.maximal_set or (0,))[0]
    if not 0 <= target < profile.n_species:
        raise ValueError(f"target species {target} out of range")
    table = build_table(profile, Ns[-1])
    rows = []
    for N in Ns:
        p_max = min(1.0, math.fsum(prob_all_on(table, N).tolist()))
        p_K = max_tail(table, N - query.K, N)
        p_theta = max_tail(table, _ceil_frac(query.theta, N), N)
        if N == 0:
            mean = float("nan")
        else:
            mean = float(np.dot(np.arange(N + 1), marginal(table, target, N))) / N
        gap = math.exp(_log_gap(table, regime.maximal_set, N)) if regime.regime == "C1_strong" else float("nan")
        rows.append(CondensationRow(N, p_max, min(1.0, p_K), min(1.0, p_theta), mean, gap))
    return CondensationReport(rows, regime, query, target)


def partition_asymptotics(profile: AutocatalyticProfile, N_values) -> np.ndarray:
    """``Z_N / (k f(N))`` for each ``N``, with ``f`` the maximal factor.

    Raises
    ------
    WrongRegime
        Unless the regime is ``C1_strong``.
    """
    regime = classify_condensation(profile)
    if regime.regime != "C1_strong":
        raise WrongRegime(f"partition asymptotics need C1_strong, got {regime.regime}")
    Ns = _check_increasing(N_values)
    table = build_table(profile, Ns[-1])
    return np.array([math.exp(_log_gap(table, regime.maximal_set, N)) for N in Ns])


@dataclass
class LLNRow:
    N: int
    mean_fraction: float
    p_upper: float


def lln_diagnostic(profile: AutocatalyticProfile, N_values, i_star: int, theta: float = 0.1) -> list[LLNRow]:
    """Exact ``E[X_i*]/N`` and ``P(X_i* >= ceil((1 - theta) N))`` per ``N``."""
    if not 0 < theta < 1:
        raise ValueError("theta must lie in (0, 1)")
    Ns = _check_increasing(N_values)
    table = build_table(profile, Ns[-1])
    out = []
    for N in Ns:
        p = marginal(table, i_star, N)
        mean = float(np.dot(np.arange(N + 1), p)) / N if N else float("nan")
        cut = _ceil_frac(1 - theta, N)
        out.append(LLNRow(N, mean, min(1.0, math.fsum(p[cut:].tolist()))))
    return out


@dataclass
class BoundScan:
    """Scaled quotients bounding one super-exponential factor and its partition function.

    ``q1, q2, q3`` are per-``N`` values of ``(N-3) f(N-1) f(1) / f(N)``,
    ``(N-3)(N-4) f(N-2) f(2) / f(N)`` and
    ``(N-3)(N-4)(N-5) f(N-3) f(3) / f(N)``; ``unimodal`` records whether
    ``f(N-i) f(i) <= f(N-3) f(3)`` for all ``3 <= i <= N/2``. ``pair_sum``
    holds ``sum_{i=1}^{N-1} f_1(i) f_2(N-i) / f_1(N)`` when a partner is given.
    """

    N: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    q3: np.ndarray
    unimodal: np.ndarray
    pair_sum: np.ndarray | None = None

    @property
    def constants(self) -> tuple[float, float, float]:
        return float(self.q1.max()), float(self.q2.max()), float(self.q3.max())

    @property
    def pair_sum_decreasing(self) -> bool | None:
        if self.pair_sum is None:
            return None
        return bool(np.all(np.diff(self.pair_sum) < 0))


def appendix_bound_scan(
    profile: AutocatalyticProfile, i: int, N_values, partner: int | None = None
) -> BoundScan:
    """Scan the rough product-form estimates for species ``i`` over ``N_values``.

    ``partner`` selects a second species for the two-species correction sum.

    Raises
    ------
    WrongFactorType
        If ``beta_i^3`` is zero.
    """
    bs = profile.beta[i]
    if len(bs) < 2 or not bs[1] > 0:
        raise WrongFactorType(f"species {i} has no trimolecular autocatalysis")
    Ns = np.array(_check_increasing(N_values), dtype=np.int64)
    if Ns[0] < 6:
        raise ValueError("scan needs N >= 6")
    lf = log_factor_table(profile, i, int(Ns[-1]))
    Nf = Ns.astype(float)
    q1 = np.exp(np.log(Nf - 3) + lf[Ns - 1] + lf[1] - lf[Ns])
    q2 = np.exp(np.log((Nf - 3) * (Nf - 4)) + lf[Ns - 2] + lf[2] - lf[Ns])
    q3 = np.exp(np.log((Nf - 3) * (Nf - 4) * (Nf - 5)) + lf[Ns - 3] + lf[3] - lf[Ns])
    unimodal = np.empty(len(Ns), dtype=bool)
    for k, N in enumerate(Ns):
        js = np.arange(3, N // 2 + 1)
        lhs = lf[N - js] + lf[js]
        ref = lf[N - 3] + lf[3]
        unimodal[k] = bool(np.all(lhs <= ref + 1e-12 * max(1.0, abs(ref))))
    pair = None
    if partner is not None:
        lf2 = log_factor_table(profile, partner, int(Ns[-1]))
        pair = np.empty(len(Ns))
        for k, N in enumerate(Ns):
            js = np.arange(1, N)
            pair[k] = math.fsum(np.exp(lf[js] + lf2[N - js] - lf[N]).tolist())
    return BoundScan(Ns, q1, q2, q3, unimodal, pair)


@dataclass(frozen=True)
class FactorDecomposition:
    """Split ``f_i(m) = mu_i^m w_i(m)`` for profiles with molecularity at most two.

    Bimolecular species use ``mu_i = lam_i beta_i^2``, for which
    ``w_i(m) = Gamma(m + 1/beta) / (Gamma(1/beta) m!)`` grows polynomially.
    Poisson species use ``mu_i = lam_i`` and ``w_i(m) = 1/m!``.
    """

    profile: AutocatalyticProfile
    mu: tuple[float, ...]

    def log_w(self, i: int, m) -> np.ndarray:
        m = np.asarray(m, dtype=float)
        if self.profile.molecularity(i) == 1:
            return -gammaln(m + 1)
        a = 1.0 / self.profile.beta[i][0]
        return gammaln(m + a) - gammaln(a) - gammaln(m + 1)

    def log_f(self, i: int, m) -> np.ndarray:
        return np.asarray(m, dtype=float) * math.log(self.mu[i]) + self.log_w(i, m)


def factor_decomposition(profile: AutocatalyticProfile) -> FactorDecomposition:
    """Raises ``WrongFactorType`` if some species is super-exponential."""
    mu = []
    for i in range(profile.n_species):
        n_i = profile.molecularity(i)
        if n_i > 2:
            raise WrongFactorType(f"species {i} has super-exponential growth")
        mu.append(profile.lam[i] if n_i == 1 else profile.lam[i] * profile.beta[i][0])
    return FactorDecomposition(profile, tuple(mu))


def domination_probe(profile: AutocatalyticProfile, m_max: int = 10**4) -> dict[int, float]:
    """``max_{m <= m_max} f_j(m) / (mu_{i*}^m w_{i*}(m))`` for every ``j != i*``.

    A diagnostic for the weak-condensation regime only; finite values on a
    finite window prove nothing about the limit.
    """
    regime = classify_condensation(profile)
    if regime.regime != "C3_weak":
        raise WrongRegime(f"domination probe needs C3_weak, got {regime.regime}")
    dec = factor_decomposition(profile)
    star = regime.maximal_set[0]
    m = np.arange(m_max + 1)
    ref = dec.log_f(star, m)
    return {
        j: float(np.exp(np.max(dec.log_f(j, m) - ref)))
        for j in range(profile.n_species)
        if j != star
    }
