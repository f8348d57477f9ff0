"""Brute-force ground truth on the finite space of fixed total mass.

The generator of a mass-preserving network restricted to
``{x >= 0 : sum(x) == N}`` is assembled explicitly and its stationary vector
solved directly. Candidate distributions are checked against the master
equation and against grouped (generalized) balance equations.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import breadth_first_order

from .errors import NotIrreducible, NotMassPreserving, NoConvergence, TooManyStates
from .network import ReactionNetwork, propensities
from .states import ExactDistribution, StateIndex, count_states, enumerate_states, total_variation

__all__ = [
    "ExactDistribution",
    "BalancePartition",
    "enumerate_states",
    "total_variation",
    "check_irreducible",
    "generator_matrix",
    "exact_stationary",
    "master_equation_residual",
    "reaction_vector_balance_residual",
    "generalized_balance_residual",
    "reaction_vector_partition",
    "complex_partition",
    "reaction_partition",
    "parse_partition",
]

log = logging.getLogger(__name__)

MAX_STATES = 10**6


def _require_mass_preserving(net: ReactionNetwork) -> None:
    if not net.is_mass_preserving():
        raise NotMassPreserving("network does not preserve total molecule count")


@dataclass
class _Transitions:
    states: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    rate: np.ndarray


def _transitions(net: ReactionNetwork, N: int, max_states: int) -> _Transitions:
    _require_mass_preserving(net)
    if count_states(net.n_species, N) > max_states:
        raise TooManyStates(f"{count_states(net.n_species, N)} states exceed the cap of {max_states}")
    states = enumerate_states(net.n_species, N)
    index = StateIndex(states)
    props = propensities(net, states)
    src, dst, rate = [], [], []
    for j in range(net.n_reactions):
        active = np.flatnonzero(props[:, j] > 0)
        target = index.find(states[active] + net.stoichiometry[j])
        src.append(active)
        dst.append(target)
        rate.append(props[active, j])
    cat = lambda xs, dt: np.concatenate(xs) if xs else np.zeros(0, dtype=dt)  # noqa: E731
    return _Transitions(states, cat(src, np.int64), cat(dst, np.int64), cat(rate, float))


def check_irreducible(net: ReactionNetwork, N: int, max_states: int = MAX_STATES) -> bool:
    """Whether the fixed-total space is a single communicating class.

    Breadth-first search from the first state along transitions and along
    reversed transitions must both reach every state.
    """
    tr = _transitions(net, N, max_states)
    S = len(tr.states)
    if S == 1:
        return True
    adj = sp.csr_matrix((np.ones(len(tr.src)), (tr.src, tr.dst)), shape=(S, S))
    forward = breadth_first_order(adj, 0, directed=True, return_predecessors=False)
    backward = breadth_first_order(adj.T.tocsr(), 0, directed=True, return_predecessors=False)
    return len(forward) == S and len(backward) == S


def generator_matrix(net: ReactionNetwork, N: int, max_states: int = MAX_STATES):
    """Return ``(states, Q)`` with ``Q`` the sparse CSR generator on the fixed-total space."""
    tr = _transitions(net, N, max_states)
    S = len(tr.states)
    Q = sp.coo_matrix((tr.rate, (tr.src, tr.dst)), shape=(S, S)).tocsr()
    Q = Q - sp.diags(np.asarray(Q.sum(axis=1)).ravel())
    return tr.states, Q.tocsr()


def _flux_residual(pi: np.ndarray, Q) -> float:
    flux = pi @ Q
    scale = np.max(pi * -Q.diagonal(), initial=0.0)
    return 0.0 if scale == 0 else float(np.max(np.abs(flux)) / scale)


def _power_iteration(Q, tol: float, max_iter: int = 10**6) -> np.ndarray:
    S = Q.shape[0]
    outflow = -Q.diagonal()
    lam = outflow.max()
    # lazy uniformized chain: same stationary law, aperiodic
    P = (sp.identity(S, format="csr") + Q / lam).T.tocsr()
    pi = np.full(S, 1.0 / S)
    for _ in range(max_iter):
        nxt = 0.5 * (pi + P @ pi)
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - pi)) < tol:
            return nxt
        pi = nxt
    raise NoConvergence("power iteration did not converge")


def exact_stationary(
    net: ReactionNetwork, N: int, max_states: int = MAX_STATES, tol: float = 1e-12
) -> ExactDistribution:
    """Stationary law on the fixed-total space of ``N`` by solving ``pi Q = 0``.

    One balance equation is replaced by normalisation and the sparse system
    solved directly. If the result is non-finite, markedly negative or leaves
    a flux residual above ``tol``, power iteration on the uniformized chain
    is used instead.

    Raises
    ------
    TooManyStates
        If the space has more than ``max_states`` states.
    NotIrreducible
        If the space is not a single communicating class.
    """
    if not check_irreducible(net, N, max_states):
        raise NotIrreducible(f"fixed-total space N={N} is not irreducible")
    states, Q = generator_matrix(net, N, max_states)
    S = len(states)
    if S == 1:
        return ExactDistribution(N, states, np.ones(1))
    A = Q.T.tolil()
    A[S - 1, :] = np.ones(S)
    b = np.zeros(S)
    b[S - 1] = 1.0
    pi = spla.spsolve(A.tocsc(), b)
    ok = np.all(np.isfinite(pi)) and pi.min() > -1e-12 * np.abs(pi).max()
    if ok:
        pi = np.clip(pi, 0.0, None)
        pi /= pi.sum()
        ok = _flux_residual(pi, Q) <= tol
    if not ok:
        log.info("direct solve rejected, falling back to power iteration")
        pi = _power_iteration(Q, tol=1e-13)
    return ExactDistribution(N, states, pi)


# ----------------------------------------------------------- balance checks


def master_equation_residual(net: ReactionNetwork, dist: ExactDistribution) -> float:
    """``max |pi Q|`` relative to the largest single-state outflow ``pi(x) q(x)``."""
    _, Q = generator_matrix(net, dist.N)
    return _flux_residual(dist.probs, Q)


@dataclass(frozen=True)
class BalancePartition:
    """Blocks ``(L, R)`` of reaction indices.

    The ``L`` sets and the ``R`` sets must each partition all reactions.
    """

    blocks: tuple[tuple[frozenset, frozenset], ...]

    def __init__(self, blocks: Iterable):
        object.__setattr__(
            self, "blocks", tuple((frozenset(L), frozenset(R)) for L, R in blocks)
        )

    def __add__(self, other: "BalancePartition") -> "BalancePartition":
        return BalancePartition(self.blocks + other.blocks)

    def validate(self, n_reactions: int) -> None:
        everything = list(range(n_reactions))
        for side, name in ((0, "L"), (1, "R")):
            seen = sorted(r for block in self.blocks for r in block[side])
            if seen != everything:
                raise ValueError(f"the {name} blocks do not partition the reactions")


def _subset(net: ReactionNetwork, reactions) -> list[int]:
    return list(range(net.n_reactions)) if reactions is None else sorted(reactions)


def reaction_vector_partition(net: ReactionNetwork, reactions: Sequence[int] | None = None) -> BalancePartition:
    """Blocks indexed by net vectors ``a``: ``L_a = {nu - nu' = a}``, ``R_a = {nu - nu' = -a}``."""
    rs = _subset(net, reactions)
    vecs = {}
    for r in rs:
        d = tuple(net.stoichiometry[r])
        vecs.setdefault(tuple(-v for v in d), None)
        vecs.setdefault(d, None)
    blocks = []
    for a in vecs:
        L = [r for r in rs if tuple(-v for v in net.stoichiometry[r]) == a]
        R = [r for r in rs if tuple(net.stoichiometry[r]) == a]
        blocks.append((L, R))
    return BalancePartition(blocks)


def complex_partition(net: ReactionNetwork, reactions: Sequence[int] | None = None) -> BalancePartition:
    """Blocks indexed by complexes ``C``: reactions producing ``C`` (inflow) versus reactions consuming ``C`` (outflow)."""
    rs = _subset(net, reactions)
    cxs = {}
    for r in rs:
        cxs.setdefault(net.reactions[r].reactant, None)
        cxs.setdefault(net.reactions[r].product, None)
    return BalancePartition(
        ([r for r in rs if net.reactions[r].product == c], [r for r in rs if net.reactions[r].reactant == c])
        for c in cxs
    )


def reaction_partition(net: ReactionNetwork, reactions: Sequence[int] | None = None) -> BalancePartition:
    """One block per reaction, pairing it with its reverse."""
    rs = _subset(net, reactions)
    lookup = {(net.reactions[r].reactant, net.reactions[r].product): r for r in rs}
    blocks = []
    for r in rs:
        key = (net.reactions[r].product, net.reactions[r].reactant)
        if key not in lookup:
            raise ValueError(f"reaction {r} has no reverse")
        blocks.append(([r], [lookup[key]]))
    return BalancePartition(blocks)


_SCHEMES = {
    "reaction_vector": reaction_vector_partition,
    "complex": complex_partition,
    "reaction": reaction_partition,
}


def parse_partition(text: str, net: ReactionNetwork) -> BalancePartition:
    """Read a partition document.

    Either ``{"blocks": [{"L": [...], "R": [...]}, ...]}`` with reaction
    indices, or ``{"schemes": [{"kind": "complex", "reactions": [...]}, ...]}``
    combining the standard schemes over subsets of reactions.
    """
    doc = json.loads(text)
    if "blocks" in doc:
        part = BalancePartition((b["L"], b["R"]) for b in doc["blocks"])
    else:
        part = BalancePartition(())
        for item in doc["schemes"]:
            part = part + _SCHEMES[item["kind"]](net, item.get("reactions"))
    part.validate(net.n_reactions)
    return part


def _reaction_fluxes(net: ReactionNetwork, dist: ExactDistribution):
    """Per reaction, the inflow ``pi(x - d) lambda(x - d)`` and outflow ``pi(x) lambda(x)`` at each state."""
    states = dist.states
    index = StateIndex(states)
    props = propensities(net, states)
    inflow = np.zeros_like(props)
    outflow = props * dist.probs[:, None]
    for j in range(net.n_reactions):
        src = index.find(states - net.stoichiometry[j])
        hit = src >= 0
        inflow[hit, j] = outflow[src[hit], j]
    return inflow, outflow


def generalized_balance_residual(
    net: ReactionNetwork, partition: BalancePartition, dist: ExactDistribution
) -> float:
    """Largest relative mismatch of the grouped balance equations over states and blocks."""
    partition.validate(net.n_reactions)
    inflow, outflow = _reaction_fluxes(net, dist)
    worst = 0.0
    for L, R in partition.blocks:
        lhs = inflow[:, sorted(L)].sum(axis=1)
        rhs = outflow[:, sorted(R)].sum(axis=1)
        scale = np.maximum(np.abs(lhs), np.abs(rhs))
        nz = scale > 0
        if nz.any():
            worst = max(worst, float(np.max(np.abs(lhs[nz] - rhs[nz]) / scale[nz])))
    return worst


def reaction_vector_balance_residual(net: ReactionNetwork, dist: ExactDistribution) -> float:
    """Largest relative mismatch of the flux balance grouped by net reaction vector."""
    return generalized_balance_residual(net, reaction_vector_partition(net), dist)
