"""Reaction network representation, JSON I/O, structure and mass-action kinetics.

A complex is stored densely as a tuple of non-negative integer coefficients,
one per species, in the order of :attr:`ReactionNetwork.species`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import (
    DuplicateReaction,
    EmptyComplex,
    NegativeConcentration,
    NetworkFormatError,
    NoConvergence,
    NonPositiveRate,
    NotReversible,
    SelfLoop,
    UnknownSpecies,
)

__all__ = [
    "Reaction",
    "ReactionNetwork",
    "StructuralReport",
    "parse_network",
    "serialize_network",
    "load_network",
    "structural_summary",
    "propensity",
    "propensities",
    "ode_rhs",
    "find_equilibrium",
    "detailed_balance_residual",
    "complex_balance_residual",
    "format_complex",
]

Complex = tuple[int, ...]


@dataclass(frozen=True)
class Reaction:
    reactant: Complex
    product: Complex
    rate: float

    def __post_init__(self):
        if len(self.reactant) != len(self.product):
            raise NetworkFormatError("reactant and product have different lengths")
        if any(c < 0 for c in self.reactant + self.product):
            raise NetworkFormatError("negative stoichiometric coefficient")
        if not any(self.reactant) or not any(self.product):
            raise EmptyComplex("complexes used in reactions must be non-empty")
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise NonPositiveRate(f"rate must be positive and finite, got {self.rate}")
        if self.reactant == self.product:
            raise SelfLoop("reactant equals product")
        object.__setattr__(self, "reactant", tuple(int(c) for c in self.reactant))
        object.__setattr__(self, "product", tuple(int(c) for c in self.product))
        object.__setattr__(self, "rate", float(self.rate))

    @property
    def molecularity(self) -> int:
        return sum(self.reactant)

    @property
    def net_change(self) -> Complex:
        return tuple(p - r for r, p in zip(self.reactant, self.product))


@dataclass(frozen=True)
class ReactionNetwork:
    """Species names plus a list of mass-action reactions.

    Parameters
    ----------
    species : sequence of str
        Unique species names; their order fixes the coordinate order of
        every state and concentration vector.
    reactions : sequence of Reaction
        Reactions with coefficient tuples of length ``len(species)``. No two
        reactions may share the same (reactant, product) pair.
    """

    species: tuple[str, ...]
    reactions: tuple[Reaction, ...]

    def __init__(self, species: Sequence[str], reactions: Sequence[Reaction] = ()):
        object.__setattr__(self, "species", tuple(species))
        object.__setattr__(self, "reactions", tuple(reactions))
        if len(set(self.species)) != len(self.species):
            raise NetworkFormatError("species names must be unique")
        n = len(self.species)
        seen = set()
        for r in self.reactions:
            if len(r.reactant) != n:
                raise NetworkFormatError("coefficient vector length does not match species count")
            key = (r.reactant, r.product)
            if key in seen:
                raise DuplicateReaction(
                    f"duplicate reaction {format_complex(r.reactant, self.species)} -> "
                    f"{format_complex(r.product, self.species)}"
                )
            seen.add(key)

    @property
    def n_species(self) -> int:
        return len(self.species)

    @property
    def n_reactions(self) -> int:
        return len(self.reactions)

    @cached_property
    def reactant_matrix(self) -> np.ndarray:
        return np.array([r.reactant for r in self.reactions], dtype=np.int64).reshape(
            self.n_reactions, self.n_species
        )

    @cached_property
    def product_matrix(self) -> np.ndarray:
        return np.array([r.product for r in self.reactions], dtype=np.int64).reshape(
            self.n_reactions, self.n_species
        )

    @cached_property
    def rates(self) -> np.ndarray:
        return np.array([r.rate for r in self.reactions], dtype=float)

    @property
    def stoichiometry(self) -> np.ndarray:
        """Net change vectors, one row per reaction."""
        return self.product_matrix - self.reactant_matrix

    @cached_property
    def complexes(self) -> tuple[Complex, ...]:
        """Distinct complexes in order of first appearance."""
        out = {}
        for r in self.reactions:
            out.setdefault(r.reactant, None)
            out.setdefault(r.product, None)
        return tuple(out)

    def index(self, name: str) -> int:
        try:
            return self.species.index(name)
        except ValueError:
            raise UnknownSpecies(f"unknown species {name!r}") from None

    def is_mass_preserving(self) -> bool:
        return all(sum(r.reactant) == sum(r.product) for r in self.reactions)

    def with_rates(self, rates: Sequence[float]) -> "ReactionNetwork":
        rates = list(rates)
        if len(rates) != self.n_reactions:
            raise ValueError("one rate per reaction required")
        return ReactionNetwork(
            self.species,
            [Reaction(r.reactant, r.product, float(k)) for r, k in zip(self.reactions, rates)],
        )


def format_complex(c: Complex, species: Sequence[str]) -> str:
    terms = [(f"{k}" if k > 1 else "") + s for k, s in zip(c, species) if k]
    return "+".join(terms) if terms else "0"


# --------------------------------------------------------------------- I/O


def _complex_from_json(obj, species_index, where):
    if not isinstance(obj, dict):
        raise NetworkFormatError(f"{where} must be an object mapping species to counts")
    coeffs = [0] * len(species_index)
    for name, k in obj.items():
        if name not in species_index:
            raise UnknownSpecies(f"unknown species {name!r} in {where}")
        if isinstance(k, bool) or not isinstance(k, int) or k <= 0:
            raise NetworkFormatError(f"coefficient of {name!r} in {where} must be a positive integer")
        coeffs[species_index[name]] = k
    return tuple(coeffs)


def parse_network(text: str) -> ReactionNetwork:
    """Parse and validate a network JSON document.

    Raises
    ------
    NetworkFormatError
        Malformed JSON or schema violation. The subclasses ``UnknownSpecies``,
        ``NonPositiveRate``, ``SelfLoop``, ``DuplicateReaction`` and
        ``EmptyComplex`` identify specific defects.
    """
    try:
        doc = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise NetworkFormatError(f"malformed JSON: {exc}") from exc
    if not isinstance(doc, dict) or "species" not in doc or "reactions" not in doc:
        raise NetworkFormatError("document must be an object with 'species' and 'reactions'")
    species = doc["species"]
    if not isinstance(species, list) or not all(isinstance(s, str) for s in species):
        raise NetworkFormatError("'species' must be an array of strings")
    if len(set(species)) != len(species):
        raise NetworkFormatError("species names must be unique")
    if not isinstance(doc["reactions"], list):
        raise NetworkFormatError("'reactions' must be an array")
    index = {s: i for i, s in enumerate(species)}
    reactions = []
    for k, item in enumerate(doc["reactions"]):
        if not isinstance(item, dict) or not {"reactant", "product", "rate"} <= set(item):
            raise NetworkFormatError(f"reaction {k} needs 'reactant', 'product' and 'rate'")
        rate = item["rate"]
        if isinstance(rate, bool) or not isinstance(rate, (int, float)):
            raise NetworkFormatError(f"rate of reaction {k} must be a number")
        if not rate > 0:
            raise NonPositiveRate(f"rate of reaction {k} must be positive, got {rate}")
        reactions.append(
            Reaction(
                _complex_from_json(item["reactant"], index, f"reaction {k} reactant"),
                _complex_from_json(item["product"], index, f"reaction {k} product"),
                float(rate),
            )
        )
    return ReactionNetwork(species, reactions)


def serialize_network(net: ReactionNetwork) -> str:
    def cx(c):
        return {s: k for s, k in zip(net.species, c) if k}

    doc = {
        "species": list(net.species),
        "reactions": [
            {"reactant": cx(r.reactant), "product": cx(r.product), "rate": r.rate}
            for r in net.reactions
        ],
    }
    return json.dumps(doc, indent=2)


def load_network(path) -> ReactionNetwork:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


# --------------------------------------------------------------- structure


@dataclass(frozen=True)
class StructuralReport:
    num_complexes: int
    linkage_classes: tuple[tuple[Complex, ...], ...]
    stoich_dim: int
    deficiency: int
    weakly_reversible: bool
    reversible: bool
    mass_preserving: bool
    max_molecularity: int

    def to_dict(self, species: Sequence[str]) -> dict:
        return {
            "num_complexes": self.num_complexes,
            "linkage_classes": [[format_complex(c, species) for c in lc] for lc in self.linkage_classes],
            "num_linkage_classes": len(self.linkage_classes),
            "stoich_dim": self.stoich_dim,
            "deficiency": self.deficiency,
            "weakly_reversible": self.weakly_reversible,
            "reversible": self.reversible,
            "mass_preserving": self.mass_preserving,
            "max_molecularity": self.max_molecularity,
        }


def integer_rank(rows: Sequence[Sequence[int]]) -> int:
    """Exact rank of an integer matrix by fraction-free row reduction."""
    m = [list(map(int, r)) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for col in range(ncols):
        pivot = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        p = m[rank]
        for i in range(rank + 1, len(m)):
            a = m[i][col]
            if a == 0:
                continue
            row = [x * p[col] - y * a for x, y in zip(m[i], p)]
            g = math.gcd(*row)
            m[i] = [x // g for x in row] if g > 1 else row
        rank += 1
        if rank == len(m):
            break
    return rank


def structural_summary(net: ReactionNetwork) -> StructuralReport:
    """Complexes, linkage classes, stoichiometric rank and deficiency."""
    cx = net.complexes
    idx = {c: i for i, c in enumerate(cx)}
    nc = len(cx)
    src = [idx[r.reactant] for r in net.reactions]
    dst = [idx[r.product] for r in net.reactions]
    if nc:
        graph = coo_matrix((np.ones(len(src)), (src, dst)), shape=(nc, nc)).tocsr()
        n_lc, lc_label = connected_components(graph, directed=True, connection="weak")
        _, scc_label = connected_components(graph, directed=True, connection="strong")
    else:
        n_lc, lc_label, scc_label = 0, np.zeros(0, int), np.zeros(0, int)
    linkage = tuple(
        tuple(c for c in cx if lc_label[idx[c]] == k) for k in range(n_lc)
    )
    weakly = all(scc_label[a] == scc_label[b] for a, b in zip(src, dst))
    pairs = {(r.reactant, r.product) for r in net.reactions}
    reversible = all((p, r) in pairs for r, p in pairs)
    s = integer_rank([r.net_change for r in net.reactions])
    return StructuralReport(
        num_complexes=nc,
        linkage_classes=linkage,
        stoich_dim=s,
        deficiency=nc - n_lc - s,
        weakly_reversible=weakly,
        reversible=reversible,
        mass_preserving=net.is_mass_preserving(),
        max_molecularity=max((r.molecularity for r in net.reactions), default=0),
    )


# ---------------------------------------------------------------- kinetics


def propensity(net: ReactionNetwork, x: Sequence[int], r: int) -> float:
    """Stochastic mass-action intensity ``kappa * x!/(x-nu)!`` of reaction ``r``."""
    if not 0 <= r < net.n_reactions:
        raise IndexError(f"reaction index {r} out of range")
    if len(x) != net.n_species or any(v < 0 for v in x):
        raise ValueError("x must hold one non-negative count per species")
    rx = net.reactions[r]
    out = 1
    for xi, nu in zip(x, rx.reactant):
        out *= math.perm(int(xi), nu)
    return rx.rate * out


def falling_factorial(x: np.ndarray, k: int) -> np.ndarray:
    out = np.ones_like(x, dtype=float)
    for t in range(k):
        out *= x - t
    return out


def propensities(net: ReactionNetwork, states: np.ndarray) -> np.ndarray:
    """All propensities at a batch of states, shape ``(n_states, n_reactions)``.

    Falling factorials of non-negative integers vanish when ``x < nu``, so no
    explicit indicator is needed.
    """
    states = np.asarray(states, dtype=float)
    out = np.empty((states.shape[0], net.n_reactions))
    nu = net.reactant_matrix
    for j in range(net.n_reactions):
        col = np.full(states.shape[0], net.rates[j])
        for i in np.flatnonzero(nu[j]):
            col *= falling_factorial(states[:, i], int(nu[j, i]))
        out[:, j] = col
    return out


def _monomials(net: ReactionNetwork, c: np.ndarray) -> np.ndarray:
    # numpy gives 0.0**0 == 1.0, the required convention
    return np.prod(c[None, :] ** net.reactant_matrix, axis=1)


def _rhs(net: ReactionNetwork, c: np.ndarray) -> np.ndarray:
    if net.n_reactions == 0:
        return np.zeros_like(c)
    return (net.rates * _monomials(net, c)) @ net.stoichiometry


def ode_rhs(net: ReactionNetwork, c: Sequence[float]) -> np.ndarray:
    """Deterministic mass-action vector field at concentration ``c``."""
    c = np.asarray(c, dtype=float)
    if c.shape != (net.n_species,):
        raise ValueError("one concentration per species required")
    if np.any(c < 0):
        raise NegativeConcentration("concentrations must be non-negative")
    return _rhs(net, c)


def _jacobian(net: ReactionNetwork, c: np.ndarray) -> np.ndarray:
    nu = net.reactant_matrix
    dmono = np.empty((net.n_reactions, net.n_species))
    for k in range(net.n_species):
        lowered = nu.copy()
        lowered[:, k] = np.maximum(lowered[:, k] - 1, 0)
        dmono[:, k] = nu[:, k] * np.prod(c[None, :] ** lowered, axis=1)
    return net.stoichiometry.T @ (net.rates[:, None] * dmono)


def _polish(net: ReactionNetwork, c: np.ndarray, converged, max_iter: int = 30):
    """Newton iterations for ``rhs = 0`` inside the stoichiometric class of ``c``.

    Returns the refined point, or None if Newton leaves the positive orthant
    or fails to reach the stopping criterion.
    """
    _, sv, vt = np.linalg.svd(net.stoichiometry.astype(float))
    s = int(np.sum(sv > 1e-10 * max(sv.max(initial=0.0), 1.0)))
    B, W = vt[:s], vt[s:]
    ref = c.copy()
    y = c.copy()
    for _ in range(max_iter):
        if converged(y):
            return y
        F = np.concatenate([B @ _rhs(net, y), W @ (y - ref)])
        J = np.vstack([B @ _jacobian(net, y), W])
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return None
        y = y + step
        if np.any(y < 0):
            return None
    return y if converged(y) else None


def find_equilibrium(
    net: ReactionNetwork,
    c0: Sequence[float],
    tol: float = 1e-10,
    t_max: float = 1e6,
    rtol: float = 1e-8,
    atol: float = 1e-10,
) -> np.ndarray:
    """Integrate the mass-action ODE from ``c0`` until it is stationary.

    Integration uses the Dormand-Prince 5(4) pair over windows of doubling
    length; it stops once ``max|rhs(c)| < tol * (1 + max|c|)``. Close to a
    steady state the explicit integrator stalls at a noise floor set by its
    own tolerances, so once ``max|rhs|`` is small the point is refined by
    Newton's method within its stoichiometric compatibility class.

    Raises
    ------
    NoConvergence
        When the criterion is not met before time ``t_max``.
    """
    c = np.asarray(c0, dtype=float)
    if np.any(c <= 0):
        raise ValueError("c0 must be positive componentwise")
    if tol <= 0:
        raise ValueError("tol must be positive")

    def f(_t, y):
        return _rhs(net, np.maximum(y, 0.0))

    def resid(y):
        return np.max(np.abs(f(0, y)), initial=0.0) / (1 + np.max(np.abs(y)))

    def converged(y):
        return resid(y) < tol

    t, span = 0.0, 1.0
    while not converged(c):
        if resid(c) < 1e-5:
            polished = _polish(net, c, converged)
            if polished is not None and np.max(np.abs(polished - c)) < 1e-3 * (1 + np.max(c)):
                return polished
        if t >= t_max:
            raise NoConvergence(f"no steady state within t_max={t_max}")
        sol = solve_ivp(f, (t, min(t + span, t_max)), c, method="RK45", rtol=rtol, atol=atol)
        if not sol.success:
            raise NoConvergence(sol.message)
        c = np.maximum(sol.y[:, -1], 0.0)
        t = sol.t[-1]
        span *= 2
    return c


# ------------------------------------------------------ deterministic balance


def _rel(a: float, b: float) -> float:
    m = max(abs(a), abs(b))
    return 0.0 if m == 0 else abs(a - b) / m


def detailed_balance_residual(net: ReactionNetwork, a: Sequence[float]) -> float:
    """Largest relative flux mismatch over reversible reaction pairs at ``a``.

    Raises
    ------
    NotReversible
        If some reaction has no reverse reaction.
    """
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0):
        raise ValueError("a must be positive")
    rate = {(r.reactant, r.product): r.rate for r in net.reactions}
    worst = 0.0
    for (nu, nu2), k in rate.items():
        if (nu2, nu) not in rate:
            raise NotReversible(
                f"{format_complex(nu, net.species)} -> {format_complex(nu2, net.species)} has no reverse"
            )
        fwd = k * np.prod(a ** np.array(nu))
        bwd = rate[(nu2, nu)] * np.prod(a ** np.array(nu2))
        worst = max(worst, _rel(fwd, bwd))
    return worst


def complex_balance_residual(net: ReactionNetwork, a: Sequence[float]) -> float:
    """Largest relative mismatch between outflow and inflow over complexes."""
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0):
        raise ValueError("a must be positive")
    out = dict.fromkeys(net.complexes, 0.0)
    inflow = dict.fromkeys(net.complexes, 0.0)
    for r in net.reactions:
        flux = r.rate * np.prod(a ** np.array(r.reactant))
        out[r.reactant] += flux
        inflow[r.product] += flux
    return max((_rel(out[c], inflow[c]) for c in net.complexes), default=0.0)
