"""Recognition of autocatalytic networks and their exchange parameters.

Every reaction of an autocatalytic network has the form
``S_i + (m-1) S_j -> m S_j``: one molecule of ``S_i`` is converted into
``S_j``, catalysed by ``m-1`` copies of ``S_j``. The rate of that reaction is
written ``alpha[m][i, j]``. Classification extracts

* ``lam`` -- the reversible measure of the monomolecular exchange chain,
* ``beta`` -- per target species the incoming rate vector normalised by its
  monomolecular entry,

which fully determine the product-form stationary law.
"""

from __future__ import annotations

import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import NotReversible
from .network import Reaction, ReactionNetwork, format_complex

__all__ = [
    "AutocatalyticProfile",
    "Violation",
    "ViolationList",
    "classify_autocatalytic",
    "solve_lambda",
    "exchange_form",
    "network_from_profile",
    "build_inclusion_network",
    "build_asip_network",
    "random_autocatalytic_network",
]

RTOL = 1e-9


@dataclass(frozen=True)
class AutocatalyticProfile:
    """Parameters of the product-form law of an autocatalytic network.

    Attributes
    ----------
    lam : tuple of float
        Reversible measure of the monomolecular exchange chain, ``lam[0] == 1``.
    beta : tuple of tuple of float
        ``beta[i] == (beta_i^2, ..., beta_i^{n_i})``; empty for species whose
        incoming reactions are all monomolecular.
    pairs : frozenset of (int, int)
        Unordered exchange pairs, stored as ``(i, j)`` with ``i < j``.
    alpha1 : mapping (int, int) -> float
        Monomolecular rate ``S_i -> S_j`` for every ordered exchange pair.
    species : tuple of str
        Species names, used for printing only.
    """

    lam: tuple[float, ...]
    beta: tuple[tuple[float, ...], ...]
    pairs: frozenset = frozenset()
    alpha1: Mapping = field(default_factory=dict, compare=True, hash=False)
    species: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.lam) != len(self.beta):
            raise ValueError("lam and beta must have one entry per species")
        if any(not l > 0 for l in self.lam):
            raise ValueError("lam must be positive")
        if any(b < 0 for bs in self.beta for b in bs):
            raise ValueError("beta entries must be non-negative")
        if not self.species:
            object.__setattr__(self, "species", tuple(f"S{i + 1}" for i in range(len(self.lam))))

    @classmethod
    def from_parameters(cls, lam, beta, species=None, pairs=None) -> "AutocatalyticProfile":
        """Build a profile directly from ``lam`` and ``beta``.

        Trailing zero ``beta`` entries are dropped so that ``n_i`` is the
        highest molecularity actually present. Exchange pairs default to a
        chain ``(0,1), (1,2), ...`` with rates ``alpha1[i,j] = lam[j]``.
        """
        lam = tuple(float(l) for l in lam)
        b = []
        for bs in beta:
            bs = [float(v) for v in bs]
            while bs and bs[-1] == 0:
                bs.pop()
            b.append(tuple(bs))
        n = len(lam)
        if pairs is None:
            pairs = [(i, i + 1) for i in range(n - 1)]
        pairs = frozenset((min(i, j), max(i, j)) for i, j in pairs)
        alpha1 = {}
        for i, j in pairs:
            alpha1[(i, j)] = lam[j]
            alpha1[(j, i)] = lam[i]
        return cls(lam, tuple(b), pairs, alpha1, tuple(species) if species else ())

    @property
    def n_species(self) -> int:
        return len(self.lam)

    def molecularity(self, i: int) -> int:
        """Highest incoming molecularity ``n_i``."""
        return len(self.beta[i]) + 1

    def to_dict(self) -> dict:
        return {
            "species": list(self.species),
            "lambda": [float(v) for v in self.lam],
            "beta": [[float(v) for v in b] for b in self.beta],
            "pairs": sorted([[int(i), int(j)] for i, j in self.pairs]),
            "alpha1": [[int(i), int(j), float(v)] for (i, j), v in sorted(self.alpha1.items())],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


@dataclass(frozen=True)
class Violation:
    condition: int
    reason: str
    items: tuple = ()


class ViolationList(list):
    """Failed classification: a list of :class:`Violation`, never empty."""

    def to_dict(self) -> dict:
        return {
            "violations": [
                {"condition": v.condition, "reason": v.reason, "items": list(v.items)} for v in self
            ]
        }


def exchange_form(reaction: Reaction):
    """Return ``(i, j, m)`` if ``reaction`` is ``S_i + (m-1) S_j -> m S_j``, else None."""
    prod = [k for k, c in enumerate(reaction.product) if c]
    if len(prod) != 1:
        return None
    j = prod[0]
    m = reaction.product[j]
    rest = list(reaction.reactant)
    if rest[j] != m - 1:
        return None
    rest[j] = 0
    src = [k for k, c in enumerate(rest) if c]
    if len(src) != 1 or rest[src[0]] != 1:
        return None
    return src[0], j, m


def _close(a: float, b: float, rtol: float = RTOL) -> bool:
    return abs(a - b) <= rtol * max(abs(a), abs(b))


def solve_lambda(alpha1: Mapping, pairs, n_species: int | None = None, rtol: float = RTOL) -> np.ndarray:
    """Reversible measure of the monomolecular exchange chain, anchored at ``lam[0] = 1``.

    Values are propagated along a breadth-first spanning tree from species 0;
    every remaining edge is then checked against the balance relation
    ``lam[i] * alpha1[i, j] == lam[j] * alpha1[j, i]``.

    Raises
    ------
    NotReversible
        If a non-tree edge violates the balance relation (a cycle whose
        forward and backward rate products differ).
    ValueError
        If the exchange graph is not connected or a rate is not positive.
    """
    pairs = {(min(i, j), max(i, j)) for i, j in pairs}
    if n_species is None:
        n_species = 1 + max((max(p) for p in pairs), default=0)
    adj = defaultdict(list)
    for i, j in pairs:
        for a, b in ((i, j), (j, i)):
            if not alpha1.get((a, b), 0) > 0:
                raise ValueError(f"alpha1{(a, b)} must be positive")
        adj[i].append(j)
        adj[j].append(i)
    lam = np.full(n_species, np.nan)
    lam[0] = 1.0
    tree = set()
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in sorted(adj[i]):
            if np.isnan(lam[j]):
                lam[j] = lam[i] * alpha1[(i, j)] / alpha1[(j, i)]
                tree.add((min(i, j), max(i, j)))
                queue.append(j)
    if np.isnan(lam).any():
        raise ValueError("exchange graph is not connected")
    for i, j in sorted(pairs - tree):
        if not _close(lam[i] * alpha1[(i, j)], lam[j] * alpha1[(j, i)], rtol):
            raise NotReversible(f"cycle through exchange pair ({i}, {j}) violates the balance relation")
    return lam


def classify_autocatalytic(net: ReactionNetwork) -> AutocatalyticProfile | ViolationList:
    """Check the five autocatalytic conditions and extract the profile.

    Returns the :class:`AutocatalyticProfile` on success, otherwise a
    :class:`ViolationList` of everything detected. Conditions:

    1. every reaction is an exchange ``S_i + (m-1) S_j -> m S_j``;
    2. each exchange pair has both monomolecular reactions;
    3. the monomolecular reactions form one linkage class spanning all species;
    4. incoming rate vectors of a target share support and are proportional;
    5. the monomolecular chain is reversible.
    """
    sp = net.species
    n = net.n_species
    violations = ViolationList()
    if net.n_reactions == 0:
        violations.append(Violation(3, "network has no reactions"))
        return violations

    alpha = defaultdict(dict)  # (i, j) -> {m: rate}
    for k, r in enumerate(net.reactions):
        form = exchange_form(r)
        if form is None:
            violations.append(
                Violation(
                    1,
                    "reaction is not of the form S_i + (m-1)S_j -> mS_j",
                    (k, f"{format_complex(r.reactant, sp)} -> {format_complex(r.product, sp)}"),
                )
            )
            continue
        i, j, m = form
        alpha[(i, j)][m] = r.rate

    pairs = {(min(i, j), max(i, j)) for i, j in alpha}
    for i, j in sorted(pairs):
        for a, b in ((i, j), (j, i)):
            if 1 not in alpha.get((a, b), {}):
                violations.append(
                    Violation(2, f"missing monomolecular reaction {sp[a]} -> {sp[b]}", (sp[a], sp[b]))
                )

    # exchange graph: pairs joined by monomolecular reactions in both directions
    mono = {p for p in pairs if 1 in alpha.get(p, {}) and 1 in alpha.get(p[::-1], {})}
    comp = list(range(n))

    def find(u):
        while comp[u] != u:
            comp[u] = comp[comp[u]]
            u = comp[u]
        return u

    for i, j in mono:
        comp[find(i)] = find(j)
    roots = {find(i) for i in range(n)}
    if len(roots) != 1:
        groups = defaultdict(list)
        for i in range(n):
            groups[find(i)].append(sp[i])
        violations.append(
            Violation(
                3,
                "monomolecular reactions do not form a single linkage class over all species",
                tuple(tuple(g) for g in groups.values()),
            )
        )

    beta: list[tuple[float, ...] | None] = [None] * n
    for k in range(n):
        sources = sorted(i for (i, j) in alpha if j == k and 1 in alpha[(i, j)])
        if not sources:
            continue
        normalised = []
        for i in sources:
            d = alpha[(i, k)]
            normalised.append((i, {m: v / d[1] for m, v in d.items()}))
        ref_i, ref = normalised[0]
        ok = True
        for i, other in normalised[1:]:
            if set(other) != set(ref):
                violations.append(
                    Violation(
                        4,
                        f"incoming reactions into {sp[k]} from {sp[ref_i]} and {sp[i]} differ in molecularity",
                        (sp[k], sp[ref_i], sp[i]),
                    )
                )
                ok = False
            elif not all(_close(ref[m], other[m]) for m in ref):
                violations.append(
                    Violation(
                        4,
                        f"incoming rate vectors into {sp[k]} from {sp[ref_i]} and {sp[i]} are not proportional",
                        (sp[k], sp[ref_i], sp[i]),
                    )
                )
                ok = False
        if ok:
            nk = max(ref)
            beta[k] = tuple(ref.get(m, 0.0) for m in range(2, nk + 1))

    lam = None
    if not any(v.condition in (2, 3) for v in violations):
        alpha1 = {(i, j): d[1] for (i, j), d in alpha.items() if 1 in d}
        try:
            lam = solve_lambda(alpha1, mono, n)
        except NotReversible as exc:
            violations.append(Violation(5, str(exc)))

    if violations:
        return violations
    alpha1 = {(i, j): d[1] for (i, j), d in alpha.items() if 1 in d}
    return AutocatalyticProfile(
        lam=tuple(float(v) for v in lam),
        beta=tuple(beta),
        pairs=frozenset(pairs),
        alpha1=alpha1,
        species=sp,
    )


def network_from_profile(
    profile: AutocatalyticProfile, pair_constants: Mapping | None = None
) -> ReactionNetwork:
    """Synthesise a network realising ``profile``.

    For each exchange pair ``{i, j}`` with constant ``c`` the monomolecular
    rates are ``alpha1[i,j] = lam[j]/c`` and ``alpha1[j,i] = lam[i]/c``; the
    higher rates are ``alpha[m][i,j] = beta_j^m * alpha1[i,j]`` for every
    non-zero ``beta_j^m``. Without ``pair_constants`` the profile's own
    ``alpha1`` is used.
    """
    n = profile.n_species
    reactions = []
    for i, j in sorted(profile.pairs):
        if pair_constants is None:
            a_ij, a_ji = profile.alpha1[(i, j)], profile.alpha1[(j, i)]
        else:
            c = pair_constants[(i, j)]
            a_ij, a_ji = profile.lam[j] / c, profile.lam[i] / c
        for src, dst, a1 in ((i, j, a_ij), (j, i, a_ji)):
            for m, b in enumerate((1.0,) + profile.beta[dst], start=1):
                if b == 0:
                    continue
                reactant = [0] * n
                reactant[src] += 1
                reactant[dst] += m - 1
                product = [0] * n
                product[dst] = m
                reactions.append(Reaction(tuple(reactant), tuple(product), b * a1))
    return ReactionNetwork(profile.species, reactions)


def build_inclusion_network(p, m: float, species: Sequence[str] | None = None) -> ReactionNetwork:
    """Inclusion process on sites with jump matrix ``p`` and diffusion constant ``m``.

    For every ordered pair with ``p[i, j] > 0`` this emits ``S_i -> S_j`` at
    rate ``p[i, j] * m / 2`` and ``S_i + S_j -> 2 S_j`` at rate ``p[i, j]``.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValueError("p must be a square matrix")
    if np.any(p < 0):
        raise ValueError("p must be non-negative")
    if np.any(np.diag(p) != 0):
        raise ValueError("p must have a zero diagonal")
    if not m > 0:
        raise ValueError("m must be positive")
    n = p.shape[0]
    species = tuple(species) if species else tuple(f"S{i + 1}" for i in range(n))
    reactions = []
    for i in range(n):
        for j in range(n):
            if p[i, j] > 0:
                e_i = tuple(int(k == i) for k in range(n))
                e_j = tuple(int(k == j) for k in range(n))
                both = tuple(a + b for a, b in zip(e_i, e_j))
                reactions.append(Reaction(e_i, e_j, p[i, j] * m / 2))
                reactions.append(Reaction(both, tuple(2 * v for v in e_j), float(p[i, j])))
    return ReactionNetwork(species, reactions)


def build_asip_network(n: int, p: float, q: float, m: float = 2.0) -> ReactionNetwork:
    """Asymmetric inclusion process on a chain of ``n`` sites.

    Jumps to the right have weight ``p``, to the left ``q``.
    """
    if n < 2:
        raise ValueError("ASIP needs at least two sites")
    if not (p > 0 and q > 0):
        raise ValueError("p and q must be positive")
    mat = np.zeros((n, n))
    for i in range(n - 1):
        mat[i, i + 1] = p
        mat[i + 1, i] = q
    return build_inclusion_network(mat, m)


def random_autocatalytic_network(
    rng: np.random.Generator, n: int, max_molecularity: int = 3
) -> ReactionNetwork:
    """Draw a random network satisfying all five autocatalytic conditions.

    The exchange graph is a random spanning tree, plus for ``n >= 3`` a
    possible extra edge (kept reversible by construction). Each target gets a
    random molecularity in ``1..max_molecularity`` and positive ``beta``.
    """
    lam = np.concatenate([[1.0], rng.uniform(0.3, 3.0, size=n - 1)])
    pairs = set()
    for j in range(1, n):
        i = int(rng.integers(0, j))
        pairs.add((i, j))
    if n >= 3 and rng.random() < 0.5:
        i, j = sorted(rng.choice(n, size=2, replace=False))
        pairs.add((int(i), int(j)))
    beta = []
    for _ in range(n):
        nk = int(rng.integers(1, max_molecularity + 1))
        b = list(rng.uniform(0.2, 2.0, size=nk - 1))
        if nk >= 3 and rng.random() < 0.3:
            b[0] = 0.0
        beta.append(b)
    profile = AutocatalyticProfile.from_parameters(lam, beta, pairs=pairs)
    constants = {pr: float(rng.uniform(0.5, 2.0)) for pr in profile.pairs}
    return network_from_profile(profile, constants)
