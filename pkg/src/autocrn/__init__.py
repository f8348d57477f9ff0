"""Stochastic autocatalytic reaction networks: product-form stationary laws,
brute-force verification, simulation and condensation statistics."""

from .classify import (
    AutocatalyticProfile,
    Violation,
    ViolationList,
    build_asip_network,
    build_inclusion_network,
    classify_autocatalytic,
    network_from_profile,
    random_autocatalytic_network,
)
from .condensation import (
    appendix_bound_scan,
    classify_condensation,
    condensation_curve,
    lln_diagnostic,
    partition_asymptotics,
)
from .errors import *  # noqa: F401,F403
from .library import BUNDLED, bundled_network, resolve_network
from .network import (
    Reaction,
    ReactionNetwork,
    find_equilibrium,
    load_network,
    ode_rhs,
    parse_network,
    serialize_network,
    structural_summary,
)
from .oracle import (
    exact_stationary,
    generalized_balance_residual,
    master_equation_residual,
    reaction_vector_balance_residual,
)
from .productform import (
    CondensationQuery,
    build_table,
    classify_factor,
    marginal,
    max_tail,
    partition_function,
    stationary_distribution,
)
from .simulate import empirical_stationary, simulate
from .states import ExactDistribution, enumerate_states, total_variation

__version__ = "0.1.0"
