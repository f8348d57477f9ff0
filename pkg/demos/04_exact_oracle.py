"""Brute-force check of the product form.

The oracle enumerates every state with the given total, assembles the sparse
generator and solves pi Q = 0. Agreement to round-off with the product form
is the main correctness evidence, including for networks without detailed
or complex balance.
"""

import numpy as np

from autocrn import (
    bundled_network,
    classify_autocatalytic,
    exact_stationary,
    generalized_balance_residual,
    master_equation_residual,
    random_autocatalytic_network,
    stationary_distribution,
    total_variation,
)
from autocrn.library import combined_example_log_factors
from autocrn.oracle import complex_partition, reaction_vector_balance_residual, reaction_vector_partition
from autocrn.productform import product_form_distribution

rng = np.random.default_rng(7)
for k in range(5):
    net = random_autocatalytic_network(rng, 3)
    prof = classify_autocatalytic(net)
    tv = max(total_variation(stationary_distribution(prof, N), exact_stationary(net, N)) for N in (4, 8, 12))
    print(f"random network {k}: {net.n_reactions} reactions, worst TV {tv:.2e}")

c = bundled_network("exampleC")
pi = stationary_distribution(classify_autocatalytic(c), 10)
print("\nExample C, N=10")
print("  master equation residual:     ", master_equation_residual(c, pi))
print("  reaction-vector balance resid:", reaction_vector_balance_residual(c, pi))

# A three-species network balanced by a mixed partition: reaction-vector
# blocks on the exchange reactions, complex blocks on the rest.
net = bundled_network("combined")
pi = product_form_distribution(combined_example_log_factors(8), 8)
upper = [r for r, rx in enumerate(net.reactions) if rx.reactant[2] == 0 and rx.product[2] == 0]
rest = [r for r in range(net.n_reactions) if r not in upper]
part = reaction_vector_partition(net, upper) + complex_partition(net, rest)
print("\ncombined network, N=8")
print("  generalized balance residual:", generalized_balance_residual(net, part, pi))
print("  TV to the oracle:            ", total_variation(pi, exact_stationary(net, 8)))
