"""Structure of the bundled example networks.

Load the four two-species examples, print deficiency and reversibility
flags, then integrate the deterministic mass-action ODE of Example C to its
equilibrium and test it for detailed and complex balance.
"""

from autocrn import bundled_network, find_equilibrium, structural_summary
from autocrn.errors import NotReversible
from autocrn.network import complex_balance_residual, detailed_balance_residual

for name in ("exampleA", "exampleB", "exampleC", "exampleD"):
    net = bundled_network(name)
    s = structural_summary(net)
    print(f"{name}: {net.n_reactions} reactions, {s.num_complexes} complexes, "
          f"{len(s.linkage_classes)} linkage classes, rank {s.stoich_dim}")
    print(f"    deficiency {s.deficiency}, weakly reversible {s.weakly_reversible}, reversible {s.reversible}")

# Example C has no deterministic detailed or complex balanced equilibrium,
# yet (see 03_product_form.py) its stochastic law is still product form.
net = bundled_network("exampleC")
eq = find_equilibrium(net, [0.9, 0.1])
print("\nExample C equilibrium from (0.9, 0.1):", eq)
try:
    detailed_balance_residual(net, eq)
except NotReversible as exc:
    print("detailed balance is undefined:", exc)
print("complex balance residual: ", complex_balance_residual(net, eq))
