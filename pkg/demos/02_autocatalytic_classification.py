"""Recognising autocatalytic networks.

A network qualifies when every reaction has the exchange form
S_i + (m-1) S_j -> m S_j and the higher-order rates are tied to the
monomolecular ones by species-level constants. The classifier either returns
the profile (lambda, beta) or lists which condition failed.
"""

import numpy as np

from autocrn import build_asip_network, build_inclusion_network, classify_autocatalytic, parse_network

GOOD = """
{"species": ["S1", "S2"],
 "reactions": [
   {"reactant": {"S1": 1}, "product": {"S2": 1}, "rate": 2},
   {"reactant": {"S2": 1}, "product": {"S1": 1}, "rate": 1},
   {"reactant": {"S1": 1, "S2": 1}, "product": {"S1": 2}, "rate": 3},
   {"reactant": {"S1": 1, "S2": 1}, "product": {"S2": 2}, "rate": 1}]}
"""
print("profile:", classify_autocatalytic(parse_network(GOOD)).to_dict())

# S2 is fed from S1 and S3 at equal monomolecular rates but unequal
# bimolecular ones, so no single beta_2^2 exists.
BAD = """
{"species": ["S1", "S2", "S3"],
 "reactions": [
   {"reactant": {"S1": 1}, "product": {"S2": 1}, "rate": 1},
   {"reactant": {"S2": 1}, "product": {"S1": 1}, "rate": 1},
   {"reactant": {"S3": 1}, "product": {"S2": 1}, "rate": 1},
   {"reactant": {"S2": 1}, "product": {"S3": 1}, "rate": 1},
   {"reactant": {"S1": 1, "S2": 1}, "product": {"S2": 2}, "rate": 2},
   {"reactant": {"S2": 1, "S3": 1}, "product": {"S2": 2}, "rate": 5}]}
"""
print("violations:", classify_autocatalytic(parse_network(BAD)).to_dict())

# Inclusion-process style networks on a lattice are autocatalytic when the
# hopping matrix is symmetric.
ring = np.array([[0, 1, 2], [1, 0, 3], [2, 3, 0]], dtype=float)
print("inclusion ring:", classify_autocatalytic(build_inclusion_network(ring, 2.0)).to_dict())
print("asymmetric inclusion chain:", classify_autocatalytic(build_asip_network(4, 0.7, 0.3)).to_dict())
