"""Symmetry grouping on the 4-vertex path.

The path has one nontrivial automorphism (the reflection), so the ten
first-order CD operators fall into five tied groups.  The minimum-norm
coefficients computed without grouping already respect the reflection.
"""

import numpy as np

from qudit_cd import cd_coefficients, cd_pool, group_parameters, ising_zz, mixer, orbit_partition
from qudit_cd.graph import Graph
from qudit_cd.terms import format_factors

g = Graph.path(4)
op = orbit_partition(g)
print("orbits (1-based):")
for key, val in op.one_based().items():
    print(f"  {key}: {val}")

h0, hp = mixer(4, 3), ising_zz(g, 3)
pool = cd_pool(h0, hp)
groups = group_parameters(pool, op)
print(f"\nCD pool: {len(pool)} operators, {groups.n_groups} groups")
free = cd_coefficients(h0, hp, pool, 0.5)
tied = cd_coefficients(h0, hp, pool, 0.5, groups)
for k, e in enumerate(pool.elements):
    print(f"  group {groups.group_of[k]}  {format_factors(e.factors, one_based=True):<22} alpha={free.alphas[k]: .6f}")
print(f"\nmax |free - grouped| = {np.abs(free.alphas - tied.alphas).max():.2e}")
print(f"action with CD {free.action:.4f}, without {free.baseline_action:.4f}")
