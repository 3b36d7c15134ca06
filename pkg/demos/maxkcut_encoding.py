"""Max-k-Cut as a diagonal qudit Hamiltonian.

Each edge contributes a polynomial in Lz on its two sites that takes one
value on equal colours and a value exactly 2 lower on differing colours.
The coefficients are found in exact rational arithmetic.
"""

from fractions import Fraction
from itertools import product

from qudit_cd import Graph, exact_ground, maxkcut_coefficients, maxkcut_hamiltonian
from qudit_cd.hamiltonians import maxkcut_edge_levels

for k in (2, 3, 4, 5):
    coeffs = maxkcut_coefficients(k)
    terms = " + ".join(f"({a})Lz^{p}Lz^{q}" for (p, q), a in sorted(coeffs.items()) if p <= q)
    eq, neq = maxkcut_edge_levels(k)
    print(f"k={k}: {terms}")
    print(f"      equal colours {eq}, different colours {neq}")

# the k=3 edge table, colours 0..2 correspond to m = -1, 0, 1
c3 = maxkcut_coefficients(3)
print("\nk=3 edge values:")
for a, b in product(range(3), range(3)):
    m1, m2 = Fraction(a - 1), Fraction(b - 1)
    print(f"  colours ({a},{b}): {sum(v * m1**p * m2**q for (p, q), v in c3.items())}")

# K4 with 3 colours: the best cut leaves one monochromatic edge
e0, optimal = exact_ground(maxkcut_hamiltonian(Graph.complete(4), 3))
print(f"\nK4, 3 colours: E0 = {e0:g} ({len(optimal)} optimal colourings of 81)")
