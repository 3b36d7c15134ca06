"""Counterdiabatic annealing on two qutrits with a first-order product formula.

Compares the final ground-manifold weight with and without the CD term for
short and long anneals, then shows the step-size convergence against an
adaptive integrator.
"""

import numpy as np

from qudit_cd import Graph, Schedule, action_alphas, cd_pool, exact_ground, exact_propagate, ising_zz, mixer, trotter_evolve

g = Graph.path(2)
h0, hp = mixer(2, 3), ising_zz(g, 3)
pool = cd_pool(h0, hp)
alphas = action_alphas(h0, hp, pool)
_, optimal = exact_ground(hp)


def weight(psi):
    return sum(psi.probabilities()[i] for i in optimal)


print(" T     plain   with CD")
for T in (0.25, 0.5, 1, 2, 4, 8):
    s = Schedule("sin2", T)
    off = trotter_evolve(h0, hp, None, None, s, 400)
    on = trotter_evolve(h0, hp, pool, alphas, s, 400)
    print(f"{T:<5} {weight(off):.4f}  {weight(on):.4f}")

s = Schedule("sin2", 1.0)
ref = exact_propagate(h0, hp, pool, alphas, s).amplitudes
print("\nsteps  error")
prev = None
for n in (20, 40, 80, 160, 320):
    err = np.linalg.norm(trotter_evolve(h0, hp, pool, alphas, s, n).amplitudes - ref)
    print(f"{n:<6} {err:.3e}" + (f"  ratio {prev / err:.2f}" if prev else ""))
    prev = err
