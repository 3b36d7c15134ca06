from fractions import Fraction
from itertools import combinations, permutations, product
from math import comb

import numpy as np
import pytest

from qudit_cd.algebra import basis_labels, expectation
from qudit_cd.graph import Graph
from qudit_cd.hamiltonians import (
    Schedule,
    adiabatic,
    dicke_hamiltonian,
    exact_ground,
    ising_zz,
    maxkcut_coefficients,
    maxkcut_edge_levels,
    maxkcut_hamiltonian,
    mixer,
    problem_hamiltonian,
    w_state,
)
from qudit_cd.terms import TermSum

F = Fraction


def ms(d):
    return [F(j) - F(d - 1, 2) for j in range(d)]


def edge_value(coeffs, m1, m2):
    return sum(a * m1**p * m2**q for (p, q), a in coeffs.items())


def test_mixer():
    assert mixer(1, 2).terms == ((1.0, ((0, "Lx"),)),)
    assert len(mixer(4, 3)) == 4
    assert np.linalg.eigvalsh(mixer(3, 3).to_dense())[0] == pytest.approx(-3)
    with pytest.raises(ValueError):
        mixer(0, 3)


def test_ising_path4_terms():
    h = ising_zz(Graph.path(4), 3)
    singles = [f for _, f in h.terms if len(f) == 1]
    pairs = [f for _, f in h.terms if len(f) == 2]
    assert len(singles) == 4 and len(pairs) == 3
    assert all(c == 1.0 for c, _ in h.terms)
    assert len(ising_zz(Graph.path(4), 3, with_local=False)) == 3
    assert ising_zz(Graph(1), 3).terms == ((1.0, ((0, "Lz"),)),)


def test_ising_p2_ground():
    e0, _ = exact_ground(ising_zz(Graph.path(2), 3))
    brute = min(a + b + a * b for a in (-1, 0, 1) for b in (-1, 0, 1))
    assert e0 == brute == -1


def test_maxkcut_closed_forms():
    assert maxkcut_coefficients(2) == {(1, 1): 4}
    assert maxkcut_coefficients(3) == {(1, 1): 1, (2, 0): -2, (0, 2): -2, (2, 2): 3}
    c4 = maxkcut_coefficients(4)
    assert c4[(1, 1)] == F(365, 72)
    assert c4[(2, 0)] == c4[(0, 2)] == F(-5, 8)
    assert c4[(2, 2)] == F(1, 2)
    assert c4[(3, 1)] == c4[(1, 3)] == F(-41, 18)
    assert c4[(3, 3)] == F(10, 9)


@pytest.mark.parametrize("k", [2, 3, 4, 5, 6])
def test_maxkcut_two_level_structure(k):
    coeffs = maxkcut_coefficients(k)
    vals = {(a, b): edge_value(coeffs, a, b) for a, b in product(ms(k), ms(k))}
    eq = {v for (a, b), v in vals.items() if a == b}
    neq = {v for (a, b), v in vals.items() if a != b}
    assert len(eq) == 1 and len(neq) == 1
    assert eq.pop() - neq.pop() == 2
    assert all((p + q) % 2 == 0 for p, q in coeffs)


def test_maxkcut_levels():
    assert maxkcut_edge_levels(3) == (0, -2)
    assert maxkcut_edge_levels(4) == (F(23, 32), F(-41, 32))
    with pytest.raises(ValueError):
        maxkcut_coefficients(7)


def test_triangle_max3cut():
    e0, opt = exact_ground(maxkcut_hamiltonian(Graph.complete(3), 3))
    assert e0 == pytest.approx(-6)
    assert len(opt) == 6
    for i in opt:
        assert len(set(basis_labels(3, 3, i))) == 3


def brute_cut(g, k):
    return max(sum(c[i] != c[j] for i, j in g.edges) for c in product(range(k), repeat=g.n))


@pytest.mark.parametrize("k", [3, 4])
@pytest.mark.parametrize("g", [Graph.path(4), Graph.cycle(4), Graph.star(3), Graph.complete(4), Graph(4, [(0, 1), (1, 2), (0, 2), (2, 3)])])
def test_ground_energy_is_max_cut(k, g):
    h = maxkcut_hamiltonian(g, k)
    e0, opt = exact_ground(h)
    c_eq, _ = maxkcut_edge_levels(k)
    # shift out the equal-colour offset, then -E0/gap is the cut size
    assert (float(c_eq) * len(g.edges) - e0) / 2 == pytest.approx(brute_cut(g, k))
    diag = h.diagonal()
    for i in opt:
        cols = basis_labels(k, g.n, i)
        assert sum(cols[a] != cols[b] for a, b in g.edges) == brute_cut(g, k)
    assert len(opt) == sum(np.isclose(diag, e0))


@pytest.mark.parametrize("k", [2, 3, 4])
def test_colour_permutation_symmetry(k):
    g = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 2)])
    diag = maxkcut_hamiltonian(g, k).diagonal()
    for perm in permutations(range(k)):
        for idx, labels in enumerate(product(range(k), repeat=4)):
            image = [perm[c] for c in labels]
            j = int(np.ravel_multi_index(image, (k,) * 4))
            assert diag[idx] == pytest.approx(diag[j])


def test_dicke_examples():
    h = dicke_hamiltonian(3, 1, 3)
    assert h.coefficient({0: "Lz"}) == 0.5
    assert h.coefficient({0: "Lz", 2: "Lz"}) == 0.5
    e0, opt = exact_ground(h)
    assert e0 == pytest.approx(-1) and len(opt) == 3
    for i in opt:
        assert sorted(basis_labels(3, 3, i)) == [0, 0, 2]
    with pytest.raises(ValueError):
        dicke_hamiltonian(3, 3, 3)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_dicke_degeneracy(n):
    for kappa in range(1, n):
        e0, opt = exact_ground(dicke_hamiltonian(n, kappa, 3))
        assert len(opt) == comb(n, kappa)
        if n == 3 and kappa == 1:
            assert e0 == pytest.approx(-(n - 2 * kappa) ** 2 / 4 - n / 4)


def test_w_state():
    w = w_state(3)
    assert np.linalg.norm(w.amplitudes) == pytest.approx(1)
    assert expectation(w, dicke_hamiltonian(3, 1, 3)) == pytest.approx(-1)
    support = {basis_labels(3, 3, i) for i in np.flatnonzero(np.abs(w.amplitudes) > 1e-12)}
    assert support == {(2, 0, 0), (0, 2, 0), (0, 0, 2)}
    assert np.allclose(np.abs(w.amplitudes[np.abs(w.amplitudes) > 0]), 1 / np.sqrt(3))


def test_adiabatic():
    h0, hp = mixer(2, 3), ising_zz(Graph.path(2), 3)
    assert adiabatic(h0, hp, 0.0) == h0
    assert adiabatic(h0, hp, 1.0) == hp
    mid = adiabatic(h0, hp, 0.5)
    assert mid.coefficient({0: "Lx"}) == 0.5 and mid.coefficient({0: "Lz", 1: "Lz"}) == 0.5
    for lam in np.linspace(0, 1, 5):
        m = adiabatic(h0, hp, lam).to_dense()
        assert np.allclose(m, m.conj().T)
        assert np.allclose(m, (1 - lam) * h0.to_dense() + lam * hp.to_dense())
    with pytest.raises(ValueError):
        adiabatic(h0, mixer(3, 3), 0.5)


def test_exact_ground_single_lz():
    e0, opt = exact_ground(TermSum.single(3, 1, {0: "Lz"}))
    assert e0 == -1 and opt == {0}
    e0, opt = exact_ground(mixer(2, 3))
    assert e0 == pytest.approx(-2) and opt == frozenset()


@pytest.mark.parametrize("kind", ["linear", "sin2"])
def test_schedule(kind):
    s = Schedule(kind, 3.0)
    ts = np.linspace(0, 3, 301)
    lam = np.array([s.lam(t) for t in ts])
    assert lam[0] == pytest.approx(0) and lam[-1] == pytest.approx(1)
    assert np.all(np.diff(lam) >= -1e-15)
    num = np.gradient(lam, ts)
    assert np.allclose(num[1:-1], [s.dlam(t) for t in ts[1:-1]], atol=1e-3)
    with pytest.raises(ValueError):
        Schedule(kind, 0.0)


def test_problem_dispatch():
    g = Graph.complete(3)
    assert problem_hamiltonian("max3cut", g) == maxkcut_hamiltonian(g, 3)
    assert problem_hamiltonian("maxkcut", g, k=4).d == 4
    assert problem_hamiltonian("ising", g, d=5).d == 5
    assert problem_hamiltonian("wstate", g) == dicke_hamiltonian(3, 1, 3)
    with pytest.raises(ValueError):
        problem_hamiltonian("wstate", Graph.path(3))
    with pytest.raises(ValueError):
        problem_hamiltonian("tsp", g)
