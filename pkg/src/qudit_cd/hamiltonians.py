"""Problem, mixer and interpolating Hamiltonians, plus exact ground-state oracles."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .algebra import StateVector, basis_index, check_dim
from .graph import Graph
from .terms import TermSum


def lz_label(power: int) -> str | None:
    if power == 0:
        return None
    return "Lz" if power == 1 else f"Lz{power}"


def mixer(n_sites: int, d: int) -> TermSum:
    """Sum of ``Lx`` over every site."""
    if n_sites < 1:
        raise ValueError("need at least one site")
    return TermSum.build(d, n_sites, [(1.0, {i: "Lx"}) for i in range(n_sites)])


def ising_zz(graph: Graph, d: int, with_local: bool = True) -> TermSum:
    terms = []
    if with_local:
        terms += [(1.0, {i: "Lz"}) for i in range(graph.n)]
    terms += [(1.0, {i: "Lz", j: "Lz"}) for i, j in graph.sorted_edges()]
    return TermSum.build(d, graph.n, terms)


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Exact solution of a consistent linear system with full column rank."""
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if piv is None:
            raise np.linalg.LinAlgError("coefficient system is rank deficient")
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if any(row[-1] != 0 for row in aug[r:]):
        raise np.linalg.LinAlgError("Max-k-Cut coefficient system is inconsistent")
    return [aug[i][-1] for i in range(ncols)]


def maxkcut_coefficients(k: int) -> dict[tuple[int, int], Fraction]:
    """Coefficients ``a[p, q]`` of ``sum a[p,q] Lz^p (x) Lz^q`` for one Max-k-Cut edge.

    The two-site value is constant on equal colours and exactly 2 lower on
    differing colours.  Only monomials with ``p + q`` even (excluding the
    constant) are used; the system is solved in exact rational arithmetic.
    """
    if not 2 <= k <= 6:
        raise ValueError("k must lie in [2, 6]")
    half = Fraction(k - 1, 2)
    ms = [Fraction(j) - half for j in range(k)]
    monos = [
        (p, q) for p in range(k) for q in range(p, k) if (p + q) % 2 == 0 and (p, q) != (0, 0)
    ]
    rows, rhs = [], []
    for m1, m2 in product(ms, ms):
        row = []
        for p, q in monos:
            v = m1**p * m2**q
            if p != q:
                v += m1**q * m2**p
            row.append(v)
        row.append(Fraction(-1))  # unknown equal-colour constant
        rows.append(row)
        rhs.append(Fraction(-2) if m1 != m2 else Fraction(0))
    sol = _solve_exact(rows, rhs)
    out = {}
    for (p, q), a in zip(monos, sol):
        if a == 0:
            continue
        out[(p, q)] = a
        if p != q:
            out[(q, p)] = a
    return out


def maxkcut_edge_levels(k: int) -> tuple[Fraction, Fraction]:
    """``(equal-colour value, differing-colour value)`` of the edge polynomial."""
    coeffs = maxkcut_coefficients(k)
    half = Fraction(k - 1, 2)
    ms = [Fraction(j) - half for j in range(k)]
    vals = {}
    for m1, m2 in product(ms, ms):
        vals[(m1, m2)] = sum(a * m1**p * m2**q for (p, q), a in coeffs.items())
    eq = vals[(ms[0], ms[0])]
    neq = vals[(ms[0], ms[1])]
    return eq, neq


def maxkcut_hamiltonian(graph: Graph, k: int) -> TermSum:
    coeffs = maxkcut_coefficients(k)
    terms = []
    for i, j in graph.sorted_edges():
        for (p, q), a in coeffs.items():
            factors = {}
            if p:
                factors[i] = lz_label(p)
            if q:
                factors[j] = lz_label(q)
            terms.append((float(a), factors))
    return TermSum.build(k, graph.n, terms)


def dicke_hamiltonian(n_sites: int, kappa: int, d: int = 3) -> TermSum:
    """``(N/2 - kappa) sum Lz_i + 1/2 sum_{j<i} Lz_i Lz_j`` on the complete graph."""
    if not 1 <= kappa <= n_sites - 1:
        raise ValueError("need 1 <= kappa <= n_sites - 1")
    field = n_sites / 2 - kappa
    terms = [(field, {i: "Lz"}) for i in range(n_sites)]
    terms += [(0.5, {i: "Lz", j: "Lz"}) for i in range(n_sites) for j in range(i + 1, n_sites)]
    return TermSum.build(d, n_sites, terms)


def dicke_state(n_sites: int, kappa: int, d: int = 3) -> StateVector:
    """Equal superposition of the ``C(N, kappa)`` patterns with ``kappa`` sites at
    ``m = +l`` and the rest at ``m = -l``.

    These are the ground states of ``dicke_hamiltonian(n_sites, kappa, d)``
    with ``m = j - l``: top level ``d - 1`` carries ``m = +l``, level 0 ``m = -l``.
    """
    from itertools import combinations

    check_dim(d, n_sites)
    amps = np.zeros(d**n_sites, dtype=complex)
    for up in combinations(range(n_sites), kappa):
        labels = [d - 1 if s in up else 0 for s in range(n_sites)]
        amps[basis_index(d, labels)] = 1.0
    amps /= np.linalg.norm(amps)
    return StateVector(d, n_sites, amps)


def w_state(n_sites: int, d: int = 3) -> StateVector:
    if n_sites < 2:
        raise ValueError("W state needs at least two sites")
    return dicke_state(n_sites, 1, d)


def adiabatic(h0: TermSum, hp: TermSum, lam: float) -> TermSum:
    """``(1 - lam) H0 + lam HP``."""
    if (h0.d, h0.n_sites) != (hp.d, hp.n_sites):
        raise ValueError("H0 and HP act on different registers")
    return (1.0 - lam) * h0 + lam * hp


def exact_ground(h: TermSum, tol: float = 1e-9) -> tuple[float, frozenset]:
    """Minimum eigenvalue and, for diagonal ``h``, the minimizing basis indices.

    For non-diagonal ``h`` the index set is empty.
    """
    check_dim(h.d, h.n_sites)
    diag = h.diagonal()
    if diag is not None:
        e0 = float(diag.min())
        idx = np.flatnonzero(diag <= e0 + tol * max(1.0, abs(e0)))
        return e0, frozenset(int(i) for i in idx)
    w = np.linalg.eigvalsh(h.to_dense())
    return float(w[0]), frozenset()


@dataclass(frozen=True)
class Schedule:
    """Annealing schedule ``lambda(t)`` on ``[0, total_time]``."""

    kind: str = "sin2"
    total_time: float = 1.0

    def __post_init__(self):
        if self.kind not in ("linear", "sin2"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if not self.total_time > 0:
            raise ValueError("total_time must be positive")

    def lam(self, t: float) -> float:
        s = t / self.total_time
        if self.kind == "linear":
            return s
        return np.sin(np.pi * s / 2) ** 2

    def dlam(self, t: float) -> float:
        T = self.total_time
        if self.kind == "linear":
            return 1.0 / T
        return np.pi / (2 * T) * np.sin(np.pi * t / T)


PROBLEM_KINDS = ("ising", "max3cut", "maxkcut", "wstate")


def problem_hamiltonian(kind: str, graph: Graph, d: int = 3, k: int = 3) -> TermSum:
    """Problem Hamiltonian by name.

    ``ising`` uses local dimension ``d``; ``max3cut``/``maxkcut`` use ``d = k``;
    ``wstate`` needs the complete graph and builds the ``kappa = 1`` Dicke
    Hamiltonian on qutrits.
    """
    if kind == "ising":
        return ising_zz(graph, d)
    if kind == "max3cut":
        return maxkcut_hamiltonian(graph, 3)
    if kind == "maxkcut":
        return maxkcut_hamiltonian(graph, k)
    if kind == "wstate":
        if graph.edges != Graph.complete(graph.n).edges:
            raise ValueError("wstate problem is defined on the complete graph")
        return dicke_hamiltonian(graph.n, 1, 3)
    raise ValueError(f"unknown problem kind {kind!r}; expected one of {PROBLEM_KINDS}")
