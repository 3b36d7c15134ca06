"""First-order counterdiabatic terms: pool generation and action minimization.

Sign convention: for a pool ``{B_k}`` and coefficients ``alpha``, the
operator whose Hilbert-Schmidt norm is minimized is

    G(alpha) = Q0 - sum_k alpha_k C_k,    C_k = i [H_a, B_k],

with ``Q0 = dH_a/dlambda = HP - H0``.  The minimizer solves the Gram system
``sum_k Tr(C_j C_k) alpha_k = Tr(C_j Q0)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import scipy.sparse as sp

from .algebra import check_dim, site_products
from .terms import TermSum, support

GRAM_RTOL = 1e-10


def lambda_derivative(h0: TermSum, hp: TermSum) -> TermSum:
    """``Q0 = HP - H0`` for the linear interpolation ``(1 - lam) H0 + lam HP``."""
    return hp - h0


def _commute_products(d: int, fa, fb):
    """Expand ``i [A, B]`` for two product operators into Hermitian products.

    Writing ``a_s b_s = h_s + i k_s`` on each shared site ``s``,

        i [A, B] = sum over odd subsets T of shared sites of
                   2 (-1)^((|T|+1)/2) prod_{T} k_s prod_{shared \\ T} h_s (x) rest.
    """
    ma, mb = dict(fa), dict(fb)
    shared = sorted(set(ma) & set(mb))
    if not shared:
        return []
    rest = {s: l for s, l in ma.items() if s not in mb}
    rest.update({s: l for s, l in mb.items() if s not in ma})
    parts = {s: site_products(d, ma[s], mb[s]) for s in shared}
    out = []
    for r in range(1, len(shared) + 1, 2):
        sign = 2.0 * (-1) ** ((r + 1) // 2)
        for T in combinations(shared, r):
            coeff = sign
            factors = dict(rest)
            for s in shared:
                piece = parts[s][1] if s in T else parts[s][0]
                if piece is None:
                    break
                lab, scale = piece
                coeff *= scale
                factors[s] = lab
            else:
                out.append((coeff, factors))
    return out


def commutator_expand(a: TermSum, b: TermSum) -> TermSum:
    """``i [A, B]`` as a canonical Hermitian ``TermSum``."""
    if (a.d, a.n_sites) != (b.d, b.n_sites):
        raise ValueError("operands act on different registers")
    terms = []
    for ca, fa in a.terms:
        for cb, fb in b.terms:
            for c, f in _commute_products(a.d, fa, fb):
                terms.append((ca * cb * c, f))
    return TermSum.build(a.d, a.n_sites, terms)


@dataclass(frozen=True)
class PoolElement:
    factors: tuple
    support: tuple

    @property
    def labels(self) -> tuple[str, ...]:
        """Operator labels ordered along the support (tail first for arcs)."""
        kind, where = self.support
        fmap = dict(self.factors)
        if kind == "vertex":
            return (fmap[where],)
        if kind == "arc":
            return (fmap[where[0]], fmap[where[1]])
        return tuple(fmap[s] for s in where)


@dataclass(frozen=True)
class CDPool:
    """Unit-weight CD operators ``B_k`` with their support descriptors.

    ``lambda_structure[k] = (c0, c1)`` records the prefactor ``c0 + c1 lam``
    of ``B_k`` in ``i [H_a(lam), Q0]``; it is absorbed into ``alpha_k``.
    """

    d: int
    n_sites: int
    elements: tuple[PoolElement, ...]
    lambda_structure: tuple[tuple[float, float], ...] = field(default=())

    def __len__(self) -> int:
        return len(self.elements)

    def operator(self, k: int) -> TermSum:
        return TermSum.build(self.d, self.n_sites, [(1.0, self.elements[k].factors)])

    def operators(self) -> list[TermSum]:
        return [self.operator(k) for k in range(len(self))]

    def combine(self, weights) -> TermSum:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (len(self),):
            raise ValueError(f"expected {len(self)} weights, got shape {weights.shape}")
        return TermSum.build(
            self.d, self.n_sites, [(w, e.factors) for w, e in zip(weights, self.elements)]
        )


def _pool_order(item):
    factors, sup = item
    kind, where = sup
    rank = {"vertex": 0, "arc": 1}.get(kind, 2)
    where = where if isinstance(where, tuple) else (where,)
    return (rank, tuple(sorted(where)), where, factors)


def cd_pool(h0: TermSum, hp: TermSum) -> CDPool:
    """First-order pool from the distinct products in ``i [H_a(lam), Q0]``."""
    q0 = lambda_derivative(h0, hp)
    at0 = commutator_expand(h0, q0).as_dict()  # lam = 0
    at1 = commutator_expand(hp, q0).as_dict()  # lam = 1
    keys = set(at0) | set(at1)
    items = sorted(((f, support(h0.d, f)) for f in keys), key=_pool_order)
    elements = tuple(PoolElement(f, s) for f, s in items)
    lam = tuple((at0.get(f, 0.0), at1.get(f, 0.0) - at0.get(f, 0.0)) for f, _ in items)
    return CDPool(h0.d, h0.n_sites, elements, lam)


@dataclass(frozen=True)
class CDCoefficients:
    alphas: np.ndarray
    lam: float
    groups: object = None
    action: float = float("nan")
    baseline_action: float = float("nan")


def _flat(op: TermSum) -> sp.csr_matrix:
    m = op.to_sparse().tocoo()
    dim = m.shape[0]
    return sp.csr_matrix((m.data, (np.zeros_like(m.row), m.row * dim + m.col)), shape=(1, dim * dim))


def gram_system(pool: CDPool, h_a: TermSum, q0: TermSum):
    """``(Gram, rhs, Tr(Q0^2))`` with ``Gram[j,k] = Tr(C_j C_k)`` and ``rhs[j] = Tr(C_j Q0)``."""
    check_dim(pool.d, pool.n_sites)
    rows = [_flat(commutator_expand(h_a, b)) for b in pool.operators()]
    m = sp.vstack(rows, format="csr")
    q = _flat(q0)
    # C_k and Q0 are Hermitian: Tr(X Y) = <X, Y>_F
    gram = (m.conj() @ m.T).toarray().real
    rhs = (m.conj() @ q.T).toarray().real.ravel()
    q2 = float((q.conj() @ q.T).toarray().real[0, 0])
    return gram, rhs, q2


def _min_norm_solve(gram: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(gram)
    if w.size and w.min() < -1e-10 * max(1.0, abs(w).max()):
        raise np.linalg.LinAlgError(f"Gram matrix not positive semidefinite (min eig {w.min()})")
    cut = GRAM_RTOL * max(w.max(initial=0.0), 1e-300)
    inv = np.where(w > cut, 1.0 / np.where(w > cut, w, 1.0), 0.0)
    x = v @ (inv * (v.T @ rhs))
    resid = np.linalg.norm(gram @ x - rhs)
    if resid > 1e-8 * max(1.0, np.linalg.norm(rhs)):
        raise np.linalg.LinAlgError(f"Gram system residual {resid:.3e} above tolerance")
    return x


def group_basis(groups, size: int) -> np.ndarray:
    """Orthonormal ``size x n_groups`` matrix; column g is uniform on group g."""
    s = np.zeros((size, groups.n_groups))
    for k, g in enumerate(groups.group_of):
        s[k, g] = 1.0
    return s / np.sqrt(s.sum(axis=0))


def action_minimize(pool: CDPool, h_a: TermSum, q0: TermSum, groups=None, lam: float = float("nan")) -> CDCoefficients:
    """Minimize ``Tr(G^2)`` over the pool coefficients (minimum-norm solution).

    With ``groups`` the coefficients are tied within each group; the reduced
    problem is solved in orthonormal group coordinates so that its
    minimum-norm solution is the minimum-norm symmetric solution.
    """
    if len(pool) == 0:
        raise ValueError("empty CD pool")
    gram, rhs, q2 = gram_system(pool, h_a, q0)
    if groups is None:
        alphas = _min_norm_solve(gram, rhs)
    else:
        if len(groups.group_of) != len(pool):
            raise ValueError("group map does not match pool size")
        s = group_basis(groups, len(pool))
        alphas = s @ _min_norm_solve(s.T @ gram @ s, s.T @ rhs)
    action = q2 - 2 * alphas @ rhs + alphas @ gram @ alphas
    return CDCoefficients(alphas, lam, groups, float(action), q2)


def cd_coefficients(h0: TermSum, hp: TermSum, pool: CDPool, lam: float, groups=None) -> CDCoefficients:
    """Action-minimizing coefficients at interpolation point ``lam``."""
    h_a = (1.0 - lam) * h0 + lam * hp
    return action_minimize(pool, h_a, lambda_derivative(h0, hp), groups, lam)


class CoefficientPath:
    """``lam -> CDCoefficients`` with the Gram system precomputed.

    ``C_k(lam) = (1 - lam) i[H0, B_k] + lam i[HP, B_k]`` is linear in ``lam``,
    so the Gram matrix and right-hand side are quadratic in ``lam`` and only
    the small linear solve is repeated per call.
    """

    def __init__(self, h0: TermSum, hp: TermSum, pool: CDPool, groups=None):
        if len(pool) == 0:
            raise ValueError("empty CD pool")
        check_dim(pool.d, pool.n_sites)
        self.groups = groups
        q = _flat(lambda_derivative(h0, hp))
        m0 = sp.vstack([_flat(commutator_expand(h0, b)) for b in pool.operators()], format="csr")
        m1 = sp.vstack([_flat(commutator_expand(hp, b)) for b in pool.operators()], format="csr")

        def ip(x, y):
            return (x.conj() @ y.T).toarray().real

        self.g00, self.g01, self.g11 = ip(m0, m0), ip(m0, m1), ip(m1, m1)
        self.r0, self.r1 = ip(m0, q).ravel(), ip(m1, q).ravel()
        self.q2 = float(ip(q, q)[0, 0])
        self.basis = None if groups is None else group_basis(groups, len(pool))

    def system(self, lam: float):
        a, b = 1.0 - lam, lam
        gram = a * a * self.g00 + a * b * (self.g01 + self.g01.T) + b * b * self.g11
        rhs = a * self.r0 + b * self.r1
        return gram, rhs

    def __call__(self, lam: float) -> CDCoefficients:
        gram, rhs = self.system(lam)
        if self.basis is None:
            alphas = _min_norm_solve(gram, rhs)
        else:
            s = self.basis
            alphas = s @ _min_norm_solve(s.T @ gram @ s, s.T @ rhs)
        action = self.q2 - 2 * alphas @ rhs + alphas @ gram @ alphas
        return CDCoefficients(alphas, lam, self.groups, float(action), self.q2)
