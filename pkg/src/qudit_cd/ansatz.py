"""QAOA, DCQAOA and CD-inspired ansatze with exact statevector evaluation.

A layer block is either a fixed generator with one angle (``exp(-i t H)``) or
a summed generator ``exp(-i sum_k t_slot(k) P_k)`` over CD operators, where
grouped elements share one slot.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .algebra import StateVector, angular_momentum, apply_local, check_dim, eigh_generator, site_matrix
from .cd import CDPool, CoefficientPath
from .hamiltonians import Schedule
from .symmetry import ParamGroupMap, identity_groups
from .terms import TermSum

# summed generators up to this dimension are exponentiated by dense eigh;
# larger ones use a scaled Taylor action (scipy expm_multiply)
EIGH_MAX_DIM = 256

QAOA_INIT = (0.0, np.pi)
CD_INIT = (-0.1, 0.1)


def initial_state(n_sites: int, d: int, kind: str = "mixer") -> StateVector:
    """Ground state of ``sum Lx`` (default) or the uniform superposition."""
    if kind == "mixer":
        w, v = np.linalg.eigh(angular_momentum(d, "x"))
        site = v[:, 0]
        site = site * np.exp(-1j * np.angle(site[np.flatnonzero(np.abs(site) > 1e-12)[0]]))
    elif kind == "uniform":
        site = np.ones(d) / np.sqrt(d)
    else:
        raise ValueError(f"unknown initial state kind {kind!r}")
    return StateVector.product(site, n_sites)


@dataclass(frozen=True)
class Block:
    generators: tuple[TermSum, ...]
    slots: tuple[int, ...]
    summed: bool = False
    product_form: bool = False


@dataclass(frozen=True)
class Ansatz:
    name: str
    d: int
    n_sites: int
    n_layers: int
    blocks: tuple[Block, ...]
    total_params: int
    slot_kinds: tuple[str, ...]

    def init_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-slot uniform initialization range."""
        lo = np.array([QAOA_INIT[0] if k == "qaoa" else CD_INIT[0] for k in self.slot_kinds])
        hi = np.array([QAOA_INIT[1] if k == "qaoa" else CD_INIT[1] for k in self.slot_kinds])
        return lo, hi

    @cached_property
    def _engine(self) -> list:
        return [_compile_block(self, b) for b in self.blocks]


def _check_pair(h0: TermSum, hp: TermSum) -> None:
    if (h0.d, h0.n_sites) != (hp.d, hp.n_sites):
        raise ValueError("H0 and HP act on different registers")


def _cd_block(pool: CDPool, groups: ParamGroupMap | None, base: int, product_form: bool) -> tuple[Block, int]:
    if groups is None:
        groups = identity_groups(len(pool))
    if len(groups.group_of) != len(pool):
        raise ValueError(f"group map covers {len(groups.group_of)} elements, pool has {len(pool)}")
    if sorted(set(groups.group_of)) != list(range(groups.n_groups)):
        raise ValueError("group ids must be 0 .. n_groups-1")
    slots = tuple(base + g for g in groups.group_of)
    return Block(tuple(pool.operators()), slots, summed=True, product_form=product_form), groups.n_groups


def build_qaoa(h0: TermSum, hp: TermSum, p: int) -> Ansatz:
    """``prod_p exp(-i t1 H0) exp(-i t2 HP)`` with H0 applied first in each layer."""
    _check_pair(h0, hp)
    if p < 1:
        raise ValueError("need at least one layer")
    blocks = []
    for layer in range(p):
        blocks += [Block((h0,), (2 * layer,)), Block((hp,), (2 * layer + 1,))]
    return Ansatz("qaoa", h0.d, h0.n_sites, p, tuple(blocks), 2 * p, ("qaoa",) * (2 * p))


def build_dcqaoa(h0: TermSum, hp: TermSum, pool: CDPool, p: int, groups=None, product_form: bool = False) -> Ansatz:
    """QAOA layer followed by a CD block; CD slots are independent per layer."""
    _check_pair(h0, hp)
    if p < 1:
        raise ValueError("need at least one layer")
    blocks, kinds = [], []
    n = 0
    for _ in range(p):
        blocks += [Block((h0,), (n,)), Block((hp,), (n + 1,))]
        cd, k = _cd_block(pool, groups, n + 2, product_form)
        blocks.append(cd)
        kinds += ["qaoa", "qaoa"] + ["cd"] * k
        n += 2 + k
    name = "dcqaoa-grouped" if groups is not None else "dcqaoa"
    return Ansatz(name, h0.d, h0.n_sites, p, tuple(blocks), n, tuple(kinds))


def build_cd_ansatz(pool: CDPool, p: int, groups=None, product_form: bool = False) -> Ansatz:
    """``prod_p exp(-i sum_k t_k P_k)``: CD terms only."""
    if p < 1:
        raise ValueError("need at least one layer")
    blocks = []
    n = 0
    for _ in range(p):
        cd, k = _cd_block(pool, groups, n, product_form)
        blocks.append(cd)
        n += k
    name = "cd-grouped" if groups is not None else "cd"
    return Ansatz(name, pool.d, pool.n_sites, p, tuple(blocks), n, ("cd",) * n)


# ---------------------------------------------------------------------------
# evaluation


@lru_cache(maxsize=4096)
def _local_eig(d: int, factors: tuple) -> tuple[tuple[int, ...], np.ndarray, np.ndarray]:
    sites = tuple(s for s, _ in factors)
    m = np.ones((1, 1), dtype=complex)
    for _, lab in factors:
        m = np.kron(m, site_matrix(d, lab))
    w, v = np.linalg.eigh(m)
    return sites, w, v


def apply_term_exp(psi: np.ndarray, d: int, n_sites: int, factors: tuple, angle: float) -> np.ndarray:
    """``exp(-i angle P) psi`` for a single product term ``P`` (acts locally)."""
    if angle == 0:
        return psi
    if not factors:
        return np.exp(-1j * angle) * psi
    sites, w, v = _local_eig(d, factors)
    u = (v * np.exp(-1j * angle * w)) @ v.conj().T
    return apply_local(psi, d, n_sites, sites, u)


class _FixedBlock:
    def __init__(self, gen: TermSum, slot: int):
        self.slot = slot
        self.diag = gen.diagonal()
        if self.diag is None:
            self.w, self.v = eigh_generator(gen)

    def apply(self, psi, theta):
        t = theta[self.slot]
        if self.diag is not None:
            return np.exp(-1j * t * self.diag) * psi
        return self.v @ (np.exp(-1j * t * self.w) * (self.v.conj().T @ psi))


class _SummedBlock:
    def __init__(self, block: Block, d: int, n_sites: int):
        self.d, self.n = d, n_sites
        self.block = block
        self.slots = np.array(block.slots)
        self.terms = [(g.terms[0][0], g.terms[0][1]) for g in block.generators]
        if block.product_form:
            return
        mats = [g.to_sparse().tocoo() for g in block.generators]
        rows = np.concatenate([m.row for m in mats])
        cols = np.concatenate([m.col for m in mats])
        dim = d**n_sites
        pattern = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(dim, dim))
        pattern.sum_duplicates()
        pattern.sort_indices()
        self.indptr, self.indices = pattern.indptr, pattern.indices
        # data[k] holds generator k on the shared sparsity pattern
        lookup = sp.csr_matrix(
            (np.arange(pattern.nnz) + 1, pattern.indices, pattern.indptr), shape=(dim, dim)
        )
        self.data = np.zeros((len(mats), pattern.nnz), dtype=complex)
        for k, m in enumerate(mats):
            pos = np.asarray(lookup[m.row, m.col]).ravel() - 1
            np.add.at(self.data[k], pos, m.data)
        self.dim = dim

    def generator(self, theta) -> sp.csr_matrix:
        coeffs = np.asarray(theta)[self.slots]
        return sp.csr_matrix((coeffs @ self.data, self.indices, self.indptr), shape=(self.dim, self.dim))

    def apply(self, psi, theta):
        if self.block.product_form:
            for (c, f), s in zip(self.terms, self.slots):
                psi = apply_term_exp(psi, self.d, self.n, f, c * theta[s])
            return psi
        g = self.generator(theta)
        if self.dim <= EIGH_MAX_DIM:
            w, v = np.linalg.eigh(g.toarray())
            return v @ (np.exp(-1j * w) * (v.conj().T @ psi))
        return expm_multiply(-1j * g, psi)


def _compile_block(a: Ansatz, b: Block):
    check_dim(a.d, a.n_sites)
    if b.summed:
        return _SummedBlock(b, a.d, a.n_sites)
    return _FixedBlock(b.generators[0], b.slots[0])


def bind_evolve(a: Ansatz, theta, psi0: StateVector) -> StateVector:
    """Apply the ansatz blocks in order to ``psi0`` with parameters ``theta``."""
    theta = np.asarray(theta, dtype=float).ravel()
    if theta.size != a.total_params:
        raise ValueError(f"{a.name} expects {a.total_params} parameters, got {theta.size}")
    if (psi0.d, psi0.n_sites) != (a.d, a.n_sites):
        raise ValueError("initial state does not match the ansatz register")
    psi = np.array(psi0.amplitudes)
    for blk in a._engine:
        psi = blk.apply(psi, theta)
    return StateVector(a.d, a.n_sites, psi)


def reverse_evolve(a: Ansatz, theta, psi: StateVector) -> StateVector:
    """Inverse circuit: blocks in reverse order with ``-theta``."""
    theta = -np.asarray(theta, dtype=float).ravel()
    if theta.size != a.total_params:
        raise ValueError(f"{a.name} expects {a.total_params} parameters, got {theta.size}")
    psi0 = psi
    psi = np.array(psi0.amplitudes)
    for blk in reversed(a._engine):
        psi = blk.apply(psi, theta)
    return StateVector(a.d, a.n_sites, psi)


# ---------------------------------------------------------------------------
# Trotterized counterdiabatic annealing


def trotter_evolve(
    h0: TermSum,
    hp: TermSum,
    pool: CDPool | None,
    alphas_fn,
    schedule: Schedule,
    n_steps: int,
    psi0: StateVector | None = None,
) -> StateVector:
    """First-order product formula for ``H(t) = H_a(lam(t)) + lam'(t) sum_k alpha_k(lam) B_k``.

    Step ``j = 1..n`` uses coefficients evaluated at ``t = j dt`` and applies
    one exponential per term: H0 terms, then HP terms, then CD terms.
    ``alphas_fn`` maps ``lam`` to coefficients (array or ``CDCoefficients``);
    pass ``None`` to switch the CD correction off.
    """
    _check_pair(h0, hp)
    if n_steps < 1:
        raise ValueError("need at least one Trotter step")
    d, n = h0.d, h0.n_sites
    if psi0 is None:
        psi0 = initial_state(n, d)
    psi = np.array(psi0.amplitudes)
    dt = schedule.total_time / n_steps
    use_cd = pool is not None and alphas_fn is not None and len(pool) > 0
    for j in range(1, n_steps + 1):
        t = j * dt
        lam = schedule.lam(t)
        for c, f in h0.terms:
            psi = apply_term_exp(psi, d, n, f, dt * (1 - lam) * c)
        for c, f in hp.terms:
            psi = apply_term_exp(psi, d, n, f, dt * lam * c)
        if use_cd:
            alphas = alphas_fn(lam)
            alphas = np.asarray(getattr(alphas, "alphas", alphas), dtype=float)
            rate = schedule.dlam(t)
            for a_k, e in zip(alphas, pool.elements):
                psi = apply_term_exp(psi, d, n, e.factors, dt * rate * a_k)
    return StateVector(d, n, psi)


def action_alphas(h0: TermSum, hp: TermSum, pool: CDPool, groups=None):
    """``lam -> alpha(lam)`` by action minimization (Gram system precomputed)."""
    path = CoefficientPath(h0, hp, pool, groups)

    def fn(lam: float) -> np.ndarray:
        return path(lam).alphas

    return fn


def exact_propagate(h0: TermSum, hp: TermSum, pool, alphas_fn, schedule: Schedule, psi0: StateVector | None = None, rtol: float = 1e-12) -> StateVector:
    """Reference solution of the time-dependent Schrodinger equation (adaptive RK)."""
    from scipy.integrate import solve_ivp

    if psi0 is None:
        psi0 = initial_state(h0.n_sites, h0.d)
    m0, mp = h0.to_sparse(), hp.to_sparse()
    use_cd = pool is not None and alphas_fn is not None
    cd_ops = [b.to_sparse() for b in pool.operators()] if use_cd else []

    def rhs(t, y):
        lam = schedule.lam(t)
        out = (1 - lam) * (m0 @ y) + lam * (mp @ y)
        if use_cd:
            alphas = alphas_fn(lam)
            alphas = np.asarray(getattr(alphas, "alphas", alphas), dtype=float)
            rate = schedule.dlam(t)
            for a_k, b in zip(alphas, cd_ops):
                out = out + rate * a_k * (b @ y)
        return -1j * out

    sol = solve_ivp(rhs, (0.0, schedule.total_time), np.array(psi0.amplitudes), method="DOP853", rtol=rtol, atol=rtol * 1e-2)
    psi = sol.y[:, -1]
    return StateVector(h0.d, h0.n_sites, psi / np.linalg.norm(psi))
