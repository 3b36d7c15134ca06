"""Single-site qudit operators, gates and dense statevector primitives.

Basis convention: the computational label ``j`` of a ``d``-level site carries
magnetic quantum number ``m = j - l`` with ``l = (d - 1) / 2``.  In a register
of ``n`` sites, site 0 is the most significant digit of the basis label.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np
import scipy.linalg

if TYPE_CHECKING:
    from .terms import TermSum

DEFAULT_DENSE_CAP = 4096
HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-10
_ZERO_TOL = 1e-12


class DenseCapError(ValueError):
    """Requested a dense object larger than the configured cap."""


def dense_cap() -> int:
    """Largest Hilbert-space dimension handled densely (env ``QUDIT_CD_DENSE_CAP``)."""
    raw = os.environ.get("QUDIT_CD_DENSE_CAP")
    return int(raw) if raw else DEFAULT_DENSE_CAP


def check_dim(d: int, n_sites: int) -> int:
    dim = d**n_sites
    cap = dense_cap()
    if dim > cap:
        raise DenseCapError(
            f"dimension {d}**{n_sites} = {dim} exceeds dense cap {cap} "
            "(set QUDIT_CD_DENSE_CAP to raise it)"
        )
    return dim


# ---------------------------------------------------------------------------
# single-site operators


@dataclass(frozen=True, eq=False)
class SiteOperator:
    d: int
    label: str
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (self.d, self.d):
            raise ValueError(f"{self.label}: expected shape {(self.d, self.d)}, got {m.shape}")
        if np.max(np.abs(m - m.conj().T), initial=0.0) > HERMITIAN_TOL:
            raise ValueError(f"{self.label} is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def _check_d(d: int) -> None:
    if int(d) != d or d < 2:
        raise ValueError(f"local dimension must be an integer >= 2, got {d}")


@lru_cache(maxsize=None)
def _ladder(d: int) -> np.ndarray:
    l = (d - 1) / 2
    lp = np.zeros((d, d))
    for j in range(d - 1):
        m = j - l
        lp[j + 1, j] = np.sqrt((l - m) * (l + m + 1))
    return lp


def angular_momentum(d: int, axis: str) -> np.ndarray:
    """Spin-``l`` matrix for ``axis`` in ``{"x", "y", "z", "plus", "minus"}``.

    ``L_-`` is taken as the adjoint of ``L_+`` so that ``L_x`` and ``L_y``
    come out Hermitian.
    """
    _check_d(d)
    l = (d - 1) / 2
    lp = _ladder(d).astype(complex)
    lm = lp.conj().T
    if axis == "z":
        out = np.diag(np.arange(d) - l).astype(complex)
    elif axis == "plus":
        out = lp
    elif axis == "minus":
        out = lm
    elif axis == "x":
        out = (lm + lp) / 2
    elif axis == "y":
        out = (lp - lm) / 2j
    else:
        raise ValueError(f"unknown axis {axis!r}")
    return out.copy()


def subspace_pauli(d: int, i: int, j: int, phi: float) -> SiteOperator:
    """``cos(phi) X + sin(phi) Y`` acting on levels ``{i, j}``, zero elsewhere."""
    _check_d(d)
    if not (0 <= i < d and 0 <= j < d) or i == j:
        raise ValueError(f"invalid level pair ({i}, {j}) for d={d}")
    if i > j:
        raise ValueError("level pair must satisfy i < j")
    m = np.zeros((d, d), dtype=complex)
    m[i, j] = np.exp(-1j * phi)
    m[j, i] = np.exp(1j * phi)
    return SiteOperator(d, f"sigma[{i},{j}]({phi:.12g})", m)


@dataclass(frozen=True, eq=False)
class Unitary:
    dim: int
    matrix: np.ndarray = field(repr=False)


def native_gates(d: int, i: int, j: int, theta: float, phi: float, kind: str = "rotation") -> Unitary:
    """Equatorial rotation ``R^{ij}(theta, phi)`` or Molmer-Sorensen gate ``MS^{ij}``."""
    sigma = subspace_pauli(d, i, j, phi).matrix
    if kind == "rotation":
        return Unitary(d, scipy.linalg.expm(-0.5j * theta * sigma))
    if kind == "ms":
        eye = np.eye(d)
        s = np.kron(sigma, eye) + np.kron(eye, sigma)
        return Unitary(d * d, scipy.linalg.expm(-0.25j * theta * (s @ s)))
    raise ValueError(f"unknown gate kind {kind!r}")


class _Registry:
    """Label <-> matrix table for one local dimension.

    Matrices are stored up to a real scale: registering a matrix proportional
    to an existing entry returns that entry's label and the scale factor, so a
    label always names a unique operator.
    """

    def __init__(self, d: int):
        self.d = d
        self.ops: dict[str, np.ndarray] = {}
        self.aliases: dict[str, tuple[str, float]] = {}
        lz = angular_momentum(d, "z")
        ly = angular_momentum(d, "y")
        self.ops["I"] = np.eye(d, dtype=complex)
        for name, mat in (("Lz", lz), ("Lx", angular_momentum(d, "x")), ("Ly", ly)):
            self.register(mat, name)
        for p in range(2, d):
            self.register(np.linalg.matrix_power(lz, p), f"Lz{p}")
        self.register(lz @ ly + ly @ lz, "{Lz,Ly}")

    def find(self, mat: np.ndarray) -> tuple[str, float] | None:
        nrm = np.vdot(mat, mat).real
        for name, ref in self.ops.items():
            c = np.vdot(ref, mat).real / np.vdot(ref, ref).real
            if np.max(np.abs(mat - c * ref)) <= 1e-10 * max(1.0, np.sqrt(nrm)):
                return name, c
        return None

    def register(self, mat: np.ndarray, hint: str) -> tuple[str, float] | None:
        """Canonical ``(label, scale)`` with ``mat == scale * matrix(label)``; None if zero."""
        mat = np.asarray(mat, dtype=complex)
        if np.max(np.abs(mat)) < _ZERO_TOL:
            return None
        if np.max(np.abs(mat - mat.conj().T)) > 1e-10:
            raise ValueError(f"operator {hint!r} is not Hermitian")
        hit = self.find(mat)
        if hit is not None:
            if hint not in self.ops and hint not in self.aliases:
                self.aliases[hint] = hit
            return hit
        name = hint
        k = 1
        while name in self.ops or name in self.aliases:
            k += 1
            name = f"{hint}#{k}"
        mat = mat.copy()
        mat.setflags(write=False)
        self.ops[name] = mat
        return name, 1.0


_REGISTRIES: dict[int, _Registry] = {}


def _registry(d: int) -> _Registry:
    _check_d(d)
    reg = _REGISTRIES.get(d)
    if reg is None:
        reg = _REGISTRIES[d] = _Registry(d)
    return reg


def resolve_label(d: int, label: str) -> tuple[str, float] | None:
    """Map a possibly aliased label to ``(canonical_label, scale)``; None if the operator is zero."""
    reg = _registry(d)
    if label in reg.ops:
        return label, 1.0
    if label in reg.aliases:
        return reg.aliases[label]
    if label.startswith("Lz") and label[2:].isdigit():
        p = int(label[2:])
        return reg.register(np.linalg.matrix_power(angular_momentum(d, "z"), p), label)
    raise KeyError(f"unknown site operator {label!r} for d={d}")


def site_operator(d: int, label: str) -> SiteOperator:
    """The registered operator named ``label`` (canonical labels only)."""
    reg = _registry(d)
    if label not in reg.ops:
        hit = resolve_label(d, label)
        if hit is None or hit[1] != 1.0 or hit[0] != label:
            raise KeyError(f"{label!r} is not a canonical label for d={d} (resolves to {hit})")
    return SiteOperator(d, label, reg.ops[label])


def site_matrix(d: int, label: str) -> np.ndarray:
    return _registry(d).ops[label]


def register_operator(d: int, matrix: np.ndarray, hint: str) -> tuple[str, float] | None:
    return _registry(d).register(matrix, hint)


@lru_cache(maxsize=None)
def site_products(d: int, a: str, b: str) -> tuple[tuple[str, float] | None, tuple[str, float] | None]:
    """Split ``A B`` into ``h + i k`` with ``h = {A,B}/2`` and ``k = -i[A,B]/2``.

    Returns the canonical ``(label, scale)`` of ``h`` and ``k`` (None if zero).
    """
    ma, mb = site_matrix(d, a), site_matrix(d, b)
    ab, ba = ma @ mb, mb @ ma
    h = _registry(d).register(ab + ba, f"{{{a},{b}}}")
    k = _registry(d).register(1j * (ab - ba), f"i[{a},{b}]")
    h = None if h is None else (h[0], 0.5 * h[1])
    k = None if k is None else (k[0], -0.5 * k[1])
    return h, k


def is_diagonal_label(d: int, label: str) -> bool:
    m = site_matrix(d, label)
    return bool(np.max(np.abs(m - np.diag(np.diag(m)))) == 0.0)


def is_imaginary_label(d: int, label: str) -> bool:
    """True for purely imaginary (``Ly``-type) site operators."""
    m = site_matrix(d, label)
    return bool(np.max(np.abs(m.real)) < _ZERO_TOL and np.max(np.abs(m.imag)) > _ZERO_TOL)


# ---------------------------------------------------------------------------
# states


@dataclass(frozen=True, eq=False)
class StateVector:
    d: int
    n_sites: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.d**self.n_sites:
            raise ValueError(f"expected {self.d**self.n_sites} amplitudes, got {amps.size}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (|psi|^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def basis(cls, d: int, labels) -> "StateVector":
        """Computational basis state ``|labels[0] labels[1] ...>``."""
        labels = list(labels)
        amps = np.zeros(d ** len(labels), dtype=complex)
        amps[basis_index(d, labels)] = 1.0
        return cls(d, len(labels), amps)

    @classmethod
    def product(cls, site_state, n_sites: int) -> "StateVector":
        """``site_state`` repeated on every site."""
        v = np.asarray(site_state, dtype=complex)
        out = np.ones(1, dtype=complex)
        for _ in range(n_sites):
            out = np.kron(out, v)
        return cls(v.size, n_sites, out)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def basis_index(d: int, labels) -> int:
    idx = 0
    for j in labels:
        if not 0 <= j < d:
            raise ValueError(f"basis label {j} out of range for d={d}")
        idx = idx * d + int(j)
    return idx


def basis_labels(d: int, n_sites: int, index: int) -> tuple[int, ...]:
    out = []
    for _ in range(n_sites):
        index, r = divmod(index, d)
        out.append(r)
    return tuple(reversed(out))


# ---------------------------------------------------------------------------
# dense embedding and evolution


def term_to_dense(coeff: float, factors, n_sites: int, d: int) -> np.ndarray:
    """Kronecker embedding of ``coeff * prod_s factors[s]`` with identity elsewhere.

    ``factors`` is a mapping or an iterable of ``(site, label)`` pairs.
    """
    dim = check_dim(d, n_sites)
    fmap = dict(factors.items() if hasattr(factors, "items") else factors)
    for s in fmap:
        if not 0 <= s < n_sites:
            raise ValueError(f"site {s} outside register of {n_sites} sites")
    out = np.ones((1, 1), dtype=complex)
    for s in range(n_sites):
        if s in fmap:
            out = np.kron(out, site_matrix(d, fmap[s]))
        else:
            out = np.kron(out, np.eye(d))
    assert out.shape == (dim, dim)
    return coeff * out


def apply_local(psi: np.ndarray, d: int, n_sites: int, sites, op: np.ndarray) -> np.ndarray:
    """Apply ``op`` (acting on ``sites`` in the given order) to a flat state vector."""
    sites = list(sites)
    k = len(sites)
    t = psi.reshape((d,) * n_sites)
    t = np.tensordot(op.reshape((d,) * (2 * k)), t, axes=(list(range(k, 2 * k)), sites))
    t = np.moveaxis(t, list(range(k)), sites)
    return t.reshape(-1)


@lru_cache(maxsize=256)
def _eigh_cached(generator: "TermSum"):
    h = generator.to_dense()
    if np.max(np.abs(h - h.conj().T), initial=0.0) > 1e-10:
        raise ValueError("generator is not Hermitian")
    w, v = np.linalg.eigh(h)
    w.setflags(write=False)
    v.setflags(write=False)
    return w, v


def eigh_generator(generator: "TermSum") -> tuple[np.ndarray, np.ndarray]:
    """Cached eigendecomposition of the dense form of ``generator``."""
    return _eigh_cached(generator)


def _check_compatible(state: StateVector, op: "TermSum") -> None:
    if state.d != op.d or state.n_sites != op.n_sites:
        raise ValueError(
            f"register mismatch: state (d={state.d}, n={state.n_sites}) vs "
            f"operator (d={op.d}, n={op.n_sites})"
        )


def evolve_exact(state: StateVector, generator: "TermSum", angle: float) -> StateVector:
    """``exp(-i angle G) |psi>`` via eigendecomposition of the summed generator."""
    _check_compatible(state, generator)
    check_dim(state.d, state.n_sites)
    if angle == 0:
        return state
    diag = generator.diagonal()
    if diag is not None:
        out = np.exp(-1j * angle * diag) * state.amplitudes
    else:
        w, v = eigh_generator(generator)
        out = v @ (np.exp(-1j * angle * w) * (v.conj().T @ state.amplitudes))
    return StateVector(state.d, state.n_sites, out)


def expectation(state: StateVector, observable: "TermSum") -> float:
    _check_compatible(state, observable)
    psi = state.amplitudes
    diag = observable.diagonal()
    if diag is not None:
        val = complex(np.vdot(psi, diag * psi))
    else:
        val = complex(np.vdot(psi, observable.to_sparse() @ psi))
    if abs(val.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary part {val.imag!r}; observable not Hermitian?")
    return val.real


def fidelity(state: StateVector, target: StateVector) -> float:
    if state.dim != target.dim:
        raise ValueError(f"dimension mismatch: {state.dim} vs {target.dim}")
    return float(min(1.0, abs(np.vdot(target.amplitudes, state.amplitudes)) ** 2))
