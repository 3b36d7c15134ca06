"""Hermitian operators as real-weighted sums of tensor products of site operators."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np
import scipy.sparse as sp

from .algebra import (
    check_dim,
    is_diagonal_label,
    is_imaginary_label,
    resolve_label,
    site_matrix,
    term_to_dense,
)

COEFF_TOL = 1e-14

Factors = tuple[tuple[int, str], ...]


def _canonical_factors(d: int, factors) -> tuple[float, Factors] | None:
    items = factors.items() if isinstance(factors, Mapping) else factors
    scale = 1.0
    out = {}
    for site, label in items:
        site = int(site)
        if site in out:
            raise ValueError(f"site {site} appears twice in one term")
        hit = resolve_label(d, label)
        if hit is None:
            return None
        canon, s = hit
        scale *= s
        if canon != "I":
            out[site] = canon
    return scale, tuple(sorted(out.items()))


def _term_order(item):
    factors = item[0]
    return (len(factors), factors)


@dataclass(frozen=True)
class TermSum:
    """``sum_t c_t prod_s O_{t,s}`` on ``n_sites`` sites of local dimension ``d``.

    Terms are kept canonical: factors sorted by site, identical products
    merged, and coefficients below ``COEFF_TOL`` dropped.
    """

    d: int
    n_sites: int
    terms: tuple[tuple[float, Factors], ...] = ()

    @classmethod
    def build(cls, d: int, n_sites: int, terms: Iterable = ()) -> "TermSum":
        acc: dict[Factors, float] = {}
        for coeff, factors in terms:
            if np.iscomplexobj(coeff) and abs(np.imag(coeff)) > COEFF_TOL:
                raise ValueError(f"complex coefficient {coeff!r}")
            canon = _canonical_factors(d, factors)
            if canon is None:
                continue
            scale, key = canon
            for s, _ in key:
                if not 0 <= s < n_sites:
                    raise ValueError(f"site {s} outside register of {n_sites} sites")
            acc[key] = acc.get(key, 0.0) + float(np.real(coeff)) * scale
        kept = sorted(((k, c) for k, c in acc.items() if abs(c) > COEFF_TOL), key=_term_order)
        return cls(d, n_sites, tuple((c, k) for k, c in kept))

    @classmethod
    def zero(cls, d: int, n_sites: int) -> "TermSum":
        return cls(d, n_sites, ())

    @classmethod
    def single(cls, d: int, n_sites: int, factors, coeff: float = 1.0) -> "TermSum":
        return cls.build(d, n_sites, [(coeff, factors)])

    def _check_shape(self, other: "TermSum") -> None:
        if (self.d, self.n_sites) != (other.d, other.n_sites):
            raise ValueError(
                f"register mismatch: (d={self.d}, n={self.n_sites}) vs (d={other.d}, n={other.n_sites})"
            )

    def __add__(self, other: "TermSum") -> "TermSum":
        self._check_shape(other)
        return TermSum.build(self.d, self.n_sites, self.terms + other.terms)

    def __sub__(self, other: "TermSum") -> "TermSum":
        return self + (-1.0) * other

    def __mul__(self, scalar: float) -> "TermSum":
        return TermSum.build(self.d, self.n_sites, [(scalar * c, f) for c, f in self.terms])

    __rmul__ = __mul__

    def __neg__(self) -> "TermSum":
        return (-1.0) * self

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, factors) -> float:
        canon = _canonical_factors(self.d, factors)
        if canon is None:
            return 0.0
        scale, key = canon
        for c, f in self.terms:
            if f == key:
                return c * scale
        return 0.0

    def as_dict(self) -> dict[Factors, float]:
        return {f: c for c, f in self.terms}

    def is_diagonal(self) -> bool:
        return all(is_diagonal_label(self.d, lab) for _, f in self.terms for _, lab in f)

    def diagonal(self) -> np.ndarray | None:
        """Dense diagonal when every factor is diagonal, else None."""
        if not self.is_diagonal():
            return None
        return _diagonal(self)

    def to_dense(self) -> np.ndarray:
        dim = check_dim(self.d, self.n_sites)
        out = np.zeros((dim, dim), dtype=complex)
        for c, f in self.terms:
            out += term_to_dense(c, f, self.n_sites, self.d)
        return out

    def to_sparse(self) -> sp.csr_matrix:
        return _sparse(self)

    def __repr__(self) -> str:
        body = " + ".join(f"{c:.6g}*{format_factors(f)}" for c, f in self.terms) or "0"
        return f"TermSum(d={self.d}, n={self.n_sites}: {body})"


def format_factors(factors: Factors, one_based: bool = False) -> str:
    if not factors:
        return "I"
    off = 1 if one_based else 0
    return " ".join(f"{lab}_{s + off}" for s, lab in factors)


def support(d: int, factors: Factors):
    """Support descriptor of a product term.

    ``("vertex", i)`` for one site, ``("arc", (i, j))`` for two sites with the
    ``Ly``-type (imaginary) factor's site first, ``("global", sites)`` otherwise.
    """
    sites = tuple(s for s, _ in factors)
    if len(sites) == 1:
        return ("vertex", sites[0])
    if len(sites) == 2:
        (a, la), (b, lb) = factors
        if is_imaginary_label(d, lb) and not is_imaginary_label(d, la):
            return ("arc", (b, a))
        return ("arc", (a, b))
    return ("global", sites)


@lru_cache(maxsize=128)
def _diagonal(op: TermSum) -> np.ndarray:
    d, n = op.d, op.n_sites
    out = np.zeros((d,) * n)
    for c, f in op.terms:
        t = np.full((1,) * n, c)
        for s, lab in f:
            shape = [1] * n
            shape[s] = d
            t = t * np.real(np.diag(site_matrix(d, lab))).reshape(shape)
        out = out + t
    flat = out.reshape(-1)
    flat.setflags(write=False)
    return flat


def _sparse_term(d: int, n: int, coeff: float, factors: Factors) -> sp.csr_matrix:
    fmap = dict(factors)
    out = sp.identity(1, dtype=complex, format="csr")
    run = 1
    for s in range(n):
        if s in fmap:
            if run > 1:
                out = sp.kron(out, sp.identity(run, format="csr"), format="csr")
                run = 1
            out = sp.kron(out, sp.csr_matrix(site_matrix(d, fmap[s])), format="csr")
        else:
            run *= d
    if run > 1:
        out = sp.kron(out, sp.identity(run, format="csr"), format="csr")
    return coeff * out


@lru_cache(maxsize=512)
def _sparse(op: TermSum) -> sp.csr_matrix:
    dim = op.d**op.n_sites
    out = sp.csr_matrix((dim, dim), dtype=complex)
    for c, f in op.terms:
        out = out + _sparse_term(op.d, op.n_sites, c, f)
    out.sum_duplicates()
    return out.tocsr()
