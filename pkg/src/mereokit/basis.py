"""Orthonormal Hermitian site bases and weight-graded product expansions.

Every Hermitian operator on the product space expands uniquely over tensor
products of single-site basis operators. Grouping squared coefficients by
weight (the number of non-identity sites in a term) grades the operator;
which weight sectors vanish is independent of the per-site basis choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from string import ascii_lowercase
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, InvariantViolation
from .hilbert import ATOL, Dims, HermitianOp
from .tps import Tps

DUST_RTOL = 1e-10  # coefficients below this (relative to the HS norm) count as zero


@dataclass(frozen=True)
class SiteBasis:
    """d^2 Hermitian operators, HS-orthonormal, identity-proportional first."""

    d: int
    ops: tuple[np.ndarray, ...]

    def __post_init__(self):
        d = self.d
        ops = tuple(np.asarray(o, dtype=complex) for o in self.ops)
        if len(ops) != d * d:
            raise InvariantViolation(f"need {d * d} operators, got {len(ops)}")
        gram = np.array([[np.vdot(a, b) for b in ops] for a in ops])
        if np.abs(gram - np.eye(d * d)).max() > ATOL:
            raise InvariantViolation("site basis is not HS-orthonormal")
        if np.abs(ops[0] - np.eye(d) / math.sqrt(d)).max() > ATOL:
            raise InvariantViolation("ops[0] must be I/sqrt(d)")
        for a, op in enumerate(ops):
            if np.abs(op - op.conj().T).max() > ATOL:
                raise InvariantViolation(f"ops[{a}] is not Hermitian")
            if a >= 1 and abs(np.trace(op)) > ATOL:
                raise InvariantViolation(f"ops[{a}] is not traceless")
        object.__setattr__(self, "ops", ops)


@lru_cache(maxsize=None)
def site_basis(d: int) -> SiteBasis:
    """Generalized Gell-Mann basis scaled to unit HS norm, identity first.

    For d=2 this is {I, sx, sy, sz}/sqrt(2) in that order.
    """
    if d < 2:
        raise InvariantViolation("site dimension must be >= 2")
    ops = [np.eye(d, dtype=complex) / math.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            sym = np.zeros((d, d), dtype=complex)
            sym[j, k] = sym[k, j] = 1 / math.sqrt(2)
            ops.append(sym)
            asym = np.zeros((d, d), dtype=complex)
            asym[j, k] = -1j / math.sqrt(2)
            asym[k, j] = 1j / math.sqrt(2)
            ops.append(asym)
    for l in range(1, d):
        diag = np.zeros(d, dtype=complex)
        diag[:l] = 1.0
        diag[l] = -l
        ops.append(np.diag(diag) / math.sqrt(l * (l + 1)))
    return SiteBasis(d, tuple(ops))


@dataclass(frozen=True)
class MultiIndex:
    """One per-site basis label per factor; weight counts non-identity sites."""

    alphas: tuple[int, ...]

    @property
    def weight(self) -> int:
        return sum(1 for a in self.alphas if a != 0)


@dataclass(frozen=True)
class Decomposition:
    """Dense coefficient tensor over all multi-indices, axis i indexed by alpha_i."""

    dims: Dims
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        expected = tuple(d * d for d in self.dims.factors)
        if c.shape != expected:
            raise DimensionMismatch(f"coefficient shape {c.shape} != {expected}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def items(self) -> Iterator[tuple[MultiIndex, complex]]:
        for alphas in np.ndindex(self.coeffs.shape):
            yield MultiIndex(alphas), complex(self.coeffs[alphas])

    def hs_norm_sq(self) -> float:
        return float(np.vdot(self.coeffs, self.coeffs).real)


@dataclass(frozen=True)
class WeightProfile:
    """w[k] = sum of |coeff|^2 over multi-indices of weight k, k = 0..n."""

    w: np.ndarray

    def __post_init__(self):
        arr = np.array(self.w, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "w", arr)

    @property
    def total(self) -> float:
        return float(self.w.sum())

    @property
    def interaction_mass(self) -> float:
        return float(self.w[1:].sum())


def _stacks(factors: tuple[int, ...], bases: Optional[Sequence[SiteBasis]]):
    if bases is None:
        bases = [site_basis(d) for d in factors]
    if tuple(b.d for b in bases) != tuple(factors):
        raise DimensionMismatch("site basis dimensions do not match the factors")
    return [np.stack(b.ops) for b in bases]


def _subscripts(n: int):
    rows, cols, outs = (
        ascii_lowercase[:n],
        ascii_lowercase[n : 2 * n],
        ascii_lowercase[2 * n : 3 * n],
    )
    sites = ",".join(outs[i] + rows[i] + cols[i] for i in range(n))
    return rows + cols, sites, outs


def coeff_tensor(mat: np.ndarray, dims: Dims, bases=None) -> np.ndarray:
    """Expansion coefficients of a D x D matrix over the product basis."""
    n = dims.n
    if n > 8:
        raise DimensionMismatch("expansions limited to 8 factors")
    full, sites, outs = _subscripts(n)
    t = mat.reshape(dims.factors + dims.factors)
    stacks = [s.conj() for s in _stacks(dims.factors, bases)]
    return np.einsum(f"{full},{sites}->{outs}", t, *stacks)


def matrix_from_coeffs(coeffs: np.ndarray, dims: Dims, bases=None) -> np.ndarray:
    """Adjoint of ``coeff_tensor``: reassemble the matrix from coefficients."""
    n = dims.n
    full, sites, outs = _subscripts(n)
    stacks = _stacks(dims.factors, bases)
    t = np.einsum(f"{outs},{sites}->{full}", coeffs, *stacks)
    D = dims.total
    return t.reshape(D, D)


def decompose(H: HermitianOp, T: Tps, bases=None) -> Decomposition:
    """Expand H, seen through the structure T, over the product basis."""
    if H.dim != T.dims.total:
        raise DimensionMismatch(f"operator dim {H.dim} != product dim {T.dims.total}")
    pushed = T.iso.mat @ H.mat @ T.iso.mat.conj().T
    return Decomposition(T.dims, coeff_tensor(pushed, T.dims, bases))


def reconstruct(dec: Decomposition, bases=None) -> HermitianOp:
    return HermitianOp(matrix_from_coeffs(dec.coeffs, dec.dims, bases))


@lru_cache(maxsize=None)
def weight_tensor(factors: tuple[int, ...]) -> np.ndarray:
    """Weight of every multi-index, shaped like the coefficient tensor."""
    n = len(factors)
    w = np.zeros(tuple(d * d for d in factors), dtype=np.int64)
    for i, d in enumerate(factors):
        shape = [1] * n
        shape[i] = d * d
        w = w + (np.arange(d * d) != 0).astype(np.int64).reshape(shape)
    return w


def weight_masses(coeffs: np.ndarray, factors: tuple[int, ...], dust: float = 0.0) -> np.ndarray:
    """Squared-coefficient mass per weight sector; entries below ``dust`` dropped."""
    mag2 = (coeffs.conj() * coeffs).real
    if dust > 0.0:
        mag2 = np.where(np.abs(coeffs) > dust, mag2, 0.0)
    out = np.zeros(len(factors) + 1)
    np.add.at(out, weight_tensor(factors).ravel(), mag2.ravel())
    return out


def weight_profile(dec: Decomposition) -> WeightProfile:
    norm = math.sqrt(dec.hs_norm_sq())
    return WeightProfile(weight_masses(dec.coeffs, dec.dims.factors, dust=DUST_RTOL * norm))


def decomposition_to_json(dec: Decomposition, threshold: Optional[float] = None) -> dict:
    """JSON form {dims, entries}; entries below the dust threshold are omitted."""
    if threshold is None:
        threshold = DUST_RTOL * math.sqrt(dec.hs_norm_sq())
    entries = []
    for idx, val in dec.items():
        if abs(val) > threshold:
            entries.append({"alphas": list(idx.alphas), "re": val.real, "im": val.imag})
    return {"dims": list(dec.dims.factors), "entries": entries}
