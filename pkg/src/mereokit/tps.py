"""Tensor product structures and the decision procedure for their equivalence.

A ``Tps`` holds one representative isomorphism from the abstract space onto
the canonical product space, as a D x D unitary in the canonical basis. Two
representatives describe the same structure when they differ by single-site
unitaries and permutations of equal-dimension factors; ``equivalent``
decides this via operator Schmidt ranks across every single-factor
bipartition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, InvariantViolation
from .hilbert import Dims, StateVec, UnitaryOp, _mat, _vec, haar_state, haar_unitary, kron_all

PRODUCT_RTOL = 1e-8  # relative second-singular-value threshold for product detection


@dataclass(frozen=True)
class Tps:
    dims: Dims
    iso: UnitaryOp

    def __post_init__(self):
        if self.iso.dim != self.dims.total:
            raise DimensionMismatch(
                f"iso dim {self.iso.dim} != product dim {self.dims.total}"
            )


@dataclass(frozen=True)
class ProductOpCertificate:
    """Witness that an operator is a product of single-factor operators.

    ``kron(factors)`` composed with the factor permutation reproduces the
    certified operator, with any global phase folded into ``factors[0]``.
    """

    factors: tuple[np.ndarray, ...]
    permutation: tuple[int, ...]

    def assemble(self) -> np.ndarray:
        dims = Dims(tuple(f.shape[0] for f in self.factors))
        return perm_matrix(dims.factors, self.permutation).T @ kron_all(self.factors)


def canonical(dims: Dims) -> Tps:
    return Tps(dims, UnitaryOp(np.eye(dims.total)))


def act(U: UnitaryOp, T: Tps) -> Tps:
    """Push a TPS along a unitary of the abstract space.

    The new representative is iso . U^dag, so an operator H seen through the
    new structure looks exactly like U H U^dag seen through the old one.
    """
    if U.dim != T.dims.total:
        raise DimensionMismatch(f"unitary dim {U.dim} != product dim {T.dims.total}")
    return Tps(T.dims, UnitaryOp(T.iso.mat @ U.mat.conj().T))


def random_tps(dims: Dims, stream: np.random.Generator) -> Tps:
    return Tps(dims, haar_unitary(dims.total, stream))


def perm_matrix(factors: tuple[int, ...], sigma: tuple[int, ...]) -> np.ndarray:
    """Permutation unitary sending factor sigma[j] of the input to slot j.

    Only permutations between equal-dimension factors are admissible.
    """
    if sorted(sigma) != list(range(len(factors))):
        raise DimensionMismatch(f"{sigma} is not a permutation")
    if any(factors[sigma[j]] != factors[j] for j in range(len(factors))):
        raise DimensionMismatch(f"{sigma} permutes unequal factor dimensions {factors}")
    D = int(np.prod(factors))
    digits = np.unravel_index(np.arange(D), factors)
    target = np.ravel_multi_index(tuple(digits[s] for s in sigma), factors)
    P = np.zeros((D, D))
    P[target, np.arange(D)] = 1.0
    return P


def _single_factor_realign(mat: np.ndarray, factors: tuple[int, ...], i: int) -> np.ndarray:
    """Reshape a D x D operator into a (d_i^2, (D/d_i)^2) matrix across factor i."""
    n = len(factors)
    t = mat.reshape(factors + factors)
    order = [i, n + i] + [a for a in range(n) if a != i] + [n + a for a in range(n) if a != i]
    d = factors[i]
    return np.transpose(t, order).reshape(d * d, -1)


def is_product_operator(
    W, dims: Dims, rel_tol: float = PRODUCT_RTOL
) -> Optional[ProductOpCertificate]:
    """Certificate that W equals a phase times a product of single-factor operators.

    Decision: across every single-factor-vs-rest bipartition the realigned
    operator must have relative second singular value below ``rel_tol``.
    Returns None for entangling operators.
    """
    mat = _mat(W)
    if mat.shape != (dims.total, dims.total):
        raise DimensionMismatch(f"operator shape {mat.shape} != dim {dims.total}")
    factors = []
    for i, d in enumerate(dims.factors):
        M = _single_factor_realign(mat, dims.factors, i)
        U, s, _ = np.linalg.svd(M)
        if s[0] == 0.0 or s[1] > rel_tol * s[0]:
            return None
        factors.append(U[:, 0].reshape(d, d) * np.sqrt(d))
    # pin scale and global phase on the first factor
    prod = kron_all(factors)
    z = np.vdot(prod, mat) / np.vdot(prod, prod)
    factors[0] = factors[0] * z
    residual = np.abs(kron_all(factors) - mat).max()
    if residual > 10 * rel_tol * (1.0 + np.abs(mat).max()):
        return None
    return ProductOpCertificate(tuple(factors), tuple(range(dims.n)))


def _admissible_permutations(factors: tuple[int, ...]):
    for sigma in itertools.permutations(range(len(factors))):
        if all(factors[sigma[j]] == factors[j] for j in range(len(factors))):
            yield sigma


def equivalent(
    T1: Tps, T2: Tps, rel_tol: float = PRODUCT_RTOL, with_certificate: bool = False
):
    """Decide whether two representatives define the same structure.

    True iff some admissible factor permutation composed with
    T1.iso . T2.iso^{-1} passes the product-operator test.
    """
    if T1.dims != T2.dims:
        raise DimensionMismatch(f"factor dimensions differ: {T1.dims} vs {T2.dims}")
    W = T1.iso.mat @ T2.iso.mat.conj().T
    for sigma in _admissible_permutations(T1.dims.factors):
        P = perm_matrix(T1.dims.factors, sigma)
        cert = is_product_operator(P @ W, T1.dims, rel_tol)
        if cert is not None:
            cert = ProductOpCertificate(cert.factors, sigma)
            return (True, cert) if with_certificate else True
    return (False, None) if with_certificate else False


def product_state_in(T: Tps, site_vectors) -> StateVec:
    """State of the abstract space that is the given pure tensor in T."""
    chi = kron_all([np.asarray(_vec(v)) for v in site_vectors])
    chi = chi / np.linalg.norm(chi)
    return StateVec(T.iso.mat.conj().T @ chi)


def random_product_probe(T: Tps, stream: np.random.Generator) -> StateVec:
    """Random product state in T, one Haar-uniform ket per factor."""
    return product_state_in(T, [haar_state(d, stream).vec for d in T.dims.factors])


def tps_to_json(T: Tps) -> dict:
    iso = T.iso.mat
    return {
        "dims": list(T.dims.factors),
        "iso": [[[float(z.real), float(z.imag)] for z in row] for row in iso],
    }


def tps_from_json(obj: dict) -> Tps:
    dims = Dims(tuple(obj["dims"]))
    iso = np.array([[complex(re, im) for re, im in row] for row in obj["iso"]])
    if iso.shape != (dims.total, dims.total):
        raise InvariantViolation(f"iso shape {iso.shape} inconsistent with dims {dims.factors}")
    return Tps(dims, UnitaryOp(iso))
