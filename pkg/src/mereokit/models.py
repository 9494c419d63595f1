"""Reference Hamiltonians and structures: Ising chains, the string-variable
dual structure in which they stay 2-local, and scrambled K-local instances
with known ground truth."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvariantViolation
from .hilbert import Dims, HermitianOp, UnitaryOp, haar_unitary, kron_all
from .basis import Decomposition, reconstruct, weight_tensor
from .tps import Tps

SIGMA = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_string(s: str) -> HermitianOp:
    """Tensor product of Paulis, e.g. "XX" or "ZIZ"."""
    try:
        mats = [SIGMA[ch] for ch in s.upper()]
    except KeyError as e:
        raise InvariantViolation(f"unknown Pauli letter {e.args[0]!r}") from None
    if len(mats) < 2:
        raise DimensionMismatch("need at least two sites")
    return HermitianOp(kron_all(mats))


def _site_op(op: np.ndarray, site: int, n: int) -> np.ndarray:
    return kron_all([op if i == site else SIGMA["I"] for i in range(n)])


@dataclass(frozen=True)
class IsingParams:
    n: int
    J: float
    h: float
    boundary: str = "open"

    def __post_init__(self):
        if self.n < 2:
            raise InvariantViolation("need n >= 2 sites")
        if self.boundary != "open":
            raise InvariantViolation("only open boundaries are supported")


def ising_chain(p: IsingParams) -> HermitianOp:
    """Transverse-field Ising chain J sum_i Z_i Z_{i+1} + h sum_i X_i, open ends."""
    n = p.n
    H = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(n - 1):
        H += p.J * _site_op(SIGMA["Z"], i, n) @ _site_op(SIGMA["Z"], i + 1, n)
    for i in range(n):
        H += p.h * _site_op(SIGMA["X"], i, n)
    return HermitianOp(H)


def x_string(i: int, n: int) -> HermitianOp:
    """The string variable X_0 X_1 ... X_i (sites 0..i)."""
    return HermitianOp(kron_all([SIGMA["X"] if j <= i else SIGMA["I"] for j in range(n)]))


def jw_dual_tps(n: int) -> Tps:
    """Structure whose factors carry the string variables of an n-site chain.

    The commuting strings X_0...X_i are jointly diagonal in the per-site X
    basis; labeling each joint eigenvector by the string eigenvalues
    (-1)^{b_i} and keeping all phases real maps the i-th string exactly onto
    a single-site Z, and maps Z_i Z_{i+1} (and Z_{n-1} at the end) exactly
    onto single-site X's. The Ising chain is therefore 2-local here too,
    even though the strings themselves are nonlocal.
    """
    if n < 2:
        raise InvariantViolation("need n >= 2 sites")
    D = 2**n
    plus = np.array([1.0, 1.0]) / math.sqrt(2)
    minus = np.array([1.0, -1.0]) / math.sqrt(2)
    W = np.zeros((D, D))
    for b in range(D):
        bits = [(b >> (n - 1 - i)) & 1 for i in range(n)]
        prev = 0
        kets = []
        for bit in bits:
            kets.append(plus if bit == prev else minus)
            prev = bit
        W[b, :] = kron_all(kets).real
    return Tps(Dims((2,) * n), UnitaryOp(W))


def random_klocal(dims: Dims, K: int, stream: np.random.Generator) -> HermitianOp:
    """Gaussian coefficients on every weight-1..K multi-index, reassembled."""
    n = dims.n
    if not (1 <= K <= n):
        raise DimensionMismatch(f"K={K} out of range 1..{n}")
    w = weight_tensor(dims.factors)
    mask = (w >= 1) & (w <= K)
    coeffs = np.zeros(w.shape, dtype=complex)
    coeffs[mask] = stream.standard_normal(int(mask.sum()))
    return reconstruct(Decomposition(dims, coeffs))


def scrambled_klocal(
    dims: Dims, K: int, stream: np.random.Generator
) -> tuple[HermitianOp, UnitaryOp]:
    """Haar-conjugated K-local instance plus the ground-truth scrambler.

    The scrambler is for acceptance checks only; searches must not see it.
    """
    H = random_klocal(dims, K, stream)
    V = haar_unitary(dims.total, stream)
    return HermitianOp(V.mat @ H.mat @ V.mat.conj().T), V
