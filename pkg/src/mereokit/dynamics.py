"""Symmetry dimension counting, nonlocal-symmetry witnesses, and entropy orbits.

Every Hamiltonian has a commutative symmetry group of dimension D (phases
along its eigenbasis), while any commutative subgroup of a structure's
stabilizer has dimension at most sum(d_i) - (n - 1). The strict gap is what
guarantees symmetries of H that move the structure; the time-evolution
family makes such symmetries concrete, and the per-site entropy curve along
the evolved structures separates them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DimensionMismatch, InvariantViolation
from .hilbert import Dims, HermitianOp, StateVec, UnitaryOp, expm_i, site_entropies
from .locality import PRODUCT_PROBE_TOL, WITNESS_ENTROPY, _require_product_probes
from .tps import Tps, act, equivalent

COMMUTANT_TOL = 1e-9


@dataclass(frozen=True)
class SymmetryDims:
    """Dimension bookkeeping for stabilizers at the given factor dimensions."""

    dims: Dims
    stab_tps_dim: int
    abelian_bound: int
    hamiltonian_abelian_dim: int

    @property
    def hamiltonian_exceeds_bound(self) -> bool:
        return self.hamiltonian_abelian_dim > self.abelian_bound


def symmetry_dims(dims: Dims) -> SymmetryDims:
    n = dims.n
    return SymmetryDims(
        dims=dims,
        stab_tps_dim=sum(d * d for d in dims.factors) - n + 1,
        abelian_bound=sum(dims.factors) - (n - 1),
        hamiltonian_abelian_dim=dims.total,
    )


def inequality_sweep(max_n: int, max_d: int) -> bool:
    """Check D > sum(d_i) - (n-1) for every dims tuple with n <= max_n, d_i <= max_d."""
    if max_n < 2 or max_d < 2:
        raise DimensionMismatch("need max_n >= 2 and max_d >= 2")
    for n in range(2, max_n + 1):
        for factors in itertools.product(range(2, max_d + 1), repeat=n):
            if not symmetry_dims(Dims(factors)).hamiltonian_exceeds_bound:
                return False
    return True


def find_nonlocal_symmetry(
    H: HermitianOp,
    T: Tps,
    t_grid: Sequence[float],
    probes: Sequence[StateVec],
    witness_threshold: float = WITNESS_ENTROPY,
) -> Optional[tuple[float, UnitaryOp]]:
    """First grid time whose evolution unitary commutes with H but moves T.

    Probe entanglement flags a candidate time; the move is then confirmed by
    the equivalence test. Returns None when the grid shows nothing, which is
    the expected outcome exactly for 1-local Hamiltonians.
    """
    _require_product_probes(T, probes, PRODUCT_PROBE_TOL)
    lam, V = np.linalg.eigh(H.mat)
    iso = T.iso.mat
    for t in t_grid:
        phases = np.exp(-1j * float(t) * lam)
        hit = any(
            site_entropies(iso @ (V @ (phases * (V.conj().T @ p.vec))), T.dims).max()
            > witness_threshold
            for p in probes
        )
        if not hit:
            continue
        U = expm_i(H, float(t))
        if equivalent(act(U, T), T):
            continue
        comm = np.abs(U.mat @ H.mat - H.mat @ U.mat).max()
        if comm > COMMUTANT_TOL:
            raise InvariantViolation(f"evolution unitary fails to commute: {comm:.3e}")
        return float(t), U
    return None


@dataclass(frozen=True)
class OrbitCurve:
    """Entropy of one site along the time-evolved structures, for a fixed probe."""

    t_values: np.ndarray
    entropies: np.ndarray
    site: int
    probe: StateVec

    def __post_init__(self):
        t = np.array(self.t_values, dtype=float)
        s = np.array(self.entropies, dtype=float)
        if t.shape != s.shape:
            raise DimensionMismatch("t_values and entropies must have equal length")
        t.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "t_values", t)
        object.__setattr__(self, "entropies", s)

    def to_csv_rows(self):
        return [(float(t), float(s)) for t, s in zip(self.t_values, self.entropies)]


def entropy_orbit(
    H: HermitianOp, T: Tps, probe: StateVec, site: int, t_grid: Sequence[float]
) -> OrbitCurve:
    """Site entropy of the probe pushed through iso . e^{-itH}, per grid point."""
    _require_product_probes(T, [probe], PRODUCT_PROBE_TOL)
    n = T.dims.n
    if not (0 <= site < n):
        raise DimensionMismatch(f"site {site} out of range for n={n}")
    lam, V = np.linalg.eigh(H.mat)
    iso = T.iso.mat
    c = V.conj().T @ probe.vec
    ents = np.empty(len(t_grid))
    for j, t in enumerate(t_grid):
        evolved = V @ (np.exp(-1j * float(t) * lam) * c)
        ents[j] = site_entropies(iso @ evolved, T.dims)[site]
    bound = np.log(T.dims.factors[site]) + 1e-9
    if len(ents) and ents.max() > bound:
        raise InvariantViolation(f"entropy {ents.max():.12f} above log d bound")
    return OrbitCurve(np.asarray(t_grid, dtype=float), ents, site, probe)


def distinct_value_count(curve: OrbitCurve, bin: float) -> int:
    """Number of distinct entropy values after rounding to multiples of ``bin``."""
    if bin <= 0:
        raise DimensionMismatch("bin must be positive")
    return int(np.unique(np.round(curve.entropies / bin).astype(np.int64)).size)


def default_time_grid(H: HermitianOp, points: int = 64) -> np.ndarray:
    """Uniform grid on [0, 2*pi] in units of the spectral radius of H."""
    rho = float(np.abs(np.linalg.eigvalsh(H.mat)).max())
    if rho == 0.0:
        rho = 1.0
    return np.linspace(0.0, 2.0 * np.pi / rho, points)
